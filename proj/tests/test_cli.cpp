// Black-box tests of the tmpc CLI: usage errors, example output, backend
// equivalence between inproc and tcp, and the bench report plumbing.
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "helpers.hpp"

namespace {

std::string cli() { return std::string(TMPC_CLI_PATH); }

std::string quiet(const std::string& args) {
  return cli() + " " + args + " 2>/dev/null";
}

std::string loopback_rendezvous() {
  return "127.0.0.1:" + std::to_string(test::probe_free_port());
}

constexpr const char* mismatch_line =
    "creation failed: rank 1 signature [I32] incongruent with [F32]\n";

}  // namespace

TEST_CASE("cli usage errors exit with code 64") {
  CHECK(test::run_command(quiet("")).exit_code == 64);
  CHECK(test::run_command(quiet("run")).exit_code == 64);
  CHECK(test::run_command(quiet("run --example no-such-example")).exit_code ==
        64);
  CHECK(test::run_command(quiet("run --example scalar --ranks 1")).exit_code ==
        64);
  CHECK(test::run_command(quiet("run --example scalar --transport tcp"))
            .exit_code == 64);  // tcp needs a rendezvous address
  CHECK(test::run_command(
            quiet("run --example scalar --transport tcp --rendezvous "
                  "127.0.0.1:4242"))
            .exit_code == 64);  // tcp needs --rank or --spawn
  CHECK(test::run_command(
            quiet("run --example scalar --transport tcp --rendezvous "
                  "127.0.0.1:4242 --rank 0 --spawn"))
            .exit_code == 64);  // ... but not both
  CHECK(test::run_command(
            quiet("run --example scalar --transport tcp --rendezvous "
                  "127.0.0.1:4242 --rank 5"))
            .exit_code == 64);  // rank out of range
  CHECK(test::run_command(quiet("run --example scalar --rank 0")).exit_code ==
        64);  // --rank is a tcp flag
  CHECK(test::run_command(quiet("run --example scalar --spawn")).exit_code ==
        64);  // --spawn is a tcp flag
  CHECK(test::run_command(
            quiet("run --example scalar --connect-timeout-ms 0"))
            .exit_code == 64);
  CHECK(test::run_command(quiet("bench --iterations 0")).exit_code == 64);
}

TEST_CASE("cli --help prints usage and exits cleanly") {
  const auto r = test::run_command(cli() + " --help");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("run") != std::string::npos);
  CHECK(r.output.find("bench") != std::string::npos);
}

TEST_CASE("scalar example prints the received value") {
  const auto r = test::run_command(cli() + " run --example scalar");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "received 42.5\n");
}

TEST_CASE("reshape example prints the regrouped grid in flatten order") {
  const auto r = test::run_command(cli() + " run --example reshape");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "1 2 3 4 5 6\n");
}

TEST_CASE("mismatch example prints the diagnosis and exits 0") {
  // Observing exactly the expected creation failure is this example's
  // success condition.
  const auto r = test::run_command(cli() + " run --example mismatch");
  CHECK(r.exit_code == 0);
  CHECK(r.output == mismatch_line);
}

TEST_CASE("ring example walks the token once around the world") {
  // seed 5 + (1 + 2 + 3) contributed by ranks 1..3
  const auto r =
      test::run_command(cli() + " run --example ring --ranks 4 --seed 5");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "token 11\n");
}

TEST_CASE("ring output is a pure function of the seed") {
  const std::string cmd = cli() + " run --example ring --ranks 3 --seed 9";
  const auto first = test::run_command(cmd);
  const auto second = test::run_command(cmd);
  CHECK(first.exit_code == 0);
  CHECK(first.output == second.output);
  CHECK(first.output == "token 12\n");  // 9 + 1 + 2
  const auto other =
      test::run_command(cli() + " run --example ring --ranks 3 --seed 10");
  CHECK(other.output == "token 13\n");
}

TEST_CASE("tcp backend produces byte-identical example output") {
  SUBCASE("scalar") {
    const auto inproc = test::run_command(cli() + " run --example scalar");
    const auto tcp = test::run_command(
        cli() + " run --example scalar --ranks 2 --transport tcp --rendezvous " +
        loopback_rendezvous() + " --spawn --connect-timeout-ms 5000");
    CHECK(tcp.exit_code == inproc.exit_code);
    CHECK(tcp.output == inproc.output);
  }
  SUBCASE("mismatch") {
    const auto tcp = test::run_command(
        cli() +
        " run --example mismatch --ranks 2 --transport tcp --rendezvous " +
        loopback_rendezvous() + " --spawn --connect-timeout-ms 5000");
    CHECK(tcp.exit_code == 0);
    CHECK(tcp.output == mismatch_line);
  }
  SUBCASE("ring across three processes") {
    const auto tcp = test::run_command(
        cli() + " run --example ring --ranks 3 --transport tcp --rendezvous " +
        loopback_rendezvous() + " --spawn --connect-timeout-ms 5000");
    CHECK(tcp.exit_code == 0);
    CHECK(tcp.output == "token 4\n");  // default seed 1, + 1 + 2
  }
}

TEST_CASE("rendezvous address falls back to the environment variable") {
  const auto r = test::run_command(
      "TMPC_RENDEZVOUS=" + loopback_rendezvous() + " " + cli() +
      " run --example scalar --ranks 2 --transport tcp --spawn "
      "--connect-timeout-ms 5000");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "received 42.5\n");
}

TEST_CASE("bench emits one line per payload size and writes the report") {
  const std::string report =
      "/tmp/tmpc_bench_report_" + std::to_string(::getpid()) + ".txt";
  std::filesystem::remove(report);
  const auto r = test::run_command(cli() +
                                   " bench --iterations 25 --warmup 5 "
                                   "--report " +
                                   report);
  CHECK(r.exit_code == 0);
  // One line per payload size, smallest first.
  CHECK(r.output.find("size=4 typed=") != std::string::npos);
  CHECK(r.output.find("size=1024 typed=") != std::string::npos);
  CHECK(r.output.find("size=1048576 typed=") != std::string::npos);
  CHECK(r.output.find(" raw=") != std::string::npos);
  CHECK(r.output.find(" overhead=") != std::string::npos);
  REQUIRE(std::filesystem::exists(report));
  std::filesystem::remove(report);
}
