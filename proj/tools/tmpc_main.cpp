// The `tmpc` command-line tool: run example programs on an N-rank world, or
// benchmark the typed data path against the bare transport.
#include <unistd.h>

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tmpc/harness.hpp"

namespace {

std::string self_path(const char* argv0) {
  char buf[4096];
  const ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n > 0) {
    buf[n] = '\0';
    return buf;
  }
  return argv0 ? argv0 : "tmpc";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"typed message passing examples and benchmarks"};
  app.require_subcommand(1);

  tmpc::harness::RunConfig run_cfg;
  run_cfg.self_path = self_path(argc > 0 ? argv[0] : nullptr);
  std::string transport = "inproc";
  std::uint32_t join_rank = 0;
  long long timeout_ms = 10000;

  CLI::App* run = app.add_subcommand("run", "run a named example");
  run->add_option("--example", run_cfg.example, "one of: scalar, reshape, mismatch, ring, bench")
      ->required();
  run->add_option("--ranks", run_cfg.ranks, "world size (>= 2)");
  run->add_option("--transport", transport, "inproc or tcp")
      ->check(CLI::IsMember({"inproc", "tcp"}));
  run->add_option("--rendezvous", run_cfg.rendezvous,
                  "host:port of rank 0's rendezvous listener (tcp)")
      ->envname("TMPC_RENDEZVOUS");
  CLI::Option* rank_opt =
      run->add_option("--rank", join_rank, "join a tcp world as this rank");
  run->add_flag("--spawn", run_cfg.spawn,
                "launch every tcp rank as a child process");
  run->add_option("--seed", run_cfg.seed, "seed for randomized examples");
  run->add_option("--connect-timeout-ms", timeout_ms,
                  "tcp world establishment deadline")
      ->envname("TMPC_CONNECT_TIMEOUT_MS");

  tmpc::harness::BenchConfig bench_cfg;
  CLI::App* bench = app.add_subcommand("bench", "measure typed-path overhead");
  bench->add_option("--iterations", bench_cfg.iterations,
                    "measured round trips per payload size");
  bench->add_option("--warmup", bench_cfg.warmup,
                    "untimed round trips before measuring");
  bench->add_option("--report", bench_cfg.report_path,
                    "where to write the machine-readable report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "tmpc: " << e.what() << "\n";
    return tmpc::harness::exit_usage;
  }

  if (run->parsed()) {
    run_cfg.transport = (transport == "tcp") ? tmpc::harness::Transport::Tcp
                                             : tmpc::harness::Transport::Inproc;
    if (rank_opt->count() > 0) run_cfg.rank = join_rank;
    if (timeout_ms <= 0) {
      std::cerr << "tmpc: --connect-timeout-ms must be positive\n";
      return tmpc::harness::exit_usage;
    }
    run_cfg.connect_timeout = std::chrono::milliseconds(timeout_ms);
    return tmpc::harness::run_example(run_cfg, std::cout, std::cerr);
  }
  return tmpc::harness::run_bench(bench_cfg, std::cout, std::cerr);
}
