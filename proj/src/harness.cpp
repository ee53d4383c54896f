#include "tmpc/harness.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "tmpc/buffer.hpp"
#include "tmpc/communicator.hpp"
#include "tmpc/tcp.hpp"
#include "tmpc/typed_communicator.hpp"

namespace tmpc::harness {

const std::vector<std::string> example_names = {"scalar", "reshape", "mismatch",
                                                "ring", "bench"};

namespace {

// What one rank concluded. `output` is printed (in rank order for inproc
// worlds) only after every rank finished, so prints never interleave.
struct RankOutcome {
  bool met = false;
  std::string detail;  // set when the expectation was not met
  std::string output;
};

RankOutcome run_scalar(Endpoint& ep, const RunConfig&) {
  RankOutcome rc;
  std::ostringstream out;
  TypedCommunicator<float> comm(ep);
  if (ep.rank() == 0) {
    comm.send(42.5f, 1, 0);
    rc.met = true;
  } else if (ep.rank() == 1) {
    float value = 0.0f;
    comm.receive(value, 0, 0);
    out << "received " << value << "\n";
    if (value == 42.5f) {
      rc.met = true;
    } else {
      rc.detail = "expected 42.5, got " + std::to_string(value);
    }
  } else {
    rc.met = true;  // joined the creation; nothing else to do
  }
  rc.output = out.str();
  return rc;
}

RankOutcome run_reshape(Endpoint& ep, const RunConfig&) {
  RankOutcome rc;
  std::ostringstream out;
  if (ep.rank() == 1) {
    // The receiving side binds the SAME communicator to a 2x3 element type;
    // creation succeeds because both shapes flatten to six F32 components.
    TypedCommunicator<std::array<std::array<float, 3>, 2>> comm(ep);
    std::array<std::array<float, 3>, 2> received{};
    comm.receive(received, 0, 0);
    bool ok = true;
    float expected = 1.0f;
    for (const auto& row : received) {
      for (const float v : row) {
        if (v != expected) ok = false;
        expected += 1.0f;
      }
    }
    for (std::size_t r = 0; r < received.size(); ++r) {
      for (std::size_t c = 0; c < received[r].size(); ++c) {
        out << received[r][c] << ((r == 1 && c == 2) ? "\n" : " ");
      }
    }
    rc.met = ok;
    if (!ok) rc.detail = "received values out of flatten order";
  } else {
    TypedCommunicator<std::array<std::array<float, 2>, 3>> comm(ep);
    if (ep.rank() == 0) {
      const std::array<std::array<float, 2>, 3> data{
          {{1.0f, 2.0f}, {3.0f, 4.0f}, {5.0f, 6.0f}}};
      comm.send(data, 1, 0);
    }
    rc.met = true;
  }
  rc.output = out.str();
  return rc;
}

RankOutcome run_mismatch(Endpoint& ep, const RunConfig&) {
  RankOutcome rc;
  std::ostringstream out;
  try {
    if (ep.rank() == 1) {
      TypedCommunicator<std::int32_t> comm(ep);
    } else {
      TypedCommunicator<float> comm(ep);
    }
    rc.detail = "creation unexpectedly succeeded";
  } catch (const CreationError& e) {
    if (e.offending_rank() != 1) {
      rc.detail = "wrong offending rank " + std::to_string(e.offending_rank());
    } else if (ep.rank() == 0 &&
               (to_string(e.remote_signature()) != "[I32]" ||
                to_string(e.local_signature()) != "[F32]")) {
      rc.detail = "wrong signatures " + to_string(e.remote_signature()) +
                  " vs " + to_string(e.local_signature());
    } else {
      rc.met = true;
      if (ep.rank() == 0) {
        out << "creation failed: rank " << e.offending_rank() << " signature "
            << to_string(e.remote_signature()) << " incongruent with "
            << to_string(e.local_signature()) << "\n";
      }
    }
  }
  rc.output = out.str();
  return rc;
}

RankOutcome run_ring(Endpoint& ep, const RunConfig& cfg) {
  RankOutcome rc;
  std::ostringstream out;
  TypedCommunicator<std::uint64_t> comm(ep);
  const std::uint32_t n = ep.world_size();
  const std::uint32_t r = ep.rank();
  if (r == 0) {
    comm.send(cfg.seed, 1 % n, 0);
    std::uint64_t token = 0;
    comm.receive(token, n - 1, 0);
    // Every forwarding rank added its own id.
    const std::uint64_t expected =
        cfg.seed + static_cast<std::uint64_t>(n) * (n - 1) / 2;
    out << "token " << token << "\n";
    if (token == expected) {
      rc.met = true;
    } else {
      rc.detail = "expected token " + std::to_string(expected) + ", got " +
                  std::to_string(token);
    }
  } else {
    std::uint64_t token = 0;
    comm.receive(token, r - 1, 0);
    comm.send(token + r, (r + 1) % n, 0);
    rc.met = true;
  }
  rc.output = out.str();
  return rc;
}

RankOutcome run_rank(const std::string& example, Endpoint& ep,
                     const RunConfig& cfg) {
  if (example == "scalar") return run_scalar(ep, cfg);
  if (example == "reshape") return run_reshape(ep, cfg);
  if (example == "mismatch") return run_mismatch(ep, cfg);
  return run_ring(ep, cfg);
}

int usage_error(std::ostream& err, const std::string& message) {
  err << "tmpc: " << message << "\n";
  return exit_usage;
}

int aggregate(const std::vector<RankOutcome>& outcomes,
              const std::vector<std::string>& failures, std::ostream& out,
              std::ostream& err) {
  for (const auto& rc : outcomes) out << rc.output;
  out.flush();
  if (!failures.empty()) {
    for (const auto& f : failures) err << "tmpc: " << f << "\n";
    return exit_unexpected;
  }
  int code = exit_ok;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    if (!outcomes[r].met) {
      err << "tmpc: rank " << r << ": " << outcomes[r].detail << "\n";
      code = exit_expectation_failed;
    }
  }
  return code;
}

int run_inproc(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto endpoints = spawn_inproc_world(cfg.ranks);
  std::vector<RankOutcome> outcomes(cfg.ranks);
  std::vector<std::string> failures;
  std::mutex failures_mutex;
  std::vector<std::thread> threads;
  threads.reserve(cfg.ranks);
  for (std::uint32_t r = 0; r < cfg.ranks; ++r) {
    threads.emplace_back([&, r] {
      try {
        outcomes[r] = run_rank(cfg.example, *endpoints[r], cfg);
      } catch (const std::exception& e) {
        {
          std::lock_guard lock(failures_mutex);
          failures.push_back("rank " + std::to_string(r) + ": " + e.what());
        }
        // Release ranks that would otherwise block forever on this one.
        endpoints[r]->shutdown();
      }
    });
  }
  for (auto& t : threads) t.join();
  return aggregate(outcomes, failures, out, err);
}

int run_tcp_single(const RunConfig& cfg, std::uint32_t rank, std::ostream& out,
                   std::ostream& err) {
  std::vector<RankOutcome> outcomes(1);
  std::vector<std::string> failures;
  try {
    TcpOptions options;
    options.connect_timeout = cfg.connect_timeout;
    auto ep = connect_tcp_world(cfg.rendezvous, rank, cfg.ranks, options);
    outcomes[0] = run_rank(cfg.example, *ep, cfg);
  } catch (const std::exception& e) {
    failures.push_back("rank " + std::to_string(rank) + ": " + e.what());
  }
  return aggregate(outcomes, failures, out, err);
}

int run_tcp_spawn(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  out.flush();
  err.flush();
  std::vector<pid_t> children;
  children.reserve(cfg.ranks);
  for (std::uint32_t r = 0; r < cfg.ranks; ++r) {
    const pid_t pid = ::fork();
    if (pid < 0) {
      err << "tmpc: fork failed\n";
      for (const pid_t child : children) ::kill(child, SIGKILL);
      return exit_unexpected;
    }
    if (pid == 0) {
      std::vector<std::string> args = {
          cfg.self_path,
          "run",
          "--example", cfg.example,
          "--ranks", std::to_string(cfg.ranks),
          "--transport", "tcp",
          "--rendezvous", cfg.rendezvous,
          "--rank", std::to_string(r),
          "--seed", std::to_string(cfg.seed),
          "--connect-timeout-ms", std::to_string(cfg.connect_timeout.count()),
      };
      std::vector<char*> argv;
      argv.reserve(args.size() + 1);
      for (auto& a : args) argv.push_back(a.data());
      argv.push_back(nullptr);
      ::execv(cfg.self_path.c_str(), argv.data());
      ::_exit(127);  // exec failed
    }
    children.push_back(pid);
  }
  int code = exit_ok;
  for (const pid_t child : children) {
    int status = 0;
    ::waitpid(child, &status, 0);
    if (!WIFEXITED(status)) {
      err << "tmpc: a rank process died abnormally\n";
      code = std::max(code, exit_unexpected);
      continue;
    }
    const int child_code = WEXITSTATUS(status);
    if (child_code == 127) {
      err << "tmpc: could not re-exec " << cfg.self_path << "\n";
    }
    code = std::max(code, child_code);
  }
  return code;
}

}  // namespace

int run_example(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (std::find(example_names.begin(), example_names.end(), cfg.example) ==
      example_names.end()) {
    return usage_error(err, "unknown example '" + cfg.example + "'");
  }
  if (cfg.ranks < 2) {
    return usage_error(err, "examples need --ranks >= 2");
  }
  if (cfg.example == "bench") {
    if (cfg.transport != Transport::Inproc || cfg.ranks != 2) {
      return usage_error(err, "bench runs on --transport inproc --ranks 2");
    }
    return run_bench(BenchConfig{}, out, err);
  }
  if (cfg.transport == Transport::Inproc) {
    if (cfg.rank || cfg.spawn) {
      return usage_error(err, "--rank/--spawn only apply to --transport tcp");
    }
    return run_inproc(cfg, out, err);
  }
  if (cfg.rendezvous.empty()) {
    return usage_error(err, "--transport tcp needs --rendezvous host:port");
  }
  if (cfg.rank && cfg.spawn) {
    return usage_error(err, "--rank and --spawn are mutually exclusive");
  }
  if (!cfg.rank && !cfg.spawn) {
    return usage_error(err, "--transport tcp needs --rank <r> or --spawn");
  }
  if (cfg.rank) {
    if (*cfg.rank >= cfg.ranks) {
      return usage_error(err, "--rank must be smaller than --ranks");
    }
    return run_tcp_single(cfg, *cfg.rank, out, err);
  }
  if (cfg.self_path.empty()) {
    return usage_error(err, "--spawn needs the path of this binary");
  }
  return run_tcp_spawn(cfg, out, err);
}

// ---- benchmark -----------------------------------------------------------

namespace {

std::uint64_t median_ns(std::vector<std::uint64_t>& samples) {
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

// One echo round trip per iteration, timed on rank 0. Both paths copy the
// application buffer in and out on both sides, so the comparison isolates
// the typed layer's own bookkeeping.
struct PhaseResult {
  std::vector<std::uint64_t> samples;
  std::uint64_t data_wire_bytes = 0;  // rank 0's DATA bytes on the wire
};

PhaseResult run_typed_phase(std::size_t count, std::uint64_t iterations,
                            std::uint64_t warmup) {
  auto world = spawn_inproc_world(2);
  PhaseResult result;
  result.samples.reserve(iterations);
  std::thread echo([&] {
    TypedCommunicator<float> comm(*world[1]);
    std::vector<float> buffer(count);
    for (std::uint64_t i = 0; i < warmup + iterations; ++i) {
      comm.receive(buffer, 0, 0);
      comm.send(buffer, 0, 0);
    }
  });
  {
    TypedCommunicator<float> comm(*world[0]);
    std::vector<float> data(count, 1.5f);
    std::vector<float> back(count);
    for (std::uint64_t i = 0; i < warmup + iterations; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      comm.send(data, 1, 0);
      comm.receive(back, 1, 0);
      const auto t1 = std::chrono::steady_clock::now();
      if (i >= warmup) {
        result.samples.push_back(static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
                .count()));
      }
    }
  }
  echo.join();
  result.data_wire_bytes = world[0]->stats().wire_bytes(FrameKind::Data);
  return result;
}

PhaseResult run_raw_phase(std::size_t count, std::uint64_t iterations,
                          std::uint64_t warmup) {
  auto world = spawn_inproc_world(2);
  PhaseResult result;
  result.samples.reserve(iterations);
  const std::size_t bytes = count * sizeof(float);
  const std::uint64_t hash =
      signature_hash(FlatSignature({FundamentalKind::F32})).value;
  std::thread echo([&] {
    std::vector<float> buffer(count);
    for (std::uint64_t i = 0; i < warmup + iterations; ++i) {
      Frame in = world[1]->recv_match(FrameKind::Data, 0, 1, 0);
      std::memcpy(buffer.data(), in.payload.data(), bytes);
      Frame reply;
      reply.kind = FrameKind::Data;
      reply.source = 1;
      reply.context = 1;
      reply.tag = 0;
      reply.type_hash = hash;
      reply.element_count = count;
      reply.payload.resize(bytes);
      std::memcpy(reply.payload.data(), buffer.data(), bytes);
      world[1]->send(0, std::move(reply));
    }
  });
  {
    std::vector<float> data(count, 1.5f);
    std::vector<float> back(count);
    for (std::uint64_t i = 0; i < warmup + iterations; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      Frame f;
      f.kind = FrameKind::Data;
      f.source = 0;
      f.context = 1;
      f.tag = 0;
      f.type_hash = hash;
      f.element_count = count;
      f.payload.resize(bytes);
      std::memcpy(f.payload.data(), data.data(), bytes);
      world[0]->send(1, std::move(f));
      Frame in = world[0]->recv_match(FrameKind::Data, 1, 1, 0);
      std::memcpy(back.data(), in.payload.data(), bytes);
      const auto t1 = std::chrono::steady_clock::now();
      if (i >= warmup) {
        result.samples.push_back(static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
                .count()));
      }
    }
  }
  echo.join();
  result.data_wire_bytes = world[0]->stats().wire_bytes(FrameKind::Data);
  return result;
}

}  // namespace

int run_bench(const BenchConfig& cfg, std::ostream& out, std::ostream& err,
              std::vector<BenchReport>* reports) {
  if (cfg.iterations == 0) {
    return usage_error(err, "--iterations must be >= 1");
  }
  static constexpr std::array<std::size_t, 3> payload_sizes = {
      4, 1024, 1024 * 1024};
  std::ostringstream lines;
  for (const std::size_t size : payload_sizes) {
    const std::size_t count = size / sizeof(float);
    PhaseResult typed = run_typed_phase(count, cfg.iterations, cfg.warmup);
    PhaseResult raw = run_raw_phase(count, cfg.iterations, cfg.warmup);
    if (typed.data_wire_bytes != raw.data_wire_bytes) {
      err << "tmpc: bench invariant broken: typed and raw phases moved "
          << typed.data_wire_bytes << " vs " << raw.data_wire_bytes
          << " wire bytes\n";
      return exit_unexpected;
    }
    BenchReport report;
    report.payload_size = size;
    report.iterations = cfg.iterations;
    report.typed_median_ns = median_ns(typed.samples);
    report.raw_median_ns = median_ns(raw.samples);
    report.overhead_percent =
        (static_cast<double>(report.typed_median_ns) -
         static_cast<double>(report.raw_median_ns)) /
        static_cast<double>(report.raw_median_ns) * 100.0;
    std::ostringstream line;
    line << "size=" << report.payload_size << " typed=" << report.typed_median_ns
         << " raw=" << report.raw_median_ns << " overhead=" << std::fixed
         << std::setprecision(2) << report.overhead_percent;
    out << line.str() << "\n";
    lines << line.str() << "\n";
    if (reports) reports->push_back(report);
  }
  std::ofstream file(cfg.report_path);
  if (!file) {
    err << "tmpc: cannot write " << cfg.report_path << "\n";
    return exit_unexpected;
  }
  file << lines.str();
  return exit_ok;
}

}  // namespace tmpc::harness
