// Example launcher and benchmark behind the `tmpc` command-line tool.
#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tmpc::harness {

// Exit-code contract shared by every example run:
//   0  expectation met (for `mismatch`, observing the expected CreationError
//      IS the expectation),
//   1  unexpected failure (stray exception, dead transport, crashed rank),
//   2  ran to completion but the expectation was not met,
//   64 usage error, reported to standard error.
inline constexpr int exit_ok = 0;
inline constexpr int exit_unexpected = 1;
inline constexpr int exit_expectation_failed = 2;
inline constexpr int exit_usage = 64;

enum class Transport { Inproc, Tcp };

struct RunConfig {
  std::uint32_t ranks = 2;
  Transport transport = Transport::Inproc;
  std::string example;
  std::string rendezvous;                // required for tcp
  std::optional<std::uint32_t> rank;     // tcp: join as this one rank
  bool spawn = false;                    // tcp: fork one process per rank
  std::uint64_t seed = 1;
  std::chrono::milliseconds connect_timeout{10000};
  std::string self_path;                 // this binary, for --spawn re-exec
};

struct BenchConfig {
  std::uint64_t iterations = 1000;  // measured round trips per payload size
  std::uint64_t warmup = 100;
  std::string report_path = "bench_report.txt";
};

struct BenchReport {
  std::size_t payload_size = 0;  // bytes per message
  std::uint64_t iterations = 0;
  std::uint64_t typed_median_ns = 0;
  std::uint64_t raw_median_ns = 0;
  double overhead_percent = 0.0;
};

// Known example names: scalar, reshape, mismatch, ring, bench.
extern const std::vector<std::string> example_names;

// Runs one example per `config`; rank outputs go to `out` in rank order,
// diagnostics to `err`. Returns an exit code per the contract above.
int run_example(const RunConfig& config, std::ostream& out, std::ostream& err);

// Round-trip latency of the typed data path versus the bare transport, over
// payloads of 4 B, 1 KiB and 1 MiB on a 2-rank in-process world. Prints one
// `size=<n> typed=<ns> raw=<ns> overhead=<pct>` line per payload size and
// writes the same lines to config.report_path. When `reports` is non-null the
// measured numbers are appended to it.
int run_bench(const BenchConfig& config, std::ostream& out, std::ostream& err,
              std::vector<BenchReport>* reports = nullptr);

}  // namespace tmpc::harness
