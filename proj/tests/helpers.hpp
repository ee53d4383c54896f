// Shared test machinery: an independent hash reference, random descriptor
// generators, a multi-rank thread driver, and small process utilities.
#pragma once

#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tmpc/descriptor.hpp"
#include "tmpc/endpoint.hpp"
#include "tmpc/signature.hpp"

namespace test {

// Reference FNV-1a 64, written against the published constants so the
// library's hash is checked by a second, independent implementation.
inline std::uint64_t reference_fnv1a(const std::vector<std::byte>& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const std::byte b : data) {
    h ^= std::to_integer<std::uint64_t>(b);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline tmpc::FundamentalKind random_kind(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(
      0, tmpc::all_fundamental_kinds.size() - 1);
  return tmpc::all_fundamental_kinds[pick(rng)];
}

// Random descriptor: depth <= 4, array lengths <= 8, records <= 5 fields.
inline tmpc::TypeDescriptor random_descriptor(std::mt19937_64& rng,
                                              int depth = 0) {
  std::uniform_int_distribution<int> shape(0, depth >= 4 ? 0 : 3);
  const int choice = shape(rng);
  if (choice <= 1) {
    return tmpc::TypeDescriptor::fundamental(random_kind(rng));
  }
  if (choice == 2) {
    std::uniform_int_distribution<std::uint32_t> len(1, 8);
    return tmpc::TypeDescriptor::array_of(random_descriptor(rng, depth + 1),
                                          len(rng));
  }
  std::uniform_int_distribution<int> nfields(1, 5);
  std::vector<std::pair<std::string, tmpc::TypeDescriptor>> fields;
  const int n = nfields(rng);
  for (int i = 0; i < n; ++i) {
    fields.emplace_back("f" + std::to_string(i),
                        random_descriptor(rng, depth + 1));
  }
  return tmpc::TypeDescriptor::record(std::move(fields));
}

namespace detail {

// Rebuilds some structure over kinds[begin, end): the result's flatten is
// exactly that kind sequence, but the nesting is chosen at random.
inline tmpc::TypeDescriptor regroup(std::span<const tmpc::FundamentalKind> kinds,
                                    std::mt19937_64& rng, int depth) {
  if (kinds.size() == 1) {
    auto leaf = tmpc::TypeDescriptor::fundamental(kinds[0]);
    if (depth < 4 && rng() % 4 == 0) {
      // wrap in a one-field record or a length-1 array now and then
      if (rng() % 2 == 0) {
        return tmpc::TypeDescriptor::array_of(std::move(leaf), 1);
      }
      std::vector<std::pair<std::string, tmpc::TypeDescriptor>> fields;
      fields.emplace_back("w", std::move(leaf));
      return tmpc::TypeDescriptor::record(std::move(fields));
    }
    return leaf;
  }
  // All components equal → sometimes fold into an array.
  bool uniform = true;
  for (const auto k : kinds) {
    if (k != kinds[0]) uniform = false;
  }
  if (uniform && depth < 4 && rng() % 2 == 0) {
    // pick a divisor m > 1 of the length
    std::vector<std::uint32_t> divisors;
    for (std::uint32_t m = 2; m <= kinds.size(); ++m) {
      if (kinds.size() % m == 0) divisors.push_back(m);
    }
    const std::uint32_t m = divisors[rng() % divisors.size()];
    return tmpc::TypeDescriptor::array_of(
        regroup(kinds.subspan(0, kinds.size() / m), rng, depth + 1), m);
  }
  // Otherwise split into a record of 2..4 consecutive chunks.
  const std::size_t parts =
      std::min<std::size_t>(2 + rng() % 3, kinds.size());
  std::vector<std::pair<std::string, tmpc::TypeDescriptor>> fields;
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts; ++p) {
    const std::size_t remaining = kinds.size() - offset;
    const std::size_t slots_left = parts - p;
    std::size_t take = remaining - (slots_left - 1);  // leave 1 per later slot
    if (slots_left > 1 && take > 1) take = 1 + rng() % take;
    fields.emplace_back("f" + std::to_string(p),
                        regroup(kinds.subspan(offset, take), rng, depth + 1));
    offset += take;
  }
  return tmpc::TypeDescriptor::record(std::move(fields));
}

}  // namespace detail

// A descriptor with the same flattened signature as `d` but (usually)
// different structure.
inline tmpc::TypeDescriptor congruent_variant(const tmpc::TypeDescriptor& d,
                                              std::mt19937_64& rng) {
  const tmpc::FlatSignature sig = tmpc::flatten(d);
  return detail::regroup(sig.kinds(), rng, 0);
}

// Runs body(rank, endpoint) on one thread per rank of a fresh in-process
// world; returns what each rank threw (null when it completed). A throwing
// rank shuts the world down so no sibling blocks forever.
inline std::vector<std::exception_ptr> run_ranks(
    std::uint32_t n,
    const std::function<void(std::uint32_t, tmpc::Endpoint&)>& body) {
  auto world = tmpc::spawn_inproc_world(n);
  std::vector<std::exception_ptr> thrown(n);
  std::vector<std::thread> threads;
  threads.reserve(n);
  for (std::uint32_t r = 0; r < n; ++r) {
    threads.emplace_back([&, r] {
      try {
        body(r, *world[r]);
      } catch (...) {
        thrown[r] = std::current_exception();
        world[r]->shutdown();
      }
    });
  }
  for (auto& t : threads) t.join();
  return thrown;
}

// An ephemeral TCP port that was free a moment ago.
inline std::uint16_t probe_free_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ::bind(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr));
  socklen_t len = sizeof(addr);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout only unless the command redirects
};

// Runs a shell command, capturing stdout and the exit code.
inline CommandResult run_command(const std::string& command) {
  CommandResult result;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) return result;
  char buf[512];
  while (std::fgets(buf, sizeof(buf), pipe)) result.output += buf;
  const int status = ::pclose(pipe);
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  return result;
}

}  // namespace test
