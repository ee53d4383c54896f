// TCP backend: star rendezvous at rank 0 followed by a full peer mesh.
#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

#include "tmpc/endpoint.hpp"

namespace tmpc {

struct TcpOptions {
  // Covers rendezvous and mesh establishment as one deadline.
  std::chrono::milliseconds connect_timeout{10000};
};

// Joins a world of `world_size` ranks. Rank 0 listens at `rendezvous`
// ("host:port"), collects every joiner's rank and data-listener port, then
// distributes the peer table; each pair then opens exactly one direct
// connection (lower rank connects to the higher rank's listener). The
// returned endpoint behaves identically to the in-process backend.
// Throws TimeoutError, DuplicateRankError, ConnectionLostError,
// std::invalid_argument (rank >= world_size, bad address).
std::unique_ptr<Endpoint> connect_tcp_world(const std::string& rendezvous,
                                            std::uint32_t rank,
                                            std::uint32_t world_size,
                                            const TcpOptions& options = {});

}  // namespace tmpc
