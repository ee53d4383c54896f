// In-process transport: delivery, matching, ordering, failure semantics.
// Worker threads only collect data; all assertions run on the test thread.
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <random>
#include <thread>

#include "helpers.hpp"
#include "tmpc/endpoint.hpp"
#include "tmpc/errors.hpp"

using tmpc::Frame;
using tmpc::FrameKind;

namespace {

Frame data_frame(std::uint32_t source, std::uint32_t context, std::uint32_t tag,
                 std::uint64_t value) {
  Frame f;
  f.kind = FrameKind::Data;
  f.source = source;
  f.context = context;
  f.tag = tag;
  f.element_count = 1;
  f.payload.resize(8);
  for (int i = 0; i < 8; ++i) {
    f.payload[i] = static_cast<std::byte>((value >> (8 * i)) & 0xff);
  }
  return f;
}

std::uint64_t frame_value(const Frame& f) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= std::to_integer<std::uint64_t>(f.payload[i]) << (8 * i);
  }
  return v;
}

}  // namespace

TEST_CASE("a world hands out one endpoint per rank") {
  CHECK_THROWS_AS(tmpc::spawn_inproc_world(0), std::invalid_argument);
  auto world = tmpc::spawn_inproc_world(3);
  REQUIRE(world.size() == 3);
  for (std::uint32_t r = 0; r < 3; ++r) {
    CHECK(world[r]->rank() == r);
    CHECK(world[r]->world_size() == 3);
  }
}

TEST_CASE("self-send delivers through the own mailbox") {
  auto world = tmpc::spawn_inproc_world(1);
  world[0]->send(0, data_frame(0, 1, 7, 99));
  const Frame f = world[0]->recv_match(FrameKind::Data, 0, 1, 7);
  CHECK(frame_value(f) == 99);
}

TEST_CASE("destination and source ranks are validated") {
  auto world = tmpc::spawn_inproc_world(2);
  CHECK_THROWS_AS(world[0]->send(2, data_frame(0, 1, 0, 1)),
                  tmpc::InvalidDestinationError);
  // a frame must name its sender truthfully
  CHECK_THROWS_AS(world[0]->send(1, data_frame(1, 1, 0, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(world[0]->recv_match(FrameKind::Data, 5, 1, 0),
                  std::invalid_argument);
}

TEST_CASE("matching is exact; non-matching frames stay put in order") {
  auto world = tmpc::spawn_inproc_world(2);
  world[0]->send(1, data_frame(0, 1, 5, 100));  // different tag
  world[0]->send(1, data_frame(0, 2, 0, 200));  // different context
  world[0]->send(1, data_frame(0, 1, 0, 300));  // the one we want
  world[0]->send(1, data_frame(0, 1, 0, 400));

  const Frame hit = world[1]->recv_match(FrameKind::Data, 0, 1, 0);
  CHECK(frame_value(hit) == 300);  // earliest full-key match, not 100
  CHECK(frame_value(world[1]->recv_match(FrameKind::Data, 0, 1, 0)) == 400);
  // the skipped frames are still there
  CHECK(frame_value(world[1]->recv_match(FrameKind::Data, 0, 1, 5)) == 100);
  CHECK(frame_value(world[1]->recv_match(FrameKind::Data, 0, 2, 0)) == 200);
}

TEST_CASE("receive blocks until a matching frame arrives") {
  auto world = tmpc::spawn_inproc_world(2);
  std::atomic<bool> received{false};
  std::uint64_t value = 0;
  std::thread receiver([&] {
    const Frame f = world[1]->recv_match(FrameKind::Data, 0, 1, 0);
    value = frame_value(f);
    received.store(true);
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  CHECK(!received.load());
  world[0]->send(1, data_frame(0, 1, 0, 777));
  receiver.join();
  CHECK(received.load());
  CHECK(value == 777);
}

TEST_CASE("shutdown wakes blocked receivers with WorldShutdownError") {
  auto world = tmpc::spawn_inproc_world(2);
  std::atomic<bool> threw{false};
  std::thread receiver([&] {
    try {
      world[1]->recv_match(FrameKind::Data, 0, 1, 0);
    } catch (const tmpc::WorldShutdownError&) {
      threw.store(true);
    }
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  world[0]->shutdown();
  receiver.join();
  CHECK(threw.load());
  // and stays failed for later receives
  CHECK_THROWS_AS(world[0]->recv_match(FrameKind::Data, 1, 1, 0),
                  tmpc::WorldShutdownError);
}

TEST_CASE("pending frames can still be drained after shutdown") {
  auto world = tmpc::spawn_inproc_world(2);
  world[0]->send(1, data_frame(0, 1, 0, 42));
  world[1]->shutdown();
  CHECK(frame_value(world[1]->recv_match(FrameKind::Data, 0, 1, 0)) == 42);
  CHECK_THROWS_AS(world[1]->recv_match(FrameKind::Data, 0, 1, 0),
                  tmpc::WorldShutdownError);
}

TEST_CASE("stats account frames and encoded wire bytes by kind") {
  auto world = tmpc::spawn_inproc_world(2);
  const Frame f = data_frame(0, 1, 0, 5);
  world[0]->send(1, f);
  world[0]->send(1, f);
  const auto& stats = world[0]->stats();
  CHECK(stats.sent(FrameKind::Data) == 2);
  CHECK(stats.wire_bytes(FrameKind::Data) == 2 * (43 + f.payload.size()));
  CHECK(stats.sent(FrameKind::HandshakeDescriptor) == 0);
  CHECK(stats.handshake_frames_sent() == 0);
  world[1]->recv_match(FrameKind::Data, 0, 1, 0);
  CHECK(world[1]->stats().received(FrameKind::Data) == 1);
}

TEST_CASE("non-overtaking under randomized 4-rank stress, no loss, no dups") {
  constexpr std::uint32_t n = 4;
  constexpr std::uint32_t tags = 3;
  constexpr std::uint64_t per_key = 100;  // messages per (source, tag)

  // Per receiver: sequences observed per (source, tag), in arrival order.
  using Key = std::pair<std::uint32_t, std::uint32_t>;
  std::vector<std::map<Key, std::vector<std::uint64_t>>> seen(n);

  auto thrown = test::run_ranks(n, [&](std::uint32_t rank, tmpc::Endpoint& ep) {
    std::mt19937_64 rng(1000 + rank);
    // Everyone sends per_key messages for every (dest, tag), tag-interleaved
    // in random order so the mailbox sees shuffled traffic.
    // One sequence counter per (dest, tag); each step picks a random key
    // that still has messages left, so keys interleave arbitrarily while
    // every key's own sequence stays ascending.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> open;  // (dest, tag)
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> next_seq;
    for (std::uint32_t dest = 0; dest < n; ++dest) {
      if (dest == rank) continue;
      for (std::uint32_t tag = 0; tag < tags; ++tag) {
        open.push_back({dest, tag});
        next_seq[{dest, tag}] = 0;
      }
    }
    while (!open.empty()) {
      const std::size_t pick = rng() % open.size();
      const auto [dest, tag] = open[pick];
      const std::uint64_t seq = next_seq[{dest, tag}]++;
      ep.send(dest, data_frame(rank, 1, tag, seq));
      if (seq + 1 == per_key) {
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
      }
    }
    // Receive everything addressed to us, draining keys in random order.
    std::vector<Key> keys;
    for (std::uint32_t source = 0; source < n; ++source) {
      if (source == rank) continue;
      for (std::uint32_t tag = 0; tag < tags; ++tag) {
        keys.push_back({source, tag});
      }
    }
    std::shuffle(keys.begin(), keys.end(), rng);
    for (const auto& key : keys) {
      for (std::uint64_t i = 0; i < per_key; ++i) {
        const Frame f =
            ep.recv_match(FrameKind::Data, key.first, 1, key.second);
        seen[rank][key].push_back(frame_value(f));
      }
    }
  });

  for (const auto& e : thrown) CHECK(!e);
  std::uint64_t violations = 0;
  for (std::uint32_t rank = 0; rank < n; ++rank) {
    REQUIRE(seen[rank].size() == (n - 1) * tags);
    for (const auto& [key, seqs] : seen[rank]) {
      REQUIRE(seqs.size() == per_key);
      for (std::uint64_t i = 0; i < per_key; ++i) {
        if (seqs[i] != i) ++violations;  // also catches loss and duplication
      }
    }
  }
  CHECK(violations == 0);
}
