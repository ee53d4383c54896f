// In-process world: n endpoints wired through shared mailboxes.
#include <deque>
#include <memory>
#include <stdexcept>

#include "mailbox.hpp"
#include "tmpc/endpoint.hpp"

namespace tmpc {

namespace {

class InprocWorld {
 public:
  explicit InprocWorld(std::uint32_t n) : mailboxes_(n) {}

  detail::Mailbox& mailbox(std::uint32_t rank) { return mailboxes_[rank]; }

  void shutdown() {
    for (auto& mb : mailboxes_) mb.fail(detail::Mailbox::FailReason::Shutdown);
  }

 private:
  std::deque<detail::Mailbox> mailboxes_;
};

class InprocEndpoint final : public Endpoint {
 public:
  InprocEndpoint(std::shared_ptr<InprocWorld> world, std::uint32_t rank,
                 std::uint32_t world_size)
      : Endpoint(rank, world_size), world_(std::move(world)) {
    mailbox_ = &world_->mailbox(rank);
  }

  void shutdown() override { world_->shutdown(); }

 protected:
  void do_send(std::uint32_t dest, Frame f) override {
    world_->mailbox(dest).push(std::move(f));
  }

 private:
  std::shared_ptr<InprocWorld> world_;
};

}  // namespace

std::vector<std::unique_ptr<Endpoint>> spawn_inproc_world(std::uint32_t n) {
  if (n == 0) {
    throw std::invalid_argument("world size must be >= 1");
  }
  auto world = std::make_shared<InprocWorld>(n);
  std::vector<std::unique_ptr<Endpoint>> endpoints;
  endpoints.reserve(n);
  for (std::uint32_t r = 0; r < n; ++r) {
    endpoints.push_back(std::make_unique<InprocEndpoint>(world, r, n));
  }
  return endpoints;
}

}  // namespace tmpc
