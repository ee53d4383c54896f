#include "tmpc/endpoint.hpp"

#include <stdexcept>

#include "mailbox.hpp"

namespace tmpc {

void Endpoint::send(std::uint32_t dest, Frame f) {
  if (dest >= world_size_) {
    throw InvalidDestinationError(dest, world_size_);
  }
  if (f.source != rank_) {
    throw std::invalid_argument("frame source must equal the sending rank");
  }
  const auto k = static_cast<std::size_t>(f.kind);
  stats_.frames_sent[k] += 1;
  stats_.wire_bytes_sent[k] += encoded_size(f);
  do_send(dest, std::move(f));
}

Frame Endpoint::recv_match(FrameKind kind, std::uint32_t source,
                           std::uint32_t context, std::uint32_t tag) {
  if (source >= world_size_) {
    throw std::invalid_argument("receive source rank out of range");
  }
  Frame f = mailbox_->take_match(kind, source, context, tag);
  stats_.frames_received[static_cast<std::size_t>(kind)] += 1;
  return f;
}

}  // namespace tmpc
