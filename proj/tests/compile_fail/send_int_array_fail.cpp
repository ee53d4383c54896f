// Arrays of the wrong scalar are rejected even though their byte size could
// coincide with a valid float buffer.
#include <array>
#include <cstdint>

#include "tmpc/typed_communicator.hpp"

void misuse(tmpc::Endpoint& endpoint) {
  tmpc::TypedCommunicator<float> comm(endpoint);
  std::array<std::int32_t, 4> values{};
  comm.send(values, 1, 0);  // array of int32 is not a buffer of float
}
