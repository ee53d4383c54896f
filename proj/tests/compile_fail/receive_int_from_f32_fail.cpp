// Receiving into a 4-byte signed integer from a float communicator must be
// rejected by the compiler, not at run time.
#include <cstdint>

#include "tmpc/typed_communicator.hpp"

void misuse(tmpc::Endpoint& endpoint) {
  tmpc::TypedCommunicator<float> comm(endpoint);
  std::int32_t value = 0;
  comm.receive(value, 0, 0);  // int32 is not a buffer of float
}
