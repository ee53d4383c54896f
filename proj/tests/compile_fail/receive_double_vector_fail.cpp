// Dynamically sized buffers are type-checked the same way as scalars: a
// vector of double cannot receive from a float communicator.
#include <vector>

#include "tmpc/typed_communicator.hpp"

void misuse(tmpc::Endpoint& endpoint) {
  tmpc::TypedCommunicator<float> comm(endpoint);
  std::vector<double> values(8);
  comm.receive(values, 0, 0);  // vector of double is not a buffer of float
}
