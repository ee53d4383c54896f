// A double is not a float buffer; the send path must reject the widening
// conversion instead of silently accepting it.
#include "tmpc/typed_communicator.hpp"

void misuse(tmpc::Endpoint& endpoint) {
  tmpc::TypedCommunicator<float> comm(endpoint);
  double value = 42.5;
  comm.send(value, 1, 0);  // double is not a buffer of float
}
