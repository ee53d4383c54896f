// Convenience umbrella: the whole public surface in one include.
#pragma once

#include "tmpc/buffer.hpp"
#include "tmpc/communicator.hpp"
#include "tmpc/descriptor.hpp"
#include "tmpc/endpoint.hpp"
#include "tmpc/errors.hpp"
#include "tmpc/frame.hpp"
#include "tmpc/fundamental.hpp"
#include "tmpc/harness.hpp"
#include "tmpc/signature.hpp"
#include "tmpc/tcp.hpp"
#include "tmpc/typed_communicator.hpp"
