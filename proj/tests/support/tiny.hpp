#pragma once

#include "adviser/bounds/tiny.hpp"

namespace fixtures {

using adviser::dyadic_probabilities;
using adviser::tiny_instance;
using adviser::tiny_pool;
using adviser::TinySpec;

}  // namespace fixtures
