#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace fluxsense {

using Rng = std::mt19937_64;

// Named, order-independent random substreams derived from one master seed.
// The same (master, name, keys) triple always yields the same generator, no
// matter how many other substreams were drawn before it.
Rng substream(std::uint64_t master, std::string_view name,
              std::initializer_list<std::uint64_t> keys = {});

double standard_normal(Rng &rng);
double uniform01(Rng &rng);

} // namespace fluxsense
