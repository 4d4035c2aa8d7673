#pragma once

#include <cstdint>
#include <vector>

#include "ssemc/corpus.hpp"

namespace ssemc {

/// Deterministic synthetic car-evaluation dataset: three classes with fixed
/// priors and per-class attribute distributions. Same seed, same records.
std::vector<CarRecord> generate_car_records(std::uint64_t seed, int rows);

}  // namespace ssemc
