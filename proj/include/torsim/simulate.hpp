#pragma once

#include <cstdint>

#include "torsim/config.hpp"
#include "torsim/readout.hpp"

namespace torsim {

// Synthetic two-channel readout fixture: a common-mode vibration line seen
// by both cavities at the configured gain ratio, suspension-thermal torsion
// noise shaped through the trapped susceptibility (differential), and
// independent white sensing noise per channel. Deterministic per seed.
ReadoutPair simulate_pair(const Config& cfg, double duration_s, std::uint64_t seed);

}  // namespace torsim
