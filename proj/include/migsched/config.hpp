#pragma once

#include <string>

#include "migsched/sim.hpp"

namespace migsched {

// Reads a JSON config file. Recognized keys: threshold,
// features.{load_balancing,dynamic_partitioning,migration}, static_layout
// (preset name or explicit per-GPU [{profile,start}] lists), contention.alpha,
// migration.overlap_s, reconfig.latency_s, seed, gpus.
// Throws Error("BadConfig") / Error("BadThreshold").
SimConfig load_config(const std::string& path);

// Validates ranges and static-layout disjointness; called by load_config and
// by run(). Throws on violation.
void validate_config(const SimConfig& cfg);

}  // namespace migsched
