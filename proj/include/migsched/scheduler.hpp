#pragma once

#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "migsched/frag.hpp"

namespace migsched {

struct FeatureFlags {
    bool load_balancing = true;
    bool dynamic_partitioning = true;
    bool migration = true;
};

// Instances pre-created (idle) on each GPU when dynamic partitioning is off.
struct StaticLayoutEntry {
    ProfileId profile{};
    int start = 0;
};
using StaticLayout = std::vector<std::vector<StaticLayoutEntry>>;

struct SchedulerConfig {
    double threshold = 0.4;
    FeatureFlags features;
    std::optional<StaticLayout> static_layout;
};

// Named static layouts shipped with the tool ("static-a", "static-b",
// "static-c"); every layout can serve all four workload profiles.
std::optional<StaticLayout> static_layout_preset(std::string_view name);
std::vector<std::string> static_layout_preset_names();

struct JobRequest {
    JobId id = 0;
    ProfileId profile{};
};

struct PlacedOutcome {
    int gpu = -1;
    Placement placement{};
    bool reused = false;
};

struct ScheduleDecision {
    std::optional<PlacedOutcome> placed;  // nullopt => queue the job
    int evaluated_candidates = 0;         // frag-cost evaluations performed

    bool queued() const { return !placed.has_value(); }
};

// Conditional load-balancing, fragmentation-aware placement: Lazy GPUs are
// preferred over Busy ones; within the preferred class the candidate with the
// minimum post-placement fragmentation cost wins, tie-broken by instance
// reuse, then GPU id, then start index. When dynamic partitioning is off only
// exact-match idle instances are candidates.
ScheduleDecision schedule(const JobRequest& job, std::span<const GpuState> gpus,
                          const SchedulerConfig& cfg);

// Scans GPUs in id order and start indexes ascending; takes the first valid
// and available placement (exact-match idle instances only when dynamic
// partitioning is off).
ScheduleDecision first_fit_schedule(const JobRequest& job, std::span<const GpuState> gpus,
                                    const SchedulerConfig& cfg);

// schedule() or first_fit_schedule() per cfg.features.load_balancing.
ScheduleDecision dispatch_schedule(const JobRequest& job, std::span<const GpuState> gpus,
                                   const SchedulerConfig& cfg);

struct DequeueResult {
    JobRequest job;
    PlacedOutcome outcome;
    CreateResult create;
    int evaluated_candidates = 0;
};

// Strict FCFS: repeatedly places the queue head and applies the placement;
// stops at the first head that cannot be placed. No backfilling.
std::vector<DequeueResult> try_dequeue(std::deque<JobRequest>& queue,
                                       std::vector<GpuState>& gpus,
                                       const SchedulerConfig& cfg);

}  // namespace migsched
