#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "migsched/profiles.hpp"

namespace migsched {

using JobId = std::int64_t;
using InstanceId = std::uint64_t;

// A created MIG partition. It is busy while a job is bound to it, draining
// while it holds the source replica of an in-flight migration, and idle
// otherwise. Idle partitions stay around until a repartition needs their
// slices.
struct Instance {
    InstanceId id = 0;
    ProfileId profile{};
    Placement placement{};
    std::optional<JobId> job;
    bool draining = false;

    bool busy() const { return job.has_value(); }
    bool idle() const { return !job.has_value() && !draining; }
    bool blocks() const { return job.has_value() || draining; }
    SliceFootprint footprint() const { return slice_footprint(profile, placement); }
};

enum class LoadClass { Lazy, Busy };

enum class ReconfigAction { Create, Destroy };

struct ReconfigOp {
    ReconfigAction action{};
    ProfileId profile{};
    Placement placement{};
};

struct CreateResult {
    InstanceId instance = 0;
    bool reused = false;
    std::vector<ReconfigOp> ops;  // one entry per elementary reconfiguration
};

class GpuState {
public:
    static constexpr int kComputeCapacity = kGpuComputeSlices;
    static constexpr int kMemoryCapacity = kGpuMemorySlices;

    GpuState() = default;
    explicit GpuState(int id) : id_(id) {}

    int id() const { return id_; }
    const std::vector<Instance>& instances() const { return instances_; }

    // Occupancy of job-hosting instances only.
    std::uint8_t busy_compute_mask() const;
    std::uint8_t busy_memory_mask() const;
    // Occupancy that blocks new placements: busy plus draining instances.
    std::uint8_t blocked_compute_mask() const;
    std::uint8_t blocked_memory_mask() const;

    int remaining_compute() const;  // RC = 7 - sum of busy compute slices
    int remaining_memory() const;   // RM = 8 - sum of busy memory slices

    const Instance* find_instance(InstanceId id) const;
    const Instance* find_job(JobId job) const;
    const Instance* find_idle_exact(ProfileId p, Placement pl) const;

    // Reuses an exact-match idle instance (0 ops); otherwise destroys every
    // overlapping idle instance (1 op each) and creates a fresh one (1 op).
    // Throws Error("InvalidPlacement") / Error("SlicesBusy").
    CreateResult create_instance(ProfileId p, Placement pl, JobId job);

    // Pre-provisions an unbound instance (static layouts). Must not overlap
    // any existing instance, idle ones included.
    InstanceId add_idle_instance(ProfileId p, Placement pl);

    // The job's instance becomes idle. Throws Error("UnknownJob").
    void release_job(JobId job);

    // Migration-source handling: unbind the job but keep the replica's slices
    // blocked until the overlap window closes.
    InstanceId start_draining(JobId job);
    void finish_draining(InstanceId id);

    // Consistency check used by tests: pairwise disjoint blocking footprints,
    // idle instances disjoint from everything.
    bool invariants_hold() const;

private:
    int id_ = 0;
    std::vector<Instance> instances_;
    InstanceId next_instance_id_ = 1;
};

// True iff no busy or draining footprint intersects the placement on either
// axis. Idle instances never block. Throws Error("InvalidPlacement").
bool avail(const GpuState& gpu, const MigProfile& p, Placement pl);
bool avail(const GpuState& gpu, ProfileId p, Placement pl);

// Busy compute slices / 7.
double utilization(const GpuState& gpu);

// Lazy iff utilization < threshold. Throws Error("BadThreshold") when the
// threshold is outside [0, 1].
LoadClass classify(const GpuState& gpu, double threshold);

}  // namespace migsched
