#include "migsched/gpu.hpp"

#include <algorithm>
#include <bit>

#include "migsched/error.hpp"

namespace migsched {

std::uint8_t GpuState::busy_compute_mask() const {
    std::uint8_t mask = 0;
    for (const auto& inst : instances_) {
        if (inst.busy()) mask |= inst.footprint().compute;
    }
    return mask;
}

std::uint8_t GpuState::busy_memory_mask() const {
    std::uint8_t mask = 0;
    for (const auto& inst : instances_) {
        if (inst.busy()) mask |= inst.footprint().memory;
    }
    return mask;
}

std::uint8_t GpuState::blocked_compute_mask() const {
    std::uint8_t mask = 0;
    for (const auto& inst : instances_) {
        if (inst.blocks()) mask |= inst.footprint().compute;
    }
    return mask;
}

std::uint8_t GpuState::blocked_memory_mask() const {
    std::uint8_t mask = 0;
    for (const auto& inst : instances_) {
        if (inst.blocks()) mask |= inst.footprint().memory;
    }
    return mask;
}

int GpuState::remaining_compute() const {
    return kComputeCapacity - std::popcount(busy_compute_mask());
}

int GpuState::remaining_memory() const {
    return kMemoryCapacity - std::popcount(busy_memory_mask());
}

const Instance* GpuState::find_instance(InstanceId id) const {
    for (const auto& inst : instances_) {
        if (inst.id == id) return &inst;
    }
    return nullptr;
}

const Instance* GpuState::find_job(JobId job) const {
    for (const auto& inst : instances_) {
        if (inst.job == job) return &inst;
    }
    return nullptr;
}

const Instance* GpuState::find_idle_exact(ProfileId p, Placement pl) const {
    for (const auto& inst : instances_) {
        if (inst.idle() && inst.profile == p && inst.placement == pl) return &inst;
    }
    return nullptr;
}

CreateResult GpuState::create_instance(ProfileId p, Placement pl, JobId job) {
    const SliceFootprint fp = slice_footprint(p, pl);  // throws InvalidPlacement
    if ((fp.compute & blocked_compute_mask()) != 0 || (fp.memory & blocked_memory_mask()) != 0) {
        throw Error("SlicesBusy", "placement overlaps a busy instance on GPU " + std::to_string(id_));
    }

    CreateResult result;
    for (auto& inst : instances_) {
        if (inst.idle() && inst.profile == p && inst.placement == pl) {
            inst.job = job;
            result.instance = inst.id;
            result.reused = true;
            return result;
        }
    }

    // Idle partitions in the way are reclaimed now, one destroy op each.
    std::erase_if(instances_, [&](const Instance& inst) {
        if (inst.idle() && inst.footprint().intersects(fp)) {
            result.ops.push_back({ReconfigAction::Destroy, inst.profile, inst.placement});
            return true;
        }
        return false;
    });

    Instance created{next_instance_id_++, p, pl, job, false};
    result.instance = created.id;
    result.ops.push_back({ReconfigAction::Create, p, pl});
    instances_.push_back(created);
    return result;
}

InstanceId GpuState::add_idle_instance(ProfileId p, Placement pl) {
    const SliceFootprint fp = slice_footprint(p, pl);  // throws InvalidPlacement
    for (const auto& inst : instances_) {
        if (inst.footprint().intersects(fp)) {
            throw Error("SlicesBusy",
                        "layout instance overlaps an existing instance on GPU " + std::to_string(id_));
        }
    }
    instances_.push_back(Instance{next_instance_id_++, p, pl, std::nullopt, false});
    return instances_.back().id;
}

void GpuState::release_job(JobId job) {
    for (auto& inst : instances_) {
        if (inst.job == job) {
            inst.job.reset();
            return;
        }
    }
    throw Error("UnknownJob", "job " + std::to_string(job) + " is not running on GPU " + std::to_string(id_));
}

InstanceId GpuState::start_draining(JobId job) {
    for (auto& inst : instances_) {
        if (inst.job == job) {
            inst.job.reset();
            inst.draining = true;
            return inst.id;
        }
    }
    throw Error("UnknownJob", "job " + std::to_string(job) + " is not running on GPU " + std::to_string(id_));
}

void GpuState::finish_draining(InstanceId id) {
    for (auto& inst : instances_) {
        if (inst.id == id) {
            inst.draining = false;
            return;
        }
    }
    throw Error("UnknownJob", "instance " + std::to_string(id) + " not found on GPU " + std::to_string(id_));
}

bool GpuState::invariants_hold() const {
    std::uint8_t compute = 0, memory = 0;
    for (const auto& inst : instances_) {
        if (!valid(inst.profile, inst.placement)) return false;
        const SliceFootprint fp = inst.footprint();
        if ((compute & fp.compute) != 0 || (memory & fp.memory) != 0) return false;
        compute |= fp.compute;
        memory |= fp.memory;
    }
    return true;
}

bool avail(const GpuState& gpu, const MigProfile& p, Placement pl) {
    const SliceFootprint fp = slice_footprint(p, pl);  // throws InvalidPlacement
    return (fp.compute & gpu.blocked_compute_mask()) == 0 &&
           (fp.memory & gpu.blocked_memory_mask()) == 0;
}

bool avail(const GpuState& gpu, ProfileId p, Placement pl) {
    return avail(gpu, profile(p), pl);
}

double utilization(const GpuState& gpu) {
    return std::popcount(gpu.busy_compute_mask()) / static_cast<double>(GpuState::kComputeCapacity);
}

LoadClass classify(const GpuState& gpu, double threshold) {
    if (threshold < 0.0 || threshold > 1.0) {
        throw Error("BadThreshold", "load-balancing threshold must be in [0,1]");
    }
    return utilization(gpu) < threshold ? LoadClass::Lazy : LoadClass::Busy;
}

}  // namespace migsched
