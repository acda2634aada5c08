#include "migsched/migration.hpp"

#include <algorithm>
#include <bit>

#include "migsched/error.hpp"

namespace migsched {

namespace {

GpuState& gpu_at(std::vector<GpuState>& gpus, int id, const char* ctx) {
    if (id < 0 || static_cast<std::size_t>(id) >= gpus.size()) {
        throw Error("UnknownGpu", std::string(ctx) + ": no GPU with id " + std::to_string(id));
    }
    return gpus[static_cast<std::size_t>(id)];
}

struct IntraCandidate {
    Frac cost;
    JobId job;
    int start;
    ProfileId profile;
    Placement from;

    bool better_than(const IntraCandidate& other) const {
        if (cost != other.cost) return cost < other.cost;
        if (job != other.job) return job < other.job;
        return start < other.start;
    }
};

}  // namespace

MigrationMove apply_move(std::vector<GpuState>& gpus, MigrationMove move) {
    GpuState& from = gpu_at(gpus, move.from_gpu, "apply_move");
    GpuState& to = gpu_at(gpus, move.to_gpu, "apply_move");

    // Validate before touching anything so a rejected move leaves no trace.
    const Instance* source = from.find_job(move.job);
    if (source == nullptr) {
        throw Error("UnknownJob", "job " + std::to_string(move.job) + " is not running on GPU " +
                                      std::to_string(move.from_gpu));
    }
    if (source->profile != move.profile) {
        throw Error("InvalidPlacement", "migration profile does not match the job's instance");
    }
    if (!avail(to, move.profile, move.to_placement)) {
        throw Error("SlicesBusy", "migration destination is occupied on GPU " +
                                      std::to_string(move.to_gpu));
    }

    const auto end_state_cost = [](const GpuState& gpu) {
        return frag_cost_masks(gpu.busy_compute_mask(), gpu.busy_memory_mask()).to_double();
    };
    move.from_cost_before = end_state_cost(from);
    move.to_cost_before = end_state_cost(to);

    // Replica semantics: the destination is claimed while the source replica
    // still holds its slices. For intra moves the two footprints are disjoint
    // because same-profile placements never overlap.
    move.source_instance = from.start_draining(move.job);
    move.create = to.create_instance(move.profile, move.to_placement, move.job);
    if (move.overlap_s <= 0.0) from.finish_draining(move.source_instance);

    move.from_cost_after = end_state_cost(from);
    move.to_cost_after = end_state_cost(to);
    return move;
}

MigrationPlan plan_intra(std::vector<GpuState>& gpus, int gpu_id, double overlap_s) {
    GpuState& gpu = gpu_at(gpus, gpu_id, "plan_intra");
    MigrationPlan plan;
    plan.kind = MoveKind::IntraGpu;

    while (true) {
        const std::uint8_t busy_c = gpu.busy_compute_mask();
        const std::uint8_t busy_m = gpu.busy_memory_mask();
        const std::uint8_t blocked_c = gpu.blocked_compute_mask();
        const std::uint8_t blocked_m = gpu.blocked_memory_mask();
        const Frac current = frag_cost_masks(busy_c, busy_m);

        int evals = 0;
        std::optional<IntraCandidate> best;
        for (const Instance& inst : gpu.instances()) {
            if (!inst.busy()) continue;
            const MigProfile& p = profile(inst.profile);
            const SliceFootprint own = inst.footprint();
            for (int st : p.start_indexes) {
                const Placement target{st, p.size};
                if (target == inst.placement) continue;
                const SliceFootprint fp = slice_footprint(p, target);
                // Destination must be free while the job still holds its
                // current slices (replica created before the source ends).
                if ((fp.compute & blocked_c) != 0 || (fp.memory & blocked_m) != 0) continue;
                IntraCandidate cand;
                cand.cost = frag_cost_masks((busy_c & ~own.compute) | fp.compute,
                                            (busy_m & ~own.memory) | fp.memory);
                cand.job = *inst.job;
                cand.start = st;
                cand.profile = inst.profile;
                cand.from = inst.placement;
                ++evals;
                if (!best || cand.better_than(*best)) best = cand;
            }
        }
        plan.frag_evals_per_iteration.push_back(evals);

        if (!best || !(best->cost < current)) break;  // strict improvement only

        MigrationMove move;
        move.job = best->job;
        move.profile = best->profile;
        move.from_gpu = gpu_id;
        move.from_placement = best->from;
        move.to_gpu = gpu_id;
        move.to_placement = Placement{best->start, profile(best->profile).size};
        move.kind = MoveKind::IntraGpu;
        move.overlap_s = overlap_s;
        plan.moves.push_back(apply_move(gpus, move));
    }
    return plan;
}

MigrationPlan plan_inter(std::vector<GpuState>& gpus, int lazy_gpu_id, const MigrationConfig& cfg) {
    GpuState& lazy = gpu_at(gpus, lazy_gpu_id, "plan_inter");
    if (classify(lazy, cfg.threshold) != LoadClass::Lazy) {
        throw Error("NotLazy", "GPU " + std::to_string(lazy_gpu_id) + " is not below the threshold");
    }

    MigrationPlan plan;
    plan.kind = MoveKind::InterGpu;
    while (true) {
        int evals = 0;

        struct SourceCandidate {
            Frac source_cost;
            int gpu;
            JobId job;
            ProfileId profile;
            Placement from;
        };
        std::optional<SourceCandidate> best;

        const int lazy_busy_cs = std::popcount(lazy.busy_compute_mask());
        for (GpuState& source : gpus) {
            if (source.id() == lazy_gpu_id) continue;
            if (classify(source, cfg.threshold) != LoadClass::Busy) continue;
            const int source_busy_cs = std::popcount(source.busy_compute_mask());
            for (const Instance& inst : source.instances()) {
                if (!inst.busy()) continue;
                const MigProfile& p = profile(inst.profile);
                // Moving J must leave the destination less loaded than the
                // source, comparing both after the hypothetical move.
                if (lazy_busy_cs + p.compute_slices >= source_busy_cs - p.compute_slices) continue;
                bool placeable = false;
                for (int st : p.start_indexes) {
                    if (avail(lazy, p, Placement{st, p.size})) {
                        placeable = true;
                        break;
                    }
                }
                if (!placeable) continue;

                const SliceFootprint own = inst.footprint();
                const Frac cost = frag_cost_masks(source.busy_compute_mask() & ~own.compute,
                                                  source.busy_memory_mask() & ~own.memory);
                ++evals;
                const bool improves = !best || cost < best->source_cost ||
                                      (cost == best->source_cost &&
                                       (source.id() < best->gpu ||
                                        (source.id() == best->gpu && *inst.job < best->job)));
                if (improves) {
                    best = SourceCandidate{cost, source.id(), *inst.job, inst.profile, inst.placement};
                }
            }
        }

        if (!best) {
            plan.frag_evals_per_iteration.push_back(evals);
            break;
        }

        // Destination placement minimizing the Lazy GPU's cost, lowest start on ties.
        const MigProfile& p = profile(best->profile);
        std::optional<std::pair<Frac, int>> dest;
        for (int st : p.start_indexes) {
            const Placement pl{st, p.size};
            if (!avail(lazy, p, pl)) continue;
            const SliceFootprint fp = slice_footprint(p, pl);
            const Frac cost = frag_cost_masks(lazy.busy_compute_mask() | fp.compute,
                                              lazy.busy_memory_mask() | fp.memory);
            ++evals;
            if (!dest || cost < dest->first) dest = {cost, st};
        }
        plan.frag_evals_per_iteration.push_back(evals);

        MigrationMove move;
        move.job = best->job;
        move.profile = best->profile;
        move.from_gpu = best->gpu;
        move.from_placement = best->from;
        move.to_gpu = lazy_gpu_id;
        move.to_placement = Placement{dest->second, p.size};
        move.kind = MoveKind::InterGpu;
        move.overlap_s = cfg.overlap_s;
        plan.moves.push_back(apply_move(gpus, move));
    }
    return plan;
}

MigrationPlan on_departure(std::vector<GpuState>& gpus, int departed_gpu,
                           const MigrationConfig& cfg) {
    GpuState& gpu = gpu_at(gpus, departed_gpu, "on_departure");
    if (!cfg.enabled) return {};
    if (classify(gpu, cfg.threshold) == LoadClass::Busy) {
        return plan_intra(gpus, departed_gpu, cfg.overlap_s);
    }
    return plan_inter(gpus, departed_gpu, cfg);
}

}  // namespace migsched
