#pragma once

#include <vector>

#include "migsched/scheduler.hpp"

namespace migsched {

enum class MoveKind { IntraGpu, InterGpu };

struct MigrationMove {
    JobId job = 0;
    ProfileId profile{};
    int from_gpu = -1;
    Placement from_placement{};
    int to_gpu = -1;
    Placement to_placement{};
    MoveKind kind{};
    double overlap_s = 0.0;

    // Filled in when the move is applied.
    InstanceId source_instance = 0;  // draining (overlap > 0) or already idle
    CreateResult create;             // destination reconfiguration ops
    double from_cost_before = 0.0, from_cost_after = 0.0;
    double to_cost_before = 0.0, to_cost_after = 0.0;
};

struct MigrationPlan {
    std::optional<MoveKind> kind;  // which planner produced it
    std::vector<MigrationMove> moves;
    std::vector<int> frag_evals_per_iteration;  // complexity accounting

    bool empty() const { return moves.empty(); }
};

struct MigrationConfig {
    double threshold = 0.4;
    bool enabled = true;
    double overlap_s = 0.0;
};

// Creates the destination instance first (replica semantics), then unbinds
// the source: with overlap > 0 the source keeps its slices blocked as a
// draining instance, otherwise it becomes idle immediately.
// Throws Error("InvalidPlacement") / Error("SlicesBusy").
MigrationMove apply_move(std::vector<GpuState>& gpus, MigrationMove move);

// Greedy intra-GPU defragmentation: repeatedly relocate the (job, placement)
// that yields the strictly lowest fragmentation cost; ties break by job id,
// then start index. Moves are applied to the state as they are planned.
MigrationPlan plan_intra(std::vector<GpuState>& gpus, int gpu, double overlap_s);

// Inter-GPU rebalancing toward a Lazy GPU: among jobs on Busy GPUs whose move
// leaves the destination less loaded than the source, pick the one whose
// removal minimizes the source cost and place it at the destination placement
// with minimum cost. Throws Error("NotLazy") when lazy_gpu is not Lazy.
MigrationPlan plan_inter(std::vector<GpuState>& gpus, int lazy_gpu, const MigrationConfig& cfg);

// Dispatch after a departure: intra when the departed GPU is still Busy,
// inter when it is Lazy; empty plan when migration is disabled.
// Throws Error("UnknownGpu").
MigrationPlan on_departure(std::vector<GpuState>& gpus, int departed_gpu,
                           const MigrationConfig& cfg);

}  // namespace migsched
