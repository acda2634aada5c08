#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "migsched/scheduler.hpp"

// Brute-force reference implementations for small-instance verification.
// Deliberately independent of the library code paths: plain occupancy arrays
// and direct scans, sharing only the profile table.
namespace migsched::oracle {

struct BusyUnit {
    int profile_index = 0;  // index into profiles()
    int start = 0;
};

struct OracleGpu {
    std::vector<BusyUnit> busy;
};

// Every GPU state whose busy instances form a slice-disjoint set of at most
// max_busy (profile, legal start) pairs, in a deterministic order.
std::vector<OracleGpu> enumerate_states(int max_busy);

int brute_ideal(const OracleGpu& gpu, const MigProfile& p);
int brute_feasible(const OracleGpu& gpu, const MigProfile& p);
double brute_frag_cost(const OracleGpu& gpu);

struct BestPlacement {
    int start = 0;
    double cost = 0.0;
};

// Exhaustive argmin of post-placement fragmentation cost over every valid and
// available placement; ties break toward the lower start index.
std::optional<BestPlacement> best_placement_search(const OracleGpu& gpu, const MigProfile& p);

// Bridge for differential tests against the library implementation.
GpuState to_gpu_state(const OracleGpu& gpu, int gpu_id = 0);

struct Discrepancy {
    std::string suite;
    std::string detail;
};

using FeasibleFn = std::function<int(const GpuState&, const MigProfile&)>;

// Differential suites; each returns the first counterexample found. The
// feasible function is injectable so the suite itself can be mutation-tested.
std::optional<Discrepancy> diff_feasible(int max_busy, const FeasibleFn& feasible_fn);
std::optional<Discrepancy> diff_feasible(int max_busy);
std::optional<Discrepancy> check_feasible_le_ideal(int max_busy);
std::optional<Discrepancy> diff_single_gpu_scheduler(int max_busy);
std::optional<Discrepancy> diff_multi_gpu_scheduler(int max_busy, int gpu_count);

// All suites at the given depth; empty result means no discrepancy.
std::vector<Discrepancy> run_all(int max_busy);

}  // namespace migsched::oracle
