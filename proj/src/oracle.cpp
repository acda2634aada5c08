#include "migsched/oracle.hpp"

#include <array>
#include <random>
#include <sstream>

namespace migsched::oracle {

namespace {

// Plain occupancy arrays, recomputed by direct iteration every time. This is
// intentionally naive and shares nothing with the bitmask implementation.
struct Occupancy {
    std::array<bool, 7> compute{};
    std::array<bool, 8> memory{};
};

Occupancy occupancy(const OracleGpu& gpu) {
    Occupancy occ;
    for (const BusyUnit& unit : gpu.busy) {
        const MigProfile& p = profiles()[static_cast<std::size_t>(unit.profile_index)];
        for (int c = unit.start; c < unit.start + p.compute_slices; ++c) occ.compute[c] = true;
        for (int m = unit.start; m < unit.start + p.memory_slices; ++m) occ.memory[m] = true;
    }
    return occ;
}

bool placement_free(const Occupancy& occ, const MigProfile& p, int start) {
    for (int c = start; c < start + p.compute_slices; ++c) {
        if (occ.compute[c]) return false;
    }
    for (int m = start; m < start + p.memory_slices; ++m) {
        if (occ.memory[m]) return false;
    }
    return true;
}

bool unit_fits(const OracleGpu& gpu, int profile_index, int start) {
    const Occupancy occ = occupancy(gpu);
    return placement_free(occ, profiles()[static_cast<std::size_t>(profile_index)], start);
}

void enumerate_rec(OracleGpu& current, int min_profile, int min_start, int depth,
                   std::vector<OracleGpu>& out) {
    if (depth == 0) return;
    for (int pi = min_profile; pi < kProfileCount; ++pi) {
        const MigProfile& p = profiles()[static_cast<std::size_t>(pi)];
        for (int st : p.start_indexes) {
            if (pi == min_profile && st < min_start) continue;
            if (!unit_fits(current, pi, st)) continue;
            current.busy.push_back({pi, st});
            out.push_back(current);
            enumerate_rec(current, pi, st + 1, depth - 1, out);
            current.busy.pop_back();
        }
    }
}

std::string describe(const OracleGpu& gpu) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < gpu.busy.size(); ++i) {
        const BusyUnit& unit = gpu.busy[i];
        if (i) os << ", ";
        os << profiles()[static_cast<std::size_t>(unit.profile_index)].name << "@" << unit.start;
    }
    os << "]";
    return os.str();
}

// Exact cost as a (numerator, denominator) pair over a per-state common
// denominator; used for exact argmin comparisons.
std::pair<long, long> cost_frac(const OracleGpu& gpu) {
    const Occupancy occ = occupancy(gpu);
    int used_compute = 0, used_memory = 0;
    for (bool b : occ.compute) used_compute += b ? 1 : 0;
    for (bool b : occ.memory) used_memory += b ? 1 : 0;
    const int rc = 7 - used_compute;
    const int rm = 8 - used_memory;

    long num = 0;
    long den = 1;
    int counted = 0;
    for (const MigProfile& p : profiles()) {
        const int ideal = std::min(rc / p.compute_slices, rm / p.memory_slices);
        if (ideal == 0) continue;
        int feasible = 0;
        for (int st : p.start_indexes) {
            if (placement_free(occ, p, st)) ++feasible;
        }
        // num/den += feasible/ideal
        num = num * ideal + static_cast<long>(feasible) * den;
        den *= ideal;
        ++counted;
    }
    if (counted == 0) return {0, 1};
    // cost = 1 - (num/den)/counted
    return {static_cast<long>(counted) * den - num, static_cast<long>(counted) * den};
}

}  // namespace

std::vector<OracleGpu> enumerate_states(int max_busy) {
    std::vector<OracleGpu> out;
    out.push_back(OracleGpu{});
    OracleGpu scratch;
    enumerate_rec(scratch, 0, 0, max_busy, out);
    return out;
}

int brute_ideal(const OracleGpu& gpu, const MigProfile& p) {
    const Occupancy occ = occupancy(gpu);
    int used_compute = 0, used_memory = 0;
    for (bool b : occ.compute) used_compute += b ? 1 : 0;
    for (bool b : occ.memory) used_memory += b ? 1 : 0;
    return std::min((7 - used_compute) / p.compute_slices, (8 - used_memory) / p.memory_slices);
}

int brute_feasible(const OracleGpu& gpu, const MigProfile& p) {
    const Occupancy occ = occupancy(gpu);
    int count = 0;
    for (int st : p.start_indexes) {
        if (placement_free(occ, p, st)) ++count;
    }
    return count;
}

double brute_frag_cost(const OracleGpu& gpu) {
    const auto [num, den] = cost_frac(gpu);
    return static_cast<double>(num) / static_cast<double>(den);
}

std::optional<BestPlacement> best_placement_search(const OracleGpu& gpu, const MigProfile& p) {
    int profile_index = -1;
    for (int i = 0; i < kProfileCount; ++i) {
        if (profiles()[static_cast<std::size_t>(i)].name == p.name) profile_index = i;
    }

    std::optional<BestPlacement> best;
    std::pair<long, long> best_frac{0, 1};
    const Occupancy occ = occupancy(gpu);
    for (int st : p.start_indexes) {
        if (!placement_free(occ, p, st)) continue;
        OracleGpu with = gpu;
        with.busy.push_back({profile_index, st});
        const auto frac = cost_frac(with);
        const bool better =
            !best || static_cast<long long>(frac.first) * best_frac.second <
                         static_cast<long long>(best_frac.first) * frac.second;
        if (better) {
            best = BestPlacement{st, static_cast<double>(frac.first) / static_cast<double>(frac.second)};
            best_frac = frac;
        }
    }
    return best;
}

GpuState to_gpu_state(const OracleGpu& gpu, int gpu_id) {
    GpuState state(gpu_id);
    JobId synthetic = 1;
    for (const BusyUnit& unit : gpu.busy) {
        const auto pid = static_cast<ProfileId>(unit.profile_index);
        state.create_instance(pid, Placement{unit.start, profile(pid).size}, synthetic++);
    }
    return state;
}

std::optional<Discrepancy> diff_feasible(int max_busy, const FeasibleFn& feasible_fn) {
    for (const OracleGpu& gpu : enumerate_states(max_busy)) {
        const GpuState state = to_gpu_state(gpu);
        for (const MigProfile& p : profiles()) {
            const int expected = brute_feasible(gpu, p);
            const int actual = feasible_fn(state, p);
            if (expected != actual) {
                return Discrepancy{"feasible",
                                   "state " + describe(gpu) + " profile " + std::string(p.name) +
                                       ": implementation " + std::to_string(actual) + ", oracle " +
                                       std::to_string(expected)};
            }
        }
    }
    return std::nullopt;
}

std::optional<Discrepancy> diff_feasible(int max_busy) {
    return diff_feasible(max_busy, [](const GpuState& gpu, const MigProfile& p) {
        return feasible_mig_num(gpu, p);
    });
}

std::optional<Discrepancy> check_feasible_le_ideal(int max_busy) {
    for (const OracleGpu& gpu : enumerate_states(max_busy)) {
        for (const MigProfile& p : profiles()) {
            const int feasible = brute_feasible(gpu, p);
            const int ideal = brute_ideal(gpu, p);
            if (feasible > ideal) {
                return Discrepancy{"feasible_le_ideal",
                                   "state " + describe(gpu) + " profile " + std::string(p.name) +
                                       ": feasible " + std::to_string(feasible) + " > ideal " +
                                       std::to_string(ideal)};
            }
        }
    }
    return std::nullopt;
}

std::optional<Discrepancy> diff_single_gpu_scheduler(int max_busy) {
    SchedulerConfig cfg;  // defaults: threshold 0.4, all features on
    for (const OracleGpu& gpu : enumerate_states(max_busy)) {
        const GpuState state = to_gpu_state(gpu);
        const std::vector<GpuState> cluster{state};
        for (int pi = 0; pi < kProfileCount; ++pi) {
            const MigProfile& p = profiles()[static_cast<std::size_t>(pi)];
            const auto expected = best_placement_search(gpu, p);
            const ScheduleDecision decision =
                schedule(JobRequest{9999, static_cast<ProfileId>(pi)}, cluster, cfg);
            if (expected.has_value() != decision.placed.has_value()) {
                return Discrepancy{"scheduler",
                                   "state " + describe(gpu) + " profile " + std::string(p.name) +
                                       ": placement existence mismatch"};
            }
            if (expected && decision.placed->placement.start != expected->start) {
                return Discrepancy{"scheduler",
                                   "state " + describe(gpu) + " profile " + std::string(p.name) +
                                       ": implementation start " +
                                       std::to_string(decision.placed->placement.start) + ", oracle " +
                                       std::to_string(expected->start)};
            }
        }
    }
    return std::nullopt;
}

namespace {

std::optional<Discrepancy> check_cluster_against_search(const std::vector<OracleGpu>& oracle_gpus) {
    SchedulerConfig cfg;  // defaults: threshold 0.4, all features on
    std::vector<GpuState> cluster;
    for (std::size_t g = 0; g < oracle_gpus.size(); ++g) {
        cluster.push_back(to_gpu_state(oracle_gpus[g], static_cast<int>(g)));
    }
    const int gpus = static_cast<int>(oracle_gpus.size());

    std::string state_names;
    for (const OracleGpu& gpu : oracle_gpus) {
        if (!state_names.empty()) state_names += " + ";
        state_names += describe(gpu);
    }

    for (int pi = 0; pi < kProfileCount; ++pi) {
        const MigProfile& p = profiles()[static_cast<std::size_t>(pi)];
        const ScheduleDecision decision =
            schedule(JobRequest{9999, static_cast<ProfileId>(pi)}, cluster, cfg);

        // Oracle reconstruction: Lazy GPUs first, exact-fraction argmin, ties
        // to the lower GPU id then lower start.
        std::optional<std::tuple<long long, long long, int, int>> best;
        for (int pass = 0; pass < 2 && !best; ++pass) {
            for (int g = 0; g < gpus; ++g) {
                const OracleGpu& source = oracle_gpus[static_cast<std::size_t>(g)];
                int used = 0;
                for (const BusyUnit& unit : source.busy) {
                    used += profiles()[static_cast<std::size_t>(unit.profile_index)].compute_slices;
                }
                const bool lazy = used / 7.0 < cfg.threshold;
                if ((pass == 0) != lazy) continue;
                const Occupancy occ = occupancy(source);
                for (int st : p.start_indexes) {
                    if (!placement_free(occ, p, st)) continue;
                    OracleGpu with = source;
                    with.busy.push_back({pi, st});
                    const auto frac = cost_frac(with);
                    const std::tuple<long long, long long, int, int> cand{frac.first, frac.second, g, st};
                    bool better = true;
                    if (best) {
                        const long long lhs = static_cast<long long>(frac.first) * std::get<1>(*best);
                        const long long rhs = static_cast<long long>(std::get<0>(*best)) * frac.second;
                        better = lhs < rhs ||
                                 (lhs == rhs && (std::get<2>(cand) < std::get<2>(*best) ||
                                                 (std::get<2>(cand) == std::get<2>(*best) &&
                                                  std::get<3>(cand) < std::get<3>(*best))));
                    }
                    if (better) best = cand;
                }
            }
        }

        if (best.has_value() != decision.placed.has_value()) {
            return Discrepancy{"scheduler_multi", "states " + state_names + " profile " +
                                                      std::string(p.name) +
                                                      ": placement existence mismatch"};
        }
        if (best && (decision.placed->gpu != std::get<2>(*best) ||
                     decision.placed->placement.start != std::get<3>(*best))) {
            return Discrepancy{"scheduler_multi",
                               "states " + state_names + " profile " + std::string(p.name) +
                                   ": implementation (" + std::to_string(decision.placed->gpu) + "," +
                                   std::to_string(decision.placed->placement.start) + "), oracle (" +
                                   std::to_string(std::get<2>(*best)) + "," +
                                   std::to_string(std::get<3>(*best)) + ")"};
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<Discrepancy> diff_multi_gpu_scheduler(int max_busy, int gpu_count) {
    if (gpu_count < 2) return std::nullopt;
    const std::vector<OracleGpu> states = enumerate_states(max_busy);

    if (gpu_count == 2) {
        for (const OracleGpu& a : states) {
            for (const OracleGpu& b : states) {
                if (auto d = check_cluster_against_search({a, b})) return d;
            }
        }
        return std::nullopt;
    }

    // Larger clusters are sampled: exhaustive tuples grow too fast.
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> pick(0, states.size() - 1);
    for (int round = 0; round < 1500; ++round) {
        std::vector<OracleGpu> cluster;
        for (int g = 0; g < gpu_count; ++g) cluster.push_back(states[pick(rng)]);
        if (auto d = check_cluster_against_search(cluster)) return d;
    }
    return std::nullopt;
}

std::vector<Discrepancy> run_all(int max_busy) {
    std::vector<Discrepancy> found;
    if (auto d = diff_feasible(max_busy)) found.push_back(*d);
    if (auto d = check_feasible_le_ideal(max_busy)) found.push_back(*d);
    if (auto d = diff_single_gpu_scheduler(max_busy)) found.push_back(*d);
    if (auto d = diff_multi_gpu_scheduler(std::min(max_busy, 2), 2)) found.push_back(*d);
    if (auto d = diff_multi_gpu_scheduler(std::min(max_busy, 3), 3)) found.push_back(*d);
    return found;
}

}  // namespace migsched::oracle
