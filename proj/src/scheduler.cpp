#include "migsched/scheduler.hpp"

#include <algorithm>

#include "migsched/error.hpp"

namespace migsched {

namespace {

void require_known_profile(const JobRequest& job) {
    if (static_cast<std::size_t>(job.profile) >= static_cast<std::size_t>(kProfileCount)) {
        throw Error("UnknownProfile", "job " + std::to_string(job.id) + " requests an unknown profile");
    }
}

// Candidate placements for a job on one GPU: every legal start when dynamic
// partitioning is on, otherwise only exact-match idle instances.
std::vector<int> candidate_starts(const GpuState& gpu, const MigProfile& p,
                                  ProfileId pid, bool dynamic_partitioning) {
    std::vector<int> starts;
    for (int st : p.start_indexes) {
        const Placement pl{st, p.size};
        if (!dynamic_partitioning && gpu.find_idle_exact(pid, pl) == nullptr) continue;
        if (avail(gpu, p, pl)) starts.push_back(st);
    }
    return starts;
}

struct Candidate {
    Frac cost;
    bool reused = false;
    int gpu = -1;
    int start = 0;

    // cost, then reuse preference, then GPU id, then start index.
    bool better_than(const Candidate& other) const {
        if (cost != other.cost) return cost < other.cost;
        if (reused != other.reused) return reused;
        if (gpu != other.gpu) return gpu < other.gpu;
        return start < other.start;
    }
};

}  // namespace

ScheduleDecision schedule(const JobRequest& job, std::span<const GpuState> gpus,
                          const SchedulerConfig& cfg) {
    require_known_profile(job);
    const MigProfile& p = profile(job.profile);

    std::vector<LoadClass> classes;
    classes.reserve(gpus.size());
    for (const GpuState& gpu : gpus) classes.push_back(classify(gpu, cfg.threshold));

    ScheduleDecision decision;
    for (LoadClass pass : {LoadClass::Lazy, LoadClass::Busy}) {
        std::optional<Candidate> best;
        for (std::size_t gi = 0; gi < gpus.size(); ++gi) {
            const GpuState& gpu = gpus[gi];
            if (classes[gi] != pass) continue;
            const std::uint8_t busy_c = gpu.busy_compute_mask();
            const std::uint8_t busy_m = gpu.busy_memory_mask();
            for (int st : candidate_starts(gpu, p, job.profile, cfg.features.dynamic_partitioning)) {
                const SliceFootprint fp = slice_footprint(p, Placement{st, p.size});
                Candidate cand;
                cand.cost = frag_cost_masks(busy_c | fp.compute, busy_m | fp.memory);
                cand.reused = gpu.find_idle_exact(job.profile, Placement{st, p.size}) != nullptr;
                cand.gpu = gpu.id();
                cand.start = st;
                ++decision.evaluated_candidates;
                if (!best || cand.better_than(*best)) best = cand;
            }
        }
        if (best) {
            decision.placed = PlacedOutcome{best->gpu, Placement{best->start, p.size}, best->reused};
            return decision;
        }
    }
    return decision;  // queued
}

ScheduleDecision first_fit_schedule(const JobRequest& job, std::span<const GpuState> gpus,
                                    const SchedulerConfig& cfg) {
    require_known_profile(job);
    const MigProfile& p = profile(job.profile);

    ScheduleDecision decision;
    for (const GpuState& gpu : gpus) {
        const auto starts = candidate_starts(gpu, p, job.profile, cfg.features.dynamic_partitioning);
        if (starts.empty()) continue;
        const Placement pl{starts.front(), p.size};
        const bool reused = gpu.find_idle_exact(job.profile, pl) != nullptr;
        decision.placed = PlacedOutcome{gpu.id(), pl, reused};
        return decision;
    }
    return decision;
}

ScheduleDecision dispatch_schedule(const JobRequest& job, std::span<const GpuState> gpus,
                                   const SchedulerConfig& cfg) {
    return cfg.features.load_balancing ? schedule(job, gpus, cfg)
                                       : first_fit_schedule(job, gpus, cfg);
}

std::vector<DequeueResult> try_dequeue(std::deque<JobRequest>& queue,
                                       std::vector<GpuState>& gpus,
                                       const SchedulerConfig& cfg) {
    std::vector<DequeueResult> placed;
    while (!queue.empty()) {
        const JobRequest head = queue.front();
        const ScheduleDecision decision = dispatch_schedule(head, gpus, cfg);
        if (decision.queued()) break;  // strict FCFS: never look past the head
        queue.pop_front();
        const PlacedOutcome& outcome = *decision.placed;
        CreateResult create =
            gpus[static_cast<std::size_t>(outcome.gpu)].create_instance(head.profile, outcome.placement, head.id);
        placed.push_back({head, outcome, std::move(create), decision.evaluated_candidates});
    }
    return placed;
}

std::optional<StaticLayout> static_layout_preset(std::string_view name) {
    using P = ProfileId;
    // Each layout serves all four workload profiles cluster-wide.
    if (name == "static-a") {
        return StaticLayout{
            {{P::p4g20gb, 0}, {P::p3g20gb, 4}},
            {{P::p4g20gb, 0}, {P::p3g20gb, 4}},
            {{P::p2g10gb, 0}, {P::p2g10gb, 2}, {P::p2g10gb, 4}, {P::p1g5gb, 6}},
            {{P::p1g5gb, 0}, {P::p1g5gb, 1}, {P::p1g5gb, 2}, {P::p1g5gb, 3}, {P::p2g10gb, 4}, {P::p1g5gb, 6}},
        };
    }
    if (name == "static-b") {
        return StaticLayout{
            {{P::p4g20gb, 0}, {P::p2g10gb, 4}, {P::p1g5gb, 6}},
            {{P::p4g20gb, 0}, {P::p2g10gb, 4}, {P::p1g5gb, 6}},
            {{P::p3g20gb, 0}, {P::p3g20gb, 4}},
            {{P::p3g20gb, 0}, {P::p2g10gb, 4}, {P::p1g5gb, 6}},
        };
    }
    if (name == "static-c") {
        return StaticLayout{
            {{P::p4g20gb, 0}, {P::p3g20gb, 4}},
            {{P::p3g20gb, 0}, {P::p3g20gb, 4}},
            {{P::p2g10gb, 0}, {P::p2g10gb, 2}, {P::p2g10gb, 4}, {P::p1g5gb, 6}},
            {{P::p2g10gb, 0}, {P::p2g10gb, 2}, {P::p1g5gb, 4}, {P::p1g5gb, 5}, {P::p1g5gb, 6}},
        };
    }
    return std::nullopt;
}

std::vector<std::string> static_layout_preset_names() {
    return {"static-a", "static-b", "static-c"};
}

}  // namespace migsched
