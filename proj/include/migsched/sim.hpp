#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "migsched/migration.hpp"

namespace migsched {

struct Job {
    JobId id = 0;
    double arrival_s = 0.0;
    ProfileId profile{};
    double service_s = 0.0;  // base service demand at zero contention
};

enum class EventKind {
    Arrival,
    Completion,
    MigrationStart,
    MigrationEnd,
    Reconfig,
    Enqueue,
    Dequeue,
};

std::string_view event_kind_name(EventKind kind);

// Flat event record; unset fields are omitted from the JSONL line.
struct SimEvent {
    double time_s = 0.0;
    EventKind kind{};
    std::optional<JobId> job;
    std::optional<int> gpu;
    std::optional<std::string> profile;
    std::optional<int> start;
    std::optional<int> size;
    std::optional<bool> reused;
    std::optional<double> scheduled_s;  // service start, includes reconfig delay
    std::optional<std::string> action;  // Reconfig: "create" | "destroy"
    std::optional<int> from_gpu;
    std::optional<int> from_start;
    std::optional<int> to_gpu;
    std::optional<int> to_start;
    std::optional<std::string> move_kind;  // "intra" | "inter"
    std::optional<double> overlap_s;
    std::optional<double> from_cost_before, from_cost_after;
    std::optional<double> to_cost_before, to_cost_after;
};

using EventLog = std::vector<SimEvent>;

struct JobMetrics {
    JobId id = 0;
    std::string profile;
    double arrival_s = 0.0;
    double scheduled_s = 0.0;
    double completed_s = 0.0;
    double wait_s = 0.0;
    double execution_s = 0.0;
    double turnaround_s = 0.0;
    int gpu = -1;
    int migrations = 0;
};

struct ComplexityStats {
    int max_arrival_frag_evals = 0;
    int max_intra_iter_frag_evals = 0;
    int max_inter_iter_frag_evals = 0;
};

struct SimReport {
    std::vector<JobMetrics> per_job;
    double mean_wait_s = 0.0;
    double mean_execution_s = 0.0;
    double mean_turnaround_s = 0.0;
    double workload_makespan_s = 0.0;  // last completion - first dispatch
    long migration_count = 0;
    long reconfig_op_count = 0;
    int gpu_count = 0;
    ComplexityStats complexity;                            // filled by run()
    std::vector<std::pair<double, double>> frag_timeline;  // (t, mean per-GPU cost)
};

struct SimConfig {
    SchedulerConfig sched;
    double contention_alpha = 0.15;
    double migration_overlap_s = 0.0;
    double reconfig_latency_s = 0.0;
    int gpu_count = 4;
    std::uint64_t seed = 0;
};

// 1 + alpha * (k - 1); a job's instantaneous progress rate is 1/slowdown.
// Throws Error("BadConcurrency") when k < 1.
double slowdown(int concurrent_jobs, double alpha);

// Per-job and aggregate metrics derived from a complete event log. The frag
// timeline and complexity counters are not derivable from the log and stay
// empty here. Throws Error("JobsPending") on an incomplete log.
SimReport metrics(const EventLog& events);

struct SimResult {
    SimReport report;
    EventLog events;
};

// Deterministic discrete-event simulation of the whole trace. Throws
// Error("TraceUnsorted"), Error("UnknownProfile"), Error("BadThreshold"),
// Error("BadConfig").
SimResult run(const std::vector<Job>& trace, const SimConfig& cfg);

}  // namespace migsched
