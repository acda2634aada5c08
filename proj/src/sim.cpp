#include "migsched/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <unordered_map>

#include "migsched/error.hpp"

namespace migsched {

std::string_view event_kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::Arrival: return "arrival";
        case EventKind::Completion: return "completion";
        case EventKind::MigrationStart: return "migration_start";
        case EventKind::MigrationEnd: return "migration_end";
        case EventKind::Reconfig: return "reconfig";
        case EventKind::Enqueue: return "enqueue";
        case EventKind::Dequeue: return "dequeue";
    }
    return "unknown";
}

double slowdown(int concurrent_jobs, double alpha) {
    if (concurrent_jobs < 1) {
        throw Error("BadConcurrency", "slowdown requires at least one job");
    }
    return 1.0 + alpha * (concurrent_jobs - 1);
}

namespace {

// Internal timer kinds; ranks fix the order of simultaneous events:
// completions free capacity before anything else, arrivals are admitted last.
enum class TimerKind : int { Completion = 0, MigrationEnd = 1, ServiceStart = 2, Arrival = 3 };

struct Timer {
    double time = 0.0;
    TimerKind kind{};
    JobId job = 0;
    long generation = 0;       // completion invalidation
    int gpu = -1;              // MigrationEnd: source GPU
    InstanceId instance = 0;   // MigrationEnd: draining instance
    std::uint64_t seq = 0;
};

struct TimerLater {
    bool operator()(const Timer& a, const Timer& b) const {
        if (a.time != b.time) return a.time > b.time;
        if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
        if (a.job != b.job) return a.job > b.job;
        return a.seq > b.seq;
    }
};

enum class JobState { Pending, Queued, WaitingStart, Running, Done };

struct RunJob {
    Job meta;
    JobState state = JobState::Pending;
    int gpu = -1;
    InstanceId instance = 0;
    double remaining_work = 0.0;
    double last_update = 0.0;
    long completion_generation = 0;
    int migrations = 0;
};

class Engine {
public:
    Engine(const std::vector<Job>& trace, const SimConfig& cfg) : cfg_(cfg) {
        if (cfg.gpu_count < 1) throw Error("BadConfig", "cluster must contain at least one GPU");
        if (cfg.sched.threshold < 0.0 || cfg.sched.threshold > 1.0) {
            throw Error("BadThreshold", "load-balancing threshold must be in [0,1]");
        }
        if (!cfg.sched.features.dynamic_partitioning && !cfg.sched.static_layout) {
            throw Error("BadConfig", "dynamic partitioning is off but no static layout is configured");
        }

        gpus_.reserve(static_cast<std::size_t>(cfg.gpu_count));
        for (int i = 0; i < cfg.gpu_count; ++i) gpus_.emplace_back(i);
        running_on_.assign(static_cast<std::size_t>(cfg.gpu_count), 0);

        if (!cfg.sched.features.dynamic_partitioning) {
            const StaticLayout& layout = *cfg.sched.static_layout;
            if (layout.size() != static_cast<std::size_t>(cfg.gpu_count)) {
                throw Error("BadConfig", "static layout must list every GPU in the cluster");
            }
            for (std::size_t g = 0; g < layout.size(); ++g) {
                for (const StaticLayoutEntry& entry : layout[g]) {
                    gpus_[g].add_idle_instance(entry.profile, Placement{entry.start, profile(entry.profile).size});
                }
            }
        }

        double prev_arrival = -1.0;
        jobs_.reserve(trace.size());
        for (const Job& job : trace) {
            if (static_cast<std::size_t>(job.profile) >= static_cast<std::size_t>(kProfileCount)) {
                throw Error("UnknownProfile", "job " + std::to_string(job.id) + " requests an unknown profile");
            }
            if (job.arrival_s < prev_arrival) {
                throw Error("TraceUnsorted", "job " + std::to_string(job.id) + " arrives out of order");
            }
            if (job.service_s <= 0.0) {
                throw Error("BadSpec", "job " + std::to_string(job.id) + " has non-positive service demand");
            }
            if (index_by_id_.count(job.id) != 0) {
                throw Error("BadSpec", "duplicate job id " + std::to_string(job.id));
            }
            prev_arrival = job.arrival_s;
            index_by_id_[job.id] = jobs_.size();
            jobs_.push_back(RunJob{job});
        }

        for (const RunJob& job : jobs_) {
            push_timer(job.meta.arrival_s, TimerKind::Arrival, job.meta.id);
        }
    }

    SimResult execute() {
        while (!timers_.empty()) {
            const Timer timer = timers_.top();
            timers_.pop();
            now_ = timer.time;
            switch (timer.kind) {
                case TimerKind::Arrival: handle_arrival(timer); break;
                case TimerKind::Completion: handle_completion(timer); break;
                case TimerKind::MigrationEnd: handle_migration_end(timer); break;
                case TimerKind::ServiceStart: handle_service_start(timer); break;
            }
        }

        SimReport report = metrics(log_);
        report.gpu_count = cfg_.gpu_count;
        report.complexity = complexity_;
        report.frag_timeline = std::move(timeline_);
        return SimResult{std::move(report), std::move(log_)};
    }

private:
    RunJob& job_ref(JobId id) { return jobs_[index_by_id_.at(id)]; }

    void push_timer(double t, TimerKind kind, JobId job, long generation = 0, int gpu = -1,
                    InstanceId instance = 0) {
        timers_.push(Timer{t, kind, job, generation, gpu, instance, seq_++});
    }

    // Integrates remaining work for every running job up to t; must run before
    // any change to per-GPU concurrency.
    void advance_all(double t) {
        for (RunJob& job : jobs_) {
            if (job.state != JobState::Running) continue;
            const double dt = t - job.last_update;
            if (dt > 0.0) {
                const double factor = slowdown(running_on_[static_cast<std::size_t>(job.gpu)], cfg_.contention_alpha);
                job.remaining_work -= dt / factor;
                job.last_update = t;
            } else {
                job.last_update = t;
            }
        }
    }

    void reschedule_completions() {
        for (RunJob& job : jobs_) {
            if (job.state != JobState::Running) continue;
            const double factor = slowdown(running_on_[static_cast<std::size_t>(job.gpu)], cfg_.contention_alpha);
            const double remaining = std::max(job.remaining_work, 0.0);
            ++job.completion_generation;
            push_timer(now_ + remaining * factor, TimerKind::Completion, job.meta.id, job.completion_generation);
        }
    }

    void sample_timeline() {
        double total = 0.0;
        for (const GpuState& gpu : gpus_) total += frag_cost(gpu);
        timeline_.emplace_back(now_, total / static_cast<double>(gpus_.size()));
    }

    void emit_reconfig_ops(int gpu, const std::vector<ReconfigOp>& ops) {
        for (const ReconfigOp& op : ops) {
            SimEvent ev;
            ev.time_s = now_;
            ev.kind = EventKind::Reconfig;
            ev.gpu = gpu;
            ev.action = op.action == ReconfigAction::Create ? "create" : "destroy";
            ev.profile = std::string(profile(op.profile).name);
            ev.start = op.placement.start;
            ev.size = op.placement.size;
            log_.push_back(std::move(ev));
        }
    }

    // Binds the placement, charges reconfiguration latency, and either starts
    // the job now or arms its delayed service start.
    double apply_placement(RunJob& job, const PlacedOutcome& outcome, const CreateResult& create) {
        job.gpu = outcome.gpu;
        job.instance = create.instance;
        const double delay = static_cast<double>(create.ops.size()) * cfg_.reconfig_latency_s;
        const double service_start = now_ + delay;
        if (delay > 0.0) {
            job.state = JobState::WaitingStart;
            push_timer(service_start, TimerKind::ServiceStart, job.meta.id);
        } else {
            start_service(job);
        }
        return service_start;
    }

    void start_service(RunJob& job) {
        job.state = JobState::Running;
        job.remaining_work = job.meta.service_s;
        job.last_update = now_;
        ++running_on_[static_cast<std::size_t>(job.gpu)];
    }

    void handle_arrival(const Timer& timer) {
        advance_all(now_);
        RunJob& job = job_ref(timer.job);

        SimEvent ev;
        ev.time_s = now_;
        ev.kind = EventKind::Arrival;
        ev.job = job.meta.id;
        ev.profile = std::string(profile(job.meta.profile).name);

        // A non-empty queue means earlier jobs are still waiting; admitting
        // this one now would let it overtake them.
        bool enqueue = !queue_.empty();
        if (!enqueue) {
            const ScheduleDecision decision =
                dispatch_schedule(JobRequest{job.meta.id, job.meta.profile}, gpus_, cfg_.sched);
            complexity_.max_arrival_frag_evals =
                std::max(complexity_.max_arrival_frag_evals, decision.evaluated_candidates);
            if (decision.placed) {
                const PlacedOutcome& outcome = *decision.placed;
                CreateResult create = gpus_[static_cast<std::size_t>(outcome.gpu)].create_instance(
                    job.meta.profile, outcome.placement, job.meta.id);
                const double service_start = apply_placement(job, outcome, create);
                ev.gpu = outcome.gpu;
                ev.start = outcome.placement.start;
                ev.size = outcome.placement.size;
                ev.reused = create.reused;
                ev.scheduled_s = service_start;
                log_.push_back(std::move(ev));
                emit_reconfig_ops(outcome.gpu, create.ops);
            } else {
                enqueue = true;
            }
        }
        if (enqueue) {
            log_.push_back(std::move(ev));
            job.state = JobState::Queued;
            queue_.push_back(JobRequest{job.meta.id, job.meta.profile});
            SimEvent eq;
            eq.time_s = now_;
            eq.kind = EventKind::Enqueue;
            eq.job = job.meta.id;
            log_.push_back(std::move(eq));
        }

        reschedule_completions();
        sample_timeline();
    }

    void handle_completion(const Timer& timer) {
        RunJob& job = job_ref(timer.job);
        if (job.state != JobState::Running || timer.generation != job.completion_generation) {
            return;  // superseded prediction
        }
        advance_all(now_);

        job.state = JobState::Done;
        job.remaining_work = 0.0;
        const int gpu = job.gpu;
        --running_on_[static_cast<std::size_t>(gpu)];
        gpus_[static_cast<std::size_t>(gpu)].release_job(job.meta.id);

        SimEvent ev;
        ev.time_s = now_;
        ev.kind = EventKind::Completion;
        ev.job = job.meta.id;
        ev.gpu = gpu;
        log_.push_back(std::move(ev));
        sample_timeline();  // capture the post-departure fragmentation level

        // Queued work has priority over rebalancing.
        dequeue_pass();
        if (cfg_.sched.features.migration) {
            MigrationConfig mig{cfg_.sched.threshold, true, cfg_.migration_overlap_s};
            const MigrationPlan plan = on_departure(gpus_, gpu, mig);
            record_plan(plan);
            dequeue_pass();
        }

        reschedule_completions();
        sample_timeline();
    }

    void handle_migration_end(const Timer& timer) {
        advance_all(now_);
        gpus_[static_cast<std::size_t>(timer.gpu)].finish_draining(timer.instance);
        SimEvent ev;
        ev.time_s = now_;
        ev.kind = EventKind::MigrationEnd;
        ev.job = timer.job;
        ev.gpu = timer.gpu;
        log_.push_back(std::move(ev));
        dequeue_pass();  // the drained slices may unblock the queue head
        reschedule_completions();
        sample_timeline();
    }

    void handle_service_start(const Timer& timer) {
        advance_all(now_);
        RunJob& job = job_ref(timer.job);
        start_service(job);
        reschedule_completions();
        sample_timeline();
    }

    void dequeue_pass() {
        const std::vector<DequeueResult> placed = try_dequeue(queue_, gpus_, cfg_.sched);
        for (const DequeueResult& item : placed) {
            RunJob& job = job_ref(item.job.id);
            complexity_.max_arrival_frag_evals =
                std::max(complexity_.max_arrival_frag_evals, item.evaluated_candidates);
            const double service_start = apply_placement(job, item.outcome, item.create);
            SimEvent ev;
            ev.time_s = now_;
            ev.kind = EventKind::Dequeue;
            ev.job = job.meta.id;
            ev.gpu = item.outcome.gpu;
            ev.start = item.outcome.placement.start;
            ev.size = item.outcome.placement.size;
            ev.reused = item.create.reused;
            ev.scheduled_s = service_start;
            log_.push_back(std::move(ev));
            emit_reconfig_ops(item.outcome.gpu, item.create.ops);
        }
    }

    void record_plan(const MigrationPlan& plan) {
        for (int evals : plan.frag_evals_per_iteration) {
            if (plan.kind == MoveKind::IntraGpu) {
                complexity_.max_intra_iter_frag_evals =
                    std::max(complexity_.max_intra_iter_frag_evals, evals);
            } else {
                complexity_.max_inter_iter_frag_evals =
                    std::max(complexity_.max_inter_iter_frag_evals, evals);
            }
        }
        for (const MigrationMove& move : plan.moves) {
            RunJob& job = job_ref(move.job);
            if (job.state == JobState::Running) {
                --running_on_[static_cast<std::size_t>(move.from_gpu)];
                ++running_on_[static_cast<std::size_t>(move.to_gpu)];
            }
            job.gpu = move.to_gpu;
            job.instance = move.create.instance;
            ++job.migrations;

            SimEvent ev;
            ev.time_s = now_;
            ev.kind = EventKind::MigrationStart;
            ev.job = move.job;
            ev.profile = std::string(profile(move.profile).name);
            ev.from_gpu = move.from_gpu;
            ev.from_start = move.from_placement.start;
            ev.to_gpu = move.to_gpu;
            ev.to_start = move.to_placement.start;
            ev.move_kind = move.kind == MoveKind::IntraGpu ? "intra" : "inter";
            ev.overlap_s = move.overlap_s;
            ev.from_cost_before = move.from_cost_before;
            ev.from_cost_after = move.from_cost_after;
            ev.to_cost_before = move.to_cost_before;
            ev.to_cost_after = move.to_cost_after;
            log_.push_back(std::move(ev));
            emit_reconfig_ops(move.to_gpu, move.create.ops);

            if (move.overlap_s > 0.0) {
                push_timer(now_ + move.overlap_s, TimerKind::MigrationEnd, move.job, 0, move.from_gpu,
                           move.source_instance);
            } else {
                SimEvent end;
                end.time_s = now_;
                end.kind = EventKind::MigrationEnd;
                end.job = move.job;
                end.gpu = move.from_gpu;
                log_.push_back(std::move(end));
            }
        }
    }

    const SimConfig& cfg_;
    std::vector<GpuState> gpus_;
    std::vector<RunJob> jobs_;
    std::unordered_map<JobId, std::size_t> index_by_id_;
    std::deque<JobRequest> queue_;
    std::priority_queue<Timer, std::vector<Timer>, TimerLater> timers_;
    EventLog log_;
    std::vector<int> running_on_;
    std::vector<std::pair<double, double>> timeline_;
    ComplexityStats complexity_;
    double now_ = 0.0;
    std::uint64_t seq_ = 0;
};

}  // namespace

SimReport metrics(const EventLog& events) {
    struct Acc {
        std::string profile;
        double arrival = 0.0;
        std::optional<double> scheduled;
        std::optional<double> completed;
        int gpu = -1;
        int migrations = 0;
    };
    std::map<JobId, Acc> acc;

    SimReport report;
    for (const SimEvent& ev : events) {
        switch (ev.kind) {
            case EventKind::Arrival: {
                Acc& a = acc[*ev.job];
                a.arrival = ev.time_s;
                a.profile = ev.profile.value_or("");
                if (ev.scheduled_s) a.scheduled = *ev.scheduled_s;
                if (ev.gpu) a.gpu = *ev.gpu;
                break;
            }
            case EventKind::Dequeue: {
                Acc& a = acc[*ev.job];
                a.scheduled = ev.scheduled_s.value_or(ev.time_s);
                if (ev.gpu) a.gpu = *ev.gpu;
                break;
            }
            case EventKind::Completion: {
                Acc& a = acc[*ev.job];
                a.completed = ev.time_s;
                if (ev.gpu) a.gpu = *ev.gpu;
                break;
            }
            case EventKind::MigrationStart: {
                ++acc[*ev.job].migrations;
                ++report.migration_count;
                break;
            }
            case EventKind::Reconfig:
                ++report.reconfig_op_count;
                break;
            default:
                break;
        }
    }

    double first_dispatch = 0.0, last_completion = 0.0;
    bool any = false;
    for (const auto& [id, a] : acc) {
        if (!a.scheduled || !a.completed) {
            throw Error("JobsPending", "job " + std::to_string(id) + " did not complete");
        }
        JobMetrics m;
        m.id = id;
        m.profile = a.profile;
        m.arrival_s = a.arrival;
        m.scheduled_s = *a.scheduled;
        m.completed_s = *a.completed;
        m.wait_s = m.scheduled_s - m.arrival_s;
        m.execution_s = m.completed_s - m.scheduled_s;
        m.turnaround_s = m.wait_s + m.execution_s;
        m.gpu = a.gpu;
        m.migrations = a.migrations;
        report.per_job.push_back(std::move(m));
        if (!any) {
            first_dispatch = a.arrival;
            last_completion = *a.completed;
            any = true;
        } else {
            first_dispatch = std::min(first_dispatch, a.arrival);
            last_completion = std::max(last_completion, *a.completed);
        }
    }

    if (!report.per_job.empty()) {
        const double n = static_cast<double>(report.per_job.size());
        for (const JobMetrics& m : report.per_job) {
            report.mean_wait_s += m.wait_s;
            report.mean_execution_s += m.execution_s;
            report.mean_turnaround_s += m.turnaround_s;
        }
        report.mean_wait_s /= n;
        report.mean_execution_s /= n;
        report.mean_turnaround_s /= n;
        report.workload_makespan_s = last_completion - first_dispatch;
    }
    return report;
}

SimResult run(const std::vector<Job>& trace, const SimConfig& cfg) {
    Engine engine(trace, cfg);
    return engine.execute();
}

}  // namespace migsched
