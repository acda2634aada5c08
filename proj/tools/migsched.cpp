#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "migsched/config.hpp"
#include "migsched/error.hpp"
#include "migsched/oracle.hpp"
#include "migsched/reports.hpp"
#include "migsched/workload.hpp"

namespace fs = std::filesystem;
using namespace migsched;

namespace {

int log_level() {
    const char* env = std::getenv("MIGSCHED_LOG");
    if (env == nullptr) return 0;
    const std::string value(env);
    if (value == "debug") return 2;
    if (value == "info") return 1;
    return 0;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[migsched] " << msg << '\n';
}

std::vector<Job> resolve_trace(const std::string& trace_path, const std::string& preset_name,
                               std::uint64_t seed, int jobs_override) {
    if (!trace_path.empty()) {
        log_info("loading trace " + trace_path);
        return load_trace(trace_path);
    }
    auto spec = preset(preset_name);
    if (!spec) {
        throw Error("BadConfig", "unknown preset \"" + preset_name + "\" (expected one of normal25, long25, normal50, long50)");
    }
    spec->seed = seed;
    if (jobs_override > 0) spec->job_count = jobs_override;
    log_info("generating preset " + preset_name);
    return generate(*spec);
}

void write_outputs(const std::string& out_dir, const SimResult& result, const SimConfig& cfg) {
    fs::create_directories(out_dir);
    write_file(out_dir + "/report.json", report_to_json(result.report, cfg));
    write_file(out_dir + "/report.csv", report_to_csv(result.report));
    write_file(out_dir + "/events.jsonl", events_to_jsonl(result.events));
    write_file(out_dir + "/fragcost_timeline.csv", frag_timeline_to_csv(result.report));
}

void print_summary(const SimReport& report) {
    std::printf("jobs=%zu mean_wait=%.3fs mean_execution=%.3fs mean_turnaround=%.3fs makespan=%.3fs migrations=%ld reconfig_ops=%ld\n",
                report.per_job.size(), report.mean_wait_s, report.mean_execution_s,
                report.mean_turnaround_s, report.workload_makespan_s, report.migration_count,
                report.reconfig_op_count);
}

std::vector<AblationRow> run_ablation(const std::vector<Job>& trace, const SimConfig& base) {
    struct Step {
        const char* name;
        FeatureFlags features;
    };
    const Step steps[] = {
        {"baseline", {false, false, false}},
        {"lb", {true, false, false}},
        {"lb+dyn", {true, true, false}},
        {"lb+dyn+migr", {true, true, true}},
    };

    std::vector<AblationRow> rows;
    double baseline_turnaround = 0.0;
    for (const Step& step : steps) {
        SimConfig cfg = base;
        cfg.sched.features = step.features;
        if (!cfg.sched.features.dynamic_partitioning && !cfg.sched.static_layout) {
            cfg.sched.static_layout = static_layout_preset("static-a");
        }
        log_info(std::string("ablation: running ") + step.name);
        const SimResult result = run(trace, cfg);
        AblationRow row;
        row.name = step.name;
        row.features = step.features;
        row.mean_turnaround_s = result.report.mean_turnaround_s;
        row.mean_wait_s = result.report.mean_wait_s;
        row.mean_execution_s = result.report.mean_execution_s;
        row.workload_makespan_s = result.report.workload_makespan_s;
        if (rows.empty()) baseline_turnaround = row.mean_turnaround_s;
        row.normalized_turnaround =
            baseline_turnaround > 0.0 ? row.mean_turnaround_s / baseline_turnaround : 1.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fragmentation-aware MIG scheduler simulator"};
    app.require_subcommand(1);

    std::string trace_path, preset_name = "normal25", config_path, out_dir = "out", out_file;
    std::string snapshot_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs_override = 0;
    int depth = 3;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "RNG seed (overrides config)")->each([&](const std::string&) {
            seed_set = true;
        });
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run one simulation and write reports");
    simulate->add_option("--trace", trace_path, "JSON-Lines trace file");
    simulate->add_option("--preset", preset_name, "workload preset (normal25, long25, normal50, long50)");
    simulate->add_option("--config", config_path, "JSON config file");
    simulate->add_option("--out", out_dir, "output directory");
    simulate->add_option("--jobs", jobs_override, "job count for generated presets");
    add_seed(simulate);

    CLI::App* generate_cmd = app.add_subcommand("generate", "generate a workload trace");
    generate_cmd->add_option("--preset", preset_name, "workload preset");
    generate_cmd->add_option("--out", out_file, "output trace path")->required();
    generate_cmd->add_option("--jobs", jobs_override, "job count");
    add_seed(generate_cmd);

    CLI::App* ablate = app.add_subcommand("ablate", "run the four-feature ablation on one trace");
    ablate->add_option("--trace", trace_path, "JSON-Lines trace file");
    ablate->add_option("--preset", preset_name, "workload preset");
    ablate->add_option("--config", config_path, "JSON config file");
    ablate->add_option("--out", out_dir, "output directory");
    ablate->add_option("--jobs", jobs_override, "job count for generated presets");
    add_seed(ablate);

    CLI::App* verify = app.add_subcommand("verify", "differential check against the brute-force oracle");
    verify->add_option("--depth", depth, "max busy instances per enumerated state (<= 4 recommended)");

    CLI::App* inspect = app.add_subcommand("inspect", "fragmentation report for a GPU snapshot");
    inspect->add_option("--snapshot", snapshot_path, "snapshot JSON file")->required();
    inspect->add_option("--out", out_file, "write report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors exit 1, --help exits 0
    }

    try {
        if (simulate->parsed() || ablate->parsed()) {
            SimConfig cfg;
            if (!config_path.empty()) cfg = load_config(config_path);
            if (seed_set) cfg.seed = seed;
            const std::vector<Job> trace = resolve_trace(trace_path, preset_name, cfg.seed, jobs_override);

            if (simulate->parsed()) {
                validate_config(cfg);
                const SimResult result = run(trace, cfg);
                if (log_level() >= 2) {
                    for (const SimEvent& ev : result.events) std::cerr << event_to_json_line(ev) << '\n';
                }
                write_outputs(out_dir, result, cfg);
                print_summary(result.report);
            } else {
                const std::vector<AblationRow> rows = run_ablation(trace, cfg);
                fs::create_directories(out_dir);
                write_file(out_dir + "/ablation.json", ablation_to_json(rows));
                std::printf("%s", ablation_to_table(rows).c_str());
            }
        } else if (generate_cmd->parsed()) {
            auto spec = preset(preset_name);
            if (!spec) throw Error("BadConfig", "unknown preset \"" + preset_name + "\"");
            if (seed_set) spec->seed = seed;
            if (jobs_override > 0) spec->job_count = jobs_override;
            const std::vector<Job> jobs = generate(*spec);
            save_trace(jobs, out_file);
            std::printf("wrote %zu jobs to %s\n", jobs.size(), out_file.c_str());
        } else if (verify->parsed()) {
            if (depth < 0 || depth > 7) throw Error("BadConfig", "depth must be in [0,7]");
            log_info("running oracle suites at depth " + std::to_string(depth));
            const auto discrepancies = oracle::run_all(depth);
            if (!discrepancies.empty()) {
                for (const auto& d : discrepancies) {
                    std::fprintf(stderr, "DISCREPANCY [%s] %s\n", d.suite.c_str(), d.detail.c_str());
                }
                return 2;
            }
            std::printf("verify: no discrepancies at depth %d\n", depth);
        } else if (inspect->parsed()) {
            const std::vector<GpuState> gpus = parse_snapshot(snapshot_path);
            std::string out;
            for (const GpuState& gpu : gpus) {
                out += frag_report_to_json(frag_report(gpu), gpu.id());
            }
            if (out_file.empty()) {
                std::printf("%s", out.c_str());
            } else {
                write_file(out_file, out);
            }
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
