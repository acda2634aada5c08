#include "migsched/reports.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "migsched/error.hpp"

namespace migsched {

using ordered_json = nlohmann::ordered_json;

std::string event_to_json_line(const SimEvent& ev) {
    ordered_json line;
    line["t"] = ev.time_s;
    line["kind"] = std::string(event_kind_name(ev.kind));
    if (ev.job) line["job"] = *ev.job;
    if (ev.gpu) line["gpu"] = *ev.gpu;
    if (ev.profile) line["profile"] = *ev.profile;
    if (ev.start) line["start"] = *ev.start;
    if (ev.size) line["size"] = *ev.size;
    if (ev.reused) line["reused"] = *ev.reused;
    if (ev.scheduled_s) line["scheduled_s"] = *ev.scheduled_s;
    if (ev.action) line["action"] = *ev.action;
    if (ev.from_gpu) line["from_gpu"] = *ev.from_gpu;
    if (ev.from_start) line["from_start"] = *ev.from_start;
    if (ev.to_gpu) line["to_gpu"] = *ev.to_gpu;
    if (ev.to_start) line["to_start"] = *ev.to_start;
    if (ev.move_kind) line["move_kind"] = *ev.move_kind;
    if (ev.overlap_s) line["overlap_s"] = *ev.overlap_s;
    if (ev.from_cost_before) line["from_cost_before"] = *ev.from_cost_before;
    if (ev.from_cost_after) line["from_cost_after"] = *ev.from_cost_after;
    if (ev.to_cost_before) line["to_cost_before"] = *ev.to_cost_before;
    if (ev.to_cost_after) line["to_cost_after"] = *ev.to_cost_after;
    return line.dump();
}

std::string events_to_jsonl(const EventLog& events) {
    std::ostringstream out;
    out << R"({"schema":1,"kind":"migsched-events"})" << '\n';
    for (const SimEvent& ev : events) out << event_to_json_line(ev) << '\n';
    return out.str();
}

namespace {

ordered_json features_json(const FeatureFlags& f) {
    ordered_json node;
    node["load_balancing"] = f.load_balancing;
    node["dynamic_partitioning"] = f.dynamic_partitioning;
    node["migration"] = f.migration;
    return node;
}

}  // namespace

std::string report_to_json(const SimReport& report, const SimConfig& cfg) {
    ordered_json doc;
    doc["schema"] = 1;
    doc["config"]["threshold"] = cfg.sched.threshold;
    doc["config"]["features"] = features_json(cfg.sched.features);
    doc["config"]["contention_alpha"] = cfg.contention_alpha;
    doc["config"]["migration_overlap_s"] = cfg.migration_overlap_s;
    doc["config"]["reconfig_latency_s"] = cfg.reconfig_latency_s;
    doc["config"]["gpus"] = cfg.gpu_count;
    doc["config"]["seed"] = cfg.seed;
    doc["summary"]["jobs"] = report.per_job.size();
    doc["summary"]["mean_wait_s"] = report.mean_wait_s;
    doc["summary"]["mean_execution_s"] = report.mean_execution_s;
    doc["summary"]["mean_turnaround_s"] = report.mean_turnaround_s;
    doc["summary"]["workload_makespan_s"] = report.workload_makespan_s;
    doc["summary"]["migration_count"] = report.migration_count;
    doc["summary"]["reconfig_op_count"] = report.reconfig_op_count;
    doc["complexity"]["max_arrival_frag_evals"] = report.complexity.max_arrival_frag_evals;
    doc["complexity"]["max_intra_iter_frag_evals"] = report.complexity.max_intra_iter_frag_evals;
    doc["complexity"]["max_inter_iter_frag_evals"] = report.complexity.max_inter_iter_frag_evals;
    doc["per_job"] = ordered_json::array();
    for (const JobMetrics& m : report.per_job) {
        ordered_json row;
        row["job_id"] = m.id;
        row["profile"] = m.profile;
        row["arrival_s"] = m.arrival_s;
        row["scheduled_s"] = m.scheduled_s;
        row["completed_s"] = m.completed_s;
        row["wait_s"] = m.wait_s;
        row["execution_s"] = m.execution_s;
        row["turnaround_s"] = m.turnaround_s;
        row["gpu"] = m.gpu;
        row["migrations"] = m.migrations;
        doc["per_job"].push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
}

std::string report_to_csv(const SimReport& report) {
    std::ostringstream out;
    out << "job_id,profile,arrival_s,scheduled_s,completed_s,wait_s,execution_s,turnaround_s,gpu,migrations\n";
    out.precision(17);
    for (const JobMetrics& m : report.per_job) {
        out << m.id << ',' << m.profile << ',' << m.arrival_s << ',' << m.scheduled_s << ','
            << m.completed_s << ',' << m.wait_s << ',' << m.execution_s << ',' << m.turnaround_s << ','
            << m.gpu << ',' << m.migrations << '\n';
    }
    return out.str();
}

std::string frag_timeline_to_csv(const SimReport& report) {
    std::ostringstream out;
    out << "time_s,mean_frag_cost\n";
    out.precision(17);
    for (const auto& [t, cost] : report.frag_timeline) {
        out << t << ',' << cost << '\n';
    }
    return out.str();
}

std::string frag_report_to_json(const FragReport& report, int gpu_id) {
    ordered_json doc;
    doc["gpu"] = gpu_id;
    doc["cost"] = report.cost;
    doc["per_profile"] = ordered_json::array();
    for (const auto& row : report.per_profile) {
        ordered_json node;
        node["profile"] = row.profile;
        node["ideal"] = row.ideal;
        node["feasible"] = row.feasible;
        if (row.excluded) {
            node["ratio"] = "excluded";
        } else {
            node["ratio"] = row.ratio;
        }
        doc["per_profile"].push_back(std::move(node));
    }
    return doc.dump(2) + "\n";
}

std::string ablation_to_json(const std::vector<AblationRow>& rows) {
    ordered_json doc;
    doc["schema"] = 1;
    doc["rows"] = ordered_json::array();
    for (const AblationRow& row : rows) {
        ordered_json node;
        node["name"] = row.name;
        node["features"] = features_json(row.features);
        node["mean_turnaround_s"] = row.mean_turnaround_s;
        node["normalized_turnaround"] = row.normalized_turnaround;
        node["mean_wait_s"] = row.mean_wait_s;
        node["mean_execution_s"] = row.mean_execution_s;
        node["workload_makespan_s"] = row.workload_makespan_s;
        doc["rows"].push_back(std::move(node));
    }
    return doc.dump(2) + "\n";
}

std::string ablation_to_table(const std::vector<AblationRow>& rows) {
    std::ostringstream out;
    out << "configuration        mean_turnaround_s   normalized\n";
    for (const AblationRow& row : rows) {
        out << row.name;
        for (std::size_t i = row.name.size(); i < 21; ++i) out << ' ';
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%-20.3f%.4f\n", row.mean_turnaround_s, row.normalized_turnaround);
        out << buf;
    }
    return out.str();
}

std::vector<GpuState> parse_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("ParseError", "cannot open snapshot file " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error("ParseError", std::string("snapshot is not valid JSON: ") + e.what());
    }

    std::vector<GpuState> gpus;
    if (!doc.contains("gpus") || !doc["gpus"].is_array()) {
        throw Error("ParseError", "snapshot must contain a \"gpus\" array");
    }
    int next_id = 0;
    JobId synthetic_job = 1000000;
    for (const auto& gpu_node : doc["gpus"]) {
        GpuState gpu(gpu_node.value("id", next_id));
        for (const auto& inst : gpu_node.value("instances", nlohmann::json::array())) {
            const std::string name = inst.value("profile", "");
            const auto pid = find_profile(name);
            if (!pid) throw Error("UnknownProfile", "snapshot references unknown profile \"" + name + "\"");
            const int start = inst.value("start", -1);
            const Placement pl{start, profile(*pid).size};
            if (inst.contains("job") && !inst["job"].is_null()) {
                const JobId job = inst["job"].is_number() ? inst["job"].get<JobId>() : synthetic_job++;
                gpu.create_instance(*pid, pl, job);
            } else {
                gpu.add_idle_instance(*pid, pl);
            }
        }
        gpus.push_back(std::move(gpu));
        ++next_id;
    }
    return gpus;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("BadConfig", "cannot write file " + path);
    out << content;
}

}  // namespace migsched
