#pragma once

#include <string>
#include <vector>

#include "migsched/frag.hpp"
#include "migsched/sim.hpp"

namespace migsched {

// Serialization used by the CLI and the test suite. All emitters are
// deterministic: fixed key order, fixed field set.
std::string event_to_json_line(const SimEvent& ev);
std::string events_to_jsonl(const EventLog& events);  // includes schema header line
std::string report_to_json(const SimReport& report, const SimConfig& cfg);
std::string report_to_csv(const SimReport& report);
std::string frag_timeline_to_csv(const SimReport& report);
std::string frag_report_to_json(const FragReport& report, int gpu_id);

struct AblationRow {
    std::string name;
    FeatureFlags features;
    double mean_turnaround_s = 0.0;
    double normalized_turnaround = 0.0;
    double mean_wait_s = 0.0;
    double mean_execution_s = 0.0;
    double workload_makespan_s = 0.0;
};

std::string ablation_to_json(const std::vector<AblationRow>& rows);
std::string ablation_to_table(const std::vector<AblationRow>& rows);

// Snapshot file for the inspect command: {"gpus":[{"id":..,"instances":
// [{"profile":..,"start":..,"job":..|null}]}]}.
std::vector<GpuState> parse_snapshot(const std::string& path);

void write_file(const std::string& path, const std::string& content);

}  // namespace migsched
