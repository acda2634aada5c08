#include "migsched/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "migsched/error.hpp"

namespace migsched {

namespace {

StaticLayout parse_layout(const nlohmann::json& node) {
    if (node.is_string()) {
        const auto preset = static_layout_preset(node.get<std::string>());
        if (!preset) {
            throw Error("BadConfig", "unknown static layout preset \"" + node.get<std::string>() + "\"");
        }
        return *preset;
    }
    if (!node.is_array()) {
        throw Error("BadConfig", "static_layout must be a preset name or a per-GPU array");
    }
    StaticLayout layout;
    for (const auto& gpu_node : node) {
        std::vector<StaticLayoutEntry> entries;
        for (const auto& inst : gpu_node) {
            const std::string name = inst.value("profile", "");
            const auto pid = find_profile(name);
            if (!pid) throw Error("BadConfig", "static_layout references unknown profile \"" + name + "\"");
            if (!inst.contains("start") || !inst["start"].is_number_integer()) {
                throw Error("BadConfig", "static_layout entries need an integer start index");
            }
            entries.push_back({*pid, inst["start"].get<int>()});
        }
        layout.push_back(std::move(entries));
    }
    return layout;
}

}  // namespace

void validate_config(const SimConfig& cfg) {
    if (cfg.sched.threshold < 0.0 || cfg.sched.threshold > 1.0) {
        throw Error("BadThreshold", "threshold must be in [0,1]");
    }
    if (cfg.contention_alpha < 0.0) throw Error("BadConfig", "contention.alpha must be non-negative");
    if (cfg.migration_overlap_s < 0.0) throw Error("BadConfig", "migration.overlap_s must be non-negative");
    if (cfg.reconfig_latency_s < 0.0) throw Error("BadConfig", "reconfig.latency_s must be non-negative");
    if (cfg.gpu_count < 1) throw Error("BadConfig", "gpus must be at least 1");
    if (cfg.sched.static_layout) {
        // Dry-run the layout: every entry must be valid and mutually disjoint.
        for (const auto& entries : *cfg.sched.static_layout) {
            GpuState scratch(0);
            for (const StaticLayoutEntry& entry : entries) {
                try {
                    scratch.add_idle_instance(entry.profile, Placement{entry.start, profile(entry.profile).size});
                } catch (const Error& e) {
                    throw Error("BadConfig", std::string("invalid static layout: ") + e.what());
                }
            }
        }
    }
    if (!cfg.sched.features.dynamic_partitioning) {
        if (!cfg.sched.static_layout) {
            throw Error("BadConfig", "dynamic partitioning is off but no static layout is configured");
        }
        if (cfg.sched.static_layout->size() != static_cast<std::size_t>(cfg.gpu_count)) {
            throw Error("BadConfig", "static layout must list every GPU in the cluster");
        }
    }
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("BadConfig", "cannot open config file " + path);

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error("BadConfig", std::string("config is not valid JSON: ") + e.what());
    }

    SimConfig cfg;
    try {
        if (doc.contains("threshold")) cfg.sched.threshold = doc["threshold"].get<double>();
        if (doc.contains("features")) {
            const auto& f = doc["features"];
            if (f.contains("load_balancing")) cfg.sched.features.load_balancing = f["load_balancing"].get<bool>();
            if (f.contains("dynamic_partitioning")) {
                cfg.sched.features.dynamic_partitioning = f["dynamic_partitioning"].get<bool>();
            }
            if (f.contains("migration")) cfg.sched.features.migration = f["migration"].get<bool>();
        }
        if (doc.contains("static_layout")) cfg.sched.static_layout = parse_layout(doc["static_layout"]);
        if (doc.contains("contention") && doc["contention"].contains("alpha")) {
            cfg.contention_alpha = doc["contention"]["alpha"].get<double>();
        }
        if (doc.contains("migration") && doc["migration"].contains("overlap_s")) {
            cfg.migration_overlap_s = doc["migration"]["overlap_s"].get<double>();
        }
        if (doc.contains("reconfig") && doc["reconfig"].contains("latency_s")) {
            cfg.reconfig_latency_s = doc["reconfig"]["latency_s"].get<double>();
        }
        if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("gpus")) cfg.gpu_count = doc["gpus"].get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw Error("BadConfig", std::string("mistyped config value: ") + e.what());
    }

    validate_config(cfg);
    return cfg;
}

}  // namespace migsched
