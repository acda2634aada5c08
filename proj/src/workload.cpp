#include "migsched/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "migsched/error.hpp"

namespace migsched {

namespace {

// Explicit inverse-transform sampling on top of mt19937_64: the trace format
// is a reproducible artifact, so draws must not depend on library-specific
// distribution internals.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform() {  // [0, 1), 53 bits
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }

    double exponential(double mean) { return -mean * std::log1p(-uniform()); }

    double standard_normal() {
        // Box-Muller; one value per call, the partner is discarded to keep
        // consumption per draw fixed at two uniforms.
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 rng_;
};

void check_spec(const WorkloadSpec& spec) {
    if (spec.mean_interarrival_s <= 0.0) throw Error("BadSpec", "mean inter-arrival must be positive");
    if (spec.job_count < 0) throw Error("BadSpec", "job count must be non-negative");
    double sum = 0.0;
    for (double p : spec.profile_mix) {
        if (p < 0.0) throw Error("BadSpec", "profile mix probabilities must be non-negative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw Error("BadSpec", "profile mix must sum to 1");
    switch (spec.service.family) {
        case ServiceFamily::Lognormal:
            if (spec.service.median_s <= 0.0 || spec.service.sigma <= 0.0) {
                throw Error("BadSpec", "lognormal service needs positive median and sigma");
            }
            break;
        case ServiceFamily::Exponential:
            if (spec.service.mean_s <= 0.0) throw Error("BadSpec", "exponential service needs a positive mean");
            break;
        case ServiceFamily::Fixed:
            if (spec.service.value_s <= 0.0) throw Error("BadSpec", "fixed service needs a positive value");
            break;
    }
}

double draw_service(Sampler& sampler, const ServiceDist& dist, QueryType type) {
    switch (dist.family) {
        case ServiceFamily::Lognormal: {
            double z = sampler.standard_normal();
            // Conditioning a lognormal on its upper median is reflecting the
            // normal deviate.
            if (type == QueryType::Long) z = std::abs(z);
            return dist.median_s * std::exp(dist.sigma * z);
        }
        case ServiceFamily::Exponential: {
            const double sample = sampler.exponential(dist.mean_s);
            // Memorylessness: conditioning on >= median shifts by the median.
            return type == QueryType::Long ? service_median(dist) + sample : sample;
        }
        case ServiceFamily::Fixed:
            return dist.value_s;
    }
    throw Error("BadSpec", "unknown service family");
}

}  // namespace

double service_median(const ServiceDist& dist) {
    switch (dist.family) {
        case ServiceFamily::Lognormal: return dist.median_s;
        case ServiceFamily::Exponential: return dist.mean_s * std::numbers::ln2;
        case ServiceFamily::Fixed: return dist.value_s;
    }
    throw Error("BadSpec", "unknown service family");
}

std::vector<Job> generate(const WorkloadSpec& spec) {
    check_spec(spec);
    Sampler sampler(spec.seed);

    std::vector<Job> jobs;
    jobs.reserve(static_cast<std::size_t>(spec.job_count));
    double clock = 0.0;
    for (int i = 0; i < spec.job_count; ++i) {
        clock += sampler.exponential(spec.mean_interarrival_s);

        const double pick = sampler.uniform();
        double cumulative = 0.0;
        ProfileId chosen = kWorkloadProfiles.back();
        for (std::size_t k = 0; k < kWorkloadProfiles.size(); ++k) {
            cumulative += spec.profile_mix[k];
            if (pick < cumulative) {
                chosen = kWorkloadProfiles[k];
                break;
            }
        }

        Job job;
        job.id = i;
        job.arrival_s = clock;
        job.profile = chosen;
        job.service_s = draw_service(sampler, spec.service, spec.query_type);
        jobs.push_back(job);
    }
    return jobs;
}

std::optional<WorkloadSpec> preset(std::string_view name) {
    WorkloadSpec spec;
    if (name == "normal25") {
        spec.mean_interarrival_s = 25.0;
        spec.query_type = QueryType::Normal;
    } else if (name == "long25") {
        spec.mean_interarrival_s = 25.0;
        spec.query_type = QueryType::Long;
    } else if (name == "normal50") {
        spec.mean_interarrival_s = 50.0;
        spec.query_type = QueryType::Normal;
    } else if (name == "long50") {
        spec.mean_interarrival_s = 50.0;
        spec.query_type = QueryType::Long;
    } else {
        return std::nullopt;
    }
    return spec;
}

std::vector<std::string> preset_names() { return {"normal25", "long25", "normal50", "long50"}; }

std::vector<Job> load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("ParseError", "cannot open trace file " + path);

    std::vector<Job> jobs;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        nlohmann::json parsed;
        try {
            parsed = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            throw Error("ParseError", "line " + std::to_string(line_no) + ": not valid JSON");
        }
        if (!parsed.is_object()) {
            throw Error("ParseError", "line " + std::to_string(line_no) + ": expected an object");
        }
        if (parsed.contains("schema") && parsed["schema"] != 1) {
            throw Error("ParseError", "line " + std::to_string(line_no) + ": unsupported schema version");
        }

        Job job;
        try {
            job.id = parsed.at("job_id").get<JobId>();
            job.arrival_s = parsed.at("arrival_s").get<double>();
            job.service_s = parsed.at("service_s").get<double>();
        } catch (const nlohmann::json::exception&) {
            throw Error("ParseError", "line " + std::to_string(line_no) + ": missing or mistyped field");
        }
        const std::string profile_name = parsed.value("profile", "");
        const auto pid = find_profile(profile_name);
        if (!pid) {
            throw Error("UnknownProfile",
                        "line " + std::to_string(line_no) + ": profile \"" + profile_name + "\"");
        }
        job.profile = *pid;
        if (job.arrival_s < 0.0 || job.service_s <= 0.0) {
            throw Error("ParseError", "line " + std::to_string(line_no) + ": times must be non-negative");
        }
        jobs.push_back(job);
    }

    std::stable_sort(jobs.begin(), jobs.end(),
                     [](const Job& a, const Job& b) { return a.arrival_s < b.arrival_s; });
    return jobs;
}

void save_trace(const std::vector<Job>& jobs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("ParseError", "cannot write trace file " + path);
    for (const Job& job : jobs) {
        nlohmann::ordered_json line;
        line["schema"] = 1;
        line["job_id"] = job.id;
        line["arrival_s"] = job.arrival_s;
        line["profile"] = std::string(profile(job.profile).name);
        line["service_s"] = job.service_s;
        out << line.dump() << '\n';
    }
}

}  // namespace migsched
