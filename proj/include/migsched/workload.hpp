#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "migsched/sim.hpp"

namespace migsched {

enum class QueryType { Normal, Long };

enum class ServiceFamily { Lognormal, Exponential, Fixed };

struct ServiceDist {
    ServiceFamily family = ServiceFamily::Lognormal;
    double median_s = 120.0;  // lognormal
    double sigma = 0.8;       // lognormal
    double mean_s = 150.0;    // exponential
    double value_s = 100.0;   // fixed
};

// The distribution's analytic median (the Long-query truncation point).
double service_median(const ServiceDist& dist);

// Order of the profile_mix entries.
inline constexpr std::array<ProfileId, 4> kWorkloadProfiles = {
    ProfileId::p1g5gb, ProfileId::p2g10gb, ProfileId::p3g20gb, ProfileId::p4g20gb};

struct WorkloadSpec {
    double mean_interarrival_s = 25.0;
    QueryType query_type = QueryType::Normal;
    std::array<double, 4> profile_mix = {0.25, 0.25, 0.25, 0.25};
    ServiceDist service;
    int job_count = 200;
    std::uint64_t seed = 0;
};

// Poisson arrivals, profile draws from the mix, service times from the
// configured family; Long query type conditions the service distribution on
// its upper median. Deterministic for a given seed.
// Throws Error("BadSpec") on invalid parameters.
std::vector<Job> generate(const WorkloadSpec& spec);

// Named Table-2-style presets: normal25, long25, normal50, long50.
std::optional<WorkloadSpec> preset(std::string_view name);
std::vector<std::string> preset_names();

// JSON-Lines trace I/O; each line carries schema, job_id, arrival_s, profile,
// service_s. Throws Error("ParseError") / Error("UnknownProfile").
std::vector<Job> load_trace(const std::string& path);
void save_trace(const std::vector<Job>& jobs, const std::string& path);

}  // namespace migsched
