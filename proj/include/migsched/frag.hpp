#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>

#include "migsched/gpu.hpp"

namespace migsched {

// Exact rational in [0, 1]. Fragmentation costs are ratios of small integers;
// comparing them exactly keeps every tie-break deterministic.
struct Frac {
    long num = 0;
    long den = 1;

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Frac& a, const Frac& b) {
        return static_cast<long long>(a.num) * b.den == static_cast<long long>(b.num) * a.den;
    }
    friend std::strong_ordering operator<=>(const Frac& a, const Frac& b) {
        return static_cast<long long>(a.num) * b.den <=> static_cast<long long>(b.num) * a.den;
    }
};

// min(floor(RC/cs), floor(RM/ms)); placement constraints ignored.
int ideal_mig_num(const GpuState& gpu, const MigProfile& p);
int ideal_mig_num(const GpuState& gpu, ProfileId p);

// Number of placements that are both valid for the profile and available on
// the GPU.
int feasible_mig_num(const GpuState& gpu, const MigProfile& p);
int feasible_mig_num(const GpuState& gpu, ProfileId p);

// 1 - mean(feasible/ideal) over profiles with ideal > 0; 0 when every profile
// has ideal 0 (the GPU is full, not fragmented). Masks: busy drives RC/RM,
// blocked drives availability.
Frac frag_cost_masks(std::uint8_t busy_compute, std::uint8_t busy_memory,
                     std::uint8_t blocked_compute, std::uint8_t blocked_memory);

// End-state cost of a hypothetical busy set. Decision code (scheduler and
// planners) ranks with this form: draining replicas are transient and must
// not distort the ranking, they only gate which placements are available.
inline Frac frag_cost_masks(std::uint8_t busy_compute, std::uint8_t busy_memory) {
    return frag_cost_masks(busy_compute, busy_memory, busy_compute, busy_memory);
}

Frac frag_cost_exact(const GpuState& gpu);
double frag_cost(const GpuState& gpu);

struct FragReport {
    struct ProfileRow {
        std::string profile;
        int ideal = 0;
        int feasible = 0;
        bool excluded = false;  // ideal == 0, left out of the average
        double ratio = 0.0;
    };
    std::array<ProfileRow, kProfileCount> per_profile;
    double cost = 0.0;
};

FragReport frag_report(const GpuState& gpu);

}  // namespace migsched
