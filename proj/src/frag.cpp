#include "migsched/frag.hpp"

#include <bit>

namespace migsched {

namespace {

// lcm of all possible ideal counts (1..7); keeps per-profile ratios integral.
constexpr long kRatioScale = 420;

int ideal_from_masks(std::uint8_t busy_compute, std::uint8_t busy_memory, const MigProfile& p) {
    const int rc = kGpuComputeSlices - std::popcount(busy_compute);
    const int rm = kGpuMemorySlices - std::popcount(busy_memory);
    return std::min(rc / p.compute_slices, rm / p.memory_slices);
}

int feasible_from_masks(std::uint8_t blocked_compute, std::uint8_t blocked_memory,
                        const MigProfile& p) {
    int count = 0;
    for (int st : p.start_indexes) {
        const SliceFootprint fp = slice_footprint(p, Placement{st, p.size});
        if ((fp.compute & blocked_compute) == 0 && (fp.memory & blocked_memory) == 0) ++count;
    }
    return count;
}

}  // namespace

int ideal_mig_num(const GpuState& gpu, const MigProfile& p) {
    return ideal_from_masks(gpu.busy_compute_mask(), gpu.busy_memory_mask(), p);
}

int ideal_mig_num(const GpuState& gpu, ProfileId p) { return ideal_mig_num(gpu, profile(p)); }

int feasible_mig_num(const GpuState& gpu, const MigProfile& p) {
    return feasible_from_masks(gpu.blocked_compute_mask(), gpu.blocked_memory_mask(), p);
}

int feasible_mig_num(const GpuState& gpu, ProfileId p) {
    return feasible_mig_num(gpu, profile(p));
}

Frac frag_cost_masks(std::uint8_t busy_compute, std::uint8_t busy_memory,
                     std::uint8_t blocked_compute, std::uint8_t blocked_memory) {
    long ratio_sum = 0;  // scaled by kRatioScale
    int counted = 0;
    for (const MigProfile& p : profiles()) {
        const int ideal = ideal_from_masks(busy_compute, busy_memory, p);
        if (ideal == 0) continue;
        const int feasible = feasible_from_masks(blocked_compute, blocked_memory, p);
        ratio_sum += static_cast<long>(feasible) * (kRatioScale / ideal);
        ++counted;
    }
    if (counted == 0) return Frac{0, 1};  // full GPU: nothing left to fragment
    const long den = kRatioScale * counted;
    return Frac{den - ratio_sum, den};
}

Frac frag_cost_exact(const GpuState& gpu) {
    return frag_cost_masks(gpu.busy_compute_mask(), gpu.busy_memory_mask(),
                           gpu.blocked_compute_mask(), gpu.blocked_memory_mask());
}

double frag_cost(const GpuState& gpu) { return frag_cost_exact(gpu).to_double(); }

FragReport frag_report(const GpuState& gpu) {
    FragReport report;
    for (int i = 0; i < kProfileCount; ++i) {
        const MigProfile& p = profiles()[i];
        auto& row = report.per_profile[i];
        row.profile = std::string(p.name);
        row.ideal = ideal_mig_num(gpu, p);
        row.feasible = feasible_mig_num(gpu, p);
        row.excluded = row.ideal == 0;
        row.ratio = row.excluded ? 0.0 : static_cast<double>(row.feasible) / row.ideal;
    }
    report.cost = frag_cost(gpu);
    return report;
}

}  // namespace migsched
