#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "migsched/frag.hpp"
#include "migsched/oracle.hpp"

using namespace migsched;

namespace {

GpuState gpu_with(std::initializer_list<std::pair<ProfileId, int>> busy) {
    GpuState gpu(0);
    JobId job = 1;
    for (auto [pid, start] : busy) {
        gpu.create_instance(pid, Placement{start, profile(pid).size}, job++);
    }
    return gpu;
}

}  // namespace

TEST_CASE("ideal_mig_num is the capacity-only bound") {
    GpuState empty(0);
    CHECK(ideal_mig_num(empty, ProfileId::p1g5gb) == 7);
    CHECK(ideal_mig_num(empty, ProfileId::p7g40gb) == 1);
    CHECK(ideal_mig_num(empty, ProfileId::p2g10gb) == 3);

    GpuState busy3 = gpu_with({{ProfileId::p3g20gb, 0}});
    CHECK(ideal_mig_num(busy3, ProfileId::p7g40gb) == 0);
    CHECK(ideal_mig_num(busy3, ProfileId::p3g20gb) == 1);
}

TEST_CASE("feasible_mig_num honors placement constraints") {
    GpuState empty(0);
    CHECK(feasible_mig_num(empty, ProfileId::p1g5gb) == 7);
    CHECK(feasible_mig_num(empty, ProfileId::p2g10gb) == 3);

    GpuState busy3 = gpu_with({{ProfileId::p3g20gb, 0}});
    CHECK(feasible_mig_num(busy3, ProfileId::p4g20gb) == 0);  // start 0 is taken
    CHECK(feasible_mig_num(busy3, ProfileId::p1g5gb) == 3);   // starts 4,5,6
}

TEST_CASE("frag_cost matches the hand-enumerated reference values") {
    GpuState empty(0);
    CHECK(frag_cost(empty) == 0.0);

    GpuState busy3 = gpu_with({{ProfileId::p3g20gb, 0}});
    CHECK(frag_cost(busy3) == 0.35);  // 1 - (0/1 + 1/1 + 1/2 + 2/2 + 3/4)/5

    GpuState busy2 = gpu_with({{ProfileId::p2g10gb, 2}});
    CHECK(frag_cost(busy2) == 0.2);

    GpuState relocated = gpu_with({{ProfileId::p2g10gb, 4}});
    CHECK(frag_cost(relocated) == 0.0);  // index 4 keeps every profile creatable

    GpuState full = gpu_with({{ProfileId::p4g20gb, 0}, {ProfileId::p3g20gb, 4}});
    CHECK(frag_cost(full) == 0.0);  // every ideal is 0: full, not fragmented
}

TEST_CASE("frag_cost is invariant under idle instances") {
    GpuState bare = gpu_with({{ProfileId::p2g10gb, 2}});
    GpuState cluttered = gpu_with({{ProfileId::p2g10gb, 2}});
    cluttered.add_idle_instance(ProfileId::p2g10gb, Placement{4, 2});
    cluttered.add_idle_instance(ProfileId::p1g5gb, Placement{0, 1});
    CHECK(frag_cost_exact(bare) == frag_cost_exact(cluttered));
    CHECK(frag_cost(cluttered) == 0.2);
}

TEST_CASE("frag_cost stays within [0,1] over enumerated states") {
    for (const auto& state : oracle::enumerate_states(3)) {
        const GpuState gpu = oracle::to_gpu_state(state);
        const double cost = frag_cost(gpu);
        CHECK(cost >= 0.0);
        CHECK(cost <= 1.0);
    }
}

TEST_CASE("frag_report lists per-profile counts and exclusions") {
    GpuState busy3 = gpu_with({{ProfileId::p3g20gb, 0}});
    const FragReport report = frag_report(busy3);
    CHECK(report.cost == 0.35);

    // 7g is excluded (ideal 0), the rest carry their ratios.
    CHECK(report.per_profile[0].profile == "7g.40gb");
    CHECK(report.per_profile[0].excluded);
    CHECK(report.per_profile[1].ideal == 1);
    CHECK(report.per_profile[1].feasible == 0);
    CHECK(report.per_profile[3].ideal == 2);
    CHECK(report.per_profile[3].feasible == 1);
    CHECK(report.per_profile[3].ratio == 0.5);
    CHECK(report.per_profile[5].ideal == 4);
    CHECK(report.per_profile[5].feasible == 3);
}

TEST_CASE("exact fraction comparison is deterministic") {
    const Frac a{1, 5};
    const Frac b{2, 10};
    CHECK(a == b);
    CHECK(Frac{7, 20} > Frac{1, 5});
    CHECK(Frac{0, 1} < Frac{1, 420});
}
