#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "migsched/workload.hpp"
#include "test_util.hpp"

using namespace migsched;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/migsched_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("generated inter-arrivals match the requested mean") {
    WorkloadSpec spec = *preset("normal25");
    spec.job_count = 1000;
    spec.seed = 7;
    const auto jobs = generate(spec);
    REQUIRE(jobs.size() == 1000);

    const double mean = jobs.back().arrival_s / static_cast<double>(jobs.size());
    CHECK(mean == doctest::Approx(25.0).epsilon(0.10));

    for (std::size_t i = 1; i < jobs.size(); ++i) {
        CHECK(jobs[i].arrival_s >= jobs[i - 1].arrival_s);
    }
}

TEST_CASE("long workloads draw from the upper half of the service distribution") {
    WorkloadSpec spec = *preset("long25");
    spec.job_count = 500;
    spec.seed = 11;
    const auto jobs = generate(spec);

    // Exact truncation point by construction.
    const double analytic_median = service_median(spec.service);
    for (const Job& job : jobs) {
        CHECK(job.service_s >= analytic_median);
    }

    // And against an empirical median of the untruncated distribution.
    WorkloadSpec normal = spec;
    normal.query_type = QueryType::Normal;
    normal.job_count = 100000;
    normal.seed = 12;
    auto samples = generate(normal);
    std::vector<double> services;
    services.reserve(samples.size());
    for (const Job& job : samples) services.push_back(job.service_s);
    std::nth_element(services.begin(), services.begin() + services.size() / 2, services.end());
    const double empirical_median = services[services.size() / 2];
    for (const Job& job : jobs) {
        CHECK(job.service_s >= empirical_median * 0.99);
    }
}

TEST_CASE("generation is deterministic per seed") {
    WorkloadSpec spec = *preset("normal50");
    spec.job_count = 100;
    spec.seed = 42;
    const auto a = generate(spec);
    const auto b = generate(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].arrival_s == b[i].arrival_s);
        CHECK(a[i].profile == b[i].profile);
        CHECK(a[i].service_s == b[i].service_s);
    }

    spec.seed = 43;
    const auto c = generate(spec);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].service_s != c[i].service_s) differs = true;
    }
    CHECK(differs);
}

TEST_CASE("the four table presets exist") {
    for (const char* name : {"normal25", "long25", "normal50", "long50"}) {
        const auto spec = preset(name);
        REQUIRE(spec.has_value());
        const bool is25 = std::string(name).find("25") != std::string::npos;
        CHECK(spec->mean_interarrival_s == (is25 ? 25.0 : 50.0));
        const bool is_long = std::string(name).find("long") == 0;
        CHECK((spec->query_type == QueryType::Long) == is_long);
    }
    CHECK_FALSE(preset("burst99").has_value());
    CHECK(preset_names().size() == 4);
}

TEST_CASE("profile mix draws only the four workload profiles") {
    WorkloadSpec spec = *preset("normal25");
    spec.job_count = 400;
    spec.seed = 3;
    spec.profile_mix = {0.0, 0.0, 0.5, 0.5};
    const auto jobs = generate(spec);
    int seen3g = 0, seen4g = 0;
    for (const Job& job : jobs) {
        const bool expected = job.profile == ProfileId::p3g20gb || job.profile == ProfileId::p4g20gb;
        CHECK(expected);
        seen3g += job.profile == ProfileId::p3g20gb ? 1 : 0;
        seen4g += job.profile == ProfileId::p4g20gb ? 1 : 0;
    }
    CHECK(seen3g > 100);
    CHECK(seen4g > 100);
}

TEST_CASE("invalid specs are rejected") {
    WorkloadSpec spec = *preset("normal25");
    spec.profile_mix = {0.5, 0.5, 0.5, 0.5};
    CHECK(error_code_of([&] { generate(spec); }) == "BadSpec");

    WorkloadSpec negative = *preset("normal25");
    negative.mean_interarrival_s = -1.0;
    CHECK(error_code_of([&] { generate(negative); }) == "BadSpec");

    WorkloadSpec sigma = *preset("normal25");
    sigma.service.sigma = 0.0;
    CHECK(error_code_of([&] { generate(sigma); }) == "BadSpec");
}

TEST_CASE("trace round-trips through the JSON-Lines format") {
    WorkloadSpec spec = *preset("long50");
    spec.job_count = 40;
    spec.seed = 8;
    const auto jobs = generate(spec);

    TempFile file("roundtrip.jsonl");
    save_trace(jobs, file.path);
    const auto loaded = load_trace(file.path);
    REQUIRE(loaded.size() == jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        CHECK(loaded[i].id == jobs[i].id);
        CHECK(loaded[i].arrival_s == jobs[i].arrival_s);
        CHECK(loaded[i].profile == jobs[i].profile);
        CHECK(loaded[i].service_s == jobs[i].service_s);
    }
}

TEST_CASE("load_trace validates lines") {
    SUBCASE("a plain three-line file parses") {
        TempFile file("ok.jsonl");
        std::ofstream out(file.path);
        out << R"({"job_id":0,"arrival_s":0.0,"profile":"1g.5gb","service_s":10})" << '\n';
        out << R"({"job_id":1,"arrival_s":5.0,"profile":"2g.10gb","service_s":20})" << '\n';
        out << R"({"job_id":2,"arrival_s":2.0,"profile":"3g.20gb","service_s":30})" << '\n';
        out.close();
        const auto jobs = load_trace(file.path);
        REQUIRE(jobs.size() == 3);
        CHECK(jobs[1].id == 2);  // sorted by arrival
    }
    SUBCASE("unknown profile") {
        TempFile file("badprofile.jsonl");
        std::ofstream out(file.path);
        out << R"({"job_id":0,"arrival_s":0.0,"profile":"5g.25gb","service_s":10})" << '\n';
        out.close();
        CHECK(error_code_of([&] { load_trace(file.path); }) == "UnknownProfile");
    }
    SUBCASE("negative arrival") {
        TempFile file("negative.jsonl");
        std::ofstream out(file.path);
        out << R"({"job_id":0,"arrival_s":-1.0,"profile":"1g.5gb","service_s":10})" << '\n';
        out.close();
        CHECK(error_code_of([&] { load_trace(file.path); }) == "ParseError");
    }
    SUBCASE("malformed json reports the line") {
        TempFile file("malformed.jsonl");
        std::ofstream out(file.path);
        out << R"({"job_id":0,"arrival_s":0.0,"profile":"1g.5gb","service_s":10})" << '\n';
        out << "{not json\n";
        out.close();
        try {
            load_trace(file.path);
            FAIL("expected ParseError");
        } catch (const Error& e) {
            CHECK(e.code() == "ParseError");
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("wrong schema version") {
        TempFile file("schema.jsonl");
        std::ofstream out(file.path);
        out << R"({"schema":2,"job_id":0,"arrival_s":0.0,"profile":"1g.5gb","service_s":10})" << '\n';
        out.close();
        CHECK(error_code_of([&] { load_trace(file.path); }) == "ParseError");
    }
}
