#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "deployopt/error.hpp"
#include "deployopt/perf_model.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace deployopt;

namespace {

WorkloadDescriptor mnist() { return load_workload(fixtures::path("mnist_cnn.json")); }
WorkloadDescriptor resnet() { return load_workload(fixtures::path("resnet50.json")); }
InfraDescriptor cpu_node() { return load_infra(fixtures::path("cpu_node.json")); }
InfraDescriptor gpu_node() { return load_infra(fixtures::path("gpu_node.json")); }

double feature_value(const FeatureVector& f, const std::string& name) {
    for (const auto& [n, v] : f)
        if (n == name) return v;
    return NAN;
}

std::vector<BenchmarkRecord> two_records() {
    WorkloadDescriptor w = mnist();
    const InfraDescriptor i = cpu_node();
    w.epochs = 12;
    BenchmarkRecord a{"T", w, i, 26.0};
    w.epochs = 3;
    BenchmarkRecord b{"T", w, i, 8.0};
    return {a, b};
}

std::vector<std::string> order(const std::vector<RankedConfiguration>& ranked) {
    std::vector<std::string> out;
    for (const auto& r : ranked) out.push_back(r.config_tag);
    return out;
}

}  // namespace

TEST_CASE("build_features examples") {
    const auto f = build_features("T", mnist(), cpu_node());
    CHECK(feature_value(f, "T:epoch") == 12.0);
    CHECK(feature_value(f, "T:startup") == 1.0);
    CHECK(feature_value(f, "batch_size") == 128.0);
    CHECK(feature_value(f, "params_millions") == doctest::Approx(1.199882));
    CHECK(feature_value(f, "inv_peak_gflops") == doctest::Approx(1.0 / 352.0));
    CHECK(std::is_sorted(f.begin(), f.end()));
    CHECK(feature_value(build_features("T", resnet(), gpu_node()), "T:epoch") == 3.0);
    CHECK(build_features("T", mnist(), cpu_node()) == f);
}

TEST_CASE("two-record fit") {
    const auto model = fit(two_records(), 0.0);
    CHECK(*model.coefficient("T:epoch") == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(*model.coefficient("T:startup") == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(model.covered_tags == std::set<std::string>{"T"});
    WorkloadDescriptor w = mnist();
    w.epochs = 1;
    CHECK(predict(model, "T", w, cpu_node()) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("fit error cases") {
    CHECK_THROWS_AS(fit({}, 0.0), EmptyDataError);
    auto recs = two_records();
    recs[1].workload.epochs = 12;
    recs[1].wallclock_s = 27.0;
    CHECK_THROWS_AS(fit(recs, 0.0), SingularDesignError);
    CHECK_NOTHROW(fit(recs, 1e-6));
    recs[0].wallclock_s = -1.0;
    CHECK_THROWS_AS(fit(recs, 1e-6), ValidationError);
    CHECK_THROWS_AS(fit(two_records(), -1.0), Error);
}

TEST_CASE("predict error cases") {
    const auto model = fit(two_records(), 0.0);
    CHECK_THROWS_AS(predict(model, "U", mnist(), cpu_node()), UncoveredTagError);
    PerfModel negative = model;
    for (auto& c : negative.coefficients) c = -c;
    CHECK_THROWS_AS(predict(negative, "T", mnist(), cpu_node()), DegeneratePredictionError);
}

TEST_CASE("fixture model reproduces the fixture runtimes") {
    const auto records = load_records_csv(fixtures::path("reference_runtimes.csv"));
    const auto model = fit(records, 0.0);
    for (const auto& r : records) {
        CHECK(std::fabs(predict(model, r.config_tag, r.workload, r.infra) / r.wallclock_s - 1.0) < 1e-9);
    }
    const auto shipped = load_model(fixtures::path("reference_model.json"));
    CHECK(shipped.feature_names == model.feature_names);
    CHECK(oracle::relative_error(shipped.coefficients, model.coefficients) < 1e-9);
    CHECK(predict(shipped, "tensorflow-2.1-hub-cpu", mnist(), cpu_node()) == doctest::Approx(46.0).epsilon(1e-9));
    CHECK_THROWS_AS(predict(shipped, "caffe-1.0-hub-cpu", mnist(), cpu_node()), UncoveredTagError);
}

TEST_CASE("fit matches the independent normal-equations oracle") {
    const auto records = load_records_csv(fixtures::path("reference_runtimes.csv"));
    const auto model = fit(records, 0.0);
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    for (const auto& r : records) {
        rows.push_back(oracle::design_row(model.feature_names, r));
        y.push_back(r.wallclock_s);
    }
    const auto want = oracle::normal_equations(rows, y, 0.0);
    REQUIRE(want);
    CHECK(oracle::relative_error(model.coefficients, *want) < 1e-8);
}

TEST_CASE("ridge bias at the default lambda is small but visible") {
    const auto records = load_records_csv(fixtures::path("reference_runtimes.csv"));
    const auto model = fit(records, 1e-8);
    const double p = predict(model, "tensorflow-2.1-hub-cpu", mnist(), cpu_node());
    CHECK(std::fabs(p / 46.0 - 1.0) < 1e-4);
}

TEST_CASE("rank_configurations") {
    const auto model = load_model(fixtures::path("reference_model.json"));
    const auto gpu = rank_configurations(
        model, {"tensorflow-2.1-hub-gpu", "tensorflow-2.1-src-gpu", "tensorflow-2.1-src-gpu+xla"}, resnet(), gpu_node());
    CHECK(order(gpu) == std::vector<std::string>{"tensorflow-2.1-src-gpu+xla", "tensorflow-2.1-src-gpu",
                                                 "tensorflow-2.1-hub-gpu"});
    const auto single = rank_configurations(model, {"pytorch-1.4-hub-cpu"}, mnist(), cpu_node());
    REQUIRE(single.size() == 1);
    CHECK(single[0].config_tag == "pytorch-1.4-hub-cpu");

    const auto mixed =
        rank_configurations(model, {"zzz", "tensorflow-1.14-pip-cpu", "aaa", "tensorflow-1.14-hub-cpu"}, mnist(),
                            cpu_node());
    CHECK(order(mixed) == std::vector<std::string>{"tensorflow-1.14-hub-cpu", "tensorflow-1.14-pip-cpu", "aaa", "zzz"});
    CHECK(mixed[2].status == RankedConfiguration::Status::uncovered);
    CHECK_FALSE(mixed[2].seconds.has_value());
}

TEST_CASE("property: more epochs never predict less time for a fitted positive model") {
    gen::Rng rng(8);
    for (int t = 0; t < 20; ++t) {
        const std::vector<std::string> tags = {"a", "b", "c"};
        const auto model = fit(gen::records(rng, tags), 0.0);
        auto w = gen::workload(rng);
        const auto i = gen::infra(rng);
        for (const auto& tag : tags) {
            w.epochs = 1;
            double prev = predict(model, tag, w, i);
            for (unsigned long e = 2; e < 30; ++e) {
                w.epochs = e;
                const double p = predict(model, tag, w, i);
                CHECK(p >= prev);
                prev = p;
            }
        }
    }
}

TEST_CASE("property: scaling wallclocks leaves rankings unchanged") {
    gen::Rng rng(31);
    const std::vector<std::string> tags = {"a", "b", "c", "d", "e"};
    for (int t = 0; t < 20; ++t) {
        const auto records = gen::records(rng, tags);
        const auto base = fit(records, 0.0);
        const auto w = gen::workload(rng);
        const auto i = gen::infra(rng);
        const auto want = order(rank_configurations(base, tags, w, i));
        for (double c : {0.5, 3.0, 100.0}) {
            auto scaled = records;
            for (auto& r : scaled) r.wallclock_s *= c;
            CHECK(order(rank_configurations(fit(scaled, 0.0), tags, w, i)) == want);
        }
    }
}

TEST_CASE("CSV parsing") {
    const auto records = load_records_csv(fixtures::path("reference_runtimes.csv"));
    CHECK(records.size() == 36);
    CHECK(parse_records_csv(records_to_csv(records)).size() == records.size());
    CHECK(records_to_csv(parse_records_csv(records_to_csv(records))) == records_to_csv(records));
    try {
        parse_records_csv(std::string(kRecordsHeader) + "\nT,w,1,1,1,1,1,fp32,i,1,1,0\n");
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.code() == "CSV_FORMAT");
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_records_csv("bad,header\n"), FormatError);
    CHECK(parse_records_csv(std::string(kRecordsHeader) + "\n").empty());
    CHECK_THROWS_AS(fit(parse_records_csv(std::string(kRecordsHeader) + "\n"), 0.0), EmptyDataError);
}

TEST_CASE("model and descriptor JSON round-trips") {
    const auto model = load_model(fixtures::path("reference_model.json"));
    CHECK(model_to_json(model_from_json(model_to_json(model))) == model_to_json(model));
    CHECK_THROWS_AS(model_from_json(R"({"feature_names":[]})"), FormatError);
    CHECK(workload_from_json(workload_to_json(mnist())) == mnist());
    CHECK(infra_from_json(infra_to_json(gpu_node())) == gpu_node());
    CHECK_THROWS(workload_from_json(R"({"name":"x","batch_size":0,"epochs":1,"image_shape":[1,1],
                                         "trainable_params":1,"precision":"fp32"})"));
}
