#include <doctest.h>

#include <algorithm>
#include <random>

#include "deployopt/error.hpp"
#include "deployopt/registry.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace deployopt;

namespace {

ImageSpec spec(Framework fw, const char* v, Source s, Target t, CompilerSet caps = {}) {
    ImageSpec out;
    out.framework = fw;
    out.version = *Version::parse(v);
    out.source = s;
    out.target = t;
    out.capabilities = std::move(caps);
    out.uri = "images/" + tag_of(out) + ".sif";
    return out;
}

OptimisationRequest request(Framework fw, const char* v, bool opt_build, AccType acc = AccType::none,
                            CompilerSet compilers = {}) {
    OptimisationRequest r;
    r.enable_opt_build = opt_build;
    if (opt_build) r.opt_build = OptBuildTarget{CpuType::x86, acc};
    r.ai_training = FrameworkOptions{fw, *Version::parse(v), std::move(compilers)};
    return r;
}

const Catalog& default_catalog() {
    static const Catalog c = load_catalog(default_catalog_path());
    return c;
}

}  // namespace

TEST_CASE("tag_of examples") {
    CHECK(tag_of(spec(Framework::tensorflow, "2.1", Source::src, Target::gpu, {Compiler::xla})) ==
          "tensorflow-2.1-src-gpu-xla");
    CHECK(tag_of(spec(Framework::pytorch, "1.4", Source::hub, Target::cpu)) == "pytorch-1.4-hub-cpu");
    CHECK(tag_of(spec(Framework::tensorflow, "1.14", Source::pip, Target::cpu, {Compiler::xla, Compiler::ngraph})) ==
          "tensorflow-1.14-pip-cpu-ngraph-xla");
    CHECK(config_tag_of(spec(Framework::tensorflow, "1.14", Source::pip, Target::cpu, {Compiler::ngraph}),
                        {Compiler::ngraph}) == "tensorflow-1.14-pip-cpu-ngraph+ngraph");
}

TEST_CASE("tag_of matches the independent oracle") {
    gen::Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        const auto s = gen::image(rng);
        CHECK(tag_of(s) == oracle::tag(s));
    }
}

TEST_CASE("default catalog loads and is canonical") {
    const auto& cat = default_catalog();
    CHECK(cat.entries().size() == 28);
    const auto text = fixtures::read_file(default_catalog_path());
    CHECK(catalog_to_json(cat) == text);
    CHECK(validate_catalog_text(text).empty());
    const auto tags = cat.tags();
    CHECK(std::is_sorted(tags.begin(), tags.end()));
    CHECK(std::find(tags.begin(), tags.end(), "tensorflow-1.14-pip-cpu-ngraph") != tags.end());
}

TEST_CASE("empty catalog and duplicate tags") {
    CHECK(parse_catalog("[]").entries().empty());
    const std::string entry = image_to_json(spec(Framework::pytorch, "1.4", Source::hub, Target::cpu));
    try {
        parse_catalog("[" + entry + "," + entry + "]");
        FAIL("expected DuplicateTagError");
    } catch (const DuplicateTagError& e) {
        CHECK(std::string(e.what()).find("pytorch-1.4-hub-cpu") != std::string::npos);
    }
    CHECK_THROWS_AS(default_catalog().with(*default_catalog().find("pytorch-1.4-hub-cpu")), DuplicateTagError);
}

TEST_CASE("catalog I/O and format errors") {
    try {
        load_catalog("/nonexistent/catalog.json");
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(e.code() == "CATALOG_IO");
    }
    try {
        parse_catalog(R"([{"framework":"tensorflow","version":"2.1","source":"hub","target":"cpu",
                          "capabilities":[],"constraints":[],"uri":"x"},{"framework":"caffe"}])");
        FAIL("expected FormatError");
    } catch (const Error& e) {
        CHECK(e.code() == "CATALOG_FORMAT");
        CHECK(std::string(e.what()).find("entry 1") != std::string::npos);
    }
    CHECK_THROWS(parse_catalog("{not json"));
    // A capability hosted by another framework is rejected.
    CHECK_THROWS(parse_catalog(R"([{"framework":"pytorch","version":"1.4","source":"src","target":"cpu",
                                   "capabilities":["xla"],"constraints":[],"uri":"x"}])"));
    const auto findings = validate_catalog_text(
        R"([{"framework":"caffe","version":"1","source":"hub","target":"cpu","capabilities":[],"constraints":[],"uri":"x"},
            {"framework":"tensorflow","version":"01","source":"hub","target":"cpu","capabilities":[],"constraints":[],"uri":"x"}])");
    CHECK(findings.size() >= 2);
}

TEST_CASE("image entry round-trip") {
    gen::Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto s = gen::image(rng);
        CHECK(parse_image_entry(image_to_json(s)) == s);
    }
}

TEST_CASE("resolve: opt-build prefers source images") {
    const auto r = resolve_image(request(Framework::tensorflow, "2.1", true), default_catalog());
    CHECK(r.tag() == "tensorflow-2.1-src-cpu");
    CHECK(r.rationale == Rationale::priority_rule);
    CHECK_FALSE(r.predicted_runtime_s.has_value());
}

TEST_CASE("resolve: without opt-build hub wins over pip") {
    CHECK(resolve_image(request(Framework::pytorch, "1.4", false), default_catalog()).tag() == "pytorch-1.4-hub-cpu");
    CHECK(resolve_image(request(Framework::tensorflow, "1.14", false), default_catalog()).tag() ==
          "tensorflow-1.14-pip-cpu");
    CHECK(resolve_image(request(Framework::cntk, "2.7", false), default_catalog()).tag() == "cntk-2.7-hub-cpu");
}

TEST_CASE("resolve: gpu target follows the accelerator") {
    const auto r = resolve_image(request(Framework::tensorflow, "2.1", true, AccType::nvidia, {Compiler::xla}),
                                 default_catalog());
    CHECK(r.tag() == "tensorflow-2.1-src-gpu-xla");
    CHECK(r.config_tag() == "tensorflow-2.1-src-gpu-xla+xla");
}

TEST_CASE("resolve: nGraph on TensorFlow 2.x is not available") {
    try {
        resolve_image(request(Framework::tensorflow, "2.1", false, AccType::none, {Compiler::ngraph}),
                      default_catalog());
        FAIL("expected NoMatchError");
    } catch (const NoMatchError& e) {
        CHECK(e.filter() == "ngraph unavailable for tensorflow 2.1");
    }
    // The constraint gate on its own: an image claiming nGraph for 2.1.
    auto rogue = spec(Framework::tensorflow, "2.1", Source::pip, Target::cpu, {Compiler::ngraph});
    rogue.constraints.push_back({"ngraph.version", ConstraintOp::lt, "2.0"});
    const auto cat = default_catalog().with(rogue);
    try {
        resolve_image(request(Framework::tensorflow, "2.1", false, AccType::none, {Compiler::ngraph}), cat);
        FAIL("expected NoMatchError");
    } catch (const NoMatchError& e) {
        CHECK(e.filter().find("ngraph.version") != std::string::npos);
    }
    CHECK(resolve_image(request(Framework::tensorflow, "1.14", false, AccType::none, {Compiler::ngraph}),
                        default_catalog())
              .tag() == "tensorflow-1.14-pip-cpu-ngraph");
}

TEST_CASE("resolve: filter order in NoMatch reports") {
    const auto filter_of = [](const OptimisationRequest& r) {
        try {
            resolve_image(r, default_catalog());
        } catch (const NoMatchError& e) {
            return e.filter();
        }
        return std::string("<resolved>");
    };
    CHECK(filter_of(request(Framework::tensorflow, "9.9", false)) == "no image for tensorflow 9.9");
    CHECK(filter_of(request(Framework::tensorflow, "1.14", false, AccType::none, {Compiler::xla})) ==
          "xla unavailable for tensorflow 1.14");
    CHECK(filter_of(request(Framework::pytorch, "1.4", false, AccType::none, {Compiler::glow})).find("only opt-build") ==
          0);
}

TEST_CASE("resolve rejects invalid requests") {
    auto r = request(Framework::tensorflow, "2.1", true);
    r.opt_build.reset();
    CHECK_THROWS_AS(resolve_image(r, default_catalog()), ValidationError);
}

TEST_CASE("resolve with a model uses the ranking") {
    const auto model = load_model(fixtures::path("reference_model.json"));
    const auto mnist = load_workload(fixtures::path("mnist_cnn.json"));
    const auto cpu = load_infra(fixtures::path("cpu_node.json"));
    const ModelContext ctx{model, mnist, cpu};

    const auto r = resolve_image(request(Framework::tensorflow, "2.1", true), default_catalog(), ctx);
    CHECK(r.tag() == "tensorflow-2.1-src-cpu");
    CHECK(r.rationale == Rationale::model_ranked);
    REQUIRE(r.predicted_runtime_s);
    CHECK(*r.predicted_runtime_s == doctest::Approx(44.16).epsilon(1e-9));

    // Without opt-build the hub image is the fastest covered candidate.
    const auto h = resolve_image(request(Framework::tensorflow, "2.1", false), default_catalog(), ctx);
    CHECK(h.tag() == "tensorflow-2.1-hub-cpu");
    CHECK(h.rationale == Rationale::model_ranked);

    // TF 1.14 with a hub image added: hub and pip tie at the baseline, the tag breaks it.
    const auto with_hub = default_catalog().with(spec(Framework::tensorflow, "1.14", Source::hub, Target::cpu));
    const auto t = resolve_image(request(Framework::tensorflow, "1.14", false), with_hub, ctx);
    CHECK(t.tag() == "tensorflow-1.14-hub-cpu");
    const auto brute = oracle::resolve(request(Framework::tensorflow, "1.14", false), with_hub.entries(), &model,
                                       &mnist, &cpu);
    REQUIRE(brute);
    CHECK(brute->tag == t.tag());
}

TEST_CASE("resolve warns when the model covers no candidate") {
    const auto model = load_model(fixtures::path("reference_model.json"));
    const auto mnist = load_workload(fixtures::path("mnist_cnn.json"));
    const auto cpu = load_infra(fixtures::path("cpu_node.json"));
    const auto r = resolve_image(request(Framework::tensorflow, "2.1", true, AccType::none, {Compiler::xla}),
                                 default_catalog(), ModelContext{model, mnist, cpu});
    CHECK(r.rationale == Rationale::priority_rule);
    CHECK(r.tag() == "tensorflow-2.1-src-cpu-xla");
    CHECK(r.warnings.size() == 1);
}

TEST_CASE("property: resolve agrees with brute force and ignores catalog order") {
    gen::Rng rng(424242);
    int resolved = 0;
    for (int i = 0; i < 1000; ++i) {
        auto entries = gen::catalog_entries(rng, 24);
        const auto req = gen::request(rng, true);
        const auto want = oracle::resolve(req, entries);
        for (int perm = 0; perm < 2; ++perm) {
            std::shuffle(entries.begin(), entries.end(), rng);
            const Catalog cat(entries);
            if (want) {
                const auto got = resolve_image(req, cat);
                CHECK(got.tag() == want->tag);
                CHECK(got.rationale == want->rationale);
                ++resolved;
            } else {
                CHECK_THROWS_AS(resolve_image(req, cat), NoMatchError);
            }
        }
    }
    CHECK(resolved > 100);
}
