#include "apthunt/errors.hpp"
#include "apthunt/eval.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "synthetic.hpp"

using namespace apthunt;
using namespace apthunt::eval;

namespace {

GroundTruth truth_of(std::set<std::string> attack, std::set<std::string> benign) {
    GroundTruth t;
    t.attacks.push_back({"a", std::move(attack)});
    t.benign_nodes = std::move(benign);
    return t;
}

}  // namespace

TEST_CASE("single all-attack graph") {
    const auto t = truth_of({"n1", "n2", "n3", "n4", "n5"}, {"b1"});
    const auto m = evaluate({{"n1", "n2", "n3", "n4", "n5"}}, t);
    CHECK(m.graph_precision == 1.0);
    CHECK(m.graph_recall == 1.0);
    CHECK(m.node_precision == 1.0);
    CHECK(m.node_recall == 1.0);
}

TEST_CASE("a benign-only graph halves graph precision") {
    const auto t = truth_of({"n1", "n2"}, {"b1", "b2"});
    const auto m = evaluate({{"n1", "n2"}, {"b1", "b2"}}, t);
    CHECK(m.gtp == 1);
    CHECK(m.gfp == 1);
    CHECK(m.graph_precision == 0.5);
    CHECK(m.node_precision == 0.5);
}

TEST_CASE("undefined ratios and misses") {
    const auto t = truth_of({"n1", "n2"}, {"b1"});
    const auto none = evaluate({}, t);
    CHECK_FALSE(none.graph_precision);
    CHECK_FALSE(none.node_precision);
    CHECK(none.graph_recall == 0.0);
    CHECK(none.gfn == 1);
    CHECK(none.nfn == 2);
    CHECK(to_json(none)["graph_precision"].is_null());

    // node counts are over the union of reported graphs
    const auto m = evaluate({{"n1", "b1"}, {"n1"}}, t);
    CHECK(m.gtp == 2);
    CHECK(m.ntp == 1);
    CHECK(m.nfp == 1);
    CHECK(m.nfn == 1);
}

TEST_CASE("unknown node ids are a reconciliation error") {
    const auto t = truth_of({"n1"}, {"b1"});
    try {
        evaluate({{"n1", "zz", "yy"}}, t);
        FAIL("expected ReconciliationError");
    } catch (const ReconciliationError& e) {
        const std::string what = e.what();
        CHECK(what.find("yy") != std::string::npos);
        CHECK(what.find("zz") != std::string::npos);
    }
    auto lenient = t;
    lenient.unlabeled_is_benign = true;
    CHECK(evaluate({{"n1", "zz"}}, lenient).nfp == 1);
}

TEST_CASE("ground truth parsing") {
    const auto t = GroundTruth::parse(nlohmann::json::parse(
        R"({"attacks":[{"id":"x","nodes":["a","b"]}],"benign_nodes":["c"],"unlabeled":"benign"})"));
    CHECK(t.attack_nodes() == std::set<std::string>{"a", "b"});
    CHECK(t.unlabeled_is_benign);
    CHECK_THROWS_AS(GroundTruth::parse(nlohmann::json::parse(R"({"attacks":[{"nodes":3}]})")), SchemaError);
    CHECK_THROWS_AS(GroundTruth::load(testing::fixture("synthetic/missing.json")), DependencyError);
}

TEST_CASE("metrics on the synthetic dataset match the hand count") {
    const synthetic::Harness h;
    const auto run = h.run("attack_stream.jsonl");
    const auto m = evaluate(run.graphs(), synthetic::truth("attack_truth.json"));
    const auto want = testing::load_json("synthetic/expected_eval.json");
    for (const char* k : {"gtp", "gfp", "gfn", "ntp", "nfp", "nfn"}) {
        CAPTURE(k);
        CHECK(to_json(m)[k] == want[k]);
    }
    for (const char* k : {"graph_precision", "graph_recall", "node_precision", "node_recall"}) {
        CAPTURE(k);
        CHECK(to_json(m)[k].get<double>() == doctest::Approx(want[k].get<double>()).epsilon(1e-12));
    }
}
