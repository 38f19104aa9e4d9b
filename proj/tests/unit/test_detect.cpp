#include <sstream>

#include "apthunt/reasoning.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "synthetic.hpp"

using namespace apthunt;
using reasoning::Stage;

namespace {

const synthetic::Harness& harness() {
    static const synthetic::Harness h;
    return h;
}

}  // namespace

TEST_CASE("synthetic attack stream raises one complete alert") {
    const auto run = harness().run("attack_stream.jsonl");
    REQUIRE(run.alerts.size() == 1);
    CHECK(run.alerts[0].lifecycle.stages() == reasoning::StageSet{Stage::initial_compromise, Stage::establish_foothold,
                                                                  Stage::escalate_privilege, Stage::complete_mission});
    CHECK(run.of_type("alert").size() == 1);
    CHECK(run.of_type("report").size() >= 1);
    CHECK(run.stats.errors == 0);
    // the incomplete admin session on the other host is suppressed
    CHECK(run.stats.suppressions >= 1);
}

TEST_CASE("benign stream raises nothing") {
    const auto run = harness().run("benign_stream.jsonl");
    CHECK(run.alerts.empty());
    CHECK(run.of_type("alert").empty());
    CHECK(run.of_type("alert_update").empty());
}

TEST_CASE("stream missing Establish Foothold is suppressed") {
    const auto run = harness().run("attack_incomplete.jsonl");
    CHECK(run.alerts.empty());
    bool ws01 = false;
    for (const auto& s : run.of_type("suppression")) {
        for (const auto& n : s.at("nodes"))
            if (n.get<std::string>().rfind("ws01|", 0) == 0) ws01 = true;
        const auto rules = s.at("rules").dump();
        CHECK(rules.find("missing") != std::string::npos);
    }
    CHECK(ws01);
}

TEST_CASE("replaying a stream is byte-identical") {
    const auto a = harness().run("attack_stream.jsonl").dump();
    const auto b = harness().run("attack_stream.jsonl").dump();
    CHECK(a == b);
    // worker count does not change the output
    auto o = pipeline::detect_options(harness().engine.cfg);
    o.workers = 1;
    std::ifstream in(synthetic::dir() / "attack_stream.jsonl");
    CHECK(harness().run(in, o).dump() == a);
}

TEST_CASE("malformed lines are counted and the run continues") {
    std::ifstream in(synthetic::dir() / "attack_stream.jsonl");
    std::stringstream buf;
    buf << "{broken\n" << in.rdbuf();
    const auto run = harness().run(buf, pipeline::detect_options(harness().engine.cfg));
    CHECK(run.stats.errors == 1);
    CHECK(run.alerts.size() == 1);
}

TEST_CASE("calibration on the benign stream") {
    const auto& a = harness().audit;
    CHECK(a.theta_q >= 0.0);
    CHECK(a.n > 0);
    CHECK(harness().store->calibrated());
}
