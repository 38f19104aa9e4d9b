#pragma once

#include <istream>
#include <memory>
#include <string>
#include <vector>

#include "apthunt/amid.hpp"
#include "apthunt/config.hpp"
#include "apthunt/detect.hpp"
#include "apthunt/embedding.hpp"
#include "apthunt/lifting.hpp"

namespace apthunt::pipeline {

// Everything a command needs besides the AMID itself.
struct Engine {
    config::Config cfg;
    std::shared_ptr<embedding::VectorTable> table;
    lifting::LiftRules rules;
    lifting::DnsMap dns;
};

Engine load_engine(const config::Config& cfg);
amid::StoreOptions store_options(const config::Config& c);
// Client, exemplars and sink stay with the caller.
detect::DetectOptions detect_options(const config::Config& c);

// Lifts every parseable event; bad lines are logged and skipped.
std::vector<lifting::LiftedEvent> read_lifted(std::istream& in, const Engine& e, const std::string& label = "input");

// Feeds a line-delimited stream through the detector and finishes it.
void run(detect::Detector& det, std::istream& in);

}  // namespace apthunt::pipeline
