#pragma once

#include "fbpr/config.hpp"

#include <optional>
#include <string>

namespace fbpr::cli {

struct CommonArgs {
    std::optional<std::string> config_file;
    Config config; // effective config after file/env/flag layering
};

struct FilterArgs : CommonArgs {
    std::string input;
    std::string output;
};

struct ExtractArgs : CommonArgs {
    std::string subset;
    std::string output;
    std::string k_mode = "fixed_five";
    std::string prompts_dir;
    std::string replay_fixtures;  // replay client when set
    std::string record_fixtures;  // record live responses when set
};

struct CountArgs : CommonArgs {
    std::string questions;
    std::string concepts;
    std::string output;
    std::string backend = "local"; // local | remote
    std::string corpus_file;
    std::string corpus_id;
    int window_tokens = 1000;
    bool enforce_window = false;
    int jobs = 1;
};

struct ScoreArgs : CommonArgs {
    std::string counts;
    std::string concepts;
    std::string questions;
    std::string output;
    std::string report_dir;
    double threshold = 0.99;
};

struct CompareArgs : CommonArgs {
    std::string preds_a;
    std::string preds_b;
    std::string questions;
    std::string out_dir;
};

struct ReportArgs : CommonArgs {
    std::string rankings;
    std::string questions;
    std::string out_dir;
    double threshold = 0.99;
};

int cmd_filter(const FilterArgs& args);
int cmd_extract(const ExtractArgs& args);
int cmd_count(const CountArgs& args);
int cmd_score(const ScoreArgs& args);
int cmd_compare(const CompareArgs& args);
int cmd_report(const ReportArgs& args);

} // namespace fbpr::cli
