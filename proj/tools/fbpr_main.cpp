#include "commands.hpp"

#include "fbpr/error.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

// Layer the config file then the environment; explicitly set flags are
// applied on top by each subcommand branch, so flags win overall.
void finish_config(fbpr::cli::CommonArgs& args) {
    args.config = fbpr::load_config(args.config_file);
}

void add_config_flag(CLI::App* cmd, fbpr::cli::CommonArgs& args) {
    cmd->add_option("--config", args.config_file, "JSON config file");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"frequency-based probabilistic ranker over corpus co-occurrence counts"};
    app.require_subcommand(1);

    fbpr::cli::FilterArgs filter_args;
    fbpr::cli::ExtractArgs extract_args;
    fbpr::cli::CountArgs count_args;
    fbpr::cli::ScoreArgs score_args;
    fbpr::cli::CompareArgs compare_args;
    fbpr::cli::ReportArgs report_args;

    auto* filter = app.add_subcommand("filter", "keep diagnosis-subset questions, strip the query sentence");
    add_config_flag(filter, filter_args);
    filter->add_option("--input", filter_args.input, "question records (jsonl)")->required();
    filter->add_option("--output", filter_args.output, "subset output (jsonl)")->required();

    auto* extract = app.add_subcommand("extract", "extract and polarity-label clinical concepts via a chat model");
    add_config_flag(extract, extract_args);
    extract->add_option("--subset", extract_args.subset, "filtered questions (jsonl)")->required();
    extract->add_option("--out", extract_args.output, "concept sets output (jsonl)")->required();
    extract->add_option("--k-mode", extract_args.k_mode, "fixed_five | unrestricted")
        ->check(CLI::IsMember({"fixed_five", "unrestricted"}));
    extract->add_option("--prompts", extract_args.prompts_dir, "prompt template directory");
    extract->add_option("--replay", extract_args.replay_fixtures, "replay fixtures (jsonl), no network");
    extract->add_option("--record", extract_args.record_fixtures, "record responses into fixtures (jsonl)");
    std::string extract_model;
    extract->add_option("--model", extract_model, "chat model id");

    auto* count = app.add_subcommand("count", "retrieve diagnosis and co-occurrence counts");
    add_config_flag(count, count_args);
    count->add_option("--questions", count_args.questions, "filtered questions (jsonl)")->required();
    count->add_option("--concepts", count_args.concepts, "concept sets (jsonl)")->required();
    count->add_option("--out", count_args.output, "count bundles output (jsonl)")->required();
    count->add_option("--backend", count_args.backend, "local | remote")
        ->check(CLI::IsMember({"local", "remote"}));
    count->add_option("--corpus", count_args.corpus_file, "local corpus file (one doc per line, or jsonl with text field)");
    count->add_option("--corpus-id", count_args.corpus_id, "identifier for the local corpus");
    count->add_option("--window", count_args.window_tokens, "co-occurrence window in tokens (<=1000)");
    count->add_flag("--enforce-window", count_args.enforce_window, "apply the window to the local backend");
    count->add_option("--jobs", count_args.jobs, "parallel question workers");
    std::string count_cache_dir, count_backend_url, count_backend_index;
    count->add_option("--cache-dir", count_cache_dir, "persistent count cache directory");
    count->add_option("--backend-url", count_backend_url, "remote count service endpoint");
    count->add_option("--backend-index", count_backend_index, "remote index name");

    auto* score = app.add_subcommand("score", "rank options per question and write metrics");
    add_config_flag(score, score_args);
    score->add_option("--counts", score_args.counts, "count bundles (jsonl)")->required();
    score->add_option("--concepts", score_args.concepts, "concept sets (jsonl)")->required();
    score->add_option("--questions", score_args.questions, "filtered questions (jsonl)")->required();
    score->add_option("--out", score_args.output, "rankings output (jsonl)")->required();
    score->add_option("--report-dir", score_args.report_dir, "metrics report directory")->required();
    score->add_option("--threshold", score_args.threshold, "certainty threshold (default 0.99)");
    std::string score_mode;
    double score_delta = -1.0;
    score->add_option("--delta", score_delta, "laplace smoothing (> 0)");
    score->add_option("--mode", score_mode, "ignore | agnostic | reward")
        ->check(CLI::IsMember({"ignore", "agnostic", "reward"}));

    auto* compare = app.add_subcommand("compare", "agreement analysis of two prediction sets");
    add_config_flag(compare, compare_args);
    compare->add_option("--preds-a", compare_args.preds_a, "first predictions (rankings, extractor output, or raw responses)")->required();
    compare->add_option("--preds-b", compare_args.preds_b, "second predictions")->required();
    compare->add_option("--questions", compare_args.questions, "filtered questions (jsonl)")->required();
    compare->add_option("--out-dir", compare_args.out_dir, "agreement report directory")->required();

    auto* report = app.add_subcommand("report", "regenerate metrics from stored rankings");
    add_config_flag(report, report_args);
    report->add_option("--rankings", report_args.rankings, "rankings (jsonl)")->required();
    report->add_option("--questions", report_args.questions, "filtered questions (jsonl)")->required();
    report->add_option("--out-dir", report_args.out_dir, "report directory")->required();
    report->add_option("--threshold", report_args.threshold, "certainty threshold (default 0.99)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (filter->parsed()) {
            finish_config(filter_args);
            return fbpr::cli::cmd_filter(filter_args);
        }
        if (extract->parsed()) {
            finish_config(extract_args);
            if (!extract_model.empty()) extract_args.config.chat_model = extract_model;
            return fbpr::cli::cmd_extract(extract_args);
        }
        if (count->parsed()) {
            finish_config(count_args);
            if (!count_cache_dir.empty()) count_args.config.cache_dir = count_cache_dir;
            if (!count_backend_url.empty()) count_args.config.backend_url = count_backend_url;
            if (!count_backend_index.empty()) count_args.config.backend_index = count_backend_index;
            return fbpr::cli::cmd_count(count_args);
        }
        if (score->parsed()) {
            finish_config(score_args);
            if (score_delta > 0.0) score_args.config.scoring_delta = score_delta;
            if (!score_mode.empty()) score_args.config.scoring_mode = score_mode;
            return fbpr::cli::cmd_score(score_args);
        }
        if (compare->parsed()) {
            finish_config(compare_args);
            return fbpr::cli::cmd_compare(compare_args);
        }
        if (report->parsed()) {
            finish_config(report_args);
            return fbpr::cli::cmd_report(report_args);
        }
    } catch (const fbpr::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
