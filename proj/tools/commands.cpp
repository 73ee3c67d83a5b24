#include "commands.hpp"

#include "fbpr/chat_client.hpp"
#include "fbpr/counts.hpp"
#include "fbpr/dataset.hpp"
#include "fbpr/error.hpp"
#include "fbpr/evaluation.hpp"
#include "fbpr/extraction.hpp"
#include "fbpr/io.hpp"
#include "fbpr/model.hpp"
#include "fbpr/remote_client.hpp"
#include "fbpr/scoring.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace fbpr::cli {

using nlohmann::json;

namespace {

bool is_meta_line(const std::string& line) {
    if (line.empty()) return true;
    json j = json::parse(line, nullptr, false);
    return !j.is_discarded() && j.is_object() && j.contains("_meta");
}

std::string meta_line(const std::string& command, const Config& config) {
    json j;
    j["_meta"] = json{{"tool", "fbpr"},
                      {"command", command},
                      {"config", json::parse(config_to_json(config))}};
    return j.dump();
}

std::string provenance_json(const std::string& command, const Config& config,
                            const json& flags = json::object()) {
    json j;
    j["command"] = command;
    j["config"] = json::parse(config_to_json(config));
    if (!flags.empty()) j["flags"] = flags;
    return j.dump();
}

std::vector<Question> load_questions(const std::string& path) {
    std::vector<Question> questions;
    for (const std::string& line : read_lines(path)) {
        if (is_meta_line(line)) continue;
        questions.push_back(validate_question(line));
    }
    return questions;
}

std::unordered_map<std::string, ConceptSet> load_concept_sets(const std::string& path) {
    std::unordered_map<std::string, ConceptSet> sets;
    for (const std::string& line : read_lines(path)) {
        if (is_meta_line(line)) continue;
        ConceptSet cs = parse_concept_set(line);
        const std::string id = cs.question_id;
        if (!sets.emplace(id, std::move(cs)).second) {
            throw Error(Errc::IdMismatch, "duplicate concept set for '" + id + "' in " + path);
        }
    }
    return sets;
}

std::vector<CountBundle> load_bundles(const std::string& path) {
    std::vector<CountBundle> bundles;
    for (const std::string& line : read_lines(path)) {
        if (is_meta_line(line)) continue;
        bundles.push_back(parse_count_bundle(line));
    }
    return bundles;
}

std::vector<RankingResult> load_rankings(const std::string& path) {
    std::vector<RankingResult> rankings;
    for (const std::string& line : read_lines(path)) {
        if (is_meta_line(line)) continue;
        rankings.push_back(parse_ranking(line));
    }
    return rankings;
}

// Predictions arrive either as rankings (predicted_index), as extractor
// output (extracted_index / choice), or as raw model responses that still
// need the three-tier extractor.
std::vector<MethodPrediction> load_predictions(const std::string& path,
                                               const std::vector<Question>& questions) {
    std::unordered_map<std::string, const Question*> by_id;
    for (const Question& q : questions) by_id.emplace(q.id, &q);

    std::vector<MethodPrediction> predictions;
    std::size_t line_no = 0;
    for (const std::string& line : read_lines(path)) {
        ++line_no;
        if (is_meta_line(line)) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("id")) {
            throw Error(Errc::MalformedResponse,
                        path + ":" + std::to_string(line_no) + ": not a prediction record");
        }
        MethodPrediction p;
        p.question_id = j["id"].get<std::string>();
        if (j.contains("predicted_index")) {
            p.choice = j["predicted_index"].get<int>();
        } else if (j.contains("extracted_index")) {
            if (!j["extracted_index"].is_null()) p.choice = j["extracted_index"].get<int>();
        } else if (j.contains("choice")) {
            if (!j["choice"].is_null()) p.choice = j["choice"].get<int>();
        } else if (j.contains("raw_response")) {
            auto it = by_id.find(p.question_id);
            if (it == by_id.end()) {
                throw Error(Errc::IdMismatch,
                            "prediction id '" + p.question_id + "' has no question");
            }
            const LlmPrediction extracted =
                extract_answer(j["raw_response"].get<std::string>(), it->second->options);
            p.choice = extracted.extracted_index;
        } else {
            throw Error(Errc::MalformedResponse, path + ":" + std::to_string(line_no) +
                                                     ": record carries no usable prediction");
        }
        predictions.push_back(std::move(p));
    }
    return predictions;
}

} // namespace

int cmd_filter(const FilterArgs& args) {
    const std::vector<std::string> lines = read_lines(args.input);

    std::ostringstream out;
    out << meta_line("filter", args.config) << "\n";
    std::size_t kept = 0;
    std::size_t dropped = 0;
    std::size_t line_no = 0;
    for (const std::string& line : lines) {
        ++line_no;
        if (is_meta_line(line)) continue;
        Question q;
        try {
            q = validate_question(line);
        } catch (const Error& e) {
            std::cerr << "error: " << args.input << ":" << line_no << ": " << e.what() << "\n";
            return 1;
        }
        if (!is_diagnosis_query(q.query_sentence)) {
            ++dropped;
            continue;
        }
        json record = json::parse(line);
        record["stem_stripped"] = q.stem;
        record["query_sentence"] = q.query_sentence;
        out << record.dump() << "\n";
        ++kept;
    }
    write_file_atomic(args.output, out.str());
    std::cout << "kept=" << kept << " dropped=" << dropped << "\n";
    return 0;
}

int cmd_extract(const ExtractArgs& args) {
    const std::vector<Question> questions = load_questions(args.subset);
    const KMode k_mode = k_mode_from_string(args.k_mode);
    const std::filesystem::path prompt_dir =
        args.prompts_dir.empty() ? default_prompt_dir() : std::filesystem::path(args.prompts_dir);
    const PromptTemplates templates = load_prompt_templates(prompt_dir, k_mode);

    std::shared_ptr<ChatClient> client;
    if (!args.replay_fixtures.empty()) {
        client = std::make_shared<ReplayChatClient>(args.replay_fixtures);
    } else {
        ChatClientConfig chat_config;
        chat_config.url = args.config.chat_url;
        client = std::make_shared<HttpChatClient>(chat_config);
    }
    if (!args.record_fixtures.empty()) {
        client = std::make_shared<RecordingChatClient>(client, args.record_fixtures);
    }

    // Resume: keep valid existing lines, drop a torn trailing line if any.
    std::set<std::string> done;
    std::vector<std::string> kept_lines;
    if (std::filesystem::exists(args.output)) {
        std::size_t invalid = 0;
        for (const std::string& line : read_lines(args.output)) {
            if (line.empty()) continue;
            if (is_meta_line(line)) {
                kept_lines.push_back(line);
                continue;
            }
            try {
                ConceptSet cs = parse_concept_set(line);
                done.insert(cs.question_id);
                kept_lines.push_back(line);
            } catch (const Error&) {
                ++invalid;
            }
        }
        if (invalid > 0) {
            std::cerr << "warning: dropped " << invalid << " unreadable line(s) from "
                      << args.output << "\n";
        }
    }
    if (kept_lines.empty()) {
        kept_lines.push_back(meta_line("extract", args.config));
    }
    {
        std::ostringstream content;
        for (const std::string& line : kept_lines) content << line << "\n";
        write_file_atomic(args.output, content.str());
    }

    std::ofstream out(args.output, std::ios::app);
    std::ofstream errors;
    std::size_t extracted = 0;
    std::size_t skipped = 0;
    std::size_t failed = 0;
    for (const Question& q : questions) {
        if (done.count(q.id)) {
            ++skipped;
            continue;
        }
        try {
            ExtractionRequest request;
            request.question_id = q.id;
            request.stem = q.stem;
            request.k_mode = k_mode;
            request.model_id = args.config.chat_model;
            ConceptSet concepts = extract_concepts(request, *client, templates);
            concepts = label_polarity(q.stem, concepts, *client, templates, args.config.chat_model);
            out << serialize_concept_set(concepts) << "\n";
            out.flush();
            ++extracted;
        } catch (const Error& e) {
            ++failed;
            if (!errors.is_open()) {
                errors.open(args.output + ".errors.jsonl", std::ios::app);
            }
            errors << json{{"id", q.id}, {"error", e.what()}}.dump() << "\n";
            errors.flush();
            std::cerr << "warning: extraction failed for '" << q.id << "': " << e.what() << "\n";
        }
    }
    std::cout << "extracted=" << extracted << " skipped=" << skipped << " failed=" << failed
              << "\n";
    return 0;
}

int cmd_count(const CountArgs& args) {
    const std::vector<Question> questions = load_questions(args.questions);
    const auto concept_sets = load_concept_sets(args.concepts);

    std::shared_ptr<CountBackend> backend;
    if (args.backend == "local") {
        if (args.corpus_file.empty()) {
            throw Error(Errc::ConfigError, "--backend local needs --corpus");
        }
        std::string corpus_id = args.corpus_id;
        if (corpus_id.empty()) {
            corpus_id = "local:" + std::filesystem::path(args.corpus_file).stem().string();
        }
        auto corpus = load_corpus_file(args.corpus_file, corpus_id);
        backend = std::make_shared<LocalCountBackend>(corpus, args.enforce_window);
    } else if (args.backend == "remote") {
        RemoteBackendConfig remote;
        remote.url = args.config.backend_url;
        remote.index = args.config.backend_index;
        remote.max_inflight = args.config.backend_max_inflight;
        remote.requests_per_second = args.config.backend_rps;
        if (remote.url.empty()) {
            throw Error(Errc::ConfigError, "remote backend needs backend.url configured");
        }
        backend = std::make_shared<RemoteCountClient>(remote);
    } else {
        throw Error(Errc::ConfigError, "unknown backend '" + args.backend + "'");
    }
    if (!args.config.cache_dir.empty()) {
        auto store = std::make_shared<CountCache>(args.config.cache_dir);
        backend = std::make_shared<CachingBackend>(backend, store);
    }

    PlanOptions plan_options;
    plan_options.window_tokens = args.window_tokens;
    plan_options.corpus_id = backend->corpus().corpus_id;

    struct Slot {
        bool ok = false;
        bool skipped = false;
        CountBundle bundle;
        std::string error;
    };
    std::vector<const Question*> todo;
    std::vector<Slot> slots;
    for (const Question& q : questions) {
        todo.push_back(&q);
    }
    slots.resize(todo.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= todo.size()) return;
            const Question& q = *todo[i];
            auto cs = concept_sets.find(q.id);
            if (cs == concept_sets.end()) {
                slots[i].skipped = true;
                continue;
            }
            try {
                slots[i].bundle = build_count_bundle(q, cs->second, *backend, plan_options);
                slots[i].ok = true;
            } catch (const Error& e) {
                slots[i].error = e.what();
            }
        }
    };
    const int jobs = std::max(1, args.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    std::ostringstream out;
    out << meta_line("count", args.config) << "\n";
    std::size_t counted = 0;
    std::size_t skipped = 0;
    std::size_t failed = 0;
    std::size_t approx_counts = 0;
    std::size_t total_counts = 0;
    std::ostringstream errors;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const Slot& slot = slots[i];
        if (slot.skipped) {
            ++skipped;
            std::cerr << "warning: no concepts for '" << todo[i]->id << "'; skipping\n";
            continue;
        }
        if (!slot.ok) {
            ++failed;
            errors << json{{"id", todo[i]->id}, {"error", slot.error}}.dump() << "\n";
            std::cerr << "warning: counting failed for '" << todo[i]->id << "': " << slot.error
                      << "\n";
            continue;
        }
        for (int d = 0; d < kOptionCount; ++d) {
            ++total_counts;
            if (slot.bundle.diagnosis[d].approx) ++approx_counts;
            for (const CountedValue& v : slot.bundle.pairs[d]) {
                ++total_counts;
                if (v.approx) ++approx_counts;
            }
        }
        out << serialize_count_bundle(slot.bundle) << "\n";
        ++counted;
    }
    write_file_atomic(args.output, out.str());
    if (failed > 0) {
        write_file_atomic(args.output + ".errors.jsonl", errors.str());
    }
    std::cout << "counted=" << counted << " skipped=" << skipped << " failed=" << failed
              << " approx=" << approx_counts << "/" << total_counts << "\n";
    return 0;
}

int cmd_score(const ScoreArgs& args) {
    const std::vector<Question> questions = load_questions(args.questions);
    const auto concept_sets = load_concept_sets(args.concepts);
    const std::vector<CountBundle> bundles = load_bundles(args.counts);

    std::unordered_map<std::string, const Question*> by_id;
    for (const Question& q : questions) by_id.emplace(q.id, &q);

    ScoringConfig scoring;
    scoring.delta = args.config.scoring_delta;
    scoring.mode = negation_mode_from_string(args.config.scoring_mode);

    std::vector<RankingResult> results;
    results.reserve(bundles.size());
    for (const CountBundle& bundle : bundles) {
        auto cs = concept_sets.find(bundle.question_id);
        if (cs == concept_sets.end()) {
            throw Error(Errc::IdMismatch, "no concepts for bundle '" + bundle.question_id + "'");
        }
        auto q = by_id.find(bundle.question_id);
        if (q == by_id.end()) {
            throw Error(Errc::IdMismatch, "no question for bundle '" + bundle.question_id + "'");
        }
        RankingResult r = rank_options(bundle, cs->second, scoring);
        r.gold_rank = gold_rank_of(r, q->second->gold_index);
        results.push_back(std::move(r));
    }

    std::ostringstream out;
    out << meta_line("score", args.config) << "\n";
    for (const RankingResult& r : results) {
        out << serialize_ranking(r) << "\n";
    }
    write_file_atomic(args.output, out.str());

    ScoreReportInputs report;
    report.config_json = provenance_json("score", args.config,
                                         json{{"threshold", args.threshold}});
    report.results = results;
    report.questions = questions;
    report.certainty_threshold = args.threshold;
    emit_score_report(report, args.report_dir);

    std::cout << "scored=" << results.size() << " accuracy=" << accuracy(results, questions)
              << "\n";
    return 0;
}

int cmd_compare(const CompareArgs& args) {
    const std::vector<Question> questions = load_questions(args.questions);
    const std::vector<MethodPrediction> a = load_predictions(args.preds_a, questions);
    const std::vector<MethodPrediction> b = load_predictions(args.preds_b, questions);

    const AgreementReport report = compare_methods(a, b, questions);
    emit_agreement_report(provenance_json("compare", args.config), report, args.out_dir);

    std::cout << "n=" << report.n << " joint=" << report.joint_accuracy
              << " agreement=" << report.agreement_rate << "\n";
    return 0;
}

int cmd_report(const ReportArgs& args) {
    const std::vector<Question> questions = load_questions(args.questions);
    const std::vector<RankingResult> results = load_rankings(args.rankings);

    ScoreReportInputs report;
    report.config_json = provenance_json("report", args.config,
                                         json{{"threshold", args.threshold}});
    report.results = results;
    report.questions = questions;
    report.certainty_threshold = args.threshold;
    const auto written = emit_score_report(report, args.out_dir);

    std::cout << "reported=" << results.size() << " files=" << written.size() << "\n";
    return 0;
}

} // namespace fbpr::cli
