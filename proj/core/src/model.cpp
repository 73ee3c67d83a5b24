#include "fbpr/model.hpp"

#include "fbpr/dataset.hpp"
#include "fbpr/error.hpp"
#include "fbpr/surface_forms.hpp"

#include <json.hpp>

#include <cmath>
#include <set>

namespace fbpr {

using nlohmann::json;

const char* to_string(StepDomain v) {
    switch (v) {
    case StepDomain::Step1: return "1";
    case StepDomain::Step23: return "2/3";
    case StepDomain::Unknown: return "unknown";
    }
    return "unknown";
}

const char* to_string(Polarity v) {
    return v == Polarity::Affirmed ? "affirmed" : "negated";
}

const char* to_string(KMode v) {
    return v == KMode::FixedFive ? "fixed_five" : "unrestricted";
}

const char* to_string(NegationMode v) {
    switch (v) {
    case NegationMode::IgnoreNegated: return "ignore";
    case NegationMode::PolarityAgnostic: return "agnostic";
    case NegationMode::RewardAbsence: return "reward";
    }
    return "ignore";
}

NegationMode negation_mode_from_string(const std::string& token) {
    if (token == "ignore") return NegationMode::IgnoreNegated;
    if (token == "agnostic") return NegationMode::PolarityAgnostic;
    if (token == "reward") return NegationMode::RewardAbsence;
    throw Error(Errc::ConfigError, "unknown scoring mode '" + token + "'");
}

KMode k_mode_from_string(const std::string& token) {
    if (token == "fixed_five") return KMode::FixedFive;
    if (token == "unrestricted") return KMode::Unrestricted;
    throw Error(Errc::ConfigError, "unknown k mode '" + token + "'");
}

namespace {

json parse_object(const std::string& record, const char* what) {
    json j = json::parse(record, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw Error(Errc::MalformedResponse, std::string("not a JSON object: ") + what);
    }
    return j;
}

std::string require_string(const json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_string()) {
        throw Error(Errc::MissingField, std::string("record lacks string field '") + field + "'");
    }
    return it->get<std::string>();
}

StepDomain parse_step(const json& j) {
    auto meta = j.find("meta");
    if (meta == j.end() || !meta->is_object()) return StepDomain::Unknown;
    auto step = meta->find("step");
    if (step == meta->end() || !step->is_string()) return StepDomain::Unknown;
    const std::string s = step->get<std::string>();
    if (s == "1") return StepDomain::Step1;
    if (s == "2/3") return StepDomain::Step23;
    return StepDomain::Unknown;
}

} // namespace

Question validate_question(const std::string& json_record) {
    const json j = parse_object(json_record, "question record");

    Question q;
    q.id = require_string(j, "id");
    const std::string question_text = require_string(j, "question");

    auto options_it = j.find("options");
    if (options_it == j.end() || !options_it->is_object()) {
        throw Error(Errc::MissingField, "record '" + q.id + "' lacks options map");
    }
    if (options_it->size() != kOptionCount) {
        throw Error(Errc::OptionCountNotFive,
                    "record '" + q.id + "' has " + std::to_string(options_it->size()) + " options");
    }
    for (int i = 0; i < kOptionCount; ++i) {
        const std::string letter(1, static_cast<char>('A' + i));
        auto opt = options_it->find(letter);
        if (opt == options_it->end() || !opt->is_string()) {
            throw Error(Errc::MissingField, "record '" + q.id + "' lacks option " + letter);
        }
        q.options[i] = opt->get<std::string>();
        if (q.options[i].empty()) {
            throw Error(Errc::MissingField, "record '" + q.id + "' option " + letter + " is empty");
        }
    }
    std::set<std::string> lowered;
    for (const std::string& text : q.options) {
        if (!lowered.insert(ascii_lower(text)).second) {
            throw Error(Errc::DuplicateOptions,
                        "record '" + q.id + "' repeats option text '" + text + "'");
        }
    }

    const std::string answer = require_string(j, "answer");
    if (answer.size() != 1 || answer[0] < 'A' || answer[0] > 'E') {
        throw Error(Errc::GoldIndexOutOfRange,
                    "record '" + q.id + "' answer '" + answer + "' is not a letter A-E");
    }
    q.gold_index = answer[0] - 'A';
    q.step_domain = parse_step(j);

    auto stem = j.find("stem_stripped");
    auto query = j.find("query_sentence");
    if (stem != j.end() && stem->is_string() && query != j.end() && query->is_string()) {
        q.stem = stem->get<std::string>();
        q.query_sentence = query->get<std::string>();
    } else {
        const SentenceSplit split = sentence_split_last(question_text);
        q.stem = split.body;
        q.query_sentence = split.final_sentence;
    }
    return q;
}

std::string serialize_question(const Question& q) {
    json j;
    j["id"] = q.id;
    j["question"] = q.stem.empty() ? q.query_sentence : q.stem + " " + q.query_sentence;
    json options;
    for (int i = 0; i < kOptionCount; ++i) {
        options[std::string(1, static_cast<char>('A' + i))] = q.options[i];
    }
    j["options"] = options;
    j["answer"] = std::string(1, static_cast<char>('A' + q.gold_index));
    if (q.step_domain != StepDomain::Unknown) {
        j["meta"] = json{{"step", to_string(q.step_domain)}};
    }
    j["stem_stripped"] = q.stem;
    j["query_sentence"] = q.query_sentence;
    return j.dump();
}

std::string serialize_concept_set(const ConceptSet& cs) {
    json concepts = json::array();
    for (const Concept& c : cs.concepts) {
        concepts.push_back(json{{"text", c.text}, {"polarity", to_string(c.polarity)}});
    }
    json j;
    j["id"] = cs.question_id;
    j["k_mode"] = to_string(cs.k_mode);
    j["concepts"] = concepts;
    return j.dump();
}

ConceptSet parse_concept_set(const std::string& json_record) {
    const json j = parse_object(json_record, "concept set record");
    ConceptSet cs;
    cs.question_id = require_string(j, "id");
    cs.k_mode = k_mode_from_string(require_string(j, "k_mode"));
    auto concepts = j.find("concepts");
    if (concepts == j.end() || !concepts->is_array() || concepts->empty()) {
        throw Error(Errc::MissingField, "concept set '" + cs.question_id + "' lacks concepts");
    }
    for (const json& c : *concepts) {
        Concept entry;
        entry.text = require_string(c, "text");
        const std::string pol = require_string(c, "polarity");
        if (pol == "affirmed") {
            entry.polarity = Polarity::Affirmed;
        } else if (pol == "negated") {
            entry.polarity = Polarity::Negated;
        } else {
            throw Error(Errc::UnknownLabel, "polarity '" + pol + "'");
        }
        cs.concepts.push_back(std::move(entry));
    }
    if (cs.k_mode == KMode::FixedFive && cs.k() != 5) {
        throw Error(Errc::CountMismatch,
                    "concept set '" + cs.question_id + "' has k=" + std::to_string(cs.k()) +
                        " under fixed_five");
    }
    return cs;
}

std::string serialize_count_bundle(const CountBundle& bundle) {
    json options = json::array();
    for (int d = 0; d < kOptionCount; ++d) {
        json pairs = json::array();
        for (const CountedValue& v : bundle.pairs[d]) {
            pairs.push_back(json{{"count", v.count}, {"approx", v.approx}});
        }
        options.push_back(json{{"count", bundle.diagnosis[d].count},
                               {"approx", bundle.diagnosis[d].approx},
                               {"pairs", pairs}});
    }
    json j;
    j["id"] = bundle.question_id;
    j["corpus"] = json{{"corpus_id", bundle.corpus.corpus_id},
                       {"total_tokens", bundle.corpus.total_tokens},
                       {"total_docs", bundle.corpus.total_docs}};
    j["options"] = options;
    return j.dump();
}

CountBundle parse_count_bundle(const std::string& json_record) {
    const json j = parse_object(json_record, "count bundle record");
    CountBundle bundle;
    bundle.question_id = require_string(j, "id");
    auto corpus = j.find("corpus");
    if (corpus == j.end() || !corpus->is_object()) {
        throw Error(Errc::MissingField, "bundle '" + bundle.question_id + "' lacks corpus meta");
    }
    bundle.corpus.corpus_id = require_string(*corpus, "corpus_id");
    bundle.corpus.total_tokens = corpus->value("total_tokens", std::uint64_t{0});
    bundle.corpus.total_docs = corpus->value("total_docs", std::uint64_t{0});

    auto options = j.find("options");
    if (options == j.end() || !options->is_array() || options->size() != kOptionCount) {
        throw Error(Errc::MissingField,
                    "bundle '" + bundle.question_id + "' must carry exactly 5 option entries");
    }
    for (int d = 0; d < kOptionCount; ++d) {
        const json& o = (*options)[d];
        bundle.diagnosis[d].count = o.value("count", std::uint64_t{0});
        bundle.diagnosis[d].approx = o.value("approx", false);
        auto pairs = o.find("pairs");
        if (pairs == o.end() || !pairs->is_array()) {
            throw Error(Errc::MissingField, "bundle '" + bundle.question_id + "' lacks pair counts");
        }
        for (const json& p : *pairs) {
            bundle.pairs[d].push_back(
                CountedValue{p.value("count", std::uint64_t{0}), p.value("approx", false)});
        }
    }
    return bundle;
}

std::string serialize_ranking(const RankingResult& r) {
    json j;
    j["id"] = r.question_id;
    j["scores"] = r.scores;
    j["predicted_index"] = r.predicted_index;
    j["ranks"] = r.ranks;
    j["gold_rank"] = r.gold_rank;
    j["softmax_top1"] = r.softmax_top1;
    j["mode"] = to_string(r.scoring_mode);
    j["delta"] = r.delta;
    return j.dump();
}

RankingResult parse_ranking(const std::string& json_record) {
    const json j = parse_object(json_record, "ranking record");
    RankingResult r;
    r.question_id = require_string(j, "id");
    auto scores = j.find("scores");
    auto ranks = j.find("ranks");
    if (scores == j.end() || !scores->is_array() || scores->size() != kOptionCount ||
        ranks == j.end() || !ranks->is_array() || ranks->size() != kOptionCount) {
        throw Error(Errc::MissingField, "ranking '" + r.question_id + "' lacks scores/ranks");
    }
    for (int i = 0; i < kOptionCount; ++i) {
        r.scores[i] = (*scores)[i].get<double>();
        r.ranks[i] = (*ranks)[i].get<int>();
    }
    r.predicted_index = j.value("predicted_index", 0);
    r.gold_rank = j.value("gold_rank", 0);
    r.softmax_top1 = j.value("softmax_top1", 0.0);
    r.scoring_mode = negation_mode_from_string(j.value("mode", "ignore"));
    r.delta = j.value("delta", 1.0);

    std::array<bool, kOptionCount> seen{};
    for (int rank : r.ranks) {
        if (rank < 1 || rank > kOptionCount || seen[rank - 1]) {
            throw Error(Errc::MalformedResponse,
                        "ranking '" + r.question_id + "' ranks are not a permutation of 1..5");
        }
        seen[rank - 1] = true;
    }
    if (r.predicted_index < 0 || r.predicted_index >= kOptionCount ||
        r.ranks[r.predicted_index] != 1) {
        throw Error(Errc::MalformedResponse,
                    "ranking '" + r.question_id + "' predicted option does not hold rank 1");
    }
    return r;
}

int gold_rank_of(const RankingResult& r, int gold_index) {
    if (gold_index < 0 || gold_index >= kOptionCount) return 0;
    return r.ranks[gold_index];
}

} // namespace fbpr
