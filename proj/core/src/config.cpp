#include "fbpr/config.hpp"

#include "fbpr/error.hpp"
#include "fbpr/io.hpp"

#include <json.hpp>

#include <cstdlib>

namespace fbpr {

using nlohmann::json;

namespace {

void check_known_keys(const json& object, std::initializer_list<const char*> known,
                      const std::string& section) {
    for (const auto& [key, value] : object.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw Error(Errc::ConfigError, "unknown config key '" + section + key + "'");
        }
    }
}

} // namespace

Config load_config_file(const std::string& path) {
    Config config;
    json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw Error(Errc::ConfigError, "config file " + path + " is not a JSON object");
    }
    check_known_keys(j, {"backend", "cache", "chat", "scoring"}, "");
    if (j.contains("backend")) {
        const json& b = j["backend"];
        check_known_keys(b, {"url", "index", "max_inflight", "rps"}, "backend.");
        config.backend_url = b.value("url", config.backend_url);
        config.backend_index = b.value("index", config.backend_index);
        config.backend_max_inflight = b.value("max_inflight", config.backend_max_inflight);
        config.backend_rps = b.value("rps", config.backend_rps);
    }
    if (j.contains("cache")) {
        const json& c = j["cache"];
        check_known_keys(c, {"dir"}, "cache.");
        config.cache_dir = c.value("dir", config.cache_dir);
    }
    if (j.contains("chat")) {
        const json& c = j["chat"];
        check_known_keys(c, {"model", "url"}, "chat.");
        config.chat_model = c.value("model", config.chat_model);
        config.chat_url = c.value("url", config.chat_url);
    }
    if (j.contains("scoring")) {
        const json& s = j["scoring"];
        check_known_keys(s, {"delta", "mode"}, "scoring.");
        config.scoring_delta = s.value("delta", config.scoring_delta);
        config.scoring_mode = s.value("mode", config.scoring_mode);
    }
    return config;
}

void apply_env(Config& config) {
    auto get = [](const char* name) -> std::optional<std::string> {
        const char* v = std::getenv(name);
        if (!v) return std::nullopt;
        return std::string(v);
    };
    if (auto v = get("FBPR_BACKEND_URL")) config.backend_url = *v;
    if (auto v = get("FBPR_BACKEND_INDEX")) config.backend_index = *v;
    if (auto v = get("FBPR_BACKEND_MAX_INFLIGHT")) config.backend_max_inflight = std::stoi(*v);
    if (auto v = get("FBPR_BACKEND_RPS")) config.backend_rps = std::stod(*v);
    if (auto v = get("FBPR_CACHE_DIR")) config.cache_dir = *v;
    if (auto v = get("FBPR_CHAT_MODEL")) config.chat_model = *v;
    if (auto v = get("FBPR_CHAT_URL")) config.chat_url = *v;
    if (auto v = get("FBPR_SCORING_DELTA")) config.scoring_delta = std::stod(*v);
    if (auto v = get("FBPR_SCORING_MODE")) config.scoring_mode = *v;
}

Config load_config(const std::optional<std::string>& config_file) {
    Config config;
    if (config_file) {
        config = load_config_file(*config_file);
    }
    apply_env(config);
    return config;
}

std::string config_to_json(const Config& config) {
    json j;
    j["backend"] = json{{"url", config.backend_url},
                        {"index", config.backend_index},
                        {"max_inflight", config.backend_max_inflight},
                        {"rps", config.backend_rps}};
    j["cache"] = json{{"dir", config.cache_dir}};
    j["chat"] = json{{"model", config.chat_model}, {"url", config.chat_url}};
    j["scoring"] = json{{"delta", config.scoring_delta}, {"mode", config.scoring_mode}};
    return j.dump();
}

} // namespace fbpr
