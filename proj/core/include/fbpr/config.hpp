#pragma once

#include <optional>
#include <string>

namespace fbpr {

/// Runtime configuration. Sources in rising precedence: config file, FBPR_*
/// environment variables, command-line flags (applied by the CLI).
struct Config {
    std::string backend_url;
    std::string backend_index;
    int backend_max_inflight = 4;
    double backend_rps = 10.0;
    std::string cache_dir;
    std::string chat_model = "gpt-4o";
    std::string chat_url = "https://api.openai.com/v1/chat/completions";
    double scoring_delta = 1.0;
    std::string scoring_mode = "ignore"; // ignore | agnostic | reward
};

/// Parse a JSON config file with sections backend{url,index,max_inflight,rps},
/// cache{dir}, chat{model,url}, scoring{delta,mode}. Unknown keys raise
/// ConfigError rather than passing silently.
Config load_config_file(const std::string& path);

/// Overlay FBPR_BACKEND_URL, FBPR_BACKEND_INDEX, FBPR_BACKEND_MAX_INFLIGHT,
/// FBPR_BACKEND_RPS, FBPR_CACHE_DIR, FBPR_CHAT_MODEL, FBPR_CHAT_URL,
/// FBPR_SCORING_DELTA, FBPR_SCORING_MODE onto a config.
void apply_env(Config& config);

/// File (if given) then environment.
Config load_config(const std::optional<std::string>& config_file);

/// The effective configuration as a JSON document, embedded in outputs for
/// provenance.
std::string config_to_json(const Config& config);

} // namespace fbpr
