#pragma once

#include "n2n/pipeline.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace n2n {

struct BackendSettings {
    std::string endpoint;
    std::string model;
    double timeout_seconds = 60.0;
    int max_inflight = 4;
    std::string api_key_env = "N2N_API_KEY";

    bool operator==(const BackendSettings&) const = default;
};

struct Settings {
    PipelineConfig pipeline;
    BackendSettings backend;

    bool operator==(const Settings&) const = default;
};

// Minimal TOML subset: `key = value` lines, `[section]` headers, dotted keys,
// `#` comments, quoted or bare strings, integers and reals. Unknown keys are
// errors so typos do not silently fall back to defaults.
//
//   alpha = 0.85
//   mode = "full"
//   [final_prune]
//   min = 12
//   [backend]
//   endpoint = "http://localhost:8000/v1/chat/completions"
Settings parse_config(std::string_view text, Settings base = {});
Settings load_config(const std::filesystem::path& path, Settings base = {});

nlohmann::ordered_json settings_to_json(const Settings& settings);

}  // namespace n2n
