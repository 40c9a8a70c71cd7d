#include "n2n/config.hpp"

#include "n2n/errors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>

namespace n2n {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// Drops a trailing comment that is not inside a quoted string.
std::string strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return std::string(line.substr(0, i));
    }
    return std::string(line);
}

std::string unquote(const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    return v;
}

class Reader {
public:
    Reader(std::size_t line, std::string key, std::string raw)
        : line_(line), key_(std::move(key)), raw_(std::move(raw)) {}

    int integer() const {
        int out = 0;
        auto [p, ec] = std::from_chars(raw_.data(), raw_.data() + raw_.size(), out);
        if (ec != std::errc{} || p != raw_.data() + raw_.size()) fail("an integer");
        return out;
    }

    double real() const {
        try {
            std::size_t used = 0;
            double v = std::stod(raw_, &used);
            if (used != raw_.size()) fail("a number");
            return v;
        } catch (const std::logic_error&) {
            fail("a number");
        }
    }

    std::string string() const { return unquote(raw_); }

private:
    [[noreturn]] void fail(const char* what) const {
        throw ConfigError(fmt::format("config line {}: {} must be {}, got '{}'", line_, key_, what,
                                      raw_));
    }

    std::size_t line_;
    std::string key_;
    std::string raw_;
};

bool apply_prune(PruneConstraints& p, std::string_view field, const Reader& r) {
    if (field == "min") p.min_nodes = r.integer();
    else if (field == "max") p.max_nodes = r.integer();
    else if (field == "min_passages") p.min_passages = r.integer();
    else if (field == "min_tables") p.min_tables = r.integer();
    else return false;
    return true;
}

bool apply(Settings& s, const std::string& key, const Reader& r) {
    auto& c = s.pipeline;
    auto& b = s.backend;
    if (key == "alpha") c.alpha = r.real();
    else if (key == "beta") c.beta = r.real();
    else if (key == "final_k") c.final_k = r.integer();
    else if (key == "final_unique") c.final_unique = r.integer();
    else if (key == "hop_k") c.hop_k = r.integer();
    else if (key == "mode") c.mode = parse_mode(r.string());
    else if (key.starts_with("final_prune.")) return apply_prune(c.final_prune, key.substr(12), r);
    else if (key.starts_with("hop_prune.")) return apply_prune(c.hop_prune, key.substr(10), r);
    else if (key == "backend.endpoint") b.endpoint = r.string();
    else if (key == "backend.model") b.model = r.string();
    else if (key == "backend.timeout") b.timeout_seconds = r.real();
    else if (key == "backend.max_inflight") b.max_inflight = r.integer();
    else if (key == "backend.api_key_env") b.api_key_env = r.string();
    else return false;
    return true;
}

}  // namespace

Settings parse_config(std::string_view text, Settings base) {
    std::istringstream in{std::string(text)};
    std::string raw_line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, raw_line)) {
        ++line_no;
        auto line = trim(strip_comment(raw_line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(fmt::format("config line {}: bad section header", line_no));
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(fmt::format("config line {}: expected key = value", line_no));
        }
        auto key = trim(std::string_view(line).substr(0, eq));
        auto value = trim(std::string_view(line).substr(eq + 1));
        if (!section.empty()) key = section + "." + key;
        if (!apply(base, key, Reader(line_no, key, value))) {
            throw ConfigError(fmt::format("config line {}: unknown key '{}'", line_no, key));
        }
    }
    base.pipeline.validate();
    return base;
}

Settings load_config(const std::filesystem::path& path, Settings base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

nlohmann::ordered_json settings_to_json(const Settings& s) {
    auto j = config_to_json(s.pipeline);
    nlohmann::ordered_json b;
    b["endpoint"] = s.backend.endpoint;
    b["model"] = s.backend.model;
    b["timeout"] = s.backend.timeout_seconds;
    b["max_inflight"] = s.backend.max_inflight;
    b["api_key_env"] = s.backend.api_key_env;
    j["backend"] = std::move(b);
    return j;
}

}  // namespace n2n
