#include "n2n/llm_gateway.hpp"

#include "n2n/errors.hpp"
#include "n2n/http.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <thread>

namespace n2n {

namespace {

constexpr std::string_view kPlanSystem =
    "You are an expert query planner. Your task is to analyze a user's question and create a "
    "multi-hop reasoning plan to answer it. Use the `create_query_plan` tool to structure your "
    "response.\n"
    "\n"
    "IMPORTANT GUIDELINES FOR HOP CLASSIFICATION:\n"
    "\n"
    "- 1-hop: Simple factual questions that can be answered directly.  Examples: \"Who is the "
    "CEO of Apple?\", \"What is the capital of France?\"\n"
    "- 2-hop: Questions requiring an intermediate step. Examples: \"Which NHL team has the "
    "Player of the Year of Atlantic Hockey for the season ending in 2019 signed a agreement "
    "with ?\", \"What goods did the politician elected to the 6th Legislature in Brandon East "
    "trade in ?\",\"What is the city associated with the baseball minor league affiliate that "
    "is based in Anaheim ?\"\n"
    "- 3-hop: Complex questions needing two intermediate steps. Examples: \"Which Primera B "
    "Nacional team finished second in the year the club founded on 21 January 1896 finished "
    "third ?\", \"Which of the women 's wheelchair Marathon winners in Boston with a first name "
    "beginning with 'S ' comes from the 8th most extensive US state ?\", \"What is the capital "
    "of the country whose inductee into the Magic: The Gathering Hall of Fame now writes for "
    "Bluff Magazine?\"\n"
    "\n"
    "IMPORTANT: Be conservative with 3-hop classifications! Most questions only need 1 or 2 "
    "hops.";

constexpr std::string_view kPlanUser = "Here is the question: {question}";

constexpr std::string_view kExtractionUser =
    "Based on the following context, answer the specific question. Respond with only the "
    "entity name and nothing else.\n"
    "\n"
    "Context: \"{context}\"\n"
    "\n"
    "Question: \"{primary_query}\"\n"
    "\n"
    "Answer:";

constexpr std::string_view kSynthesisSystem =
    "You are a helpful assistant that synthesizes direct answers based on a main question, a "
    "reasoning path, and a context. You only give the exact answers and do not provide "
    "explanations. If the context is not sufficient, respond with 'Not enough Context'.";

constexpr std::string_view kSynthesisUser =
    "You are an expert Q&A assistant. Synthesize a final, direct answer to the Main Question by "
    "following the Reasoning Path and using only the provided Context.\n"
    "\n"
    "**Reasoning Path:**\n"
    "{reasoning_path}\n"
    "\n"
    "**Context:**\n"
    "{context}\n"
    "\n"
    "**Main Question:**\n"
    "{question}\n"
    "\n"
    "\n"
    "Based on all the information above, provide a precise and direct answer to the **Main "
    "Question**.\n"
    "If the context does not contain enough information, respond with 'Not enough Context'.\n"
    "If the question is a 'how many' question, respond with only the number.";

nlohmann::json plan_schema() {
    return {
        {"type", "object"},
        {"properties",
         {{"hops", {{"type", "integer"}, {"enum", {1, 2, 3}}}},
          {"initial_query", {{"type", "string"}}},
          {"expected_entity_type", {{"type", "string"}}},
          {"alternatives", {{"type", "array"}, {"items", {{"type", "string"}}}}},
          {"step_templates", {{"type", "array"}, {"items", {{"type", "string"}}}}}}},
        {"required",
         {"hops", "initial_query", "expected_entity_type", "alternatives", "step_templates"}},
        {"additionalProperties", false},
    };
}

// Single pass: a slot is "{name}" for a name in `slots`; other braces pass through.
std::string fill(std::string_view tmpl, const PromptSlots& slots) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            auto close = tmpl.find('}', i);
            if (close != std::string_view::npos) {
                auto name = tmpl.substr(i + 1, close - i - 1);
                auto it = slots.find(name);
                if (it != slots.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += tmpl[i++];
    }
    return out;
}

}  // namespace

std::vector<std::string> required_slots(PromptKind kind) {
    switch (kind) {
        case PromptKind::PlanGeneration: return {"question"};
        case PromptKind::EntityExtraction: return {"context", "primary_query"};
        case PromptKind::AnswerSynthesis: return {"reasoning_path", "context", "question"};
    }
    return {};
}

ChatRequest render_prompt(PromptKind kind, const PromptSlots& slots) {
    for (const auto& name : required_slots(kind)) {
        if (!slots.contains(name)) throw PromptError("missing prompt slot {" + name + "}");
    }
    ChatRequest req;
    switch (kind) {
        case PromptKind::PlanGeneration:
            req.system = std::string(kPlanSystem);
            req.user = fill(kPlanUser, slots);
            req.structured_schema = plan_schema();
            req.schema_name = "create_query_plan";
            break;
        case PromptKind::EntityExtraction:
            req.user = fill(kExtractionUser, slots);
            req.max_tokens = 64;
            break;
        case PromptKind::AnswerSynthesis:
            req.system = std::string(kSynthesisSystem);
            req.user = fill(kSynthesisUser, slots);
            req.max_tokens = 128;
            break;
    }
    return req;
}

std::string complete(const ChatRequest& request, Backend& backend, const RetryPolicy& policy) {
    auto backoff = policy.initial_backoff;
    std::string text;
    for (int attempt = 0;; ++attempt) {
        try {
            text = backend.send(request);
            break;
        } catch (const TransportError& e) {
            if (attempt >= policy.max_retries) {
                throw TransportError("giving up after " + std::to_string(attempt + 1) +
                                     " attempts: " + e.what());
            }
            spdlog::warn("{} (attempt {}), retrying in {} ms", e.what(), attempt + 1,
                         backoff.count());
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
    if (request.structured_schema && !nlohmann::json::accept(text)) {
        throw SchemaError("structured response is not valid JSON", text);
    }
    return text;
}

bool MockRule::matches(std::string_view user_text) const {
    return std::all_of(patterns.begin(), patterns.end(), [&](const std::string& p) {
        return user_text.find(p) != std::string_view::npos;
    });
}

ScriptedMock::ScriptedMock(std::vector<MockRule> rules, std::string default_response)
    : rules_(std::move(rules)), default_response_(std::move(default_response)) {}

std::string ScriptedMock::send(const ChatRequest& request) {
    for (const auto& rule : rules_) {
        if (rule.matches(request.user)) return rule.response;
    }
    return default_response_;
}

std::string ScriptedMock::describe() const {
    return "scripted-mock(" + std::to_string(rules_.size()) + " rules)";
}

ScriptedMock ScriptedMock::from_json(const nlohmann::json& j) {
    std::vector<MockRule> rules;
    for (const auto& r : j.at("rules")) {
        const auto& m = r.at("match");
        auto response = r.at("response").get<std::string>();
        if (m.is_string()) {
            rules.emplace_back(m.get<std::string>(), std::move(response));
        } else {
            rules.emplace_back(m.get<std::vector<std::string>>(), std::move(response));
        }
    }
    return ScriptedMock(std::move(rules),
                        j.value("default", std::string(kNotEnoughContext)));
}

ScriptedMock ScriptedMock::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mock rules file " + path.string());
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid mock rules file " + path.string() + ": " + e.what());
    }
}

nlohmann::json ScriptedMock::to_json() const {
    nlohmann::ordered_json rules = nlohmann::ordered_json::array();
    for (const auto& r : rules_) {
        nlohmann::ordered_json rule;
        if (r.patterns.size() == 1) {
            rule["match"] = r.patterns.front();
        } else {
            rule["match"] = r.patterns;
        }
        rule["response"] = r.response;
        rules.push_back(std::move(rule));
    }
    nlohmann::ordered_json j;
    j["default"] = default_response_;
    j["rules"] = std::move(rules);
    return j;
}

std::shared_ptr<Backend> scripted_mock(std::vector<MockRule> rules) {
    return std::make_shared<ScriptedMock>(std::move(rules));
}

HttpChatBackend::HttpChatBackend(HttpBackendConfig config)
    : config_(std::move(config)), inflight_(std::clamp(config_.max_inflight, 1, 1024)) {}

nlohmann::json HttpChatBackend::request_body(const ChatRequest& request,
                                             const std::string& model) {
    nlohmann::json messages = nlohmann::json::array();
    if (!request.system.empty()) {
        messages.push_back({{"role", "system"}, {"content", request.system}});
    }
    messages.push_back({{"role", "user"}, {"content", request.user}});

    nlohmann::json body = {
        {"model", model},
        {"messages", std::move(messages)},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
    };
    if (request.structured_schema) {
        body["response_format"] = {
            {"type", "json_schema"},
            {"json_schema",
             {{"name", request.schema_name.empty() ? "response" : request.schema_name},
              {"schema", *request.structured_schema}}}};
    }
    return body;
}

std::string HttpChatBackend::extract_text(const nlohmann::json& response) {
    const auto& choices = response.at("choices");
    if (!choices.is_array() || choices.empty()) throw TransportError("response has no choices");
    const auto& message = choices.at(0).at("message");
    if (auto it = message.find("content"); it != message.end() && it->is_string() &&
                                           !it->get<std::string>().empty()) {
        return it->get<std::string>();
    }
    if (auto calls = message.find("tool_calls"); calls != message.end() && calls->is_array() &&
                                                 !calls->empty()) {
        const auto& args = calls->at(0).at("function").at("arguments");
        return args.is_string() ? args.get<std::string>() : args.dump();
    }
    return {};
}

std::string HttpChatBackend::send(const ChatRequest& request) {
    inflight_.acquire();
    struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
    } release{inflight_};

    HttpHeaders headers;
    if (!config_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + config_.api_key);
    auto raw = http_post_json(config_.endpoint, request_body(request, config_.model).dump(),
                              headers, config_.timeout);
    try {
        return extract_text(nlohmann::json::parse(raw));
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("malformed chat completion response: ") + e.what());
    }
}

std::string HttpChatBackend::describe() const {
    return "http(" + config_.endpoint + ", model=" + config_.model + ")";
}

std::string RecordingBackend::send(const ChatRequest& request) {
    auto response = inner_->send(request);
    std::lock_guard lock(mu_);
    log_.push_back({request, response});
    return response;
}

std::vector<RecordingBackend::Exchange> RecordingBackend::exchanges() const {
    std::lock_guard lock(mu_);
    return log_;
}

}  // namespace n2n
