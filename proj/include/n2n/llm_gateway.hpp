#pragma once

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

namespace n2n {

inline constexpr std::string_view kNotEnoughContext = "Not enough Context";

struct ChatRequest {
    std::string system;
    std::string user;
    // JSON schema the reply must satisfy; absent for free-text replies.
    std::optional<nlohmann::json> structured_schema;
    std::string schema_name;
    double temperature = 0.0;
    int max_tokens = 512;

    bool operator==(const ChatRequest&) const = default;
};

enum class PromptKind { PlanGeneration, EntityExtraction, AnswerSynthesis };

using PromptSlots = std::map<std::string, std::string, std::less<>>;

// Slot names each prompt needs.
std::vector<std::string> required_slots(PromptKind kind);

// Fills the fixed prompt texts. Values are inserted once and never rescanned,
// so braces inside them are safe. Throws PromptError naming a missing slot.
ChatRequest render_prompt(PromptKind kind, const PromptSlots& slots);

// Transport to a model. Implementations throw TransportError for network
// trouble; complete() decides about retries.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string send(const ChatRequest& request) = 0;
    virtual std::string describe() const = 0;
};

struct RetryPolicy {
    int max_retries = 2;
    std::chrono::milliseconds initial_backoff{250};
};

// Sends with retries on TransportError (exponential backoff). For structured
// requests the reply must parse as JSON, else SchemaError carrying the text.
std::string complete(const ChatRequest& request, Backend& backend,
                     const RetryPolicy& policy = {});

struct MockRule {
    // Every pattern must occur in the user text.
    std::vector<std::string> patterns;
    std::string response;

    MockRule(std::string pattern, std::string response_text)
        : patterns{std::move(pattern)}, response(std::move(response_text)) {}
    MockRule(std::vector<std::string> all_of, std::string response_text)
        : patterns(std::move(all_of)), response(std::move(response_text)) {}

    bool matches(std::string_view user_text) const;
};

// Deterministic offline backend: the first rule whose patterns all occur in
// the user text answers; otherwise the default response.
class ScriptedMock final : public Backend {
public:
    explicit ScriptedMock(std::vector<MockRule> rules,
                          std::string default_response = std::string(kNotEnoughContext));

    // {"default": str?, "rules": [{"match": str | [str], "response": str}]}
    static ScriptedMock from_json(const nlohmann::json& j);
    static ScriptedMock from_file(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    std::string send(const ChatRequest& request) override;
    std::string describe() const override;

    const std::vector<MockRule>& rules() const { return rules_; }

private:
    std::vector<MockRule> rules_;
    std::string default_response_;
};

std::shared_ptr<Backend> scripted_mock(std::vector<MockRule> rules);

struct HttpBackendConfig {
    std::string endpoint;  // full chat-completions URL
    std::string model;
    std::string api_key;
    std::chrono::milliseconds timeout{std::chrono::seconds(60)};
    int max_inflight = 4;
};

// OpenAI-style chat completions over HTTP. Structured requests ask for a
// json_schema response format; a tool call in the reply is unwrapped to its
// arguments.
class HttpChatBackend final : public Backend {
public:
    explicit HttpChatBackend(HttpBackendConfig config);

    std::string send(const ChatRequest& request) override;
    std::string describe() const override;

    static nlohmann::json request_body(const ChatRequest& request, const std::string& model);
    static std::string extract_text(const nlohmann::json& response);

private:
    HttpBackendConfig config_;
    std::counting_semaphore<1024> inflight_;
};

// Records every request/response pair passing through to the wrapped backend.
class RecordingBackend final : public Backend {
public:
    struct Exchange {
        ChatRequest request;
        std::string response;
    };

    explicit RecordingBackend(std::shared_ptr<Backend> inner) : inner_(std::move(inner)) {}

    std::string send(const ChatRequest& request) override;
    std::string describe() const override { return inner_->describe(); }

    std::vector<Exchange> exchanges() const;

private:
    std::shared_ptr<Backend> inner_;
    mutable std::mutex mu_;
    std::vector<Exchange> log_;
};

// The single entry point the pipeline uses for model traffic.
class LlmGateway {
public:
    explicit LlmGateway(std::shared_ptr<Backend> backend, RetryPolicy policy = {})
        : backend_(std::move(backend)), policy_(policy) {}

    std::string complete(const ChatRequest& request) const {
        return n2n::complete(request, *backend_, policy_);
    }

    Backend& backend() const { return *backend_; }

private:
    std::shared_ptr<Backend> backend_;
    RetryPolicy policy_;
};

}  // namespace n2n
