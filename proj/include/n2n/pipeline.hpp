#pragma once

#include "n2n/bridge_selector.hpp"
#include "n2n/corpus.hpp"
#include "n2n/errors.hpp"
#include "n2n/evidence_graph.hpp"
#include "n2n/llm_gateway.hpp"
#include "n2n/planner.hpp"
#include "n2n/retriever.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace n2n {

enum class Mode { VanillaRag, DecompRag, GraphNoRank, Full };

std::string_view to_string(Mode mode);
// Accepts "vanilla", "decomp", "graph-norank", "full" and the enum spellings.
Mode parse_mode(std::string_view name);

struct PipelineConfig {
    double alpha = 0.85;
    int final_k = 100;
    int final_unique = 50;
    PruneConstraints final_prune{12, 25, 2, 2};
    int hop_k = 20;
    PruneConstraints hop_prune{5, 10, 0, 0};
    double beta = 1.0;
    Mode mode = Mode::Full;

    // GraphNoRank ranks on semantics alone.
    double effective_alpha() const { return mode == Mode::GraphNoRank ? 1.0 : alpha; }

    // Throws ConfigError describing the first bad value.
    void validate() const;

    bool operator==(const PipelineConfig&) const = default;
};

nlohmann::ordered_json config_to_json(const PipelineConfig& config);

struct HopResult {
    int hop_index = 1;
    std::string query;
    std::vector<ScoredDocument> retrieved;
    EvidenceGraph pruned_graph;
    std::optional<EntityBinding> extracted_entity;
    std::vector<std::string> warnings;
};

struct AnswerRecord {
    std::string id;
    std::string question;
    Mode mode = Mode::Full;
    QueryPlan plan;
    std::vector<HopResult> hops;
    std::size_t final_pool_size = 0;
    EvidenceGraph final_graph;
    // Document id -> where it was retrieved ("hop1", "hop2", "final").
    std::map<std::string, std::vector<std::string>> provenance;
    std::string reasoning_path;
    std::string answer;
    std::vector<std::string> warnings;
    std::optional<std::string> error;
};

nlohmann::ordered_json record_to_json(const AnswerRecord& record);

// Raised when the model backend fails mid-question; carries what was done.
class PipelineError : public Error {
public:
    PipelineError(const std::string& what, AnswerRecord partial)
        : Error(what), partial_(std::move(partial)) {}
    const AnswerRecord& partial() const noexcept { return partial_; }

private:
    AnswerRecord partial_;
};

struct PipelineContext {
    const Corpus& corpus;
    const Retriever& retriever;
    const LlmGateway& llm;
    PipelineConfig config;
};

// Retrieves for the query and its alternatives, curates the hop graph and,
// when `extract` is set, asks the model for the intermediate entity.
HopResult execute_hop(int hop_index, const std::string& step_query,
                      std::span<const std::string> alternatives, bool extract,
                      const PipelineContext& ctx);

// Max-score union of every hop retrieval and the final retrieval, cut to the
// best `final_unique` and split by kind.
HybridPool aggregate_evidence(std::span<const HopResult> hops,
                              std::span<const ScoredDocument> final_retrieval,
                              std::size_t final_unique);

// "Step i: <query>" per plan step, bindings resolved where known.
std::string render_reasoning_path(const QueryPlan& plan, std::span<const HopResult> hops);

AnswerRecord answer_question(const std::string& id, const std::string& question,
                             const PipelineContext& ctx);

struct Question {
    std::string id;
    std::string question;
    std::optional<std::string> answer;
};

// JSON lines with "id", "question" and an optional "answer".
std::vector<Question> load_questions(const std::filesystem::path& path);

// Answers every question with up to `max_concurrency` in flight. Failures
// become records with `error` set. Output order follows the input.
std::vector<AnswerRecord> answer_all(std::span<const Question> questions,
                                     const PipelineContext& ctx, int max_concurrency);

}  // namespace n2n
