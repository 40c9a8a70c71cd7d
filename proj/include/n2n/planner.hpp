#pragma once

#include "n2n/llm_gateway.hpp"

#include <json.hpp>

#include <span>
#include <string>
#include <vector>

namespace n2n {

inline constexpr std::size_t kMaxAlternatives = 4;

// Structured decomposition of a question. step_templates[i] builds the query
// of hop i+2 and may reference {entity1}..{entity(i+1)}.
struct QueryPlan {
    int hops = 1;
    std::string initial_query;
    std::string expected_entity_type;
    std::vector<std::string> alternatives;
    std::vector<std::string> step_templates;

    bool operator==(const QueryPlan&) const = default;
};

struct EntityBinding {
    int index = 1;
    std::string value;

    bool operator==(const EntityBinding&) const = default;
};

nlohmann::json plan_to_json(const QueryPlan& plan);

// Throws PlanError when a field is missing or has the wrong JSON type.
// Extra alternatives beyond kMaxAlternatives are dropped.
QueryPlan plan_from_json(const nlohmann::json& j);

// One human-readable violation per broken rule; empty when the plan is valid.
std::vector<std::string> validate_plan(const QueryPlan& plan);

// Indices N of every {entityN} in order of appearance.
std::vector<int> placeholder_indices(std::string_view tmpl);

// Substitutes every {entityN}. Throws PlanError("unbound {entityN}") when a
// placeholder has no binding.
std::string instantiate_template(std::string_view tmpl, std::span<const EntityBinding> bindings);

QueryPlan fallback_plan(const std::string& question);

struct PlanOutcome {
    QueryPlan plan;
    std::vector<std::string> warnings;
    int attempts = 0;
    bool fell_back = false;
};

// Asks the model for a plan, retries once with the violations appended, then
// falls back to a one-hop plan over the raw question. Transport errors
// propagate.
PlanOutcome generate_plan(const std::string& question, const LlmGateway& llm);

}  // namespace n2n
