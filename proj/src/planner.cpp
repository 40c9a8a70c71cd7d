#include "n2n/planner.hpp"

#include "n2n/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <regex>

namespace n2n {

namespace {

const std::regex& placeholder_re() {
    static const std::regex re(R"(\{entity(\d+)\})");
    return re;
}

std::string trimmed(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

nlohmann::json plan_to_json(const QueryPlan& plan) {
    nlohmann::ordered_json j;
    j["hops"] = plan.hops;
    j["initial_query"] = plan.initial_query;
    j["expected_entity_type"] = plan.expected_entity_type;
    j["alternatives"] = plan.alternatives;
    j["step_templates"] = plan.step_templates;
    return j;
}

QueryPlan plan_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw PlanError("plan must be a JSON object");
    auto str_field = [&](const char* key) {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string()) {
            throw PlanError(fmt::format("{}: expected a string", key));
        }
        return it->get<std::string>();
    };
    auto list_field = [&](const char* key) {
        std::vector<std::string> out;
        auto it = j.find(key);
        if (it == j.end()) return out;
        if (!it->is_array()) throw PlanError(fmt::format("{}: expected a list of strings", key));
        for (const auto& v : *it) {
            if (!v.is_string()) throw PlanError(fmt::format("{}: expected a list of strings", key));
            out.push_back(v.get<std::string>());
        }
        return out;
    };

    QueryPlan plan;
    auto hops = j.find("hops");
    if (hops == j.end() || !hops->is_number_integer()) throw PlanError("hops: expected an integer");
    plan.hops = hops->get<int>();
    plan.initial_query = str_field("initial_query");
    if (j.contains("expected_entity_type")) plan.expected_entity_type = str_field("expected_entity_type");
    plan.alternatives = list_field("alternatives");
    if (plan.alternatives.size() > kMaxAlternatives) plan.alternatives.resize(kMaxAlternatives);
    plan.step_templates = list_field("step_templates");
    return plan;
}

std::vector<int> placeholder_indices(std::string_view tmpl) {
    std::vector<int> out;
    std::string s(tmpl);
    for (auto it = std::sregex_iterator(s.begin(), s.end(), placeholder_re());
         it != std::sregex_iterator(); ++it) {
        out.push_back(std::stoi((*it)[1].str()));
    }
    return out;
}

std::vector<std::string> validate_plan(const QueryPlan& plan) {
    std::vector<std::string> v;
    if (plan.hops < 1 || plan.hops > 3) {
        v.push_back(fmt::format("hops: must be 1, 2 or 3, got {}", plan.hops));
    }
    if (trimmed(plan.initial_query).empty()) v.push_back("initial_query: must be non-empty");
    if (plan.alternatives.size() > kMaxAlternatives) {
        v.push_back(fmt::format("alternatives: at most {} allowed", kMaxAlternatives));
    }

    if (plan.hops >= 1 && plan.hops <= 3) {
        auto expected = static_cast<std::size_t>(plan.hops - 1);
        if (plan.step_templates.size() != expected) {
            v.push_back(fmt::format("step_templates: expected {} template{}", expected,
                                    expected == 1 ? "" : "s"));
        }
    }
    for (std::size_t i = 0; i < plan.step_templates.size(); ++i) {
        auto refs = placeholder_indices(plan.step_templates[i]);
        if (refs.empty()) {
            v.push_back(fmt::format("step_templates[{}]: needs an {{entityN}} placeholder", i));
        }
        // Template i runs after i+1 hops have produced entities.
        for (int r : refs) {
            if (r < 1 || r > static_cast<int>(i) + 1) {
                v.push_back(fmt::format("step_templates[{}]: forward reference {{entity{}}}", i, r));
            }
        }
    }
    return v;
}

std::string instantiate_template(std::string_view tmpl, std::span<const EntityBinding> bindings) {
    std::string s(tmpl);
    std::string out;
    std::size_t last = 0;
    for (auto it = std::sregex_iterator(s.begin(), s.end(), placeholder_re());
         it != std::sregex_iterator(); ++it) {
        int idx = std::stoi((*it)[1].str());
        auto b = std::find_if(bindings.begin(), bindings.end(),
                              [&](const EntityBinding& e) { return e.index == idx; });
        if (b == bindings.end()) throw PlanError(fmt::format("unbound {{entity{}}}", idx));
        out.append(s, last, static_cast<std::size_t>(it->position()) - last);
        out += b->value;
        last = static_cast<std::size_t>(it->position() + it->length());
    }
    out.append(s, last);
    return out;
}

QueryPlan fallback_plan(const std::string& question) {
    QueryPlan p;
    p.hops = 1;
    p.initial_query = question;
    return p;
}

PlanOutcome generate_plan(const std::string& question, const LlmGateway& llm) {
    if (trimmed(question).empty()) throw PlanError("question is empty");

    PlanOutcome outcome;
    auto request = render_prompt(PromptKind::PlanGeneration, {{"question", question}});
    std::vector<std::string> problems;
    for (int attempt = 0; attempt < 2; ++attempt) {
        if (attempt == 1) {
            request.user += "\n\nYour previous plan was rejected:\n";
            for (const auto& p : problems) request.user += "- " + p + "\n";
            request.user += "Return a corrected plan.";
        }
        ++outcome.attempts;
        problems.clear();
        try {
            auto plan = plan_from_json(nlohmann::json::parse(llm.complete(request)));
            problems = validate_plan(plan);
            if (problems.empty()) {
                outcome.plan = std::move(plan);
                return outcome;
            }
        } catch (const SchemaError& e) {
            problems.push_back(e.what());
        } catch (const nlohmann::json::exception& e) {
            problems.push_back(std::string("plan is not valid JSON: ") + e.what());
        } catch (const PlanError& e) {
            problems.push_back(e.what());
        }
    }
    std::string joined;
    for (const auto& p : problems) joined += (joined.empty() ? "" : "; ") + p;
    outcome.warnings.push_back("plan rejected twice, using one-hop fallback: " + joined);
    outcome.plan = fallback_plan(question);
    outcome.fell_back = true;
    return outcome;
}

}  // namespace n2n
