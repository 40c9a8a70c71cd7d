#include "n2n/pipeline.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <thread>

namespace n2n {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

bool is_not_enough_context(std::string_view answer) {
    std::string a = trim(answer);
    while (!a.empty() && (a.back() == '.' || a.back() == '\'' || a.back() == '"')) a.pop_back();
    while (!a.empty() && (a.front() == '\'' || a.front() == '"')) a.erase(a.begin());
    if (a.size() != kNotEnoughContext.size()) return false;
    return std::equal(a.begin(), a.end(), kNotEnoughContext.begin(), [](char x, char y) {
        return std::tolower(static_cast<unsigned char>(x)) ==
               std::tolower(static_cast<unsigned char>(y));
    });
}

// First line of the reply, trimmed; absent when the model declined.
std::optional<std::string> clean_entity(std::string_view reply) {
    auto nl = reply.find('\n');
    auto value = trim(reply.substr(0, nl));
    if (value.empty() || is_not_enough_context(value)) return std::nullopt;
    if (!placeholder_indices(value).empty()) return std::nullopt;
    return value;
}

EvidenceGraph edgeless(std::span<const ScoredDocument> docs) {
    EvidenceGraph g;
    g.nodes.reserve(docs.size());
    for (const auto& sd : docs) g.nodes.push_back({sd.doc, sd.score});
    return g;
}

struct Curated {
    EvidenceGraph graph;
    std::vector<std::string> warnings;
};

Curated curate(std::span<const ScoredDocument> docs, const PruneConstraints& constraints,
               const PipelineContext& ctx) {
    if (docs.empty()) return {};
    auto graph = build_graph(docs, ctx.corpus);
    auto ranked = graphrank(graph, ctx.config.effective_alpha());
    auto pruned = prune(graph, ranked, constraints);
    return {std::move(pruned.graph), std::move(pruned.warnings)};
}

std::vector<ScoredDocument> normalized(std::vector<ScoredDocument> docs) {
    std::vector<double> raw;
    raw.reserve(docs.size());
    for (const auto& d : docs) raw.push_back(d.score);
    auto norm = min_max_normalize(raw, ScoreRole::Semantic);
    for (std::size_t i = 0; i < docs.size(); ++i) docs[i].score = norm[i];
    return docs;
}

nlohmann::ordered_json graph_json(const EvidenceGraph& g) {
    nlohmann::ordered_json j;
    j["nodes"] = g.node_ids();
    auto edges = nlohmann::ordered_json::array();
    for (const auto& e : g.edges) {
        edges.push_back({g.nodes[e.u].doc->id, g.nodes[e.v].doc->id, e.weight});
    }
    j["edges"] = std::move(edges);
    return j;
}

}  // namespace

std::string_view to_string(Mode mode) {
    switch (mode) {
        case Mode::VanillaRag: return "vanilla";
        case Mode::DecompRag: return "decomp";
        case Mode::GraphNoRank: return "graph-norank";
        case Mode::Full: return "full";
    }
    return "full";
}

Mode parse_mode(std::string_view name) {
    if (name == "vanilla" || name == "VanillaRag") return Mode::VanillaRag;
    if (name == "decomp" || name == "DecompRag") return Mode::DecompRag;
    if (name == "graph-norank" || name == "GraphNoRank") return Mode::GraphNoRank;
    if (name == "full" || name == "Full") return Mode::Full;
    throw ConfigError("unknown mode '" + std::string(name) +
                      "' (expected vanilla, decomp, graph-norank or full)");
}

void PipelineConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
    if (!(beta > 0.0)) throw ConfigError("beta must be positive");
    if (final_k < 1 || hop_k < 1) throw ConfigError("final_k and hop_k must be >= 1");
    if (final_unique < 1) throw ConfigError("final_unique must be >= 1");
    if (!final_prune.valid()) throw ConfigError("final_prune constraints are inconsistent");
    if (!hop_prune.valid()) throw ConfigError("hop_prune constraints are inconsistent");
}

nlohmann::ordered_json config_to_json(const PipelineConfig& c) {
    auto prune_json = [](const PruneConstraints& p) {
        nlohmann::ordered_json j;
        j["min"] = p.min_nodes;
        j["max"] = p.max_nodes;
        j["min_passages"] = p.min_passages;
        j["min_tables"] = p.min_tables;
        return j;
    };
    nlohmann::ordered_json j;
    j["mode"] = to_string(c.mode);
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["final_k"] = c.final_k;
    j["final_unique"] = c.final_unique;
    j["final_prune"] = prune_json(c.final_prune);
    j["hop_k"] = c.hop_k;
    j["hop_prune"] = prune_json(c.hop_prune);
    return j;
}

HopResult execute_hop(int hop_index, const std::string& step_query,
                      std::span<const std::string> alternatives, bool extract,
                      const PipelineContext& ctx) {
    HopResult hop;
    hop.hop_index = hop_index;
    hop.query = step_query;

    std::vector<std::string> queries{step_query};
    queries.insert(queries.end(), alternatives.begin(), alternatives.end());
    hop.retrieved = retrieve_multi(ctx.retriever, queries, static_cast<std::size_t>(ctx.config.hop_k));
    if (hop.retrieved.empty()) {
        hop.warnings.push_back(fmt::format("hop {}: no evidence", hop_index));
        return hop;
    }

    if (ctx.config.mode == Mode::DecompRag) {
        // No curation: the reader sees the whole hop retrieval.
        hop.pruned_graph = edgeless(hop.retrieved);
    } else {
        auto curated = curate(hop.retrieved, ctx.config.hop_prune, ctx);
        hop.pruned_graph = std::move(curated.graph);
        for (auto& w : curated.warnings) hop.warnings.push_back(fmt::format("hop {}: {}", hop_index, w));
    }

    if (!extract) return hop;
    auto request = render_prompt(PromptKind::EntityExtraction,
                                 {{"context", graph_to_context(hop.pruned_graph)},
                                  {"primary_query", step_query}});
    if (auto entity = clean_entity(ctx.llm.complete(request))) {
        hop.extracted_entity = EntityBinding{hop_index, std::move(*entity)};
    }
    return hop;
}

HybridPool aggregate_evidence(std::span<const HopResult> hops,
                              std::span<const ScoredDocument> final_retrieval,
                              std::size_t final_unique) {
    std::vector<std::vector<ScoredDocument>> lists;
    lists.reserve(hops.size() + 1);
    for (const auto& h : hops) lists.push_back(h.retrieved);
    lists.emplace_back(final_retrieval.begin(), final_retrieval.end());
    auto merged = merge_max(lists);
    if (merged.size() > final_unique) merged.resize(final_unique);
    return partition_pool(merged);
}

std::string render_reasoning_path(const QueryPlan& plan, std::span<const HopResult> hops) {
    std::string out;
    for (int step = 1; step <= plan.hops; ++step) {
        std::string query;
        if (static_cast<std::size_t>(step) <= hops.size()) {
            query = hops[static_cast<std::size_t>(step - 1)].query;
        } else if (step == 1) {
            query = plan.initial_query;
        } else if (static_cast<std::size_t>(step - 2) < plan.step_templates.size()) {
            query = plan.step_templates[static_cast<std::size_t>(step - 2)];
        }
        if (!out.empty()) out += '\n';
        out += fmt::format("Step {}: {}", step, query);
    }
    return out;
}

AnswerRecord answer_question(const std::string& id, const std::string& question,
                             const PipelineContext& ctx) {
    const auto& cfg = ctx.config;
    AnswerRecord rec;
    rec.id = id;
    rec.question = question;
    rec.mode = cfg.mode;

    try {
        std::vector<ScoredDocument> selected;
        if (cfg.mode == Mode::VanillaRag) {
            rec.plan = fallback_plan(question);
            selected = ctx.retriever.retrieve(question, static_cast<std::size_t>(cfg.final_k));
            for (const auto& sd : selected) rec.provenance[sd.doc->id].push_back("final");
            if (selected.size() > static_cast<std::size_t>(cfg.final_unique)) {
                selected.resize(static_cast<std::size_t>(cfg.final_unique));
            }
            rec.final_pool_size = selected.size();
        } else {
            auto outcome = generate_plan(question, ctx.llm);
            rec.plan = outcome.plan;
            rec.warnings.insert(rec.warnings.end(), outcome.warnings.begin(),
                                outcome.warnings.end());

            std::vector<EntityBinding> bindings;
            for (int h = 1; h <= rec.plan.hops; ++h) {
                std::string query = h == 1 ? rec.plan.initial_query
                                           : instantiate_template(
                                                 rec.plan.step_templates[static_cast<std::size_t>(h - 2)],
                                                 bindings);
                std::span<const std::string> alts;
                if (h == 1) alts = rec.plan.alternatives;
                bool extract = h < rec.plan.hops;
                auto hop = execute_hop(h, query, alts, extract, ctx);
                for (const auto& sd : hop.retrieved) {
                    rec.provenance[sd.doc->id].push_back(fmt::format("hop{}", h));
                }
                rec.warnings.insert(rec.warnings.end(), hop.warnings.begin(), hop.warnings.end());
                bool stop = extract && !hop.extracted_entity;
                if (!stop && hop.extracted_entity) bindings.push_back(*hop.extracted_entity);
                rec.hops.push_back(std::move(hop));
                if (stop) {
                    rec.warnings.push_back(
                        fmt::format("hop {}: no entity extracted, skipping remaining hops", h));
                    break;
                }
            }

            auto final_retrieval = ctx.retriever.retrieve(question, static_cast<std::size_t>(cfg.final_k));
            for (const auto& sd : final_retrieval) rec.provenance[sd.doc->id].push_back("final");
            auto pool = aggregate_evidence(rec.hops, final_retrieval,
                                           static_cast<std::size_t>(cfg.final_unique));
            rec.final_pool_size = pool.size();

            std::vector<ScoredDocument> flat = pool.passages;
            flat.insert(flat.end(), pool.tables.begin(), pool.tables.end());
            auto scaled = partition_pool(normalized(std::move(flat)));
            selected = select(scaled, cfg.beta, rec.plan.hops > 1);
        }

        if (cfg.mode == Mode::VanillaRag || cfg.mode == Mode::DecompRag) {
            rec.final_graph = edgeless(selected);
        } else {
            auto curated = curate(selected, cfg.final_prune, ctx);
            rec.final_graph = std::move(curated.graph);
            for (auto& w : curated.warnings) rec.warnings.push_back("final graph: " + w);
        }

        // Drop provenance for documents that never reached the final context.
        std::map<std::string, std::vector<std::string>> kept;
        for (const auto& node : rec.final_graph.nodes) {
            kept[node.doc->id] = rec.provenance[node.doc->id];
        }
        rec.provenance = std::move(kept);

        rec.reasoning_path = render_reasoning_path(rec.plan, rec.hops);
        auto request = render_prompt(PromptKind::AnswerSynthesis,
                                     {{"reasoning_path", rec.reasoning_path},
                                      {"context", graph_to_context(rec.final_graph)},
                                      {"question", question}});
        rec.answer = trim(ctx.llm.complete(request));
        if (rec.answer.empty()) rec.answer = std::string(kNotEnoughContext);
    } catch (const TransportError& e) {
        if (rec.answer.empty()) rec.answer = std::string(kNotEnoughContext);
        rec.error = e.what();
        throw PipelineError(fmt::format("question {}: {}", id, e.what()), std::move(rec));
    }
    return rec;
}

nlohmann::ordered_json record_to_json(const AnswerRecord& r) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["question"] = r.question;
    j["mode"] = to_string(r.mode);
    j["plan"] = plan_to_json(r.plan);
    auto hops = nlohmann::ordered_json::array();
    for (const auto& h : r.hops) {
        nlohmann::ordered_json hj;
        hj["hop_index"] = h.hop_index;
        hj["query"] = h.query;
        auto retrieved = nlohmann::ordered_json::array();
        for (const auto& sd : h.retrieved) retrieved.push_back({sd.doc->id, sd.score});
        hj["retrieved"] = std::move(retrieved);
        hj["pruned_graph"] = graph_json(h.pruned_graph);
        hj["extracted_entity"] = h.extracted_entity ? nlohmann::ordered_json(h.extracted_entity->value)
                                                    : nlohmann::ordered_json(nullptr);
        hops.push_back(std::move(hj));
    }
    j["hops"] = std::move(hops);
    j["final_pool_size"] = r.final_pool_size;
    j["final_graph"] = graph_json(r.final_graph);
    j["provenance"] = r.provenance;
    j["reasoning_path"] = r.reasoning_path;
    j["answer"] = r.answer;
    j["warnings"] = r.warnings;
    if (r.error) j["error"] = *r.error;
    return j;
}

std::vector<Question> load_questions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open questions file " + path.string());
    std::vector<Question> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            Question q;
            q.id = j.at("id").get<std::string>();
            q.question = j.at("question").get<std::string>();
            if (j.contains("answer")) q.answer = j["answer"].get<std::string>();
            out.push_back(std::move(q));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(fmt::format("{} line {}: {}", path.string(), line_no, e.what()));
        }
    }
    return out;
}

std::vector<AnswerRecord> answer_all(std::span<const Question> questions,
                                     const PipelineContext& ctx, int max_concurrency) {
    std::vector<AnswerRecord> out(questions.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < questions.size(); i = next++) {
            const auto& q = questions[i];
            try {
                out[i] = answer_question(q.id, q.question, ctx);
            } catch (const PipelineError& e) {
                spdlog::error("{}", e.what());
                out[i] = e.partial();
            } catch (const std::exception& e) {
                spdlog::error("question {}: {}", q.id, e.what());
                AnswerRecord r;
                r.id = q.id;
                r.question = q.question;
                r.mode = ctx.config.mode;
                r.answer = std::string(kNotEnoughContext);
                r.error = e.what();
                out[i] = std::move(r);
            }
        }
    };
    auto n = static_cast<std::size_t>(std::max(1, max_concurrency));
    n = std::min(n, std::max<std::size_t>(1, questions.size()));
    std::vector<std::jthread> threads;
    for (std::size_t t = 1; t < n; ++t) threads.emplace_back(worker);
    worker();
    return out;
}

}  // namespace n2n
