#include "n2n/evidence_graph.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace n2n {

double EvidenceGraph::weight(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    for (const auto& e : edges) {
        if (e.u == a && e.v == b) return e.weight;
    }
    return 0.0;
}

EvidenceGraph EvidenceGraph::induced(std::span<const std::size_t> keep) const {
    std::vector<std::ptrdiff_t> remap(nodes.size(), -1);
    EvidenceGraph out;
    out.nodes.reserve(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        remap[keep[i]] = static_cast<std::ptrdiff_t>(i);
        out.nodes.push_back(nodes[keep[i]]);
    }
    for (const auto& e : edges) {
        auto a = remap[e.u];
        auto b = remap[e.v];
        if (a < 0 || b < 0) continue;
        auto lo = static_cast<std::size_t>(std::min(a, b));
        auto hi = static_cast<std::size_t>(std::max(a, b));
        out.edges.push_back({lo, hi, e.weight});
    }
    std::sort(out.edges.begin(), out.edges.end(), [](const GraphEdge& x, const GraphEdge& y) {
        return std::tie(x.u, x.v) < std::tie(y.u, y.v);
    });
    return out;
}

std::vector<std::string> EvidenceGraph::node_ids() const {
    std::vector<std::string> ids;
    ids.reserve(nodes.size());
    for (const auto& n : nodes) ids.push_back(n.doc->id);
    return ids;
}

namespace {

double shared_term_weight(const TermVector& a, const TermVector& b) {
    double sum = 0.0;
    auto ia = a.weights.begin();
    auto ib = b.weights.begin();
    while (ia != a.weights.end() && ib != b.weights.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            sum += std::min(ia->second, ib->second);
            ++ia;
            ++ib;
        }
    }
    return sum;
}

}  // namespace

EvidenceGraph build_graph(std::span<const ScoredDocument> docs, const Corpus& corpus) {
    EvidenceGraph g;
    std::vector<TermVector> vectors;
    g.nodes.reserve(docs.size());
    vectors.reserve(docs.size());
    for (const auto& sd : docs) {
        g.nodes.push_back({sd.doc, sd.score});
        vectors.push_back(tfidf_vector(*sd.doc, corpus));
    }
    for (std::size_t u = 0; u < vectors.size(); ++u) {
        for (std::size_t v = u + 1; v < vectors.size(); ++v) {
            double w = shared_term_weight(vectors[u], vectors[v]);
            if (w > 0.0) g.edges.push_back({u, v, w});
        }
    }
    return g;
}

std::vector<double> weighted_degree_centrality(const EvidenceGraph& graph) {
    std::vector<double> c(graph.size(), 0.0);
    for (const auto& e : graph.edges) {
        c[e.u] += e.weight;
        c[e.v] += e.weight;
    }
    return c;
}

std::vector<double> min_max_normalize(std::span<const double> scores, ScoreRole role) {
    if (scores.empty()) return {};
    auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
    double lo = *lo_it;
    double hi = *hi_it;
    std::vector<double> out(scores.size());
    if (hi == lo) {
        std::fill(out.begin(), out.end(), role == ScoreRole::Semantic ? 1.0 : 0.0);
        return out;
    }
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = (scores[i] - lo) / (hi - lo);
    return out;
}

double graphrank_score(double sem_norm, double struct_norm, double alpha) {
    return sem_norm * (1.0 + (1.0 - alpha) * struct_norm);
}

std::vector<RankedNode> graphrank(const EvidenceGraph& graph, double alpha) {
    std::vector<double> sem;
    sem.reserve(graph.size());
    for (const auto& n : graph.nodes) sem.push_back(n.semantic_score);
    auto sem_norm = min_max_normalize(sem, ScoreRole::Semantic);
    auto centrality = weighted_degree_centrality(graph);
    auto struct_norm = min_max_normalize(centrality, ScoreRole::Structural);

    std::vector<RankedNode> ranked;
    ranked.reserve(graph.size());
    for (std::size_t i = 0; i < graph.size(); ++i) {
        ranked.push_back({i, sem_norm[i], struct_norm[i],
                          graphrank_score(sem_norm[i], struct_norm[i], alpha)});
    }
    std::sort(ranked.begin(), ranked.end(), [&](const RankedNode& a, const RankedNode& b) {
        if (a.graphrank != b.graphrank) return a.graphrank > b.graphrank;
        const auto& na = graph.nodes[a.node];
        const auto& nb = graph.nodes[b.node];
        if (na.semantic_score != nb.semantic_score) return na.semantic_score > nb.semantic_score;
        return na.doc->id < nb.doc->id;
    });
    return ranked;
}

PruneResult prune(const EvidenceGraph& graph, std::span<const RankedNode> ranked,
                  const PruneConstraints& constraints) {
    if (!constraints.valid()) throw std::invalid_argument("invalid prune constraints");

    const std::size_t n = ranked.size();
    const auto max_nodes = static_cast<std::size_t>(constraints.max_nodes);
    PruneResult result;

    // kept[i] refers to position i in `ranked`.
    std::vector<bool> kept(n, false);
    if (n < static_cast<std::size_t>(constraints.min_nodes)) {
        result.warnings.push_back(fmt::format("graph has {} nodes, fewer than the minimum {}; "
                                              "keeping all",
                                              n, constraints.min_nodes));
    }
    for (std::size_t i = 0; i < std::min(n, max_nodes); ++i) kept[i] = true;

    auto kind_at = [&](std::size_t pos) { return graph.nodes[ranked[pos].node].doc->kind; };
    auto count_kept = [&](DocKind kind) {
        std::size_t c = 0;
        for (std::size_t i = 0; i < n; ++i) c += (kept[i] && kind_at(i) == kind);
        return c;
    };
    auto quota = [&](DocKind kind) {
        return static_cast<std::size_t>(kind == DocKind::Passage ? constraints.min_passages
                                                                 : constraints.min_tables);
    };

    for (DocKind need : {DocKind::Passage, DocKind::TableRow}) {
        DocKind other = need == DocKind::Passage ? DocKind::TableRow : DocKind::Passage;
        while (count_kept(need) < quota(need)) {
            // Highest-ranked missing node of the needed kind.
            std::size_t in = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (!kept[i] && kind_at(i) == need) {
                    in = i;
                    break;
                }
            }
            if (in == n) break;
            // Lowest-ranked kept node of the other kind that is above its own quota.
            if (count_kept(other) <= quota(other)) break;
            std::size_t out = n;
            for (std::size_t i = n; i-- > 0;) {
                if (kept[i] && kind_at(i) == other) {
                    out = i;
                    break;
                }
            }
            if (out == n) break;
            kept[out] = false;
            kept[in] = true;
        }
    }

    for (DocKind kind : {DocKind::Passage, DocKind::TableRow}) {
        auto have = count_kept(kind);
        if (have < quota(kind)) {
            result.warnings.push_back(fmt::format("{} quota unmet: kept {} of required {}",
                                                  kind == DocKind::Passage ? "passage" : "table",
                                                  have, quota(kind)));
        }
    }

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < n; ++i) {
        if (!kept[i]) continue;
        keep.push_back(ranked[i].node);
        RankedNode r = ranked[i];
        r.node = result.ranked.size();
        result.ranked.push_back(r);
    }
    result.graph = graph.induced(keep);
    return result;
}

std::string graph_to_context(const EvidenceGraph& graph) {
    std::string out;
    for (std::size_t i = 0; i < graph.size(); ++i) {
        const auto& doc = *graph.nodes[i].doc;
        if (i > 0) out += "\n\n";
        if (doc.is_table_row()) {
            out += "[TABLE ROW]\n";
        } else {
            out += "[PASSAGE: " + doc.title + "]\n";
        }
        out += doc.text;
    }
    return out;
}

namespace {

std::string dot_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

std::string to_dot(const EvidenceGraph& graph, double alpha) {
    std::vector<double> score(graph.size(), 0.0);
    if (!graph.empty()) {
        for (const auto& r : graphrank(graph, alpha)) score[r.node] = r.graphrank;
    }

    std::string out = "graph evidence {\n";
    for (std::size_t i = 0; i < graph.size(); ++i) {
        const auto& doc = *graph.nodes[i].doc;
        out += fmt::format("  \"{}\" [label=\"{}\\n{}\\n{:.4f}\"];\n", dot_escape(doc.id),
                           dot_escape(doc.id), to_string(doc.kind), score[i]);
    }
    for (const auto& e : graph.edges) {
        out += fmt::format("  \"{}\" -- \"{}\" [label=\"{:.4f}\"];\n",
                           dot_escape(graph.nodes[e.u].doc->id),
                           dot_escape(graph.nodes[e.v].doc->id), e.weight);
    }
    out += "}\n";
    return out;
}

}  // namespace n2n
