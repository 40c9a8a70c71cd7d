#pragma once

#include "n2n/corpus.hpp"
#include "n2n/retriever.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace n2n {

struct GraphNode {
    const Document* doc = nullptr;
    double semantic_score = 0.0;
};

// Undirected; u < v always.
struct GraphEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    double weight = 0.0;
};

// Query-specific evidence graph over retrieved documents. Simple and
// undirected with strictly positive edge weights.
struct EvidenceGraph {
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;

    std::size_t size() const { return nodes.size(); }
    bool empty() const { return nodes.empty(); }

    // 0 when the pair is not connected.
    double weight(std::size_t a, std::size_t b) const;

    // Subgraph on `keep`, in that order, with every edge among them.
    EvidenceGraph induced(std::span<const std::size_t> keep) const;

    std::vector<std::string> node_ids() const;
};

// One node per document; an edge for every pair whose shared-term weight
//   sum over shared terms t of min(w_u(t), w_v(t))
// is positive, with w the TF-IDF vector of each document.
EvidenceGraph build_graph(std::span<const ScoredDocument> docs, const Corpus& corpus);

// Sum of incident edge weights per node.
std::vector<double> weighted_degree_centrality(const EvidenceGraph& graph);

enum class ScoreRole { Semantic, Structural };

// (s - min) / (max - min). When every score is equal the semantic role maps
// to 1 and the structural role to 0.
std::vector<double> min_max_normalize(std::span<const double> scores, ScoreRole role);

struct RankedNode {
    std::size_t node = 0;
    double sem_norm = 0.0;
    double struct_norm = 0.0;
    double graphrank = 0.0;
};

double graphrank_score(double sem_norm, double struct_norm, double alpha);

// Scores every node with
//   sem_norm * (1 + (1 - alpha) * struct_norm)
// and sorts by that score, then raw semantic score, then id.
std::vector<RankedNode> graphrank(const EvidenceGraph& graph, double alpha);

struct PruneConstraints {
    int min_nodes = 1;
    int max_nodes = 1;
    int min_passages = 0;
    int min_tables = 0;

    bool valid() const {
        return min_nodes > 0 && min_nodes <= max_nodes && min_passages >= 0 && min_tables >= 0 &&
               min_passages + min_tables <= max_nodes;
    }
    bool operator==(const PruneConstraints&) const = default;
};

struct PruneResult {
    EvidenceGraph graph;              // nodes in rank order
    std::vector<RankedNode> ranked;   // node indices refer to `graph`
    std::vector<std::string> warnings;
};

// Keeps the top max_nodes by rank, then swaps the lowest-ranked nodes of the
// other kind for the highest-ranked missing nodes of a kind below its quota.
// Graphs smaller than min_nodes are kept whole. Unmet quotas and undersized
// graphs produce warnings. Throws std::invalid_argument on invalid constraints.
PruneResult prune(const EvidenceGraph& graph, std::span<const RankedNode> ranked,
                  const PruneConstraints& constraints);

// Nodes in order, "[PASSAGE: title]" or "[TABLE ROW]" header line, blank line
// between nodes.
std::string graph_to_context(const EvidenceGraph& graph);

// Graphviz export. Node label: id, kind, GraphRank score; edge label: weight.
std::string to_dot(const EvidenceGraph& graph, double alpha);

}  // namespace n2n
