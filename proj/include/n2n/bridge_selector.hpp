#pragma once

#include "n2n/corpus.hpp"
#include "n2n/retriever.hpp"

#include <set>
#include <span>
#include <string>
#include <vector>

namespace n2n {

// Aggregated evidence split by kind. No id appears twice.
struct HybridPool {
    std::vector<ScoredDocument> passages;
    std::vector<ScoredDocument> tables;

    std::size_t size() const { return passages.size() + tables.size(); }
    bool empty() const { return passages.empty() && tables.empty(); }
};

// Partitions by document kind. Throws std::invalid_argument on a duplicate id.
HybridPool partition_pool(std::span<const ScoredDocument> docs);

// Lowercased, trimmed, non-empty cell values of a table row. Throws
// std::invalid_argument for a passage.
std::set<std::string> key_entities(const Document& table_row);

// 1 when any key entity of the row occurs in the passage as a contiguous
// phrase on token boundaries (case-insensitive), else 0.
int link(const Document& passage, const Document& table_row);

// Bridge-aware reranking. For multi-hop questions with both kinds present the
// top table gets +beta when it links to the top passage; otherwise both tops
// get +beta. Returns the whole pool sorted by boosted score, then id.
std::vector<ScoredDocument> select(const HybridPool& pool, double beta, bool multi_hop);

}  // namespace n2n
