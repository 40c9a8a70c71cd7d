#pragma once

// Brute-force reference implementations used by the unit and acceptance
// tests. They share nothing with the library beyond tokenize() and the
// public data types, and favour the most literal reading of each rule.

#include "n2n/corpus.hpp"
#include "n2n/evidence_graph.hpp"
#include "n2n/retriever.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Weights = std::map<std::string, double>;

inline std::map<std::string, int> term_counts(const std::string& text) {
    std::map<std::string, int> tf;
    for (const auto& t : n2n::tokenize(text)) ++tf[t];
    return tf;
}

// TF-IDF vectors of every document, df counted by scanning all documents.
inline std::vector<Weights> tfidf_all(const std::vector<std::string>& texts) {
    const double n = static_cast<double>(texts.size());
    std::vector<std::map<std::string, int>> counts;
    for (const auto& t : texts) counts.push_back(term_counts(t));
    std::vector<Weights> out;
    for (const auto& tf : counts) {
        Weights w;
        for (const auto& [term, c] : tf) {
            int df = 0;
            for (const auto& other : counts) df += other.count(term) ? 1 : 0;
            w[term] = c * std::log(1.0 + n / df);
        }
        out.push_back(std::move(w));
    }
    return out;
}

inline Weights query_vector(const std::string& query, const std::vector<std::string>& texts) {
    const double n = static_cast<double>(texts.size());
    Weights w;
    for (const auto& [term, c] : term_counts(query)) {
        int df = 0;
        for (const auto& t : texts) df += term_counts(t).count(term) ? 1 : 0;
        if (df > 0) w[term] = c * std::log(1.0 + n / df);
    }
    return w;
}

inline double cosine(const Weights& a, const Weights& b) {
    double dot = 0, na = 0, nb = 0;
    for (const auto& [t, x] : a) {
        na += x * x;
        auto it = b.find(t);
        if (it != b.end()) dot += x * it->second;
    }
    for (const auto& [t, y] : b) nb += y * y;
    if (na == 0 || nb == 0) return 0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Every document scored, zero-overlap ones dropped, sorted score desc / id asc.
inline std::vector<std::pair<std::string, double>> brute_retrieve(
    const std::vector<n2n::Document>& docs, const std::string& query, std::size_t k) {
    std::vector<std::string> texts;
    for (const auto& d : docs) texts.push_back(d.text);
    auto vecs = tfidf_all(texts);
    auto q = query_vector(query, texts);
    std::vector<std::pair<std::string, double>> scored;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        bool shares = false;
        for (const auto& [t, _] : q) shares = shares || vecs[i].count(t);
        if (shares) scored.emplace_back(docs[i].id, cosine(q, vecs[i]));
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

// Dense n x n shared-term weight matrix over the given weight vectors.
inline std::vector<std::vector<double>> adjacency(const std::vector<Weights>& vecs) {
    const std::size_t n = vecs.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double s = 0;
            for (const auto& [t, wi] : vecs[i]) {
                auto it = vecs[j].find(t);
                if (it != vecs[j].end()) s += std::min(wi, it->second);
            }
            m[i][j] = s;
        }
    }
    return m;
}

inline std::vector<double> row_sums(const std::vector<std::vector<double>>& m) {
    std::vector<double> out;
    for (const auto& row : m) {
        double s = 0;
        for (double x : row) s += x;
        out.push_back(s);
    }
    return out;
}

// Keep-then-swap over rank positions. `kinds[i]` is the kind at rank i;
// returns the kept rank positions in ascending order.
inline std::vector<std::size_t> keep_then_swap(const std::vector<n2n::DocKind>& kinds,
                                               const n2n::PruneConstraints& c) {
    using n2n::DocKind;
    const std::size_t n = kinds.size();
    std::set<std::size_t> kept;
    for (std::size_t i = 0; i < n && i < static_cast<std::size_t>(c.max_nodes); ++i) kept.insert(i);

    auto count = [&](DocKind k) {
        return static_cast<int>(std::count_if(kept.begin(), kept.end(),
                                              [&](std::size_t i) { return kinds[i] == k; }));
    };
    auto quota = [&](DocKind k) { return k == DocKind::Passage ? c.min_passages : c.min_tables; };

    for (DocKind need : {DocKind::Passage, DocKind::TableRow}) {
        DocKind other = need == DocKind::Passage ? DocKind::TableRow : DocKind::Passage;
        while (count(need) < quota(need) && count(other) > quota(other)) {
            std::vector<std::size_t> missing, donors;
            for (std::size_t i = 0; i < n; ++i) {
                if (!kept.count(i) && kinds[i] == need) missing.push_back(i);
                if (kept.count(i) && kinds[i] == other) donors.push_back(i);
            }
            if (missing.empty() || donors.empty()) break;
            kept.erase(donors.back());
            kept.insert(missing.front());
        }
    }
    return {kept.begin(), kept.end()};
}

// Exhaustive search: among all subsets of size min(n, max_nodes), minimise
// total quota deficit, then take the lexicographically smallest sorted rank
// positions. Feasible for n <= ~16.
inline std::vector<std::size_t> best_subset(const std::vector<n2n::DocKind>& kinds,
                                            const n2n::PruneConstraints& c) {
    const std::size_t n = kinds.size();
    const std::size_t size = std::min(n, static_cast<std::size_t>(c.max_nodes));
    std::vector<std::size_t> best;
    int best_deficit = -1;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != size) continue;
        std::vector<std::size_t> pos;
        int p = 0, t = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(mask >> i & 1u)) continue;
            pos.push_back(i);
            (kinds[i] == n2n::DocKind::Passage ? p : t)++;
        }
        int deficit = std::max(0, c.min_passages - p) + std::max(0, c.min_tables - t);
        if (best_deficit < 0 || deficit < best_deficit ||
            (deficit == best_deficit && pos < best)) {
            best_deficit = deficit;
            best = pos;
        }
    }
    return best;
}

// Short documents over a small vocabulary so terms are shared often.
inline std::vector<std::string> random_texts(std::mt19937& rng, std::size_t n) {
    static const std::vector<std::string> vocab{
        "river", "bridge", "mayor", "city", "coach", "team", "born", "league",
        "season", "table", "goal", "north", "south", "harbor", "museum", "council"};
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::string text;
        auto len = 1 + rng() % 8;
        for (std::size_t w = 0; w < len; ++w) text += vocab[rng() % vocab.size()] + " ";
        out.push_back(std::move(text));
    }
    return out;
}

struct PoolItem {
    std::string id;
    bool is_table = false;
    double score = 0.0;
};

// Line-by-line Algorithm 1 with the multi-hop and empty-side guards. `linked`
// stands in for phi(p_top, t_top) so every branch can be forced.
inline std::vector<PoolItem> bridge_select(const std::vector<PoolItem>& pool, double beta,
                                           bool multi_hop, bool linked) {
    std::vector<PoolItem> out = pool;
    const PoolItem* p_top = nullptr;
    const PoolItem* t_top = nullptr;
    for (const auto& d : pool) {
        const PoolItem*& top = d.is_table ? t_top : p_top;
        if (!top || d.score > top->score || (d.score == top->score && d.id < top->id)) top = &d;
    }
    if (multi_hop && p_top && t_top) {
        for (auto& d : out) {
            if (linked) {
                if (d.id == t_top->id) d.score = d.score + beta;
            } else {
                if (d.id == p_top->id) d.score = d.score + beta;
                if (d.id == t_top->id) d.score = d.score + beta;
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const PoolItem& a, const PoolItem& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    return out;
}

// Random graph with kind and semantic score per node, for prune/graphrank
// properties. Edges are independent with probability `density`.
inline n2n::EvidenceGraph random_graph(std::mt19937& rng, std::vector<n2n::Document>& storage,
                                       std::size_t n, double density) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    storage.clear();
    storage.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        n2n::Document d;
        d.id = "n" + std::to_string(i);
        d.kind = unit(rng) < 0.5 ? n2n::DocKind::Passage : n2n::DocKind::TableRow;
        storage.push_back(std::move(d));
    }
    n2n::EvidenceGraph g;
    for (std::size_t i = 0; i < n; ++i) {
        // Coarse scores so ties are common.
        g.nodes.push_back({&storage[i], std::floor(unit(rng) * 8.0) / 8.0});
    }
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v < n; ++v) {
            if (unit(rng) < density) g.edges.push_back({u, v, 0.1 + unit(rng) * 5.0});
        }
    }
    return g;
}

}  // namespace oracle
