#include "n2n/bridge_selector.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <unordered_set>

namespace n2n {

namespace {

// Lowercased alphanumeric runs; no stopword or length filtering, so phrases
// like "8.4 million" keep every piece.
std::vector<std::string> phrase_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

bool contains_phrase(const std::vector<std::string>& haystack,
                     const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > haystack.size()) return false;
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
           haystack.end();
}

std::string trim_lower(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    std::string out(s.substr(b, e - b + 1));
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

const ScoredDocument& top_of(const std::vector<ScoredDocument>& docs) {
    return *std::min_element(docs.begin(), docs.end(), ranks_before);
}

}  // namespace

HybridPool partition_pool(std::span<const ScoredDocument> docs) {
    HybridPool pool;
    std::unordered_set<std::string> seen;
    for (const auto& sd : docs) {
        if (!seen.insert(sd.doc->id).second) {
            throw std::invalid_argument("duplicate id in pool: " + sd.doc->id);
        }
        (sd.doc->is_table_row() ? pool.tables : pool.passages).push_back(sd);
    }
    return pool;
}

std::set<std::string> key_entities(const Document& table_row) {
    if (!table_row.is_table_row() || !table_row.table) {
        throw std::invalid_argument("key_entities needs a table row, got " + table_row.id);
    }
    std::set<std::string> out;
    for (const auto& cell : table_row.table->cells) {
        auto v = trim_lower(cell.value);
        if (!v.empty()) out.insert(std::move(v));
    }
    return out;
}

int link(const Document& passage, const Document& table_row) {
    auto passage_tokens = phrase_tokens(passage.text);
    for (const auto& entity : key_entities(table_row)) {
        if (contains_phrase(passage_tokens, phrase_tokens(entity))) return 1;
    }
    return 0;
}

std::vector<ScoredDocument> select(const HybridPool& pool, double beta, bool multi_hop) {
    std::vector<ScoredDocument> out;
    out.reserve(pool.size());
    out.insert(out.end(), pool.passages.begin(), pool.passages.end());
    out.insert(out.end(), pool.tables.begin(), pool.tables.end());

    if (multi_hop && !pool.passages.empty() && !pool.tables.empty()) {
        const Document* p_top = top_of(pool.passages).doc;
        const Document* t_top = top_of(pool.tables).doc;
        bool linked = link(*p_top, *t_top) == 1;
        for (auto& sd : out) {
            if (sd.doc == t_top || (!linked && sd.doc == p_top)) sd.score += beta;
        }
    }
    sort_by_score(out);
    return out;
}

}  // namespace n2n
