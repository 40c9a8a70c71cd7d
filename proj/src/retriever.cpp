#include "n2n/retriever.hpp"

#include "n2n/errors.hpp"
#include "n2n/http.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace n2n {

bool ranks_before(const ScoredDocument& a, const ScoredDocument& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc->id < b.doc->id;
}

void sort_by_score(std::vector<ScoredDocument>& docs) {
    std::sort(docs.begin(), docs.end(), ranks_before);
}

Index Index::build(const Corpus& corpus) {
    if (corpus.empty()) throw IndexError("cannot index an empty corpus");

    Index index;
    const auto& docs = corpus.documents();
    index.norms_.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        std::map<std::string, int, std::less<>> tf;
        for (auto& t : tokenize(docs[i].text)) ++tf[std::move(t)];

        double sq = 0.0;
        for (const auto& [term, count] : tf) {
            double w = count * smoothed_idf(corpus.size(), corpus.doc_frequency(term));
            sq += w * w;
            index.postings_[term].push_back({i, count});
        }
        index.norms_.push_back(std::sqrt(sq));
    }
    return index;
}

const std::vector<Posting>* Index::postings(std::string_view term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? nullptr : &it->second;
}

std::string Index::snapshot() const {
    nlohmann::ordered_json j;
    j["format"] = "n2n-index-v1";
    j["doc_count"] = norms_.size();
    j["norms"] = norms_;
    auto terms = nlohmann::ordered_json::object();
    for (const auto& [term, list] : postings_) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& p : list) arr.push_back({p.doc, p.tf});
        terms[term] = std::move(arr);
    }
    j["postings"] = std::move(terms);
    return j.dump() + "\n";
}

void Index::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IndexError("cannot write index snapshot " + path.string());
    out << snapshot();
}

Index Index::load(const std::filesystem::path& path, const Corpus& corpus) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IndexError("cannot open index snapshot " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IndexError(std::string("malformed index snapshot: ") + e.what());
    }
    if (j.value("format", "") != "n2n-index-v1") throw IndexError("unknown snapshot format");

    Index index;
    index.norms_ = j.at("norms").get<std::vector<double>>();
    if (index.norms_.size() != corpus.size()) {
        throw IndexError("snapshot covers " + std::to_string(index.norms_.size()) +
                         " documents, corpus has " + std::to_string(corpus.size()));
    }
    for (const auto& [term, arr] : j.at("postings").items()) {
        auto& list = index.postings_[term];
        for (const auto& p : arr) {
            auto doc = p.at(0).get<std::size_t>();
            if (doc >= corpus.size()) throw IndexError("posting out of range for " + term);
            list.push_back({doc, p.at(1).get<int>()});
        }
    }
    return index;
}

std::vector<ScoredDocument> retrieve_lexical(const Corpus& corpus, const Index& index,
                                             std::string_view query, std::size_t k) {
    if (k == 0) return {};
    auto qvec = tfidf_vector(query, corpus);
    double qnorm = qvec.norm();
    if (qnorm == 0.0) return {};

    std::unordered_map<std::size_t, double> dot;
    for (const auto& [term, qw] : qvec.weights) {
        const auto* list = index.postings(term);
        if (!list) continue;
        double idf = smoothed_idf(corpus.size(), corpus.doc_frequency(term));
        for (const auto& p : *list) dot[p.doc] += qw * p.tf * idf;
    }

    std::vector<ScoredDocument> hits;
    hits.reserve(dot.size());
    for (const auto& [doc, d] : dot) {
        hits.push_back({&corpus.documents()[doc], d / (qnorm * index.doc_norm(doc))});
    }
    if (hits.size() > k) {
        std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(),
                          ranks_before);
        hits.resize(k);
    } else {
        sort_by_score(hits);
    }
    return hits;
}

LexicalRetriever::LexicalRetriever(const Corpus& corpus, Index index)
    : corpus_(corpus), index_(std::move(index)) {}

LexicalRetriever::LexicalRetriever(const Corpus& corpus)
    : LexicalRetriever(corpus, Index::build(corpus)) {}

std::vector<ScoredDocument> LexicalRetriever::retrieve(std::string_view query,
                                                       std::size_t k) const {
    return retrieve_lexical(corpus_, index_, query, k);
}

std::vector<ScoredDocument> merge_max(std::span<const std::vector<ScoredDocument>> lists) {
    std::unordered_map<const Document*, double> best;
    for (const auto& list : lists) {
        for (const auto& sd : list) {
            auto [it, inserted] = best.emplace(sd.doc, sd.score);
            if (!inserted) it->second = std::max(it->second, sd.score);
        }
    }
    std::vector<ScoredDocument> out;
    out.reserve(best.size());
    for (const auto& [doc, score] : best) out.push_back({doc, score});
    sort_by_score(out);
    return out;
}

std::vector<ScoredDocument> retrieve_multi(const Retriever& retriever,
                                           std::span<const std::string> queries, std::size_t k) {
    std::vector<std::vector<ScoredDocument>> lists;
    lists.reserve(queries.size());
    for (const auto& q : queries) lists.push_back(retriever.retrieve(q, k));
    auto merged = merge_max(lists);
    if (merged.size() > k) merged.resize(k);
    return merged;
}

RemoteRetriever::RemoteRetriever(const Corpus& corpus, std::string url,
                                 std::chrono::milliseconds timeout)
    : corpus_(corpus), url_(std::move(url)), timeout_(timeout) {}

std::vector<ScoredDocument> RemoteRetriever::retrieve(std::string_view query,
                                                      std::size_t k) const {
    nlohmann::json req = {{"query", query}, {"k", k}};
    auto body = http_post_json(url_, req.dump(), {}, timeout_);

    nlohmann::json resp;
    try {
        resp = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error&) {
        throw SchemaError("remote retriever returned invalid JSON", body);
    }
    if (!resp.contains("results") || !resp["results"].is_array()) {
        throw SchemaError("remote retriever response lacks a \"results\" array", body);
    }

    std::vector<ScoredDocument> out;
    for (const auto& r : resp["results"]) {
        auto id = r.value("id", std::string{});
        const auto* doc = corpus_.find(id);
        if (!doc) {
            spdlog::warn("remote retriever returned unknown id '{}', dropped", id);
            continue;
        }
        out.push_back({doc, std::max(0.0, r.value("score", 0.0))});
    }
    sort_by_score(out);
    if (out.size() > k) out.resize(k);
    return out;
}

}  // namespace n2n
