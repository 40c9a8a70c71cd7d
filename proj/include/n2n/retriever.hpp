#pragma once

#include "n2n/corpus.hpp"

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace n2n {

// A document with its raw retriever score. The pointer refers into the
// Corpus the retriever was built over and stays valid while it lives.
struct ScoredDocument {
    const Document* doc = nullptr;
    double score = 0.0;

    const std::string& id() const { return doc->id; }
};

// Score descending, then id ascending.
bool ranks_before(const ScoredDocument& a, const ScoredDocument& b);
void sort_by_score(std::vector<ScoredDocument>& docs);

class Retriever {
public:
    virtual ~Retriever() = default;

    // At most k results, ordered by ranks_before().
    virtual std::vector<ScoredDocument> retrieve(std::string_view query, std::size_t k) const = 0;
};

struct Posting {
    std::size_t doc = 0;  // position in Corpus::documents()
    int tf = 0;

    bool operator==(const Posting&) const = default;
};

// Inverted index over a corpus with precomputed TF-IDF norms for cosine
// scoring.
class Index {
public:
    // Throws IndexError on an empty corpus.
    static Index build(const Corpus& corpus);

    // Snapshot written by save(). Throws IndexError if the snapshot does not
    // describe `corpus`.
    static Index load(const std::filesystem::path& path, const Corpus& corpus);
    void save(const std::filesystem::path& path) const;
    std::string snapshot() const;

    const std::vector<Posting>* postings(std::string_view term) const;
    double doc_norm(std::size_t doc) const { return norms_[doc]; }
    std::size_t vocabulary_size() const { return postings_.size(); }
    std::size_t doc_count() const { return norms_.size(); }

    bool operator==(const Index&) const = default;

private:
    std::map<std::string, std::vector<Posting>, std::less<>> postings_;
    std::vector<double> norms_;
};

class LexicalRetriever final : public Retriever {
public:
    LexicalRetriever(const Corpus& corpus, Index index);
    explicit LexicalRetriever(const Corpus& corpus);

    std::vector<ScoredDocument> retrieve(std::string_view query, std::size_t k) const override;

    const Index& index() const { return index_; }

private:
    const Corpus& corpus_;
    Index index_;
};

// Cosine between the query's TF-IDF vector and every document sharing at
// least one query term.
std::vector<ScoredDocument> retrieve_lexical(const Corpus& corpus, const Index& index,
                                             std::string_view query, std::size_t k);

// Max-score union of the per-query results, re-sorted and cut to k.
std::vector<ScoredDocument> retrieve_multi(const Retriever& retriever,
                                           std::span<const std::string> queries, std::size_t k);

// Max-score union of already retrieved lists, sorted, not truncated.
std::vector<ScoredDocument> merge_max(std::span<const std::vector<ScoredDocument>> lists);

// Speaks {"query","k"} -> {"results":[{"id","score"}]} over HTTP POST.
// Unknown ids are dropped with a warning.
class RemoteRetriever final : public Retriever {
public:
    RemoteRetriever(const Corpus& corpus, std::string url,
                    std::chrono::milliseconds timeout = std::chrono::seconds(30));

    std::vector<ScoredDocument> retrieve(std::string_view query, std::size_t k) const override;

private:
    const Corpus& corpus_;
    std::string url_;
    std::chrono::milliseconds timeout_;
};

}  // namespace n2n
