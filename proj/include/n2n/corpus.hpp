#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace n2n {

enum class DocKind { Passage, TableRow };

std::string_view to_string(DocKind kind);

struct Cell {
    std::string header;
    std::string value;

    bool operator==(const Cell&) const = default;
};

struct TableMeta {
    std::string table_title;
    int row_index = 0;
    std::vector<Cell> cells;

    bool operator==(const TableMeta&) const = default;
};

// A passage or a serialized table row. For table rows `text` is always the
// serialized form of `table`.
struct Document {
    std::string id;
    DocKind kind = DocKind::Passage;
    std::string title;
    std::string text;
    std::optional<TableMeta> table;

    bool is_table_row() const { return kind == DocKind::TableRow; }

    bool operator==(const Document&) const = default;
};

Document make_passage(std::string id, std::string title, std::string text);

// Escapes delimiter collisions in `meta` and fills in the serialized text.
// Any escape is appended to `warnings` when given.
Document make_table_row(std::string id, TableMeta meta,
                        std::vector<std::string>* warnings = nullptr);

// Lowercased alphanumeric tokens of length >= 2 with stopwords removed.
std::vector<std::string> tokenize(std::string_view text);

bool is_stopword(std::string_view term);

// "Table:{title}|Row:{index}|h1|v1|h2|v2|...". Throws std::invalid_argument
// for a negative row index, an empty cell list, or a '|' inside any field;
// use escape_table_meta() first when the input is untrusted.
std::string serialize_table_row(std::string_view table_title, int row_index,
                                std::span<const Cell> cells);

inline std::string serialize_table_row(const TableMeta& meta) {
    return serialize_table_row(meta.table_title, meta.row_index, meta.cells);
}

// Replaces '|' with '/' in the title and every cell. Returns one warning per
// rewritten field.
std::vector<std::string> escape_table_meta(TableMeta& meta);

struct CorpusStats {
    std::size_t doc_count = 0;
    std::map<std::string, int, std::less<>> doc_frequency;

    bool operator==(const CorpusStats&) const = default;
};

class Corpus {
public:
    Corpus() = default;

    // Throws CorpusError on duplicate ids or a table row whose text does not
    // match its metadata.
    explicit Corpus(std::vector<Document> documents);

    const std::vector<Document>& documents() const noexcept { return documents_; }
    const CorpusStats& stats() const noexcept { return stats_; }
    std::size_t size() const noexcept { return documents_.size(); }
    bool empty() const noexcept { return documents_.empty(); }

    // 0 when the term never occurs.
    int doc_frequency(std::string_view term) const;

    const Document* find(std::string_view id) const;
    std::optional<std::size_t> index_of(std::string_view id) const;

    bool operator==(const Corpus& other) const {
        return documents_ == other.documents_ && stats_ == other.stats_;
    }

private:
    std::vector<Document> documents_;
    CorpusStats stats_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

// Reads the JSON-lines corpus format. Errors name the offending line or id.
Corpus load_corpus(const std::filesystem::path& path);

// One JSON line per document, in the same schema load_corpus reads.
std::string corpus_record_json(const Document& doc);

struct TermVector {
    std::map<std::string, double, std::less<>> weights;

    double get(std::string_view term) const;
    double norm() const;
    bool operator==(const TermVector&) const = default;
};

// ln(1 + N / df). Callers must not pass df == 0.
double smoothed_idf(std::size_t doc_count, int doc_frequency);

// tf * ln(1 + N/df) over tokenize(doc.text). Terms unknown to the corpus are
// skipped.
TermVector tfidf_vector(const Document& doc, const Corpus& corpus);
TermVector tfidf_vector(std::string_view text, const Corpus& corpus);

}  // namespace n2n
