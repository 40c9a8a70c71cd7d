#include "n2n/corpus.hpp"

#include "n2n/errors.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <iterator>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace n2n {

namespace {

// Common English function words. Kept sorted for binary search.
constexpr std::string_view kStopwords[] = {
    "about",   "above",   "after",   "again",  "against", "all",     "also",    "am",
    "an",      "and",     "any",     "are",    "as",      "at",      "be",      "because",
    "been",    "before",  "being",   "below",  "between", "both",    "but",     "by",
    "can",     "could",   "did",     "do",     "does",    "doing",   "down",    "during",
    "each",    "either",  "few",     "for",    "from",    "further", "had",     "has",
    "have",    "having",  "he",      "her",    "here",    "hers",    "herself", "him",
    "himself", "his",     "how",     "if",     "in",      "into",    "is",      "it",
    "its",     "itself",  "just",    "me",     "more",    "most",    "my",      "myself",
    "no",      "nor",     "not",     "now",    "of",      "off",     "on",      "once",
    "only",    "or",      "other",   "our",    "ours",    "out",     "over",    "own",
    "same",    "she",     "should",  "so",     "some",    "such",    "than",    "that",
    "the",     "their",   "theirs",  "them",   "then",    "there",   "these",   "they",
    "this",    "those",   "through", "to",     "too",     "under",   "until",   "up",
    "very",    "was",     "we",      "were",   "what",    "when",    "where",   "which",
    "while",   "who",     "whom",    "whose",  "why",     "will",    "with",    "would",
    "you",
};

bool is_delimiter_free(std::string_view s) { return s.find('|') == std::string_view::npos; }

std::string replace_delimiter(std::string_view s) {
    std::string out(s);
    std::replace(out.begin(), out.end(), '|', '/');
    return out;
}

[[noreturn]] void fail_line(std::size_t line, const std::string& msg) {
    throw CorpusError("line " + std::to_string(line) + ": " + msg);
}

std::string require_string(const nlohmann::json& rec, const char* key, std::size_t line) {
    auto it = rec.find(key);
    if (it == rec.end()) fail_line(line, std::string("missing field \"") + key + "\"");
    if (!it->is_string()) fail_line(line, std::string("field \"") + key + "\" must be a string");
    return it->get<std::string>();
}

}  // namespace

std::string_view to_string(DocKind kind) {
    return kind == DocKind::Passage ? "passage" : "table_row";
}

bool is_stopword(std::string_view term) {
    return std::binary_search(std::begin(kStopwords), std::end(kStopwords), term);
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        if (current.size() >= 2 && !is_stopword(current)) out.push_back(current);
        current.clear();
    };
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

std::string serialize_table_row(std::string_view table_title, int row_index,
                                std::span<const Cell> cells) {
    if (row_index < 0) throw std::invalid_argument("row_index must be >= 0");
    if (cells.empty()) throw std::invalid_argument("table row needs at least one cell");
    if (!is_delimiter_free(table_title)) {
        throw std::invalid_argument("table title contains '|'");
    }
    std::string out = "Table:";
    out += table_title;
    out += "|Row:";
    out += std::to_string(row_index);
    for (const auto& cell : cells) {
        if (!is_delimiter_free(cell.header) || !is_delimiter_free(cell.value)) {
            throw std::invalid_argument("cell contains '|': " + cell.header);
        }
        out += '|';
        out += cell.header;
        out += '|';
        out += cell.value;
    }
    return out;
}

std::vector<std::string> escape_table_meta(TableMeta& meta) {
    std::vector<std::string> warnings;
    auto fix = [&](std::string& field, std::string_view what) {
        if (is_delimiter_free(field)) return;
        field = replace_delimiter(field);
        warnings.push_back("replaced '|' with '/' in " + std::string(what) + " \"" + field +
                           "\" of table \"" + meta.table_title + "\"");
    };
    fix(meta.table_title, "table title");
    for (auto& cell : meta.cells) {
        fix(cell.header, "header");
        fix(cell.value, "value");
    }
    return warnings;
}

Document make_passage(std::string id, std::string title, std::string text) {
    return Document{std::move(id), DocKind::Passage, std::move(title), std::move(text),
                    std::nullopt};
}

Document make_table_row(std::string id, TableMeta meta, std::vector<std::string>* warnings) {
    auto escaped = escape_table_meta(meta);
    for (const auto& w : escaped) spdlog::warn("{}: {}", id, w);
    if (warnings) warnings->insert(warnings->end(), escaped.begin(), escaped.end());

    Document doc;
    doc.id = std::move(id);
    doc.kind = DocKind::TableRow;
    doc.title = meta.table_title;
    doc.text = serialize_table_row(meta);
    doc.table = std::move(meta);
    return doc;
}

Corpus::Corpus(std::vector<Document> documents) : documents_(std::move(documents)) {
    by_id_.reserve(documents_.size());
    for (std::size_t i = 0; i < documents_.size(); ++i) {
        const auto& doc = documents_[i];
        if (!by_id_.emplace(doc.id, i).second) throw CorpusError("duplicate id " + doc.id);
        if (doc.is_table_row() != doc.table.has_value()) {
            throw CorpusError("document " + doc.id + ": kind and table metadata disagree");
        }
        if (doc.table && doc.text != serialize_table_row(*doc.table)) {
            throw CorpusError("document " + doc.id + ": text is not the serialized row");
        }
    }

    stats_.doc_count = documents_.size();
    for (const auto& doc : documents_) {
        auto terms = tokenize(doc.text);
        std::sort(terms.begin(), terms.end());
        terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
        for (auto& t : terms) ++stats_.doc_frequency[std::move(t)];
    }
}

int Corpus::doc_frequency(std::string_view term) const {
    auto it = stats_.doc_frequency.find(term);
    return it == stats_.doc_frequency.end() ? 0 : it->second;
}

const Document* Corpus::find(std::string_view id) const {
    auto idx = index_of(id);
    return idx ? &documents_[*idx] : nullptr;
}

std::optional<std::size_t> Corpus::index_of(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CorpusError("cannot open corpus file " + path.string());

    std::vector<Document> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (std::all_of(line.begin(), line.end(),
                        [](unsigned char c) { return std::isspace(c); })) {
            continue;
        }
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            fail_line(line_no, std::string("malformed JSON: ") + e.what());
        }
        if (!rec.is_object()) fail_line(line_no, "record must be a JSON object");

        auto id = require_string(rec, "id", line_no);
        auto kind = require_string(rec, "kind", line_no);
        if (kind == "passage") {
            docs.push_back(make_passage(std::move(id), require_string(rec, "title", line_no),
                                        require_string(rec, "text", line_no)));
        } else if (kind == "table_row") {
            TableMeta meta;
            meta.table_title = require_string(rec, "table_title", line_no);
            auto row = rec.find("row_index");
            if (row == rec.end() || !row->is_number_integer() || row->get<int>() < 0) {
                fail_line(line_no, "\"row_index\" must be a non-negative integer");
            }
            meta.row_index = row->get<int>();
            auto cells = rec.find("cells");
            if (cells == rec.end() || !cells->is_array() || cells->empty()) {
                fail_line(line_no, "\"cells\" must be a non-empty array");
            }
            for (const auto& c : *cells) {
                if (!c.is_array() || c.size() != 2 || !c[0].is_string() || !c[1].is_string()) {
                    fail_line(line_no, "each cell must be a [header, value] string pair");
                }
                meta.cells.push_back({c[0].get<std::string>(), c[1].get<std::string>()});
            }
            docs.push_back(make_table_row(std::move(id), std::move(meta)));
        } else {
            fail_line(line_no, "unknown kind \"" + kind + "\"");
        }
    }
    return Corpus(std::move(docs));
}

std::string corpus_record_json(const Document& doc) {
    nlohmann::ordered_json rec;
    rec["id"] = doc.id;
    rec["kind"] = to_string(doc.kind);
    if (doc.table) {
        rec["table_title"] = doc.table->table_title;
        rec["row_index"] = doc.table->row_index;
        auto cells = nlohmann::ordered_json::array();
        for (const auto& c : doc.table->cells) cells.push_back({c.header, c.value});
        rec["cells"] = std::move(cells);
    } else {
        rec["title"] = doc.title;
        rec["text"] = doc.text;
    }
    return rec.dump();
}

double TermVector::get(std::string_view term) const {
    auto it = weights.find(term);
    return it == weights.end() ? 0.0 : it->second;
}

double TermVector::norm() const {
    double sq = 0.0;
    for (const auto& [_, w] : weights) sq += w * w;
    return std::sqrt(sq);
}

double smoothed_idf(std::size_t doc_count, int doc_frequency) {
    return std::log(1.0 + static_cast<double>(doc_count) / static_cast<double>(doc_frequency));
}

TermVector tfidf_vector(std::string_view text, const Corpus& corpus) {
    std::map<std::string, int, std::less<>> tf;
    for (auto& t : tokenize(text)) ++tf[std::move(t)];

    TermVector v;
    for (auto& [term, count] : tf) {
        int df = corpus.doc_frequency(term);
        if (df == 0) continue;
        v.weights.emplace(term, count * smoothed_idf(corpus.size(), df));
    }
    return v;
}

TermVector tfidf_vector(const Document& doc, const Corpus& corpus) {
    return tfidf_vector(doc.text, corpus);
}

}  // namespace n2n
