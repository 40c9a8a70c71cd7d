#include "n2n/corpus.hpp"
#include "n2n/errors.hpp"

#include "oracles.hpp"
#include "util.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>

using namespace n2n;

TEST_CASE("tokenize lowercases and splits on non-alphanumerics") {
    CHECK(tokenize("New York City") == std::vector<std::string>{"new", "york", "city"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("the 8.4 million") == std::vector<std::string>{"million"});
    CHECK(tokenize("Table:T|Row:0|A|x") == std::vector<std::string>{"table", "row"});
    CHECK(tokenize("A-1 b2 C3PO") == std::vector<std::string>{"b2", "c3po"});
}

TEST_CASE("stopwords") {
    CHECK(is_stopword("the"));
    CHECK(is_stopword("of"));
    CHECK_FALSE(is_stopword("york"));
    CHECK_FALSE(is_stopword(""));
}

TEST_CASE("serialize_table_row") {
    std::vector<Cell> cells{{"City", "New York"}, {"Population", "8.4 million"}};
    CHECK(serialize_table_row("Population Stats", 5, cells) ==
          "Table:Population Stats|Row:5|City|New York|Population|8.4 million");

    std::vector<Cell> one{{"A", "x"}};
    CHECK(serialize_table_row("T", 0, one) == "Table:T|Row:0|A|x");
    CHECK(serialize_table_row("T", 0, one) == serialize_table_row("T", 0, one));

    CHECK_THROWS_AS(serialize_table_row("T", -1, one), std::invalid_argument);
    CHECK_THROWS_AS(serialize_table_row("T", 0, {}), std::invalid_argument);
    std::vector<Cell> piped{{"A", "x|y"}};
    CHECK_THROWS_AS(serialize_table_row("T", 0, piped), std::invalid_argument);
}

TEST_CASE("make_table_row escapes delimiters with a warning") {
    std::vector<std::string> warnings;
    auto doc = make_table_row("r1", TableMeta{"A|B", 2, {{"h", "v|w"}}}, &warnings);
    CHECK(doc.text == "Table:A/B|Row:2|h|v/w");
    CHECK(doc.table->table_title == "A/B");
    CHECK(warnings.size() == 2);
    CHECK(doc.kind == DocKind::TableRow);
}

TEST_CASE("Corpus enforces unique ids and table invariants") {
    CHECK_THROWS_WITH_AS(Corpus({make_passage("d1", "", "a b"), make_passage("d1", "", "c d")}),
                         "duplicate id d1", CorpusError);

    auto row = make_table_row("r", TableMeta{"T", 0, {{"A", "x"}}});
    row.text = "tampered";
    CHECK_THROWS_AS(Corpus({row}), CorpusError);

    Corpus c({make_passage("a", "", "alpha beta beta"), make_passage("b", "", "beta gamma")});
    CHECK(c.size() == 2);
    CHECK(c.doc_frequency("beta") == 2);
    CHECK(c.doc_frequency("alpha") == 1);
    CHECK(c.doc_frequency("zeta") == 0);
    CHECK(c.find("b")->text == "beta gamma");
    CHECK(c.find("zz") == nullptr);
    CHECK(c.index_of("b") == 1u);
}

TEST_CASE("load_corpus") {
    test::TempDir dir;

    SUBCASE("three valid records") {
        auto p = dir.write("c.jsonl",
                           "{\"id\":\"p1\",\"kind\":\"passage\",\"title\":\"A\",\"text\":\"one\"}\n"
                           "{\"id\":\"p2\",\"kind\":\"passage\",\"title\":\"B\",\"text\":\"two\"}\n"
                           "\n"
                           "{\"id\":\"p3\",\"kind\":\"passage\",\"title\":\"C\",\"text\":\"three\"}\n");
        CHECK(load_corpus(p).size() == 3);
    }
    SUBCASE("duplicate id") {
        auto p = dir.write("c.jsonl",
                           "{\"id\":\"d1\",\"kind\":\"passage\",\"title\":\"\",\"text\":\"x\"}\n"
                           "{\"id\":\"d1\",\"kind\":\"passage\",\"title\":\"\",\"text\":\"y\"}\n");
        CHECK_THROWS_WITH_AS(load_corpus(p), doctest::Contains("duplicate id d1"), CorpusError);
    }
    SUBCASE("missing text names the line") {
        auto p = dir.write("c.jsonl",
                           "{\"id\":\"d1\",\"kind\":\"passage\",\"title\":\"\",\"text\":\"x\"}\n"
                           "{\"id\":\"d2\",\"kind\":\"passage\",\"title\":\"\"}\n");
        CHECK_THROWS_WITH_AS(load_corpus(p), doctest::Contains("line 2"), CorpusError);
    }
    SUBCASE("malformed json names the line") {
        auto p = dir.write("c.jsonl", "{\"id\":\"d1\",\n");
        CHECK_THROWS_WITH_AS(load_corpus(p), doctest::Contains("line 1"), CorpusError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_corpus(dir.path() / "nope.jsonl"), CorpusError);
    }
    SUBCASE("records round-trip") {
        std::vector<Document> docs{
            make_passage("p", "Title", "Some text"),
            make_table_row("t", TableMeta{"Pop", 3, {{"City", "Oslo"}, {"Size", "big"}}})};
        std::string lines;
        for (const auto& d : docs) lines += corpus_record_json(d) + "\n";
        auto p = dir.write("rt.jsonl", lines);
        CHECK(load_corpus(p).documents() == docs);
    }
}

TEST_CASE("tfidf_vector") {
    SUBCASE("single document, term twice") {
        Corpus c({make_passage("a", "", "echo echo")});
        auto v = tfidf_vector(c.documents()[0], c);
        CHECK(v.get("echo") == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
    }
    SUBCASE("absent terms") {
        Corpus c({make_passage("a", "", "alpha"), make_passage("b", "", "beta")});
        auto v = tfidf_vector(c.documents()[0], c);
        CHECK(v.weights.count("beta") == 0);
        CHECK(v.get("beta") == 0.0);
        CHECK(tfidf_vector("zzz unknown", c).weights.empty());
    }
    SUBCASE("identical documents give identical vectors") {
        Corpus c({make_passage("a", "", "red fox jumps"), make_passage("b", "", "red fox jumps"),
                  make_passage("c", "", "blue")});
        CHECK(tfidf_vector(c.documents()[0], c) == tfidf_vector(c.documents()[1], c));
    }
    SUBCASE("matches the brute-force weights") {
        std::vector<std::string> texts{"new york city population", "york minster",
                                       "population of new york is large", "city of paris"};
        std::vector<Document> docs;
        for (std::size_t i = 0; i < texts.size(); ++i) {
            docs.push_back(make_passage("d" + std::to_string(i), "", texts[i]));
        }
        Corpus c(docs);
        auto expected = oracle::tfidf_all(texts);
        for (std::size_t i = 0; i < texts.size(); ++i) {
            auto got = tfidf_vector(c.documents()[i], c);
            REQUIRE(got.weights.size() == expected[i].size());
            for (const auto& [t, w] : expected[i]) CHECK(got.get(t) == doctest::Approx(w));
        }
    }
}
