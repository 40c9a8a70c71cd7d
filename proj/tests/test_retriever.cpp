#include "n2n/errors.hpp"
#include "n2n/retriever.hpp"

#include "oracles.hpp"
#include "util.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <thread>

using namespace n2n;

namespace {

std::vector<Document> toy_docs() {
    return {
        make_passage("ny", "New York", "New York is the most populous city in the United States."),
        make_table_row("pop", TableMeta{"Population Stats", 5,
                                        {{"City", "New York"}, {"Population", "8.4 million"}}}),
        make_passage("paris", "Paris", "Paris is the capital and largest city of France."),
        make_passage("york", "York", "York is a cathedral city in North Yorkshire, England."),
        make_passage("census", "Census", "A census counts the population of a country."),
    };
}

std::vector<std::string> ids(const std::vector<ScoredDocument>& docs) {
    std::vector<std::string> out;
    for (const auto& d : docs) out.push_back(d.id());
    return out;
}

}  // namespace

TEST_CASE("Index::build") {
    SUBCASE("disjoint documents") {
        auto c = test::passages({"alpha", "beta", "gamma"});
        auto idx = Index::build(c);
        CHECK(idx.vocabulary_size() == 3);
        for (const char* t : {"alpha", "beta", "gamma"}) CHECK(idx.postings(t)->size() == 1);
    }
    SUBCASE("term frequency") {
        auto c = test::passages({"echo echo delta", "delta"});
        auto idx = Index::build(c);
        REQUIRE(idx.postings("echo") != nullptr);
        CHECK(*idx.postings("echo") == std::vector<Posting>{{0, 2}});
        CHECK(idx.postings("missing") == nullptr);
    }
    SUBCASE("deterministic") {
        Corpus c(toy_docs());
        CHECK(Index::build(c) == Index::build(c));
        CHECK(Index::build(c).snapshot() == Index::build(c).snapshot());
    }
    SUBCASE("empty corpus") {
        Corpus empty;
        CHECK_THROWS_AS(Index::build(empty), IndexError);
    }
}

TEST_CASE("Index snapshots round-trip and reject foreign corpora") {
    test::TempDir dir;
    Corpus c(toy_docs());
    auto idx = Index::build(c);
    idx.save(dir.path() / "idx.json");
    CHECK(Index::load(dir.path() / "idx.json", c) == idx);

    auto other = test::passages({"one doc"});
    CHECK_THROWS_AS(Index::load(dir.path() / "idx.json", other), IndexError);
    CHECK_THROWS_AS(Index::load(dir.path() / "missing.json", c), IndexError);
    dir.write("bad.json", "{not json");
    CHECK_THROWS_AS(Index::load(dir.path() / "bad.json", c), IndexError);
}

TEST_CASE("LexicalRetriever") {
    Corpus c(toy_docs());
    LexicalRetriever r(c);

    SUBCASE("toy corpus matches brute-force cosine") {
        auto got = r.retrieve("new york population", 2);
        auto expected = oracle::brute_retrieve(c.documents(), "new york population", 2);
        REQUIRE(got.size() == expected.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].id() == expected[i].first);
            CHECK(got[i].score == doctest::Approx(expected[i].second).epsilon(1e-12));
        }
    }
    SUBCASE("self query ranks first with the maximum score") {
        const auto& text = c.find("paris")->text;
        auto got = r.retrieve(text, 10);
        REQUIRE_FALSE(got.empty());
        CHECK(got[0].id() == "paris");
        CHECK(got[0].score == doctest::Approx(1.0));
    }
    SUBCASE("no shared terms") { CHECK(r.retrieve("zebra quokka", 5).empty()); }
    SUBCASE("k bounds and zero") {
        CHECK(r.retrieve("city", 2).size() == 2);
        CHECK(r.retrieve("city", 0).empty());
    }
    SUBCASE("many random queries agree with the oracle") {
        std::mt19937 rng(7);
        std::vector<std::string> words{"new",  "york",   "city",     "population", "paris",
                                       "france", "census", "country", "capital", "england"};
        for (int trial = 0; trial < 50; ++trial) {
            std::string q;
            for (int w = 0; w < 3; ++w) q += words[rng() % words.size()] + " ";
            auto got = r.retrieve(q, 5);
            auto expected = oracle::brute_retrieve(c.documents(), q, 5);
            REQUIRE(got.size() == expected.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i].score == doctest::Approx(expected[i].second).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("retrieve_multi") {
    Corpus c(toy_docs());
    LexicalRetriever r(c);

    SUBCASE("one query equals retrieve") {
        std::vector<std::string> q{"new york population"};
        auto a = retrieve_multi(r, q, 3);
        auto b = r.retrieve(q[0], 3);
        CHECK(ids(a) == ids(b));
    }
    SUBCASE("max merge") {
        const Document* d = c.find("ny");
        std::vector<std::vector<ScoredDocument>> lists{{{d, 0.4}}, {{d, 0.7}}};
        auto merged = merge_max(lists);
        REQUIRE(merged.size() == 1);
        CHECK(merged[0].score == 0.7);
    }
    SUBCASE("disjoint top sets") {
        std::vector<std::string> q{"paris france capital", "census country counts"};
        auto merged = retrieve_multi(r, q, 3);
        std::vector<ScoredDocument> pool;
        for (const auto& s : q) {
            for (const auto& d : r.retrieve(s, 3)) pool.push_back(d);
        }
        auto expected = merge_max(std::vector<std::vector<ScoredDocument>>{pool});
        expected.resize(std::min<std::size_t>(3, expected.size()));
        CHECK(ids(merged) == ids(expected));
    }
}

TEST_CASE("ranks_before breaks ties by id") {
    Corpus c(toy_docs());
    std::vector<ScoredDocument> v{{c.find("york"), 0.5}, {c.find("census"), 0.5}, {c.find("ny"), 0.9}};
    sort_by_score(v);
    CHECK(ids(v) == std::vector<std::string>{"ny", "census", "york"});
}

TEST_CASE("RemoteRetriever speaks the JSON protocol") {
    Corpus c(toy_docs());
    httplib::Server server;
    nlohmann::json seen;
    server.Post("/search", [&](const httplib::Request& req, httplib::Response& res) {
        seen = nlohmann::json::parse(req.body);
        nlohmann::json out;
        out["results"] = {{{"id", "paris"}, {"score", 0.2}},
                          {{"id", "ghost"}, {"score", 0.9}},
                          {{"id", "ny"}, {"score", 0.8}}};
        res.set_content(out.dump(), "application/json");
    });
    server.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
        res.status = 500;
        res.set_content("down", "text/plain");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    auto base = "http://127.0.0.1:" + std::to_string(port);
    RemoteRetriever remote(c, base + "/search", std::chrono::seconds(5));
    auto got = remote.retrieve("new york", 7);
    CHECK(seen["query"] == "new york");
    CHECK(seen["k"] == 7);
    CHECK(ids(got) == std::vector<std::string>{"ny", "paris"});

    RemoteRetriever broken(c, base + "/broken", std::chrono::seconds(5));
    CHECK_THROWS_AS(broken.retrieve("x", 1), TransportError);

    server.stop();
    t.join();

    RemoteRetriever gone(c, base + "/search", std::chrono::milliseconds(300));
    CHECK_THROWS_AS(gone.retrieve("x", 1), TransportError);
}
