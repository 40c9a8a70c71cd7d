#include "n2n/cli.hpp"
#include "n2n/synthetic.hpp"

#include "util.hpp"

#include <doctest.h>

#include <sstream>

using namespace n2n;
using namespace n2n::cli;

namespace {

struct Suite {
    test::TempDir dir;
    SyntheticSuite suite;

    Suite() {
        SyntheticOptions o;
        o.chains = 10;
        suite = generate_synthetic_suite(o);
        write_synthetic_suite(suite, dir.path());
    }

    CommonOptions common() const {
        CommonOptions c;
        c.corpus = dir.path() / "corpus.jsonl";
        c.mock = dir.path() / "mock.json";
        return c;
    }
};

}  // namespace

TEST_CASE("cmd_index") {
    Suite s;
    std::ostringstream out, err;
    IndexOptions o{s.dir.path() / "corpus.jsonl", s.dir.path() / "a.idx"};
    CHECK(cmd_index(o, out, err) == 0);
    o.out = s.dir.path() / "b.idx";
    CHECK(cmd_index(o, out, err) == 0);
    CHECK(test::slurp(s.dir.path() / "a.idx") == test::slurp(s.dir.path() / "b.idx"));

    IndexOptions missing{s.dir.path() / "nope.jsonl", s.dir.path() / "c.idx"};
    CHECK(cmd_index(missing, out, err) == 1);
    CHECK_FALSE(err.str().empty());
}

TEST_CASE("cmd_ask") {
    Suite s;
    const auto& q = s.suite.questions[0];
    std::ostringstream out, err;

    AskOptions o;
    o.common = s.common();
    o.question = q.question;
    o.dot = s.dir.path() / "final.dot";
    CHECK(cmd_ask(o, out, err) == 0);
    CHECK(out.str() == *q.answer + "\n");
    auto dot = test::slurp(*o.dot);
    CHECK(dot.starts_with("graph evidence {"));
    CHECK(dot.ends_with("}\n"));

    std::ostringstream out2, err2;
    o.mode = "vanilla";
    o.dot.reset();
    o.trace = true;
    CHECK(cmd_ask(o, out2, err2) == 0);
    CHECK(out2.str().find("\"mode\": \"vanilla\"") != std::string::npos);

    std::ostringstream out3, err3;
    o.mode = "sideways";
    CHECK(cmd_ask(o, out3, err3) != 0);

    std::ostringstream out4, err4;
    AskOptions live;
    live.common.corpus = s.dir.path() / "corpus.jsonl";
    live.question = "x";
    CHECK(cmd_ask(live, out4, err4) != 0);
    CHECK(err4.str().find("--mock") != std::string::npos);
}

TEST_CASE("cmd_plan") {
    Suite s;
    std::ostringstream out, err;
    PlanOptions o;
    o.common = s.common();
    o.question = s.suite.questions[2].question;
    CHECK(cmd_plan(o, out, err) == 0);
    CHECK(out.str().find("{entity1}") != std::string::npos);
}

TEST_CASE("cmd_eval writes four reports") {
    Suite s;
    std::ostringstream out, err;
    EvalOptions o;
    o.common = s.common();
    o.questions = s.dir.path() / "questions.jsonl";
    o.modes = {"full", "graph-norank", "decomp", "vanilla"};
    o.out = s.dir.path() / "runs";
    std::filesystem::path run;
    CHECK(cmd_eval(o, out, err, &run) == 0);
    for (const char* m : {"full", "graph-norank", "decomp", "vanilla"}) {
        CHECK(std::filesystem::exists(run / (std::string("report-") + m + ".json")));
        CHECK(std::filesystem::exists(run / (std::string("results-") + m + ".jsonl")));
    }
    CHECK(std::filesystem::exists(run / "manifest.json"));
    auto table = test::slurp(run / "report.txt");
    CHECK(table.find("EM") != std::string::npos);
    CHECK(table.find("F1") != std::string::npos);

    std::filesystem::path again;
    CHECK(cmd_eval(o, out, err, &again) == 0);
    CHECK(again != run);
    for (const char* f : {"results-full.jsonl", "report-full.json", "report.txt", "manifest.json"}) {
        CHECK(test::slurp(run / f) == test::slurp(again / f));
    }
}

TEST_CASE("cmd_inspect_graph and cmd_synth") {
    Suite s;
    std::ostringstream out, err;
    InspectOptions o;
    o.common = s.common();
    o.query = s.suite.chains[0].hop1_query;
    CHECK(cmd_inspect_graph(o, out, err) == 0);
    CHECK(out.str().starts_with("graph evidence {"));

    std::ostringstream out2;
    o.prune = "sometimes";
    CHECK(cmd_inspect_graph(o, out2, err) != 0);

    SynthOptions so;
    so.out = s.dir.path() / "synth";
    so.chains = 3;
    CHECK(cmd_synth(so, out, err) == 0);
    CHECK(std::filesystem::exists(so.out / "mock.json"));
}
