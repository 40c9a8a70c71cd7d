#include "n2n/errors.hpp"
#include "n2n/evaluation.hpp"

#include <doctest.h>

using namespace n2n;

namespace {

AnswerRecord answered(std::string id, std::string answer) {
    AnswerRecord r;
    r.id = std::move(id);
    r.answer = std::move(answer);
    return r;
}

}  // namespace

TEST_CASE("normalize_answer") {
    CHECK(normalize_answer("The New York City.") == "new york city");
    CHECK(normalize_answer("8.4 million") == "84 million");
    CHECK(normalize_answer("") == "");
    CHECK(normalize_answer("  An   apple\ta day ") == "apple day");
    CHECK(normalize_answer("theater") == "theater");
}

TEST_CASE("exact_match") {
    CHECK(exact_match("Paris", "paris") == 1);
    CHECK(exact_match("Paris, France", "Paris") == 0);
    CHECK(exact_match("the answer", "answer") == 1);
}

TEST_CASE("token_f1") {
    auto s = token_f1("new york", "york city");
    CHECK(s.precision == 0.5);
    CHECK(s.recall == 0.5);
    CHECK(s.f1 == 0.5);

    s = token_f1("Paris", "Paris");
    CHECK(s.f1 == 1.0);
    s = token_f1("", "paris");
    CHECK(s.f1 == 0.0);
    CHECK(s.precision == 0.0);
    s = token_f1("", "");
    CHECK(s.f1 == 1.0);
    // Multiset: the repeated token counts once per occurrence in both.
    s = token_f1("york york", "york");
    CHECK(s.precision == 0.5);
    CHECK(s.recall == 1.0);
}

TEST_CASE("evaluate") {
    std::map<std::string, std::string> golds{{"a", "Paris"}, {"b", "Berlin"}};
    std::vector<AnswerRecord> recs{answered("a", "paris"), answered("b", "Rome")};
    auto r = evaluate(recs, golds);
    CHECK(r.n == 2);
    CHECK(r.em == 50.0);
    CHECK(r.f1 == 50.0);
    CHECK(r.per_question[1].em == 0);

    std::vector<AnswerRecord> perfect{answered("a", "Paris"), answered("b", "Berlin")};
    auto p = evaluate(perfect, golds);
    CHECK(p.em == 100.0);
    CHECK(p.f1 == 100.0);

    CHECK_THROWS_WITH_AS(evaluate({}, golds), "no records", Error);
    std::vector<AnswerRecord> stray{answered("zz", "x")};
    CHECK_THROWS_WITH_AS(evaluate(stray, golds), doctest::Contains("zz"), Error);
}

TEST_CASE("report rendering") {
    std::map<std::string, std::string> golds{{"a", "Paris"}};
    std::vector<AnswerRecord> recs{answered("a", "paris")};
    auto r = evaluate(recs, golds);
    auto j = report_to_json(r, "full");
    CHECK(j["label"] == "full");
    CHECK(j["em"] == 100.0);
    CHECK(j["bertscore_f1"].is_null());

    std::vector<std::pair<std::string, EvalReport>> rows{{"full", r}};
    auto table = render_report_table(rows);
    auto header = table.substr(0, table.find('\n'));
    auto at = [&](const char* col) { return header.find(col); };
    CHECK(at("EM") < at("F1"));
    CHECK(at("F1") < at("P"));
    CHECK(table.find("full") != std::string::npos);
    CHECK(table.find("100.00") != std::string::npos);
}
