#include "n2n/synthetic.hpp"

#include "n2n/errors.hpp"
#include "n2n/planner.hpp"

#include <fmt/format.h>

#include <array>
#include <fstream>
#include <random>
#include <set>

namespace n2n {

namespace {

constexpr std::array<std::string_view, 40> kSyllables = {
    "ka",  "vel", "dor", "mi",  "tra", "zen", "quo", "bri", "lus", "fen",
    "oth", "rav", "sil", "mar", "tek", "gon", "ul",  "pri", "des", "nor",
    "vak", "lem", "yor", "shi", "bal", "cor", "den", "fis", "gal", "hur",
    "jin", "kor", "lin", "mol", "nev", "pas", "rin", "sor", "tav", "wex",
};

constexpr std::array<std::string_view, 8> kTeamNews = {
    "{team} won the exhibition match against {opp} after a late goal by {player}.",
    "{team} announced a new jersey design, unveiled by {player}, for the coming season.",
    "Tickets for {team} home games against {opp} sold out within hours, said {player}.",
    "{team} signed a sponsorship deal with a brewery owned by {player}.",
    "The {team} arena installed new lighting, a gift from {player}, before meeting {opp}.",
    "{team} lost narrowly to {opp} in overtime despite two saves by {player}.",
    "Supporters of {team} organized a charity skate in winter with {player}.",
    "{team} retired the jersey of {player}, a veteran defenseman.",
};

constexpr std::array<std::string_view, 3> kDistractors = {
    "The head coach of {team} met the mayor during a city parade for players born in the "
    "region.",
    "{team} fans asked the mayor whether the city would honor every player born locally; the "
    "head coach declined to comment.",
    "A city council report praised the {team} head coach, although the mayor was not born in "
    "the province.",
};

constexpr std::string_view kConfuser =
    "Faded programmes kept in the {team} clubhouse basement, printed decades ago for a charity "
    "gala, list {wrong_city} as the birthplace of a former trainer, although local archivists "
    "dispute nearly every detail recorded in those brittle souvenir pages.";

// Draws unique capitalised pseudo-words from a fixed syllable set.
class NameSource {
public:
    explicit NameSource(std::uint32_t seed) : rng_(seed) {}

    std::string word(int min_syllables = 2, int max_syllables = 3) {
        for (;;) {
            int n = min_syllables + static_cast<int>(rng_() % static_cast<std::uint32_t>(
                                                              max_syllables - min_syllables + 1));
            std::string w;
            for (int i = 0; i < n; ++i) w += kSyllables[rng_() % kSyllables.size()];
            w[0] = static_cast<char>(w[0] - 'a' + 'A');
            if (used_.insert(w).second) return w;
        }
    }

    std::string person() { return word() + " " + word(); }

private:
    std::mt19937 rng_;
    std::set<std::string> used_;
};

std::string subst(std::string_view tmpl, std::initializer_list<std::pair<std::string_view, std::string>> vars) {
    std::string out(tmpl);
    for (const auto& [key, value] : vars) {
        std::string needle = "{" + std::string(key) + "}";
        for (auto pos = out.find(needle); pos != std::string::npos;
             pos = out.find(needle, pos + value.size())) {
            out.replace(pos, needle.size(), value);
        }
    }
    return out;
}

}  // namespace

SyntheticSuite generate_synthetic_suite(const SyntheticOptions& options) {
    if (options.chains < 2) throw Error("synthetic suite needs at least 2 chains");
    if (options.team_news_per_chain < 0 ||
        options.team_news_per_chain > static_cast<int>(kTeamNews.size()) ||
        options.distractors_per_chain < 0 ||
        options.distractors_per_chain > static_cast<int>(kDistractors.size())) {
        throw Error("synthetic suite: distractor counts out of range");
    }

    NameSource names(options.seed);
    SyntheticSuite suite;
    const auto n = static_cast<std::size_t>(options.chains);

    for (std::size_t i = 0; i < n; ++i) {
        SyntheticChain c;
        c.team = names.word() + " " + names.word();
        c.coach = names.person();
        c.city = names.word(3, 3);
        c.mayor = names.person();
        c.easy = i % 5 == 0;
        suite.chains.push_back(std::move(c));
    }

    std::vector<Document> chain_docs;
    std::vector<Document> noise_docs;
    for (std::size_t i = 0; i < n; ++i) {
        auto& c = suite.chains[i];
        const auto& wrong = suite.chains[(i + 7) % n];
        bool confused = i % 5 >= 1 && i % 5 <= 3;
        auto tag = fmt::format("{:03}", i);

        c.row_id = "row-" + tag;
        c.bridge_id = "bridge-" + tag;
        c.answer_id = "answer-" + tag;
        c.question_id = "q" + tag;
        c.question = fmt::format("Who is the mayor of the city where the head coach of {} was born?",
                                 c.team);
        c.hop1_query = fmt::format("In which city was the head coach of {} born?", c.team);
        c.hop2_query = fmt::format("Who is the mayor of {}?", c.city);

        TableMeta meta{"Northern Hockey League", static_cast<int>(i),
                       {{"Team", c.team}, {"Head Coach", c.coach},
                        {"Founded", std::to_string(1921 + i)}}};
        chain_docs.push_back(make_table_row(c.row_id, std::move(meta)));
        chain_docs.push_back(make_passage(
            c.bridge_id, c.coach,
            fmt::format("The head coach of {0} is {1}, who was born in {2}.", c.team, c.coach,
                        c.city)));
        chain_docs.push_back(make_passage(
            c.answer_id, c.city,
            c.easy ? fmt::format("{0}, hometown of the {1} head coach, is governed by mayor {2}.",
                                 c.city, c.team, c.mayor)
                   : fmt::format("{0} is governed by mayor {1}, who took office after a close "
                                 "election.",
                                 c.city, c.mayor)));

        for (int k = 0; k < options.distractors_per_chain; ++k) {
            noise_docs.push_back(make_passage(fmt::format("distractor-{}-{}", tag, k), c.team,
                                              subst(kDistractors[static_cast<std::size_t>(k)],
                                                    {{"team", c.team}})));
        }
        for (int k = 0; k < options.team_news_per_chain; ++k) {
            noise_docs.push_back(make_passage(
                fmt::format("news-{}-{}", tag, k), c.team + " news",
                subst(kTeamNews[static_cast<std::size_t>(k)],
                      {{"team", c.team},
                       {"opp", names.word() + " Rovers"},
                       {"player", names.person()}})));
        }
        if (confused) {
            c.confuser_id = "archive-" + tag;
            noise_docs.push_back(make_passage(*c.confuser_id, c.team + " archives",
                                              subst(kConfuser, {{"team", c.team},
                                                                {"wrong_city", wrong.city}})));
        }

        QueryPlan plan;
        plan.hops = 2;
        plan.initial_query = c.hop1_query;
        plan.expected_entity_type = "a city name";
        plan.alternatives = {c.team + " head coach hometown"};
        plan.step_templates = {"Who is the mayor of {entity1}?"};

        const std::string main_q = "**Main Question:**\n" + c.question;
        const std::string extract_q = "Question: \"" + c.hop1_query + "\"";
        if (confused) {
            suite.rules.emplace_back(
                std::vector<std::string>{main_q, "Step 2: Who is the mayor of " + wrong.city + "?",
                                         "governed by mayor " + wrong.mayor},
                wrong.mayor);
        }
        suite.rules.emplace_back(
            std::vector<std::string>{main_q, "governed by mayor " + c.mayor,
                                     c.coach + ", who was born in " + c.city},
            c.mayor);
        if (confused) {
            suite.rules.emplace_back(
                std::vector<std::string>{extract_q, "list " + wrong.city + " as the birthplace"},
                wrong.city);
        }
        suite.rules.emplace_back(
            std::vector<std::string>{extract_q, c.coach + ", who was born in " + c.city}, c.city);
        suite.rules.emplace_back("Here is the question: " + c.question,
                                 plan_to_json(plan).dump());

        suite.questions.push_back({c.question_id, c.question, c.mayor});
    }

    suite.distractor_count = noise_docs.size();
    suite.documents = std::move(chain_docs);
    suite.documents.insert(suite.documents.end(), std::make_move_iterator(noise_docs.begin()),
                           std::make_move_iterator(noise_docs.end()));
    return suite;
}

void write_synthetic_suite(const SyntheticSuite& suite, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error("cannot write " + (dir / name).string());
        return out;
    };

    auto corpus = open("corpus.jsonl");
    for (const auto& d : suite.documents) corpus << corpus_record_json(d) << '\n';

    auto questions = open("questions.jsonl");
    for (const auto& q : suite.questions) {
        nlohmann::ordered_json j;
        j["id"] = q.id;
        j["question"] = q.question;
        if (q.answer) j["answer"] = *q.answer;
        questions << j.dump() << '\n';
    }

    auto mock = open("mock.json");
    mock << ScriptedMock(suite.rules).to_json().dump(2) << '\n';
}

}  // namespace n2n
