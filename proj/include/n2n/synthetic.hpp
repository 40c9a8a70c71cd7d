#pragma once

#include "n2n/corpus.hpp"
#include "n2n/llm_gateway.hpp"
#include "n2n/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace n2n {

// Planted two-hop chains over a hybrid corpus:
//   table row (team -> head coach) -> bridge passage (coach -> home city)
//   -> answer passage (city -> mayor)
// plus lexical distractors, and a scripted mock that behaves like a careful
// reader: it only answers when the supporting text is in its prompt.
//
// Chain flavours:
//  - "easy": the answer passage also names the team, so one-shot retrieval
//    of the question can reach it.
//  - "confused": a low-relevance passage about the team names a wrong city.
//    A reader that sees it during entity extraction follows it.
struct SyntheticOptions {
    int chains = 50;
    int team_news_per_chain = 8;
    int distractors_per_chain = 3;
    std::uint32_t seed = 20240601;
};

struct SyntheticChain {
    std::string team;
    std::string coach;
    std::string city;
    std::string mayor;
    std::string row_id;
    std::string bridge_id;
    std::string answer_id;
    std::optional<std::string> confuser_id;
    bool easy = false;
    std::string question_id;
    std::string question;
    std::string hop1_query;
    std::string hop2_query;
};

struct SyntheticSuite {
    std::vector<Document> documents;
    std::vector<Question> questions;  // answers filled in
    std::vector<MockRule> rules;
    std::vector<SyntheticChain> chains;
    std::size_t distractor_count = 0;
};

SyntheticSuite generate_synthetic_suite(const SyntheticOptions& options = {});

// Writes corpus.jsonl, questions.jsonl and mock.json into `dir`.
void write_synthetic_suite(const SyntheticSuite& suite, const std::filesystem::path& dir);

}  // namespace n2n
