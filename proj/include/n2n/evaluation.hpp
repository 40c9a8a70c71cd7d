#pragma once

#include "n2n/pipeline.hpp"

#include <json.hpp>

#include <map>
#include <span>
#include <string>
#include <vector>

namespace n2n {

// Lowercase, strip ASCII punctuation, drop the articles a/an/the, collapse
// whitespace. Same steps, same order as the common reading-comprehension
// evaluators.
std::string normalize_answer(std::string_view text);

int exact_match(std::string_view pred, std::string_view gold);

struct TokenScores {
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

// Multiset token overlap of the normalized strings. Both empty scores 1,
// exactly one empty scores 0.
TokenScores token_f1(std::string_view pred, std::string_view gold);

struct QuestionScore {
    std::string id;
    int em = 0;
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

// Aggregates are percentages (unweighted means x 100).
struct EvalReport {
    std::size_t n = 0;
    double em = 0.0;
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    std::vector<QuestionScore> per_question;
};

// Throws Error("no records") on empty input and Error naming any id without
// a gold answer.
EvalReport evaluate(std::span<const AnswerRecord> records,
                    const std::map<std::string, std::string>& golds);

nlohmann::ordered_json report_to_json(const EvalReport& report, std::string_view label);

// Plain-text table, one row per labelled report, columns EM F1 P R.
std::string render_report_table(
    std::span<const std::pair<std::string, EvalReport>> rows);

}  // namespace n2n
