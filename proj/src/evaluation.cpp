#include "n2n/evaluation.hpp"

#include "n2n/errors.hpp"

#include <fmt/format.h>

#include <cctype>
#include <sstream>
#include <unordered_map>

namespace n2n {

namespace {

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

}  // namespace

std::string normalize_answer(std::string_view text) {
    std::string s;
    s.reserve(text.size());
    for (char c : text) {
        auto u = static_cast<unsigned char>(c);
        if (std::ispunct(u)) continue;
        s += static_cast<char>(std::tolower(u));
    }
    std::string out;
    for (auto& tok : split_ws(s)) {
        if (tok == "a" || tok == "an" || tok == "the") continue;
        if (!out.empty()) out += ' ';
        out += tok;
    }
    return out;
}

int exact_match(std::string_view pred, std::string_view gold) {
    return normalize_answer(pred) == normalize_answer(gold) ? 1 : 0;
}

TokenScores token_f1(std::string_view pred, std::string_view gold) {
    auto p = split_ws(normalize_answer(pred));
    auto g = split_ws(normalize_answer(gold));
    if (p.empty() && g.empty()) return {1.0, 1.0, 1.0};
    if (p.empty() || g.empty()) return {};

    std::unordered_map<std::string, int> counts;
    for (const auto& t : g) ++counts[t];
    int common = 0;
    for (const auto& t : p) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    if (common == 0) return {};
    double precision = static_cast<double>(common) / static_cast<double>(p.size());
    double recall = static_cast<double>(common) / static_cast<double>(g.size());
    return {2 * precision * recall / (precision + recall), precision, recall};
}

EvalReport evaluate(std::span<const AnswerRecord> records,
                    const std::map<std::string, std::string>& golds) {
    if (records.empty()) throw Error("no records");
    EvalReport report;
    report.n = records.size();
    for (const auto& r : records) {
        auto it = golds.find(r.id);
        if (it == golds.end()) throw Error("no gold answer for id " + r.id);
        auto scores = token_f1(r.answer, it->second);
        QuestionScore q{r.id, exact_match(r.answer, it->second), scores.f1, scores.precision,
                        scores.recall};
        report.em += q.em;
        report.f1 += q.f1;
        report.precision += q.precision;
        report.recall += q.recall;
        report.per_question.push_back(std::move(q));
    }
    auto n = static_cast<double>(report.n);
    report.em = 100.0 * report.em / n;
    report.f1 = 100.0 * report.f1 / n;
    report.precision = 100.0 * report.precision / n;
    report.recall = 100.0 * report.recall / n;
    return report;
}

nlohmann::ordered_json report_to_json(const EvalReport& report, std::string_view label) {
    nlohmann::ordered_json j;
    j["label"] = label;
    j["n"] = report.n;
    j["em"] = report.em;
    j["f1"] = report.f1;
    j["precision"] = report.precision;
    j["recall"] = report.recall;
    j["bertscore_f1"] = nullptr;  // needs a neural encoder; not computed
    auto per = nlohmann::ordered_json::array();
    for (const auto& q : report.per_question) {
        nlohmann::ordered_json qj;
        qj["id"] = q.id;
        qj["em"] = q.em;
        qj["f1"] = q.f1;
        qj["p"] = q.precision;
        qj["r"] = q.recall;
        per.push_back(std::move(qj));
    }
    j["per_question"] = std::move(per);
    return j;
}

std::string render_report_table(std::span<const std::pair<std::string, EvalReport>> rows) {
    std::size_t width = 6;
    for (const auto& [label, _] : rows) width = std::max(width, label.size());
    std::string out = fmt::format("{:<{}}  {:>5}  {:>7}  {:>7}  {:>7}  {:>7}\n", "Method", width,
                                  "N", "EM", "F1", "P", "R");
    for (const auto& [label, r] : rows) {
        out += fmt::format("{:<{}}  {:>5}  {:>7.2f}  {:>7.2f}  {:>7.2f}  {:>7.2f}\n", label, width,
                           r.n, r.em, r.f1, r.precision, r.recall);
    }
    return out;
}

}  // namespace n2n
