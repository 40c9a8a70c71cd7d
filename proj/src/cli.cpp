#include "n2n/cli.hpp"

#include "n2n/evaluation.hpp"
#include "n2n/synthetic.hpp"

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

namespace n2n::cli {

namespace {

struct Session {
    Settings settings;
    Corpus corpus;
    std::unique_ptr<Retriever> retriever;
    std::shared_ptr<Backend> backend;
    std::unique_ptr<LlmGateway> llm;
    bool deterministic = false;
};

Settings resolve_settings(const CommonOptions& o, const std::optional<std::string>& mode) {
    Settings s;
    if (o.config) s = load_config(*o.config);
    if (o.alpha) s.pipeline.alpha = *o.alpha;
    if (o.beta) s.pipeline.beta = *o.beta;
    if (mode) s.pipeline.mode = parse_mode(*mode);
    s.pipeline.validate();
    return s;
}

std::shared_ptr<Backend> make_backend(const CommonOptions& o, const Settings& s) {
    if (o.mock) return std::make_shared<ScriptedMock>(ScriptedMock::from_file(*o.mock));
    if (s.backend.endpoint.empty()) {
        throw ConfigError("no model backend: pass --mock or set backend.endpoint in --config");
    }
    HttpBackendConfig http;
    http.endpoint = s.backend.endpoint;
    http.model = s.backend.model;
    if (const char* key = std::getenv(s.backend.api_key_env.c_str())) http.api_key = key;
    http.timeout = std::chrono::milliseconds(static_cast<long long>(s.backend.timeout_seconds * 1000));
    http.max_inflight = s.backend.max_inflight;
    return std::make_shared<HttpChatBackend>(std::move(http));
}

// Corpus and retriever only; commands that call the model add the backend.
std::unique_ptr<Session> open_corpus(const CommonOptions& o, const std::optional<std::string>& mode) {
    auto session = std::make_unique<Session>();
    session->settings = resolve_settings(o, mode);
    session->corpus = load_corpus(o.corpus);
    if (o.retriever_url) {
        session->retriever = std::make_unique<RemoteRetriever>(session->corpus, *o.retriever_url);
    } else if (o.index) {
        session->retriever = std::make_unique<LexicalRetriever>(
            session->corpus, Index::load(*o.index, session->corpus));
    } else {
        session->retriever = std::make_unique<LexicalRetriever>(session->corpus);
    }
    return session;
}

std::unique_ptr<Session> open_session(const CommonOptions& o, const std::optional<std::string>& mode) {
    auto session = open_corpus(o, mode);
    session->backend = make_backend(o, session->settings);
    session->llm = std::make_unique<LlmGateway>(session->backend);
    session->deterministic = o.mock.has_value();
    return session;
}

PipelineContext context_of(const Session& s) {
    return PipelineContext{s.corpus, *s.retriever, *s.llm, s.settings.pipeline};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << content;
    if (!f) throw Error("write failed for " + path.string());
}

std::filesystem::path fresh_run_dir(const std::filesystem::path& base) {
    auto now = std::chrono::system_clock::now();
    auto stamp = fmt::format("run-{:%Y%m%d-%H%M%S}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)));
    std::filesystem::create_directories(base);
    auto dir = base / stamp;
    for (int n = 1; std::filesystem::exists(dir); ++n) dir = base / fmt::format("{}-{}", stamp, n);
    std::filesystem::create_directory(dir);
    return dir;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int cmd_index(const IndexOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto corpus = load_corpus(o.corpus);
        auto index = Index::build(corpus);
        index.save(o.out);
        out << "documents: " << corpus.size() << "\n"
            << "vocabulary: " << index.vocabulary_size() << "\n";
        return 0;
    });
}

int cmd_plan(const PlanOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Settings settings = resolve_settings(o.common, std::nullopt);
        LlmGateway llm(make_backend(o.common, settings));
        auto outcome = generate_plan(o.question, llm);
        for (const auto& w : outcome.warnings) err << "warning: " << w << "\n";
        out << plan_to_json(outcome.plan).dump(2) << "\n";
        return 0;
    });
}

int cmd_ask(const AskOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto session = open_session(o.common, o.mode);
        AnswerRecord record;
        try {
            record = answer_question("ask", o.question, context_of(*session));
        } catch (const PipelineError& e) {
            if (o.trace) out << record_to_json(e.partial()).dump(2) << "\n";
            throw;
        }
        for (const auto& w : record.warnings) err << "warning: " << w << "\n";
        out << record.answer << "\n";
        if (o.trace) out << record_to_json(record).dump(2) << "\n";
        if (o.dot) write_file(*o.dot, to_dot(record.final_graph, session->settings.pipeline.effective_alpha()));
        return 0;
    });
}

int cmd_eval(const EvalOptions& o, std::ostream& out, std::ostream& err,
             std::filesystem::path* run_dir) {
    return guarded(err, [&] {
        auto session = open_session(o.common, std::nullopt);
        auto questions = load_questions(o.questions);

        std::map<std::string, std::string> golds;
        if (o.golds) {
            for (const auto& q : load_questions(*o.golds)) {
                if (!q.answer) throw ConfigError("gold file record " + q.id + " has no answer");
                golds[q.id] = *q.answer;
            }
        } else {
            for (const auto& q : questions) {
                if (q.answer) golds[q.id] = *q.answer;
            }
        }

        std::vector<Mode> modes;
        if (o.modes.empty()) modes.push_back(session->settings.pipeline.mode);
        for (const auto& m : o.modes) modes.push_back(parse_mode(m));

        auto dir = fresh_run_dir(o.out);
        if (run_dir) *run_dir = dir;

        nlohmann::ordered_json manifest;
        manifest["config"] = settings_to_json(session->settings);
        manifest["corpus_path"] = o.common.corpus.string();
        manifest["questions_path"] = o.questions.string();
        manifest["golds_path"] = o.golds ? o.golds->string() : o.questions.string();
        manifest["backend"] = session->backend->describe();
        manifest["deterministic"] = session->deterministic;
        auto mode_names = nlohmann::ordered_json::array();
        for (auto m : modes) mode_names.push_back(to_string(m));
        manifest["modes"] = std::move(mode_names);
        write_file(dir / "manifest.json", manifest.dump(2) + "\n");

        std::vector<std::pair<std::string, EvalReport>> rows;
        for (auto mode : modes) {
            auto ctx = context_of(*session);
            ctx.config.mode = mode;
            auto records = answer_all(questions, ctx, o.concurrency);

            std::string lines;
            for (const auto& r : records) lines += record_to_json(r).dump() + "\n";
            write_file(dir / fmt::format("results-{}.jsonl", to_string(mode)), lines);

            auto report = evaluate(records, golds);
            write_file(dir / fmt::format("report-{}.json", to_string(mode)),
                       report_to_json(report, to_string(mode)).dump(2) + "\n");
            rows.emplace_back(std::string(to_string(mode)), std::move(report));
        }
        auto table = render_report_table(rows);
        write_file(dir / "report.txt", table);
        out << table << "run written to " << dir.string() << "\n";
        return 0;
    });
}

int cmd_inspect_graph(const InspectOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto session = open_corpus(o.common, std::nullopt);
        const auto& cfg = session->settings.pipeline;
        auto docs = session->retriever->retrieve(o.query, static_cast<std::size_t>(o.k));
        auto graph = build_graph(docs, session->corpus);
        if (o.prune != "none" && !graph.empty()) {
            if (o.prune != "hop" && o.prune != "final") throw ConfigError("--prune must be hop, final or none");
            auto ranked = graphrank(graph, cfg.effective_alpha());
            auto result = prune(graph, ranked, o.prune == "hop" ? cfg.hop_prune : cfg.final_prune);
            for (const auto& w : result.warnings) err << "warning: " << w << "\n";
            graph = std::move(result.graph);
        }
        auto dot = to_dot(graph, cfg.effective_alpha());
        if (o.dot) {
            write_file(*o.dot, dot);
            out << "nodes: " << graph.size() << ", edges: " << graph.edges.size() << "\n";
        } else {
            out << dot;
        }
        return 0;
    });
}

int cmd_synth(const SynthOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        SyntheticOptions so;
        so.chains = o.chains;
        so.seed = o.seed;
        auto suite = generate_synthetic_suite(so);
        write_synthetic_suite(suite, o.out);
        out << "documents: " << suite.documents.size() << " (" << suite.distractor_count
            << " distractors)\nquestions: " << suite.questions.size() << "\nwritten to "
            << o.out.string() << "\n";
        return 0;
    });
}

namespace {

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--corpus", o.corpus, "Corpus JSON-lines file")->required();
    cmd->add_option("--config", o.config, "Config file (key = value)");
    cmd->add_option("--index", o.index, "Index snapshot written by `index`");
    cmd->add_option("--mock", o.mock, "Scripted mock rules (JSON) instead of a live model");
    cmd->add_option("--retriever-url", o.retriever_url, "Remote retriever endpoint");
    cmd->add_option("--alpha", o.alpha, "GraphRank balancing weight");
    cmd->add_option("--beta", o.beta, "Bridge selector priority boost");
}

}  // namespace

int run(int argc, char** argv) {
    // Answers go to stdout; keep log lines out of it.
    spdlog::set_default_logger(spdlog::stderr_color_mt("n2n"));
    CLI::App app{"Evidence-graph multi-hop question answering over tables and text"};
    app.require_subcommand(1);

    IndexOptions index_opts;
    auto* index_cmd = app.add_subcommand("index", "Build and snapshot the lexical index");
    index_cmd->add_option("--corpus", index_opts.corpus)->required();
    index_cmd->add_option("--out", index_opts.out)->required();

    PlanOptions plan_opts;
    auto* plan_cmd = app.add_subcommand("plan", "Print the query plan for a question");
    plan_cmd->add_option("question", plan_opts.question)->required();
    plan_cmd->add_option("--config", plan_opts.common.config);
    plan_cmd->add_option("--mock", plan_opts.common.mock);

    AskOptions ask_opts;
    auto* ask_cmd = app.add_subcommand("ask", "Answer one question");
    ask_cmd->add_option("question", ask_opts.question)->required();
    add_common(ask_cmd, ask_opts.common);
    ask_cmd->add_option("--mode", ask_opts.mode, "vanilla | decomp | graph-norank | full");
    ask_cmd->add_flag("--trace", ask_opts.trace, "Dump the full answer record as JSON");
    ask_cmd->add_option("--dot", ask_opts.dot, "Write the final evidence graph as DOT");

    EvalOptions eval_opts;
    auto* eval_cmd = app.add_subcommand("eval", "Run a question set and score it");
    add_common(eval_cmd, eval_opts.common);
    eval_cmd->add_option("--questions", eval_opts.questions)->required();
    eval_cmd->add_option("--golds", eval_opts.golds);
    eval_cmd->add_option("--mode", eval_opts.modes, "Repeatable");
    eval_cmd->add_option("--out", eval_opts.out, "Base directory for run output");
    eval_cmd->add_option("--concurrency", eval_opts.concurrency);

    InspectOptions inspect_opts;
    auto* inspect_cmd = app.add_subcommand("inspect-graph", "Export the evidence graph of a query");
    add_common(inspect_cmd, inspect_opts.common);
    inspect_cmd->add_option("--query", inspect_opts.query)->required();
    inspect_cmd->add_option("--k", inspect_opts.k);
    inspect_cmd->add_option("--prune", inspect_opts.prune, "hop | final | none");
    inspect_cmd->add_option("--dot", inspect_opts.dot);

    SynthOptions synth_opts;
    auto* synth_cmd = app.add_subcommand("synth", "Generate the synthetic multi-hop suite");
    synth_cmd->add_option("--out", synth_opts.out)->required();
    synth_cmd->add_option("--chains", synth_opts.chains);
    synth_cmd->add_option("--seed", synth_opts.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (*index_cmd) return cmd_index(index_opts, std::cout, std::cerr);
    if (*plan_cmd) return cmd_plan(plan_opts, std::cout, std::cerr);
    if (*ask_cmd) return cmd_ask(ask_opts, std::cout, std::cerr);
    if (*eval_cmd) return cmd_eval(eval_opts, std::cout, std::cerr);
    if (*inspect_cmd) return cmd_inspect_graph(inspect_opts, std::cout, std::cerr);
    if (*synth_cmd) return cmd_synth(synth_opts, std::cout, std::cerr);
    return 1;
}

}  // namespace n2n::cli
