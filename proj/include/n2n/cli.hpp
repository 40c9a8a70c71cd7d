#pragma once

#include "n2n/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace n2n::cli {

// Shared by every command that talks to a model or retriever.
struct CommonOptions {
    std::filesystem::path corpus;
    std::optional<std::filesystem::path> config;
    std::optional<std::filesystem::path> index;
    std::optional<std::filesystem::path> mock;  // scripted mock rules; offline
    std::optional<std::string> retriever_url;
    std::optional<double> alpha;
    std::optional<double> beta;
};

struct IndexOptions {
    std::filesystem::path corpus;
    std::filesystem::path out;
};

struct PlanOptions {
    CommonOptions common;
    std::string question;
};

struct AskOptions {
    CommonOptions common;
    std::string question;
    std::optional<std::string> mode;
    bool trace = false;
    std::optional<std::filesystem::path> dot;
};

struct EvalOptions {
    CommonOptions common;
    std::filesystem::path questions;
    std::optional<std::filesystem::path> golds;
    std::vector<std::string> modes;
    std::filesystem::path out = "runs";
    int concurrency = 4;
};

struct InspectOptions {
    CommonOptions common;
    std::string query;
    int k = 20;
    std::string prune = "hop";  // hop | final | none
    std::optional<std::filesystem::path> dot;
};

struct SynthOptions {
    std::filesystem::path out;
    int chains = 50;
    unsigned seed = 20240601;
};

// Each returns a process exit code and writes human output to `out`,
// diagnostics to `err`.
int cmd_index(const IndexOptions& options, std::ostream& out, std::ostream& err);
int cmd_plan(const PlanOptions& options, std::ostream& out, std::ostream& err);
int cmd_ask(const AskOptions& options, std::ostream& out, std::ostream& err);
// `run_dir` receives the directory the run was written to.
int cmd_eval(const EvalOptions& options, std::ostream& out, std::ostream& err,
             std::filesystem::path* run_dir = nullptr);
int cmd_inspect_graph(const InspectOptions& options, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthOptions& options, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace n2n::cli
