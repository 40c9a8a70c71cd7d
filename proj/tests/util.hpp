#pragma once

#include "n2n/corpus.hpp"
#include "n2n/errors.hpp"
#include "n2n/llm_gateway.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace test {

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("n2n-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

    std::filesystem::path write(const std::string& name, const std::string& content) const {
        auto p = path_ / name;
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline n2n::Corpus passages(const std::vector<std::string>& texts) {
    std::vector<n2n::Document> docs;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        docs.push_back(n2n::make_passage("d" + std::to_string(i), "", texts[i]));
    }
    return n2n::Corpus(std::move(docs));
}

// Fails the first `failures` sends with a transport error, then answers.
class FlakyBackend final : public n2n::Backend {
public:
    FlakyBackend(int failures, std::string reply) : failures_(failures), reply_(std::move(reply)) {}

    std::string send(const n2n::ChatRequest&) override {
        ++calls;
        if (calls <= failures_) throw n2n::TransportError("timed out");
        return reply_;
    }
    std::string describe() const override { return "flaky"; }

    int calls = 0;

private:
    int failures_;
    std::string reply_;
};

}  // namespace test
