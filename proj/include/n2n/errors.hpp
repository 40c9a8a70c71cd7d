#pragma once

#include <stdexcept>
#include <string>

namespace n2n {

// Base for every error the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CorpusError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class PlanError : public Error {
public:
    using Error::Error;
};

class PromptError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Network failure, timeout, or non-success HTTP status from a model or
// retriever backend.
class TransportError : public Error {
public:
    using Error::Error;
};

// A structured (JSON) response that could not be parsed. Keeps the raw text.
class SchemaError : public Error {
public:
    SchemaError(const std::string& what, std::string raw)
        : Error(what), raw_(std::move(raw)) {}

    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

}  // namespace n2n
