#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dxtrust {

enum class ErrorCode {
    Parse,
    Integrity,
    NotFound,
    Domain,
    EmptyReasoning,
    ProviderFailure,
    ScriptMiss,
    UnparsableLabel,
    MalformedTrace,
    UnknownDisorder,
    StageParseFailure,
    MissingSection,
    Schema,
    EmptyInput,
    MissingScore,
    Io,
    Usage,
};

const char* to_string(ErrorCode code);

/// Base of every error the library throws.
///
/// `stage()` is empty until a pipeline driver annotates the error with the
/// stage it escaped from; the concrete type is preserved across rethrow.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    const std::string& stage() const noexcept { return stage_; }
    void set_stage(std::string stage) { stage_ = std::move(stage); }

    /// "[stage] message" when a stage is set, otherwise what().
    std::string describe() const;

private:
    ErrorCode code_;
    std::string stage_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error(ErrorCode::Parse, "line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IntegrityError : public Error {
public:
    explicit IntegrityError(const std::string& message) : Error(ErrorCode::Integrity, message) {}
};

class NotFound : public Error {
public:
    explicit NotFound(const std::string& id)
        : Error(ErrorCode::NotFound, "not found: " + id), id_(id) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& message) : Error(ErrorCode::Domain, message) {}
};

class EmptyReasoning : public Error {
public:
    EmptyReasoning() : Error(ErrorCode::EmptyReasoning, "reasoning text is empty") {}
};

class ProviderFailure : public Error {
public:
    ProviderFailure(int attempts, const std::string& message)
        : Error(ErrorCode::ProviderFailure,
                "provider failed after " + std::to_string(attempts) + " attempt(s): " + message),
          attempts_(attempts) {}
    int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

class ScriptMiss : public Error {
public:
    explicit ScriptMiss(const std::string& key)
        : Error(ErrorCode::ScriptMiss, "no scripted response for key " + key), key_(key) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class UnparsableLabel : public Error {
public:
    explicit UnparsableLabel(const std::string& response)
        : Error(ErrorCode::UnparsableLabel, "unparsable attribution label: " + response) {}
};

class MalformedTrace : public Error {
public:
    explicit MalformedTrace(const std::string& message) : Error(ErrorCode::MalformedTrace, message) {}
};

class UnknownDisorder : public Error {
public:
    explicit UnknownDisorder(const std::string& id)
        : Error(ErrorCode::UnknownDisorder, "no criteria for disorder " + id), id_(id) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class StageParseFailure : public Error {
public:
    StageParseFailure(int stage, const std::string& message)
        : Error(ErrorCode::StageParseFailure,
                "stage " + std::to_string(stage) + " output could not be parsed: " + message),
          stage_number_(stage) {}
    int stage_number() const noexcept { return stage_number_; }

private:
    int stage_number_;
};

class MissingSection : public Error {
public:
    explicit MissingSection(std::vector<std::string> labels);
    const std::vector<std::string>& labels() const noexcept { return labels_; }

private:
    std::vector<std::string> labels_;
};

class SchemaError : public Error {
public:
    SchemaError(std::size_t line, const std::string& field, const std::string& message)
        : Error(ErrorCode::Schema,
                "line " + std::to_string(line) + ", field '" + field + "': " + message),
          line_(line), field_(field) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

class EmptyInput : public Error {
public:
    explicit EmptyInput(const std::string& what) : Error(ErrorCode::EmptyInput, "empty input: " + what) {}
};

class MissingScore : public Error {
public:
    explicit MissingScore(std::vector<std::string> ids);
    const std::vector<std::string>& dialogue_ids() const noexcept { return ids_; }

private:
    std::vector<std::string> ids_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error(ErrorCode::Io, message) {}
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& message) : Error(ErrorCode::Usage, message) {}
};

}  // namespace dxtrust
