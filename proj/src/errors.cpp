#include "dxtrust/errors.hpp"

namespace dxtrust {

namespace {

std::string join(const std::vector<std::string>& items)
{
    std::string out;
    for (const auto& item : items) {
        if (!out.empty())
            out += ", ";
        out += item;
    }
    return out;
}

}  // namespace

const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::Integrity: return "IntegrityError";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Domain: return "DomainError";
    case ErrorCode::EmptyReasoning: return "EmptyReasoning";
    case ErrorCode::ProviderFailure: return "ProviderFailure";
    case ErrorCode::ScriptMiss: return "ScriptMiss";
    case ErrorCode::UnparsableLabel: return "UnparsableLabel";
    case ErrorCode::MalformedTrace: return "MalformedTrace";
    case ErrorCode::UnknownDisorder: return "UnknownDisorder";
    case ErrorCode::StageParseFailure: return "StageParseFailure";
    case ErrorCode::MissingSection: return "MissingSection";
    case ErrorCode::Schema: return "SchemaError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MissingScore: return "MissingScore";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Usage: return "UsageError";
    }
    return "Error";
}

std::string Error::describe() const
{
    std::string out = to_string(code_);
    if (!stage_.empty())
        out += " [" + stage_ + "]";
    out += ": ";
    out += what();
    return out;
}

MissingSection::MissingSection(std::vector<std::string> labels)
    : Error(ErrorCode::MissingSection, "missing section(s): " + join(labels)), labels_(std::move(labels))
{
}

MissingScore::MissingScore(std::vector<std::string> ids)
    : Error(ErrorCode::MissingScore, "records without dcs: " + join(ids)), ids_(std::move(ids))
{
}

}  // namespace dxtrust
