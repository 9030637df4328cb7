#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chillerbow {

/// Every failure the library can report. Grouped by the exit-code family
/// the CLI maps them to (see exit_code()).
enum class Errc {
    // configuration / argument problems
    InvalidArgument,
    InvalidSchema,
    UnknownChannel,
    MissingChannel,
    IndexOutOfRange,
    AlphabetTooSmall,
    TooManyFrames,
    InvalidK,
    WindowInfeasible,
    InfeasibleTarget,
    // data problems
    Io,
    MissingColumn,
    UnparsableTimestamp,
    DuplicateTimestamp,
    EmptyTable,
    EmptyInput,
    NoCompleteRows,
    EmptySeries,
    EmptyCycle,
    EmptySequence,
    EmptyReport,
    WordLengthExceedsSequence,
    WordNotInVocabulary,
    VocabularyMismatch,
    TooFewItems,
    // numeric degeneracy
    DegenerateInit,
    NonFiniteDistance,
    ZeroVariance,
    DivisionDegenerate,
    NonPhysicalTemperature,
    ZeroDrivingHeat,
    AllTicksDegenerate,
};

constexpr std::string_view to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidSchema: return "InvalidSchema";
    case Errc::UnknownChannel: return "UnknownChannel";
    case Errc::MissingChannel: return "MissingChannel";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::AlphabetTooSmall: return "AlphabetTooSmall";
    case Errc::TooManyFrames: return "TooManyFrames";
    case Errc::InvalidK: return "InvalidK";
    case Errc::WindowInfeasible: return "WindowInfeasible";
    case Errc::InfeasibleTarget: return "InfeasibleTarget";
    case Errc::Io: return "Io";
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::UnparsableTimestamp: return "UnparsableTimestamp";
    case Errc::DuplicateTimestamp: return "DuplicateTimestamp";
    case Errc::EmptyTable: return "EmptyTable";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::NoCompleteRows: return "NoCompleteRows";
    case Errc::EmptySeries: return "EmptySeries";
    case Errc::EmptyCycle: return "EmptyCycle";
    case Errc::EmptySequence: return "EmptySequence";
    case Errc::EmptyReport: return "EmptyReport";
    case Errc::WordLengthExceedsSequence: return "WordLengthExceedsSequence";
    case Errc::WordNotInVocabulary: return "WordNotInVocabulary";
    case Errc::VocabularyMismatch: return "VocabularyMismatch";
    case Errc::TooFewItems: return "TooFewItems";
    case Errc::DegenerateInit: return "DegenerateInit";
    case Errc::NonFiniteDistance: return "NonFiniteDistance";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::DivisionDegenerate: return "DivisionDegenerate";
    case Errc::NonPhysicalTemperature: return "NonPhysicalTemperature";
    case Errc::ZeroDrivingHeat: return "ZeroDrivingHeat";
    case Errc::AllTicksDegenerate: return "AllTicksDegenerate";
    }
    return "Unknown";
}

enum class ErrorFamily { Config, Data, Numeric };

constexpr ErrorFamily family_of(Errc code) noexcept
{
    if (code <= Errc::InfeasibleTarget)
        return ErrorFamily::Config;
    if (code <= Errc::TooFewItems)
        return ErrorFamily::Data;
    return ErrorFamily::Numeric;
}

/// CLI exit code for a failure family: 2 config, 3 data, 4 numeric degeneracy.
constexpr int exit_code(ErrorFamily f) noexcept
{
    switch (f) {
    case ErrorFamily::Config: return 2;
    case ErrorFamily::Data: return 3;
    case ErrorFamily::Numeric: return 4;
    }
    return 1;
}

/**
 * @brief Exception carried by every library failure.
 *
 * Holds the error kind, the module that raised it and, when the failure is
 * tied to a particular ON cycle, that cycle's id.
 */
class Error : public std::runtime_error {
public:
    Error(Errc code, std::string module, const std::string& detail,
          std::optional<int> cycle_id = std::nullopt)
        : std::runtime_error(compose(code, module, detail, cycle_id))
        , code_(code)
        , module_(std::move(module))
        , cycle_id_(cycle_id)
    {
    }

    Errc code() const noexcept { return code_; }
    const std::string& module() const noexcept { return module_; }
    std::optional<int> cycle_id() const noexcept { return cycle_id_; }
    ErrorFamily family() const noexcept { return family_of(code_); }

    /// Same error, re-tagged with the cycle it occurred in.
    Error with_cycle(int id) const { return Error(code_, module_, detail_of(what()), id); }

private:
    static std::string compose(Errc code, const std::string& module, const std::string& detail,
                               std::optional<int> cycle_id)
    {
        std::string s = "[" + module + "] " + std::string(to_string(code));
        if (cycle_id)
            s += " (cycle " + std::to_string(*cycle_id) + ")";
        if (!detail.empty())
            s += ": " + detail;
        return s;
    }

    static std::string detail_of(const char* what)
    {
        std::string s(what);
        auto pos = s.find(": ");
        return pos == std::string::npos ? std::string{} : s.substr(pos + 2);
    }

    Errc code_;
    std::string module_;
    std::optional<int> cycle_id_;
};

} // namespace chillerbow
