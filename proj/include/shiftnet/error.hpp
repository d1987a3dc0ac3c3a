#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shiftnet {

enum class ErrorCode {
    // symbolic
    NoRule,
    InvalidShift,
    // automata
    UndefinedTransition,
    EmptyInput,
    Halted,
    MalformedConfiguration,
    NondeterministicMachine,
    LeftRecursiveGrammar,
    AmbiguousGrammar,
    InvalidMachine,
    // godel
    UnknownSymbol,
    MalformedWord,
    NonRepresentable,
    DigitMismatch,
    // nda
    OverlappingPrefixes,
    NoCell,
    UndefinedBranch,
    // rann
    OutOfRange,
    NoActiveBranch,
    MaxStepsExceeded,
    // interactive
    WriteConflict,
    UngatedOverlap,
    // spec format
    ParseError,
    SemanticError,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NoRule: return "NoRule";
    case ErrorCode::InvalidShift: return "InvalidShift";
    case ErrorCode::UndefinedTransition: return "UndefinedTransition";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::Halted: return "Halted";
    case ErrorCode::MalformedConfiguration: return "MalformedConfiguration";
    case ErrorCode::NondeterministicMachine: return "NondeterministicMachine";
    case ErrorCode::LeftRecursiveGrammar: return "LeftRecursiveGrammar";
    case ErrorCode::AmbiguousGrammar: return "AmbiguousGrammar";
    case ErrorCode::InvalidMachine: return "InvalidMachine";
    case ErrorCode::UnknownSymbol: return "UnknownSymbol";
    case ErrorCode::MalformedWord: return "MalformedWord";
    case ErrorCode::NonRepresentable: return "NonRepresentable";
    case ErrorCode::DigitMismatch: return "DigitMismatch";
    case ErrorCode::OverlappingPrefixes: return "OverlappingPrefixes";
    case ErrorCode::NoCell: return "NoCell";
    case ErrorCode::UndefinedBranch: return "UndefinedBranch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NoActiveBranch: return "NoActiveBranch";
    case ErrorCode::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorCode::WriteConflict: return "WriteConflict";
    case ErrorCode::UngatedOverlap: return "UngatedOverlap";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SemanticError: return "SemanticError";
    }
    return "Unknown";
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

/// Terminal outcomes of a machine step. Rejection and halting stop a run but
/// are not failures of the simulator itself.
inline bool is_terminal(ErrorCode code) {
    return code == ErrorCode::NoRule || code == ErrorCode::UndefinedTransition ||
           code == ErrorCode::EmptyInput || code == ErrorCode::Halted ||
           code == ErrorCode::UndefinedBranch || code == ErrorCode::NoActiveBranch;
}

} // namespace shiftnet
