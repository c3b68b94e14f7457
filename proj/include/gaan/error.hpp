#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gaan {

// Error categories surfaced by the library. CLI maps these to exit codes.
class Error : public std::runtime_error {
 public:
  enum class Kind {
    DuplicateEdge,
    SelfLoop,
    EndpointOutOfRange,
    DimensionMismatch,
    RowCountMismatch,
    ParseError,
    AllLabelsMissing,
    SingleClassTask,
    NonFiniteGradient,
    CheckpointMismatch,
    ConfigError,
    IoError,
  };

  Error(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// SMILES rejection with the byte offset of the offending character.
class SmilesError : public std::runtime_error {
 public:
  enum class Kind {
    UnbalancedParenthesis,
    UnmatchedRingClosure,
    UnsupportedSymbol,
  };

  SmilesError(Kind kind, std::size_t offset, const std::string& msg)
      : std::runtime_error(msg + " (byte " + std::to_string(offset) + ")"),
        kind_(kind),
        offset_(offset) {}

  Kind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

}  // namespace gaan
