#pragma once

#include <stdexcept>
#include <string>

namespace ssemc {

enum class ErrorKind {
  InvalidFormat,
  InvalidEncoding,
  EmptyDocument,
  ParseError,
  UnknownLabel,
  EmptyVocabulary,
  UnknownClass,
  NoLabeledData,
  DimensionMismatch,
  ClassSetMismatch,
  NonMonotoneObjective,
  EmptyValues,
  NoDocuments,
  EmptyEvaluation,
  InsufficientData,
  DuplicateClass,
  IoError,
  CorruptModel,
  OutOfDomain,
};

const char* to_string(ErrorKind kind);

/// All recoverable failures carry a kind so callers (notably the CLI) can
/// map them to stable exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidFormat: return "InvalidFormat";
    case ErrorKind::InvalidEncoding: return "InvalidEncoding";
    case ErrorKind::EmptyDocument: return "EmptyDocument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::EmptyVocabulary: return "EmptyVocabulary";
    case ErrorKind::UnknownClass: return "UnknownClass";
    case ErrorKind::NoLabeledData: return "NoLabeledData";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ClassSetMismatch: return "ClassSetMismatch";
    case ErrorKind::NonMonotoneObjective: return "NonMonotoneObjective";
    case ErrorKind::EmptyValues: return "EmptyValues";
    case ErrorKind::NoDocuments: return "NoDocuments";
    case ErrorKind::EmptyEvaluation: return "EmptyEvaluation";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::DuplicateClass: return "DuplicateClass";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::CorruptModel: return "CorruptModel";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
  }
  return "UnknownError";
}

}  // namespace ssemc
