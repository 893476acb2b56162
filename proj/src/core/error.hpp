#pragma once

#include <stdexcept>
#include <string>

namespace horocover {

// Numeric guards. Every failure names the precondition that was violated.
enum class GuardKind {
  NonTermination,
  HorizonTooShort,
  BracketFailure,
  GridTooCoarse,
  StepTooCoarse,
  DegenerateFit,
  SingularEstimate,
  PowerIterationStall,
  Overflow,
  Precondition,
};

const char* guard_name(GuardKind kind);

class NumericGuard : public std::runtime_error {
 public:
  NumericGuard(GuardKind kind, const std::string& what)
      : std::runtime_error(std::string(guard_name(kind)) + ": " + what), kind_(kind) {}
  GuardKind kind() const { return kind_; }

 private:
  GuardKind kind_;
};

// Invalid or missing configuration / inputs (exit code 2 at the CLI).
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

inline const char* guard_name(GuardKind kind) {
  switch (kind) {
    case GuardKind::NonTermination: return "NonTermination";
    case GuardKind::HorizonTooShort: return "HorizonTooShort";
    case GuardKind::BracketFailure: return "BracketFailure";
    case GuardKind::GridTooCoarse: return "GridTooCoarse";
    case GuardKind::StepTooCoarse: return "StepTooCoarse";
    case GuardKind::DegenerateFit: return "DegenerateFit";
    case GuardKind::SingularEstimate: return "SingularEstimate";
    case GuardKind::PowerIterationStall: return "PowerIterationStall";
    case GuardKind::Overflow: return "Overflow";
    case GuardKind::Precondition: return "Precondition";
  }
  return "Unknown";
}

}  // namespace horocover
