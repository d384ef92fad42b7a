#pragma once

#include <stdexcept>
#include <string>

namespace lbbn {

// Base of every domain error raised by the engine. The CLI maps these to
// exit status 1; anything else escaping is a bug.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  // Short machine-readable category, e.g. "validation" or "non-prognostic".
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Cycles and other graph-shape problems.
class StructuralError : public Error {
 public:
  explicit StructuralError(const std::string& what) : Error("structural", what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error("validation", what) {}
};

class UnknownNodeError : public Error {
 public:
  explicit UnknownNodeError(const std::string& id)
      : Error("unknown-node", "unknown node id: " + id) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error("invalid-argument", what) {}
};

class InconsistentEvidence : public Error {
 public:
  explicit InconsistentEvidence(const std::string& what)
      : Error("inconsistent-evidence", what) {}
};

// Query/evidence pair outside the prognostic regime.
class NonPrognosticQuery : public Error {
 public:
  explicit NonPrognosticQuery(const std::string& what) : Error("non-prognostic", what) {}
};

class OracleInfeasible : public Error {
 public:
  OracleInfeasible(const std::string& what, double combinations)
      : Error("oracle-infeasible", what), combinations_(combinations) {}
  double combinations() const noexcept { return combinations_; }

 private:
  double combinations_;
};

// Input outside the regime where an algorithm is defined (non-chain,
// non-binary for node removal).
class RegimeError : public Error {
 public:
  explicit RegimeError(const std::string& what) : Error("regime", what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error("format", what) {}
};

}  // namespace lbbn
