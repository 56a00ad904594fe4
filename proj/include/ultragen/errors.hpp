#pragma once

#include <stdexcept>
#include <string>

namespace ultragen {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid input: malformed matrices, non-ultrametric distances, bad flags.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

// Inverse problems can fail in structurally distinct ways; callers (and the
// CLI exit-code mapping) need to tell them apart.
enum class ReconstructFailure {
  kAmbiguousMatch,      // >= 2 valid groupings at some jump
  kInconsistentPath,    // no valid grouping; input not a decomposition path
  kNoCompletion,        // measure not realizable by any binary tree
  kMultipleCompletions, // measure realizable by >= 2 non-isomorphic trees
};

class ReconstructError : public Error {
 public:
  ReconstructError(ReconstructFailure kind, const std::string& what)
      : Error(what), kind_(kind) {}
  ReconstructFailure kind() const { return kind_; }

 private:
  ReconstructFailure kind_;
};

// Raised when a search exceeds its node budget.
class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string& what) : Error(what) {}
};

}  // namespace ultragen
