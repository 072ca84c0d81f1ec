#pragma once

#include <stdexcept>
#include <string>

namespace gplmk {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorCategory {
  Input = 1,      // malformed input or out-of-range parameter
  Topology = 2,   // mesh/precondition violation
  Numerical = 3,  // solver or numerical failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string name, const std::string& what);

  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }
  // Short error-class name, e.g. "ParseError".
  const std::string& name() const noexcept { return name_; }
  const char* what() const noexcept override { return message_.c_str(); }

  // Prepends "stage: " to the message; used when rethrowing from a pipeline.
  void add_context(const std::string& stage);

 private:
  ErrorCategory category_;
  std::string name_;
  std::string message_;
};

#define GPLMK_DECLARE_ERROR(Name, Category)                         \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what)                          \
        : Error(ErrorCategory::Category, #Name, what) {}            \
  }

// input / validation
GPLMK_DECLARE_ERROR(ParseError, Input);
GPLMK_DECLARE_ERROR(RangeError, Input);
GPLMK_DECLARE_ERROR(BandwidthError, Input);
GPLMK_DECLARE_ERROR(DimensionMismatchError, Input);
GPLMK_DECLARE_ERROR(ComplexityGuardError, Input);
GPLMK_DECLARE_ERROR(ConstantMatrixError, Input);
GPLMK_DECLARE_ERROR(SingleGroupError, Input);
GPLMK_DECLARE_ERROR(EmptyGroupError, Input);
GPLMK_DECLARE_ERROR(ConfigError, Input);

// topology / preconditions
GPLMK_DECLARE_ERROR(TopologyError, Topology);
GPLMK_DECLARE_ERROR(DegenerateTriangleError, Topology);
GPLMK_DECLARE_ERROR(DisconnectedMeshError, Topology);
GPLMK_DECLARE_ERROR(NotDiskTypeError, Topology);

// numerical
GPLMK_DECLARE_ERROR(AllZeroCurvatureError, Numerical);
GPLMK_DECLARE_ERROR(ZeroRowSumError, Numerical);
GPLMK_DECLARE_ERROR(ConvergenceError, Numerical);
GPLMK_DECLARE_ERROR(RankExhaustionError, Numerical);
GPLMK_DECLARE_ERROR(SingularSubmatrixError, Numerical);
GPLMK_DECLARE_ERROR(FlipRecoveryError, Numerical);
GPLMK_DECLARE_ERROR(NoConsensusError, Numerical);
GPLMK_DECLARE_ERROR(ConstraintInfeasibleError, Numerical);
GPLMK_DECLARE_ERROR(DegenerateConfigurationError, Numerical);

#undef GPLMK_DECLARE_ERROR

}  // namespace gplmk
