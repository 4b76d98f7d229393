#ifndef COMPREG_ERRORS_HPP
#define COMPREG_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace compreg {

// One family per failure mode; the CLI maps families to exit codes.
enum class ErrorFamily : int {
  degenerate_input = 10,
  negative_input = 11,
  dim_mismatch = 12,
  boundary_point = 13,
  index_error = 14,
  support_error = 15,
  row_starvation = 16,
  empty_data = 17,
  rank_deficient = 18,
  convergence_failure = 19,
  unsupported_dimension = 20,
  zero_concentration = 21,
  schema_error = 22,
  parse_error = 23,
  config_error = 24,
  invalid_argument = 25,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorFamily family, const std::string& what)
      : std::runtime_error(what), family_(family) {}
  ErrorFamily family() const { return family_; }
  int exit_code() const { return static_cast<int>(family_); }

 private:
  ErrorFamily family_;
};

#define COMPREG_DEFINE_ERROR(NAME, FAMILY)                 \
  class NAME : public Error {                              \
   public:                                                 \
    explicit NAME(const std::string& what)                 \
        : Error(ErrorFamily::FAMILY, what) {}              \
  };

COMPREG_DEFINE_ERROR(DegenerateInput, degenerate_input)
COMPREG_DEFINE_ERROR(NegativeInput, negative_input)
COMPREG_DEFINE_ERROR(DimMismatch, dim_mismatch)
COMPREG_DEFINE_ERROR(BoundaryPoint, boundary_point)
COMPREG_DEFINE_ERROR(IndexError, index_error)
COMPREG_DEFINE_ERROR(SupportError, support_error)
COMPREG_DEFINE_ERROR(EmptyData, empty_data)
COMPREG_DEFINE_ERROR(RankDeficient, rank_deficient)
COMPREG_DEFINE_ERROR(UnsupportedDimension, unsupported_dimension)
COMPREG_DEFINE_ERROR(ZeroConcentration, zero_concentration)
COMPREG_DEFINE_ERROR(SchemaError, schema_error)
COMPREG_DEFINE_ERROR(ParseError, parse_error)
COMPREG_DEFINE_ERROR(ConfigError, config_error)
COMPREG_DEFINE_ERROR(InvalidArgument, invalid_argument)

#undef COMPREG_DEFINE_ERROR

// M-step denominator vanished for a predictor row; carries the offending row.
class RowStarvation : public Error {
 public:
  RowStarvation(std::size_t row, const std::string& what)
      : Error(ErrorFamily::row_starvation, what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

// Newton-Raphson ran out of iterations; carries the last iterate (row-major).
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, std::vector<double> last_iterate,
                     double gradient_norm)
      : Error(ErrorFamily::convergence_failure, what),
        last_iterate_(std::move(last_iterate)),
        gradient_norm_(gradient_norm) {}
  const std::vector<double>& last_iterate() const { return last_iterate_; }
  double gradient_norm() const { return gradient_norm_; }

 private:
  std::vector<double> last_iterate_;
  double gradient_norm_;
};

}  // namespace compreg

#endif  // COMPREG_ERRORS_HPP
