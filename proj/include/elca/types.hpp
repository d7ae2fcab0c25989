#ifndef ELCA_TYPES_HPP
#define ELCA_TYPES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace elca {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using BinaryMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Probabilities that enter 1/(1-p)^2 bounds are kept inside [kProbFloor, 1 - kProbFloor].
inline constexpr double kProbFloor = 1e-10;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or empty input.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, Index line, Index column = 0)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  Index line() const { return line_; }
  Index column() const { return column_; }

 private:
  static std::string format(const std::string& what, Index line, Index column) {
    std::string out = "line " + std::to_string(line);
    if (column > 0) out += ", column " + std::to_string(column);
    return out + ": " + what;
  }

  Index line_;
  Index column_;
};

// Arguments that break a documented precondition (dimensions, ranges, labels).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// The moment identities only hold when p_ig = phi_ig * sum_k a_k tau_k.
class ConditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace elca

#endif  // ELCA_TYPES_HPP
