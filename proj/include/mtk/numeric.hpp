#pragma once

// Shared numeric vocabulary: dense matrix aliases, error types, and the
// result record every verification check returns.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtk {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Base class for everything this library throws on rejected input.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the byte position in the source
/// string where parsing failed.
struct ParseError : Error {
  std::size_t offset;
  ParseError(std::size_t off, const std::string& message)
      : Error("parse error at offset " + std::to_string(off) + ": " + message),
        offset(off) {}
};

/// Evaluation hit a singularity (division by zero, log of a non-positive
/// value, non-finite intermediate). The message names the offending
/// subexpression.
struct DomainError : Error {
  using Error::Error;
};

/// An operation's mathematical precondition failed (tensor not metallic,
/// projector identities violated, wrong algebra for a construction, ...).
struct PreconditionError : Error {
  using Error::Error;
};

inline double max_abs(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}
inline double max_abs(const Vec& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}
inline double max_abs(const CMat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Outcome of one named verification check over a set of sample points.
struct CheckResult {
  std::string name;
  bool pass = false;
  double max_residual = 0.0;
  std::optional<Vec> worst_point;  // where max_residual was attained
  int points_evaluated = 0;
  std::string note;  // optional human-readable context

  static CheckResult from_max(std::string name, double max_residual,
                              std::optional<Vec> worst_point,
                              int points_evaluated, double tol,
                              std::string note = {}) {
    CheckResult r;
    r.name = std::move(name);
    r.pass = max_residual <= tol;
    r.max_residual = max_residual;
    r.worst_point = std::move(worst_point);
    r.points_evaluated = points_evaluated;
    r.note = std::move(note);
    return r;
  }
};

/// Tracks the running max residual and the point where it occurred.
class ResidualTracker {
 public:
  void update(double residual, const Vec& point) {
    ++count_;
    if (!worst_ || residual > max_) {
      max_ = residual;
      worst_ = point;
    }
  }
  double max_residual() const { return worst_ ? max_ : 0.0; }
  const std::optional<Vec>& worst_point() const { return worst_; }
  int count() const { return count_; }

  CheckResult result(std::string name, double tol, std::string note = {}) const {
    return CheckResult::from_max(std::move(name), max_residual(), worst_,
                                 count_, tol, std::move(note));
  }

 private:
  double max_ = 0.0;
  std::optional<Vec> worst_;
  int count_ = 0;
};

}  // namespace mtk
