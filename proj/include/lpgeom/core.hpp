#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lpgeom {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Body has empty interior, or a simplex/hull degenerated.
class DegenerateBody : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Request is well formed but outside what the library can compute.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class PExponent {
 public:
  enum class Kind { Zero, Finite, Infinity };

  static PExponent zero() { return PExponent(Kind::Zero, 0.0); }
  static PExponent infinity() { return PExponent(Kind::Infinity, std::numeric_limits<double>::infinity()); }
  static PExponent finite(double p) {
    if (!(p > 0.0) || !std::isfinite(p)) throw InvalidArgument("finite exponent must be positive");
    return PExponent(Kind::Finite, p);
  }

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::Zero; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_infinite() const { return kind_ == Kind::Infinity; }
  double value() const { return value_; }

  std::string to_string() const {
    if (kind_ == Kind::Zero) return "0";
    if (kind_ == Kind::Infinity) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value_);
    return buf;
  }

  friend bool operator==(const PExponent& a, const PExponent& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.value_ == b.value_);
  }

 private:
  PExponent(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_;
  double value_;
};

enum class Method { ClosedForm, Quadrature, MonteCarlo };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::ClosedForm: return "closed-form";
    case Method::Quadrature: return "quadrature";
    case Method::MonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

struct EvalReport {
  double value = 0.0;
  double error = 0.0;
  Method method = Method::Quadrature;
};

// Direction rule and radial controls shared by every spherical-radial integral.
struct QuadratureSpec {
  int directions = 0;        // approximate direction count; 0 selects a per-dimension default
  double radial_tol = 1e-12; // relative tolerance of the radial Gauss-Kronrod sweep
  int mc_samples = 200000;
  std::uint64_t seed = 20240601;
  int qmc_batches = 8;       // independent scrambles for n >= 4
};

// n+1 vertices in R^n stored as columns.
struct Simplex {
  Matrix vertices;
  int dim() const { return static_cast<int>(vertices.rows()); }
  double volume() const {
    const int n = dim();
    Matrix e(n, n);
    for (int i = 0; i < n; ++i) e.col(i) = vertices.col(i + 1) - vertices.col(0);
    return std::abs(e.determinant()) / factorial_(n);
  }

 private:
  static double factorial_(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  }
};

inline double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// log(sum exp(a_i)) accumulated one term at a time.
class LogSumExp {
 public:
  void add(double a) {
    if (a == -std::numeric_limits<double>::infinity()) return;
    if (a <= max_) {
      sum_ += std::exp(a - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - a) + 1.0;
      max_ = a;
    }
  }
  double value() const {
    if (sum_ == 0.0) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

}  // namespace lpgeom
