#pragma once

// Slow, independent reference computations used to validate the fast paths.

#include <random>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "support.hpp"

namespace lpgeom {

struct McEstimate {
  double value = 0.0;
  double sigma = 0.0;
  long samples = 0;
  double acceptance = 1.0;
};

namespace detail {

// Uniform proposal on an envelope E containing K: draw() returns a point of E
// and whether it lies in K. For cube, ball and simplex E = K.
class EnvelopeSampler {
 public:
  explicit EnvelopeSampler(const ConvexBody& K) : K_(K) {
    switch (K.kind()) {
      case BodyKind::Cube:
      case BodyKind::Ball2:
      case BodyKind::Simplex:
        log_volume_ = std::log(K.volume());
        break;
      case BodyKind::Product:
        left_ = std::make_unique<EnvelopeSampler>(K.left());
        right_ = std::make_unique<EnvelopeSampler>(K.right());
        log_volume_ = left_->log_volume_ + right_->log_volume_;
        break;
      case BodyKind::AffineImage:
        inner_ = std::make_unique<EnvelopeSampler>(K.inner());
        log_volume_ = inner_->log_volume_ + K.log_abs_det();
        break;
      default: {
        const int n = K.dim();
        lo_.resize(n);
        hi_.resize(n);
        log_volume_ = 0.0;
        for (int i = 0; i < n; ++i) {
          Vector e = Vector::Zero(n);
          e[i] = 1.0;
          hi_[i] = support_infty(K, e);
          lo_[i] = -support_infty(K, Vector(-e));
          log_volume_ += std::log(hi_[i] - lo_[i]);
        }
      }
    }
  }

  double log_volume() const { return log_volume_; }

  bool draw(std::mt19937_64& rng, Vector& x) const {
    const int n = K_.dim();
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    switch (K_.kind()) {
      case BodyKind::Cube:
        x.resize(n);
        for (int i = 0; i < n; ++i) x[i] = K_.half_width() * (2.0 * ud(rng) - 1.0);
        return true;
      case BodyKind::Ball2: {
        std::normal_distribution<double> nd;
        x.resize(n);
        for (int i = 0; i < n; ++i) x[i] = nd(rng);
        x *= std::pow(ud(rng), 1.0 / n) / x.norm();
        return true;
      }
      case BodyKind::Simplex: {
        // spacings of sorted uniforms, first n coordinates
        std::vector<double> u(n);
        for (auto& v : u) v = ud(rng);
        std::sort(u.begin(), u.end());
        x.resize(n);
        double prev = 0.0;
        for (int i = 0; i < n; ++i) {
          x[i] = u[i] - prev;
          prev = u[i];
        }
        return true;
      }
      case BodyKind::Product: {
        Vector a, b;
        const bool ia = left_->draw(rng, a), ib = right_->draw(rng, b);
        x.resize(n);
        x << a, b;
        return ia && ib;
      }
      case BodyKind::AffineImage: {
        Vector z;
        const bool in = inner_->draw(rng, z);
        x = K_.matrix() * z + K_.shift();
        return in;
      }
      default:
        x.resize(n);
        for (int i = 0; i < n; ++i) x[i] = lo_[i] + (hi_[i] - lo_[i]) * ud(rng);
        return contains(K_, x);
    }
  }

 private:
  ConvexBody K_;
  double log_volume_ = 0.0;
  Vector lo_, hi_;
  std::unique_ptr<EnvelopeSampler> left_, right_, inner_;
};

}  // namespace detail

// int_K e^{<x,y>} dx as |E| E[1_K e^{<x,y>}] under uniform draws from an
// envelope E of K.
inline McEstimate mc_exp_integral(const ConvexBody& K, const Vector& y, long samples, std::uint64_t seed) {
  check_dim(K, y);
  if (samples < 2) throw InvalidArgument("need at least two samples");
  const detail::EnvelopeSampler sampler(K);
  std::mt19937_64 rng(seed);
  // shift by h_K(y) to keep the terms bounded
  const double shift = support_infty(K, y);
  double sum = 0.0, sum2 = 0.0;
  long accepted = 0;
  Vector x;
  for (long s = 0; s < samples; ++s) {
    if (!sampler.draw(rng, x)) continue;
    ++accepted;
    const double f = std::exp(x.dot(y) - shift);
    sum += f;
    sum2 += f * f;
  }
  McEstimate est;
  est.samples = samples;
  est.acceptance = static_cast<double>(accepted) / samples;
  if (est.acceptance < 1e-4) throw InvalidArgument("acceptance rate below 1e-4: use a tighter bounding box");
  const double mean = sum / samples;
  const double var = std::max(0.0, sum2 / samples - mean * mean);
  const double scale = std::exp(sampler.log_volume() + shift);
  est.value = scale * mean;
  est.sigma = scale * std::sqrt(var / (samples - 1));
  return est;
}

// |K^{o,p}| = (1/n!) int e^{-h_{p,K}} by importance sampling from a
// multivariate Student-t (4 degrees of freedom) shaped by (p Cov K)^{-1}.
inline McEstimate mc_polar_volume(const ConvexBody& K, PExponent p, long samples, std::uint64_t seed) {
  const int n = K.dim();
  if (p.is_zero()) throw InvalidArgument("the p = 0 polar is unbounded");
  if (interior_margin(K, Vector::Zero(n)) <= 0.0) throw InvalidArgument("origin must be interior");
  if (samples < 2) throw InvalidArgument("need at least two samples");
  const double nu = 4.0;
  const double spread = p.is_finite() ? std::max(1.0, 1.0 / p.value()) : 1.0;
  const Matrix cov = tilted_moments(K, Vector::Zero(n), 2).cov;
  const Matrix sigma = spread * cov.inverse();
  const Eigen::LLT<Matrix> llt(sigma);
  const Matrix L = llt.matrixL();
  const double log_det_L = L.diagonal().array().log().sum();
  const double log_norm = std::lgamma(0.5 * (nu + n)) - std::lgamma(0.5 * nu) - 0.5 * n * std::log(nu * std::numbers::pi) - log_det_L;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::chi_squared_distribution<double> chi(nu);
  double sum = 0.0, sum2 = 0.0;
  Vector z(n);
  for (long s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i) z[i] = nd(rng);
    z /= std::sqrt(chi(rng) / nu);
    const Vector y = L * z;
    const double log_q = log_norm - 0.5 * (nu + n) * std::log1p(z.squaredNorm() / nu);
    const double w = std::exp(-hp(K, p, y) - log_q);
    sum += w;
    sum2 += w * w;
  }
  const double mean = sum / samples;
  const double var = std::max(0.0, sum2 / samples - mean * mean);
  const double f = std::exp(-log_factorial(n));
  return {f * mean, f * std::sqrt(var / (samples - 1)), samples, 1.0};
}

// Divided difference of exp at arbitrary (possibly repeated) nodes in
// extended precision, from the series
//   [x_0..x_k] exp = e^c sum_{j>=0} h_j(x - c) / (j + k)!
// with h_j the complete homogeneous symmetric polynomials and c the mean node.
// Repeated nodes need no special handling.
inline double highprec_divided_difference(const std::vector<double>& nodes, int digits = 50) {
  using Real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<320>>;
  if (nodes.empty()) throw InvalidArgument("need at least one node");
  if (digits < 1 || digits > 100) throw InvalidArgument("digits must lie in [1, 100]");
  const int k = static_cast<int>(nodes.size()) - 1;
  Real c = 0;
  for (double x : nodes) c += Real(x);
  c /= Real(k + 1);
  std::vector<Real> d;
  double spread = 0.0;
  for (double x : nodes) {
    d.push_back(Real(x) - c);
    spread = std::max(spread, std::abs(static_cast<double>(d.back())));
  }
  // cancellation among terms costs about 2 spread / ln 10 digits
  if (digits + 2.0 * spread / std::log(10.0) + 20.0 > 300.0) throw InvalidArgument("node spread too large for the working precision");
  // h[i] holds h_j over the first i+1 variables
  std::vector<Real> h(k + 1, Real(1));
  Real fact = 1;
  for (int i = 2; i <= k; ++i) fact *= i;  // k!
  Real sum = 1 / fact;
  const double log_tol = -(digits + 10.0) * std::log(10.0);
  for (int j = 1;; ++j) {
    h[0] = h[0] * d[0];
    for (int i = 1; i <= k; ++i) h[i] = h[i - 1] + d[i] * h[i];
    fact *= (j + k);
    sum += h[k] / fact;
    // |h_j| <= C(j+k, k) spread^j
    const double log_bound = std::lgamma(j + k + 1.0) - std::lgamma(k + 1.0) - std::lgamma(j + 1.0) +
                             j * std::log(std::max(spread, 1e-300)) - std::lgamma(j + k + 1.0);
    const double log_sum = std::log(std::abs(static_cast<double>(sum)) + 1e-300);
    if (j > 2.72 * spread && log_bound < log_tol + log_sum) break;
    if (spread == 0.0) break;
  }
  return static_cast<double>(exp(c) * sum);
}

struct LagrangeCheck {
  double value = 0.0;
  double expected = 0.0;
  bool holds = false;
};

// sum_j y_j^k / prod_{i != j} (y_j - y_i) equals 0 for k < n-1 and 1 for k = n-1.
inline LagrangeCheck lagrange_identity_check(const std::vector<double>& y, int k) {
  const int n = static_cast<int>(y.size());
  if (n < 2) throw InvalidArgument("need at least two nodes");
  if (k < 0 || k > n - 1) throw InvalidArgument("k must lie in [0, n-1]");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(y[i] - y[j]) < 1e-6) throw InvalidArgument("nodes closer than 1e-6: the sum is numerically singular");
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    double den = 1.0;
    for (int i = 0; i < n; ++i)
      if (i != j) den *= y[j] - y[i];
    s += std::pow(y[j], k) / den;
  }
  LagrangeCheck c;
  c.value = s;
  c.expected = k == n - 1 ? 1.0 : 0.0;
  c.holds = std::abs(s - c.expected) <= 1e-9;
  return c;
}

}  // namespace lpgeom
