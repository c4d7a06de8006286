#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <queue>
#include <random>
#include <utility>
#include <vector>

#include "core.hpp"

namespace lpgeom {

struct GaussRule {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

inline const GaussRule& gauss_legendre(int m) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  GaussRule r;
  r.nodes.resize(m);
  r.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= m; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = m * (x * p1 - p0) / (x * x - 1.0);
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(m, std::move(r)).first->second;
}

namespace detail {

// Kronrod 15 / Gauss 7 pair (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                               0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                               0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                               0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kWgk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                               0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                               0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                               0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace detail

// Log of the density along a ray plus an optional extra factor integrated in a
// separate channel.
struct RadialPoint {
  double log_density;
  double extra = 0.0;
};

// Integrals over r in (0, inf) of r^{n-1+k} e^{g(r)} for k = 0,1,2 and of
// r^{n-1} extra(r) e^{g(r)}, each stored relative to exp(log_scale).
struct RadialMoments {
  double log_scale = 0.0;
  std::array<double, 3> m{0.0, 0.0, 0.0};
  double extra = 0.0;
  double rel_error = 0.0;
  bool divergent = false;
  int evaluations = 0;

  double log_moment(int k) const { return log_scale + std::log(m[k]); }
};

// g must be concave along the ray up to the r^{n-1} factor (log-concave
// integrand), which makes the doubling search for peak and tail valid.
template <class F>
RadialMoments radial_moments(F&& f, int n, double scale, double tol = 1e-12) {
  RadialMoments out;
  const double tail_drop = 42.0;
  struct Node {
    double r, phi, phi2;
  };
  auto eval_phi = [&](double r) {
    const RadialPoint pt = f(r);
    ++out.evaluations;
    const double lr = std::log(r);
    return Node{r, (n - 1) * lr + pt.log_density, (n + 1) * lr + pt.log_density};
  };
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;

  std::vector<Node> grid;
  double r = scale / 16.0;
  grid.push_back(eval_phi(r));
  // walk down while the integrand still increases toward the origin
  for (int i = 0; i < 80; ++i) {
    Node lower = eval_phi(r / 2.0);
    if (!(lower.phi > grid.front().phi) && !(lower.phi2 > grid.front().phi2)) break;
    grid.insert(grid.begin(), lower);
    r /= 2.0;
  }
  double best = grid.front().phi, best2 = grid.front().phi2;
  for (auto& g : grid) {
    best = std::max(best, g.phi);
    best2 = std::max(best2, g.phi2);
  }
  bool decayed = false;
  for (int i = 0; i < 1000; ++i) {
    Node next = eval_phi(grid.back().r * 2.0);
    if (!std::isfinite(next.phi)) {
      if (next.phi < 0) {
        grid.push_back(next);
        decayed = true;
        break;
      }
      out.divergent = true;
      return out;
    }
    grid.push_back(next);
    best = std::max(best, next.phi);
    best2 = std::max(best2, next.phi2);
    if (next.phi < best - tail_drop && next.phi2 < best2 - tail_drop) {
      decayed = true;
      break;
    }
  }
  if (!decayed) {
    out.divergent = true;
    return out;
  }
  const double ref = best;
  out.log_scale = ref;

  struct Panel {
    double a, b;
    std::array<double, 4> val;
    double err;
  };
  auto integrate = [&](double a, double b) {
    Panel p{a, b, {0, 0, 0, 0}, 0.0};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::array<double, 4> k{0, 0, 0, 0};
    double g0 = 0.0;
    for (int i = 0; i < 15; ++i) {
      const int j = i < 8 ? i : 14 - i;
      const double x = i < 8 ? c - h * detail::kXgk[j] : c + h * detail::kXgk[j];
      const RadialPoint pt = f(x);
      ++out.evaluations;
      const double lr = std::log(x);
      const double w0 = std::isfinite(pt.log_density) ? std::exp((n - 1) * lr + pt.log_density - ref) : 0.0;
      const double vals[4] = {w0, w0 * x, w0 * x * x, w0 * pt.extra};
      for (int q = 0; q < 4; ++q) k[q] += detail::kWgk[j] * vals[q];
      if (j % 2 == 1) g0 += detail::kWg[j / 2] * w0;
    }
    for (int q = 0; q < 4; ++q) p.val[q] = k[q] * h;
    // QUADPACK-style scaling of the Kronrod-Gauss gap for smooth integrands
    const double gap = std::abs(k[0] - g0) * h, mag = std::abs(p.val[0]);
    p.err = mag > 0.0 ? std::min(gap, mag * std::pow(200.0 * gap / mag, 1.5)) : gap;
    return p;
  };

  std::vector<Panel> panels;
  double left = 0.0;
  for (const auto& g : grid) {
    if (g.phi < best - tail_drop - 8.0 && g.phi2 < best2 - tail_drop - 8.0 && g.r < grid.back().r && panels.empty()) {
      left = g.r;
      continue;
    }
    panels.push_back(integrate(left, g.r));
    left = g.r;
  }
  auto cmp = [](const Panel& x, const Panel& y) { return x.err < y.err; };
  std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> pq(cmp, panels);
  auto total = [&] {
    std::array<double, 4> s{0, 0, 0, 0};
    double e = 0.0;
    auto copy = pq;
    while (!copy.empty()) {
      for (int q = 0; q < 4; ++q) s[q] += copy.top().val[q];
      e += copy.top().err;
      copy.pop();
    }
    return std::make_pair(s, e);
  };
  double err_sum = 0.0, val_sum = 0.0;
  for (const auto& p : panels) {
    err_sum += p.err;
    val_sum += p.val[0];
  }
  int splits = 0;
  while (err_sum > tol * val_sum && splits < 400) {
    Panel worst = pq.top();
    pq.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel l = integrate(worst.a, mid), rr = integrate(mid, worst.b);
    err_sum += l.err + rr.err - worst.err;
    val_sum += l.val[0] + rr.val[0] - worst.val[0];
    pq.push(l);
    pq.push(rr);
    ++splits;
  }
  auto [s, e] = total();
  for (int q = 0; q < 3; ++q) out.m[q] = s[q];
  out.extra = s[3];
  out.rel_error = s[0] > 0.0 ? e / s[0] : 0.0;
  return out;
}

// Directions on S^{n-1} with weights summing to the sphere area. A rule may
// carry a second, embedded set of weights on the same directions for an
// error estimate (zero where a direction is not used).
struct DirectionRule {
  std::vector<Vector> dirs;
  std::vector<double> weights;
  std::vector<double> coarse;
};

inline double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

// Circle rule: Gauss-Legendre panels whose ends include the given angles.
inline DirectionRule circle_rule(std::vector<double> breaks, int order, int min_panels = 16) {
  const double two_pi = 2.0 * std::numbers::pi;
  for (auto& b : breaks) {
    b = std::fmod(b, two_pi);
    if (b < 0) b += two_pi;
  }
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> ends;
  for (double b : breaks)
    if (ends.empty() || b - ends.back() > 1e-12) ends.push_back(b);
  if (ends.empty()) ends.push_back(0.0);
  if (ends.size() > 1 && ends.front() + two_pi - ends.back() < 1e-12) ends.pop_back();
  const double max_width = two_pi / min_panels;
  DirectionRule rule;
  const auto& g = gauss_legendre(order);
  for (std::size_t i = 0; i < ends.size(); ++i) {
    const double a = ends[i];
    const double b = i + 1 < ends.size() ? ends[i + 1] : ends[0] + two_pi;
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_width - 1e-9)));
    for (int k = 0; k < pieces; ++k) {
      const double pa = a + (b - a) * k / pieces, pb = a + (b - a) * (k + 1) / pieces;
      const double c = 0.5 * (pa + pb), h = 0.5 * (pb - pa);
      for (int q = 0; q < order; ++q) {
        const double t = c + h * g.nodes[q];
        Vector u(2);
        u << std::cos(t), std::sin(t);
        rule.dirs.push_back(u);
        rule.weights.push_back(h * g.weights[q]);
      }
    }
  }
  return rule;
}

// Circle rule from Kronrod-15 panels whose ends include the given angles; the
// embedded Gauss-7 weights give the coarse estimate.
inline DirectionRule circle_rule_kronrod(std::vector<double> breaks, int min_panels = 16) {
  const double two_pi = 2.0 * std::numbers::pi;
  for (auto& b : breaks) {
    b = std::fmod(b, two_pi);
    if (b < 0) b += two_pi;
  }
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> ends;
  for (double b : breaks)
    if (ends.empty() || b - ends.back() > 1e-12) ends.push_back(b);
  if (ends.empty()) ends.push_back(0.0);
  if (ends.size() > 1 && ends.front() + two_pi - ends.back() < 1e-12) ends.pop_back();
  const double max_width = two_pi / min_panels;
  DirectionRule rule;
  auto add = [&](double t, double w, double wc) {
    Vector u(2);
    u << std::cos(t), std::sin(t);
    rule.dirs.push_back(u);
    rule.weights.push_back(w);
    rule.coarse.push_back(wc);
  };
  for (std::size_t i = 0; i < ends.size(); ++i) {
    const double a = ends[i];
    const double b = i + 1 < ends.size() ? ends[i + 1] : ends[0] + two_pi;
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_width - 1e-9)));
    for (int k = 0; k < pieces; ++k) {
      const double pa = a + (b - a) * k / pieces, pb = a + (b - a) * (k + 1) / pieces;
      const double c = 0.5 * (pa + pb), h = 0.5 * (pb - pa);
      for (int j = 0; j < 7; ++j) {
        const double wc = j % 2 == 1 ? h * detail::kWg[j / 2] : 0.0;
        add(c - h * detail::kXgk[j], h * detail::kWgk[j], wc);
        add(c + h * detail::kXgk[j], h * detail::kWgk[j], wc);
      }
      add(c, h * detail::kWgk[7], h * detail::kWg[3]);
    }
  }
  return rule;
}

// Sphere rule in R^3 from the six faces of the cube, each split into four
// quadrants carrying a Gauss-Legendre product grid (gnomonic projection).
inline DirectionRule cube_sphere_rule(int order) {
  DirectionRule rule;
  const auto& g = gauss_legendre(order);
  for (int axis = 0; axis < 3; ++axis) {
    for (int sign = -1; sign <= 1; sign += 2) {
      for (int qa = 0; qa < 2; ++qa) {
        for (int qb = 0; qb < 2; ++qb) {
          for (int i = 0; i < order; ++i) {
            for (int j = 0; j < order; ++j) {
              const double s = 0.5 * (g.nodes[i] + 1.0) * (qa ? 1.0 : -1.0);
              const double t = 0.5 * (g.nodes[j] + 1.0) * (qb ? 1.0 : -1.0);
              const double rho = std::sqrt(1.0 + s * s + t * t);
              Vector u(3);
              u[axis] = sign;
              u[(axis + 1) % 3] = s;
              u[(axis + 2) % 3] = t;
              u /= rho;
              rule.dirs.push_back(u);
              rule.weights.push_back(0.25 * g.weights[i] * g.weights[j] / (rho * rho * rho));
            }
          }
        }
      }
    }
  }
  return rule;
}

// Halton points with a random shift per batch, mapped to the sphere through
// Box-Muller normals. Weights are equal within a batch.
inline std::vector<DirectionRule> qmc_sphere_batches(int n, int count, int batches, std::uint64_t seed) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
  const int dims = 2 * ((n + 1) / 2);
  if (dims > 20) throw CapabilityError("quasi-Monte Carlo directions limited to n <= 20");
  std::mt19937_64 rng(seed);
  std::vector<DirectionRule> out;
  const double area = sphere_area(n);
  for (int b = 0; b < batches; ++b) {
    std::vector<double> shift(dims);
    for (auto& s : shift) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    DirectionRule rule;
    for (int i = 1; i <= count; ++i) {
      std::vector<double> uvec(dims);
      for (int d = 0; d < dims; ++d) {
        double f = 1.0, x = 0.0;
        int k = i;
        while (k > 0) {
          f /= primes[d];
          x += f * (k % primes[d]);
          k /= primes[d];
        }
        x += shift[d];
        uvec[d] = x - std::floor(x);
      }
      Vector z(n);
      for (int d = 0; d < n; ++d) {
        const double u1 = std::max(uvec[2 * (d / 2)], 1e-300), u2 = uvec[2 * (d / 2) + 1];
        const double rad = std::sqrt(-2.0 * std::log(u1));
        z[d] = d % 2 == 0 ? rad * std::cos(2.0 * std::numbers::pi * u2) : rad * std::sin(2.0 * std::numbers::pi * u2);
      }
      const double nz = z.norm();
      if (nz == 0.0) continue;
      rule.dirs.push_back(z / nz);
      rule.weights.push_back(area);
    }
    for (auto& w : rule.weights) w /= static_cast<double>(rule.dirs.size());
    out.push_back(std::move(rule));
  }
  return out;
}

}  // namespace lpgeom
