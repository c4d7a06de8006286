#pragma once

#include <random>

#include "bodies.hpp"

namespace lpgeom {

inline Vector random_direction(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  Vector u(n);
  do {
    for (int i = 0; i < n; ++i) u[i] = nd(rng);
  } while (u.norm() < 1e-12);
  return u.normalized();
}

// Hull of m random points on spherical shells of radius in [0.3, 1], shifted
// by a small random offset that keeps the origin interior.
inline ConvexBody random_polytope(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> rad(0.3, 1.0), off(-0.15, 0.15);
  for (;;) {
    Matrix v(n, m);
    for (int j = 0; j < m; ++j) v.col(j) = rad(rng) * random_direction(rng, n);
    Vector shift(n);
    for (int i = 0; i < n; ++i) shift[i] = off(rng);
    v.colwise() += shift;
    try {
      ConvexBody K = ConvexBody::vpolytope(v);
      if (interior_margin(K, Vector::Zero(n)) > 0.02) return K;
    } catch (const DegenerateBody&) {
    }
  }
}

inline ConvexBody random_polygon(std::mt19937_64& rng, int m) { return random_polytope(rng, 2, m); }

// conv{+-v_1, ..., +-v_k} with k random points, k in [2, 6].
inline ConvexBody random_symmetric_polygon(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(2, 6);
  std::uniform_real_distribution<double> rad(0.3, 1.0);
  for (;;) {
    const int k = count(rng);
    Matrix v(2, 2 * k);
    for (int j = 0; j < k; ++j) {
      v.col(2 * j) = rad(rng) * random_direction(rng, 2);
      v.col(2 * j + 1) = -v.col(2 * j);
    }
    try {
      ConvexBody K = ConvexBody::vpolytope(v);
      if (interior_margin(K, Vector::Zero(2)) > 0.02) return K;
    } catch (const DegenerateBody&) {
    }
  }
}

}  // namespace lpgeom
