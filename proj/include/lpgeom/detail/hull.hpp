#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "../core.hpp"

namespace lpgeom::detail {

struct HullFacet {
  Vector normal;  // unit outer normal
  double offset;  // <normal, x> <= offset on the body
  std::vector<int> ids;
};

struct Hull {
  Matrix vertices;  // extreme points only; counter-clockwise in 2D, lexicographic otherwise
  std::vector<HullFacet> facets;
  std::vector<Simplex> simplices;
  Vector apex;      // fan apex (vertex centroid)
};

inline bool lex_less(const Vector& a, const Vector& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

inline double point_scale(const Matrix& pts) {
  double s = 0.0;
  for (int j = 0; j < pts.cols(); ++j) s = std::max(s, pts.col(j).cwiseAbs().maxCoeff());
  return std::max(s, 1e-300);
}

// Affine rank of the selected columns; tol is relative to the largest pivot.
inline int affine_rank(const Matrix& pts, const std::vector<int>& ids, double tol) {
  if (ids.size() <= 1) return 0;
  Matrix d(pts.rows(), ids.size() - 1);
  for (std::size_t k = 1; k < ids.size(); ++k) d.col(k - 1) = pts.col(ids[k]) - pts.col(ids[0]);
  Eigen::ColPivHouseholderQR<Matrix> qr(d);
  qr.setThreshold(tol);
  return static_cast<int>(qr.rank());
}

inline Matrix sorted_unique_columns(const Matrix& pts, double tol) {
  std::vector<Vector> cols;
  for (int j = 0; j < pts.cols(); ++j) {
    if (!pts.col(j).allFinite()) throw InvalidArgument("non-finite vertex coordinate");
    cols.push_back(pts.col(j));
  }
  std::sort(cols.begin(), cols.end(), lex_less);
  std::vector<Vector> out;
  for (auto& c : cols) {
    bool dup = false;
    for (auto& o : out)
      if ((o - c).cwiseAbs().maxCoeff() <= tol) { dup = true; break; }
    if (!dup) out.push_back(c);
  }
  Matrix m(pts.rows(), out.size());
  for (std::size_t j = 0; j < out.size(); ++j) m.col(j) = out[j];
  return m;
}

inline double cross2(const Vector& o, const Vector& a, const Vector& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

inline Hull hull_2d(const Matrix& sorted, double tol) {
  const int m = static_cast<int>(sorted.cols());
  std::vector<int> h(2 * m);
  int k = 0;
  for (int i = 0; i < m; ++i) {
    while (k >= 2 && cross2(sorted.col(h[k - 2]), sorted.col(h[k - 1]), sorted.col(i)) <= tol) --k;
    h[k++] = i;
  }
  for (int i = m - 2, t = k + 1; i >= 0; --i) {
    while (k >= t && cross2(sorted.col(h[k - 2]), sorted.col(h[k - 1]), sorted.col(i)) <= tol) --k;
    h[k++] = i;
  }
  h.resize(k - 1);
  if (h.size() < 3) throw DegenerateBody("polygon has empty interior");
  Hull out;
  const int v = static_cast<int>(h.size());
  out.vertices.resize(2, v);
  for (int i = 0; i < v; ++i) out.vertices.col(i) = sorted.col(h[i]);
  out.apex = out.vertices.rowwise().mean();
  for (int i = 0; i < v; ++i) {
    const int j = (i + 1) % v;
    Vector e = out.vertices.col(j) - out.vertices.col(i);
    Vector nrm(2);
    nrm << e[1], -e[0];
    nrm.normalize();
    out.facets.push_back({nrm, nrm.dot(out.vertices.col(i)), {i, j}});
    Simplex s;
    s.vertices.resize(2, 3);
    s.vertices.col(0) = out.apex;
    s.vertices.col(1) = out.vertices.col(i);
    s.vertices.col(2) = out.vertices.col(j);
    out.simplices.push_back(std::move(s));
  }
  return out;
}

// Facets of the hull by exhaustive hyperplane enumeration over n-subsets in
// lexicographic order. Quadratic-ish in the point count; meant for the small
// polytopes used here.
// Incremental beneath-beyond hull with simplicial facets, followed by merging
// of coplanar facets. Each returned facet lists every input point on its
// plane within tol.
inline std::vector<HullFacet> enumerate_facets(const Matrix& pts, double tol) {
  const int n = static_cast<int>(pts.rows());
  const int m = static_cast<int>(pts.cols());
  // initial simplex: greedily maximise the distance to the current affine hull
  std::vector<int> base{0};
  {
    std::vector<char> used(m, 0);
    used[0] = 1;
    Matrix basis(n, 0);
    for (int k = 1; k <= n; ++k) {
      int best = -1;
      double bd = -1.0;
      for (int j = 0; j < m; ++j) {
        if (used[j]) continue;
        Vector d = pts.col(j) - pts.col(base[0]);
        if (basis.cols() > 0) d -= basis * (basis.transpose() * d);
        if (d.norm() > bd) {
          bd = d.norm();
          best = j;
        }
      }
      if (best < 0 || bd <= tol) throw DegenerateBody("points do not span the ambient space affinely");
      Vector d = pts.col(best) - pts.col(base[0]);
      if (basis.cols() > 0) d -= basis * (basis.transpose() * d);
      basis.conservativeResize(n, basis.cols() + 1);
      basis.col(basis.cols() - 1) = d.normalized();
      base.push_back(best);
      used[best] = 1;
    }
  }
  Vector centre = Vector::Zero(n);
  for (int id : base) centre += pts.col(id);
  centre /= n + 1;

  struct Simp {
    std::vector<int> ids;  // sorted
    Vector normal;
    double offset;
    bool alive;
  };
  std::vector<Simp> simps;
  auto make = [&](std::vector<int> ids) {
    std::sort(ids.begin(), ids.end());
    Matrix d(n - 1, n);
    for (int k = 1; k < n; ++k) d.row(k - 1) = (pts.col(ids[k]) - pts.col(ids[0])).transpose();
    Eigen::FullPivLU<Matrix> lu(d);
    Vector nrm = lu.kernel().col(0).normalized();
    double off = nrm.dot(pts.col(ids[0]));
    if (nrm.dot(centre) > off) {
      nrm = -nrm;
      off = -off;
    }
    simps.push_back({std::move(ids), nrm, off, true});
  };
  for (int skip = 0; skip <= n; ++skip) {
    std::vector<int> ids;
    for (int k = 0; k <= n; ++k)
      if (k != skip) ids.push_back(base[k]);
    make(ids);
  }
  std::vector<char> in_base(m, 0);
  for (int id : base) in_base[id] = 1;
  for (int j = 0; j < m; ++j) {
    if (in_base[j]) continue;
    const Vector x = pts.col(j);
    std::vector<int> visible;
    for (int f = 0; f < static_cast<int>(simps.size()); ++f)
      if (simps[f].alive && simps[f].normal.dot(x) - simps[f].offset > tol) visible.push_back(f);
    if (visible.empty()) continue;
    // ridges seen once among the visible facets form the horizon
    std::map<std::vector<int>, int> ridges;
    for (int f : visible) {
      const auto& ids = simps[f].ids;
      for (int k = 0; k < n; ++k) {
        std::vector<int> r;
        for (int i = 0; i < n; ++i)
          if (i != k) r.push_back(ids[i]);
        ++ridges[r];
      }
      simps[f].alive = false;
    }
    for (auto& [r, count] : ridges) {
      if (count != 1) continue;
      std::vector<int> ids = r;
      ids.push_back(j);
      make(ids);
    }
  }
  // merge coplanar simplices into facets
  std::vector<HullFacet> facets;
  for (const auto& sp : simps) {
    if (!sp.alive) continue;
    bool dup = false;
    for (const auto& f : facets) {
      if (f.normal.dot(sp.normal) <= 0.0) continue;
      dup = std::all_of(sp.ids.begin(), sp.ids.end(),
                        [&](int id) { return std::abs(f.normal.dot(pts.col(id)) - f.offset) <= tol; });
      if (dup) break;
    }
    if (dup) continue;
    std::vector<int> on;
    for (int j = 0; j < m; ++j)
      if (std::abs(sp.normal.dot(pts.col(j)) - sp.offset) <= tol) on.push_back(j);
    facets.push_back({sp.normal, sp.offset, on});
  }
  return facets;
}

// Faces of dimension k-1 inside the face with point set ids (dimension k).
inline std::vector<std::vector<int>> subfaces(const Matrix& pts, const std::vector<HullFacet>& facets,
                                              const std::vector<int>& face, int k, double tol) {
  std::vector<std::vector<int>> out;
  for (const auto& f : facets) {
    std::vector<int> inter;
    std::set_intersection(face.begin(), face.end(), f.ids.begin(), f.ids.end(), std::back_inserter(inter));
    if (inter.size() == face.size() || static_cast<int>(inter.size()) < k) continue;
    if (affine_rank(pts, inter, tol) != k - 1) continue;
    if (std::find(out.begin(), out.end(), inter) == out.end()) out.push_back(inter);
  }
  return out;
}

// Pulling triangulation of a face of dimension k: cone from its smallest
// vertex over the subfaces that avoid it.
inline void pull_face(const Matrix& pts, const std::vector<HullFacet>& facets, const std::vector<int>& face, int k,
                      double tol, std::vector<std::vector<int>>& out) {
  if (k == 0) {
    out.push_back({face[0]});
    return;
  }
  if (k == 1) {
    // extreme points of a segment are its two endpoints among the ids
    out.push_back({face.front(), face.back()});
    return;
  }
  const int apex = face.front();
  for (const auto& sub : subfaces(pts, facets, face, k, tol)) {
    if (std::binary_search(sub.begin(), sub.end(), apex)) continue;
    std::vector<std::vector<int>> tri;
    pull_face(pts, facets, sub, k - 1, tol, tri);
    for (auto& t : tri) {
      t.insert(t.begin(), apex);
      out.push_back(std::move(t));
    }
  }
}

inline Hull hull_nd(const Matrix& sorted, double tol, double rank_tol) {
  const int n = static_cast<int>(sorted.rows());
  auto facets = enumerate_facets(sorted, tol);
  // keep only the vertices: points whose containing facets meet in a single point
  std::vector<int> keep;
  for (int j = 0; j < sorted.cols(); ++j) {
    std::vector<int> common;
    bool first = true;
    for (const auto& f : facets) {
      if (!std::binary_search(f.ids.begin(), f.ids.end(), j)) continue;
      if (first) {
        common = f.ids;
        first = false;
      } else {
        std::vector<int> t;
        std::set_intersection(common.begin(), common.end(), f.ids.begin(), f.ids.end(), std::back_inserter(t));
        common.swap(t);
      }
    }
    if (!first && affine_rank(sorted, common, rank_tol) == 0) keep.push_back(j);
  }
  Hull out;
  out.vertices.resize(n, keep.size());
  std::vector<int> remap(sorted.cols(), -1);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.vertices.col(k) = sorted.col(keep[k]);
    remap[keep[k]] = static_cast<int>(k);
  }
  for (auto& f : facets) {
    std::vector<int> ids;
    for (int j : f.ids)
      if (remap[j] >= 0) ids.push_back(remap[j]);
    f.ids = ids;
    // slivers from near-coplanar input carry no volume
    if (static_cast<int>(ids.size()) >= n && affine_rank(out.vertices, ids, rank_tol) == n - 1) out.facets.push_back(f);
  }
  out.apex = out.vertices.rowwise().mean();
  for (const auto& f : out.facets) {
    std::vector<std::vector<int>> tri;
    pull_face(out.vertices, out.facets, f.ids, n - 1, rank_tol, tri);
    for (const auto& t : tri) {
      Simplex s;
      s.vertices.resize(n, n + 1);
      s.vertices.col(0) = out.apex;
      for (int i = 0; i < n; ++i) s.vertices.col(i + 1) = out.vertices.col(t[i]);
      out.simplices.push_back(std::move(s));
    }
  }
  return out;
}

inline Hull build_hull(const Matrix& points) {
  const int n = static_cast<int>(points.rows());
  if (n < 1) throw InvalidArgument("dimension must be positive");
  const double scale = point_scale(points);
  const double tol = 1e-11 * scale;
  Matrix sorted = sorted_unique_columns(points, tol);
  std::vector<int> all(sorted.cols());
  std::iota(all.begin(), all.end(), 0);
  if (static_cast<int>(sorted.cols()) < n + 1 || affine_rank(sorted, all, 1e-10) < n)
    throw DegenerateBody("vertices do not span the ambient space affinely");
  if (n == 1) {
    Hull out;
    out.vertices.resize(1, 2);
    out.vertices(0, 0) = sorted(0, 0);
    out.vertices(0, 1) = sorted(0, sorted.cols() - 1);
    Vector lo(1), hi(1);
    lo << -1.0;
    hi << 1.0;
    out.facets.push_back({lo, -out.vertices(0, 0), {0}});
    out.facets.push_back({hi, out.vertices(0, 1), {1}});
    out.apex = out.vertices.rowwise().mean();
    Simplex s;
    s.vertices = out.vertices;
    out.simplices.push_back(s);
    return out;
  }
  if (n == 2) return hull_2d(sorted, tol * scale);
  return hull_nd(sorted, tol, 1e-9);
}

}  // namespace lpgeom::detail
