#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/version.hpp>

#include "lpgeom/lpgeom.hpp"

#ifndef LPGEOM_GIT_DESCRIBE
#define LPGEOM_GIT_DESCRIBE "unknown"
#endif
#ifndef LPGEOM_VERSION
#define LPGEOM_VERSION "0.0.0"
#endif

namespace lpgeom::cli {

struct Options {
  std::string body = "cube2";
  std::string p = "1";
  std::uint64_t seed = 20240601;
  int quad_dirs = 0;
  double tol = 1e-12;
  long mc_samples = 0;
  std::string out = ".";
  int n = 3;
  int points = 0;
  int iterations = 60;
  bool exact = false;
  double B = 0.0;
};

class Runner {
 public:
  Runner(std::string sub, Options o, std::ostream& log) : sub_(std::move(sub)), o_(std::move(o)), log_(log) {}

  int run() {
    std::filesystem::create_directories(o_.out);
    q_.directions = o_.quad_dirs;
    q_.radial_tol = o_.tol;
    q_.seed = o_.seed;
    const std::string csv_path = (std::filesystem::path(o_.out) / (sub_ + ".csv")).string();
    std::ofstream csv(csv_path);
    if (!csv) throw InvalidArgument("cannot write " + csv_path);
    outputs_.push_back(csv_path);
    int code = 0;
    if (sub_ == "support") support(csv);
    else if (sub_ == "polar") polar(csv);
    else if (sub_ == "mahler") mahler(csv);
    else if (sub_ == "santalo") santalo(csv);
    else if (sub_ == "steiner") steiner(csv);
    else if (sub_ == "ratio") ratio(csv);
    else if (sub_ == "isotropic") isotropic(csv);
    else if (sub_ == "verify") code = verify(csv);
    else throw InvalidArgument("unknown subcommand " + sub_);
    write_manifest();
    log_ << "wrote " << csv_path << "\n";
    return code;
  }

 private:
  ConvexBody body() const {
    BodyOrMeasure b = resolve_spec(o_.body);
    if (auto* K = std::get_if<ConvexBody>(&b)) return *K;
    throw InvalidArgument("subcommand " + sub_ + " needs a convex body, not a measure");
  }

  std::vector<Vector> directions(int n, int count) const {
    std::vector<Vector> dirs;
    if (n == 1) return {Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
    if (n == 2) return circle_directions(count);
    std::mt19937_64 rng(o_.seed);
    for (int i = 0; i < count; ++i) dirs.push_back(random_direction(rng, n));
    return dirs;
  }

  static std::vector<std::string> coords(const std::string& prefix, int n) {
    std::vector<std::string> h;
    for (int i = 1; i <= n; ++i) h.push_back(prefix + std::to_string(i));
    return h;
  }

  static std::vector<std::string> join(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }

  static void push(std::vector<CsvWriter::Cell>& row, const Vector& v) {
    for (int i = 0; i < v.size(); ++i) row.emplace_back(v[i]);
  }

  void support(std::ostream& csv) {
    const ConvexBody K = body();
    const int n = K.dim();
    CsvWriter w(csv, join(join({"p"}, coords("y", n)), {"h"}));
    for (const auto& p : parse_p_list(o_.p))
      for (const auto& u : directions(n, o_.points > 0 ? o_.points : 64)) {
        std::vector<CsvWriter::Cell> row{p.to_string()};
        push(row, u);
        row.emplace_back(hp(K, p, u));
        w.row(row);
      }
  }

  void polar(std::ostream& csv) {
    const ConvexBody K = body();
    const int n = K.dim();
    CsvWriter w(csv, join(join(join({"p"}, coords("u", n)), coords("x", n)), {"radius", "bounded"}));
    const auto dirs = directions(n, o_.points > 0 ? o_.points : 360);
    for (const auto& p : parse_p_list(o_.p))
      for (const auto& b : polar_boundary_sample(K, p, dirs)) {
        std::vector<CsvWriter::Cell> row{p.to_string()};
        push(row, b.direction);
        push(row, b.bounded ? b.point : Vector(Vector::Constant(n, std::numeric_limits<double>::infinity())));
        row.emplace_back(b.radius);
        row.emplace_back(static_cast<long>(b.bounded));
        w.row(row);
      }
  }

  void mahler(std::ostream& csv) {
    const ConvexBody K = body();
    CsvWriter w(csv, {"p", "value", "error", "method", "mc_value", "mc_sigma"});
    for (const auto& p : parse_p_list(o_.p)) {
      const MahlerResult m = mahler_volume(K, p, q_);
      double mv = std::numeric_limits<double>::quiet_NaN(), ms = mv;
      if (o_.mc_samples > 0 && !p.is_zero()) {
        // n! |K| |K^{o,p}| with the polar volume from the sampling oracle
        const McEstimate e = mc_polar_volume(K, p, o_.mc_samples, o_.seed);
        const double f = factorial(K.dim()) * K.volume();
        mv = f * e.value;
        ms = f * e.sigma;
      }
      w.row({p.to_string(), m.value, m.error, std::string(method_name(m.method)), mv, ms});
      log_ << "M_" << p.to_string() << " = " << format_double(m.value) << " +- " << format_double(m.error) << "\n";
    }
  }

  void santalo(std::ostream& csv) {
    const ConvexBody K = body();
    const int n = K.dim();
    CsvWriter w(csv, join(join({"p"}, coords("x", n)), {"gradient_norm", "iterations", "converged", "value", "rel_error"}));
    for (const auto& p : parse_p_list(o_.p)) {
      const SantaloSolution s = santalo_point(K, p, 1e-10, q_);
      std::vector<CsvWriter::Cell> row{p.to_string()};
      push(row, s.point);
      row.insert(row.end(), {s.gradient_norm, static_cast<long>(s.iterations), static_cast<long>(s.converged), s.value, s.rel_error});
      w.row(row);
    }
  }

  void steiner(std::ostream& csv) {
    const ConvexBody K0 = body();
    // symmetrals are taken in hyperplanes through the origin, so start from
    // the centroid to keep the polar volumes finite
    const Vector c = K0.barycenter();
    const ConvexBody K = c.norm() > 1e-12 ? translate(K0, c) : K0;
    if (c.norm() > 1e-12) log_ << "translated by the centroid " << format_double(c.norm()) << " to the origin\n";
    const int n = K.dim();
    if (!is_polytope(K)) throw CapabilityError("Steiner symmetrization implemented for polytopes only");
    if (o_.exact && (n > 3 || (n == 3 && detail::build_hull(*vertices(K)).facets.size() > 64)))
      throw CapabilityError("exact Steiner symmetral needs n <= 3 and at most 64 facets");
    const auto ps = parse_p_list(o_.p);
    std::vector<std::string> head = join(join({"iteration"}, coords("u", n)), {"hausdorff", "vertices", "volume"});
    for (const auto& p : ps) head.push_back("polar_volume_p" + p.to_string());
    CsvWriter w(csv, head);
    // a tighter vertex cap than the library default keeps the per-iterate
    // polar volumes affordable
    const SteinerSequence seq = steiner_to_ball(K, o_.iterations, o_.seed, 64);
    const std::string vpath = (std::filesystem::path(o_.out) / "steiner_vertices.csv").string();
    std::ofstream vcsv(vpath);
    outputs_.push_back(vpath);
    CsvWriter vw(vcsv, join({"iteration", "vertex"}, coords("x", n)));
    for (std::size_t it = 0; it < seq.hausdorff.size(); ++it) {
      std::vector<CsvWriter::Cell> row{static_cast<long>(it + 1)};
      push(row, seq.directions[it]);
      row.emplace_back(seq.hausdorff[it]);
      row.emplace_back(static_cast<long>(seq.vertex_counts[it]));
      row.emplace_back(seq.bodies[it].volume());
      for (std::size_t k = 0; k < ps.size(); ++k) row.emplace_back(polar_volume(seq.bodies[it], ps[k], q_).value);
      w.row(row);
      const Matrix& V = seq.bodies[it].hull().vertices;
      for (int c = 0; c < V.cols(); ++c) {
        std::vector<CsvWriter::Cell> vr{static_cast<long>(it + 1), static_cast<long>(c)};
        push(vr, V.col(c));
        vw.row(vr);
      }
    }
    log_ << "final Hausdorff distance " << format_double(seq.hausdorff.back()) << (seq.approximate ? " (approximate iterates)" : "") << "\n";
  }

  void ratio(std::ostream& csv) {
    CsvWriter w(csv, {"p", "diamond", "cube", "ratio", "rel_error"});
    for (const auto& r : cube_diamond_ratio(o_.n, parse_p_list(o_.p), q_))
      w.row({r.p.to_string(), r.diamond, r.cube, r.ratio, r.rel_error});
  }

  void isotropic(std::ostream& csv) {
    CsvWriter w(csv, {"quantity", "value"});
    BodyOrMeasure b = resolve_spec(o_.body);
    ConvexitySamples spec;
    spec.seed = o_.seed;
    if (auto* mu = std::get_if<DiscreteMeasure>(&b)) {
      const int n = mu->dim();
      const IsotropicReport r = isotropic_report(*mu);
      const ConvexityProbe probe(*mu, spec);
      const double B = o_.B > 0.0 ? o_.B : n + 1.0;
      const ConvexityCertificate c = probe.certificate(B);
      const auto best = probe.smallest_certified_B(4.0 * (n + 1));
      w.row({std::string("C"), r.C});
      w.row({std::string("L"), r.L_K});
      w.row({std::string("det_cov"), r.cov.determinant()});
      w.row({std::string("B"), B});
      w.row({std::string("certificate_pass"), static_cast<long>(c.pass)});
      w.row({std::string("certificate_min_eigenvalue"), c.min_eigenvalue});
      w.row({std::string("certificate_skipped"), static_cast<long>(c.skipped)});
      w.row({std::string("smallest_certified_B"), best ? *best : std::numeric_limits<double>::infinity()});
      return;
    }
    const ConvexBody K = std::get<ConvexBody>(b);
    const int n = K.dim();
    const double B = o_.B > 0.0 ? o_.B : n + 1.0;
    const IsotropicReport r = isotropic_report(K);
    const ConvexityProbe probe(K, spec);
    const ConvexityCertificate c = probe.certificate(B);
    const auto best = probe.smallest_certified_B(4.0 * (n + 1));
    const SlicingBounds s = conditional_slicing_bounds(K, B, q_, spec);
    w.row({std::string("C"), r.C});
    w.row({std::string("L"), r.L_K});
    w.row({std::string("det_cov"), r.cov.determinant()});
    w.row({std::string("B"), B});
    w.row({std::string("certificate_pass"), static_cast<long>(c.pass)});
    w.row({std::string("certificate_min_eigenvalue"), c.min_eigenvalue});
    w.row({std::string("certificate_skipped"), static_cast<long>(c.skipped)});
    w.row({std::string("smallest_certified_B"), best ? *best : std::numeric_limits<double>::infinity()});
    for (int i = 0; i < n; ++i) w.row({"santalo_x" + std::to_string(i + 1), s.santalo_point[i]});
    w.row({std::string("bound_i"), s.bound_i});
    w.row({std::string("bound_ii"), s.bound_ii});
    w.row({std::string("bound_iii"), s.bound_iii ? *s.bound_iii : std::numeric_limits<double>::quiet_NaN()});
    w.row({std::string("universal_bound"), s.universal});
    w.row({std::string("universal_margin"), s.universal_margin()});
    w.row({std::string("bounds_hold"), static_cast<long>(s.all_hold())});
  }

  int verify(std::ostream& csv);

  void write_manifest() const {
    Json m;
    m["tool"] = "lpgeom";
    m["version"] = LPGEOM_VERSION;
    m["git"] = LPGEOM_GIT_DESCRIBE;
    m["subcommand"] = sub_;
    m["body"] = o_.body;
    m["p"] = o_.p;
    m["seed"] = o_.seed;
    m["n"] = o_.n;
    m["points"] = o_.points;
    m["iterations"] = o_.iterations;
    m["exact"] = o_.exact;
    m["B"] = o_.B;
    m["libraries"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                    std::to_string(EIGEN_MINOR_VERSION)},
                      {"boost", BOOST_LIB_VERSION},
                      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    m["tolerances"] = {{"radial_tol", o_.tol}, {"quad_dirs", o_.quad_dirs}, {"mc_samples", o_.mc_samples}};
    m["outputs"] = outputs_;
    std::ofstream f(std::filesystem::path(o_.out) / (sub_ + ".manifest.json"));
    f << m.dump(2) << "\n";
  }

  std::string sub_;
  Options o_;
  std::ostream& log_;
  QuadratureSpec q_;
  std::vector<std::string> outputs_;
};

// Property suite over the chosen body plus seeded random instances. One CSV
// row per check; exit code 1 when any check fails.
inline int Runner::verify(std::ostream& csv) {
  CsvWriter w(csv, {"check", "value", "threshold", "pass"});
  bool all = true;
  auto report = [&](const std::string& name, double value, double threshold, bool pass) {
    w.row({name, value, threshold, static_cast<long>(pass)});
    log_ << (pass ? "PASS " : "FAIL ") << name << " " << format_double(value) << "\n";
    all = all && pass;
  };
  const ConvexBody K = body();
  const int n = K.dim();
  std::mt19937_64 rng(o_.seed);
  const double p = 1.0;

  {
    Matrix A = Matrix::Identity(n, n);
    std::normal_distribution<double> nd;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) += 0.3 * nd(rng);
    Vector a(n);
    for (int i = 0; i < n; ++i) a[i] = 0.1 * nd(rng);
    const IdentityReport r = verify_basic_identities(K, ConvexBody::cube(1), p, 3.0 * p, A, a, 1000, o_.seed);
    report("basic_identities", r.max_violation(), 1e-10, r.max_violation() <= 1e-10);
  }
  {
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
      const Vector y = sample_point(rng, n), z = sample_point(rng, n);
      const double mid = hp(K, p, Vector(0.5 * (y + z))), avg = 0.5 * (hp(K, p, y) + hp(K, p, z));
      worst = std::max(worst, (mid - avg) / (1.0 + std::abs(avg)));
    }
    report("midpoint_convexity", worst, 1e-10, worst <= 1e-10);
  }
  {
    double worst = std::numeric_limits<double>::infinity();
    Vector c = Vector::Constant(n, 0.5), a = Vector::LinSpaced(n, -0.4, 0.6);
    const std::vector<std::function<double(const Vector&)>> fs = {
        [](const Vector& x) { return 0.5 * x.squaredNorm(); },
        [&K, p](const Vector& x) { return hp(K, p, x); },
        [c, a](const Vector& x) { return 0.5 * (x - c).squaredNorm() + a.dot(x); }};
    for (const auto& f : fs) worst = std::min(worst, fradelizi_check(f, n, 500, o_.seed).slack);
    report("fradelizi_min_slack", worst, -1e-8, worst >= -1e-8);
  }
  {
    bool ok = true;
    std::uniform_real_distribution<double> ud(-2.0, 2.0);
    for (int t = 0; t < 200; ++t) {
      const int m = 2 + t % 5;
      std::vector<double> y(m);
      bool spaced;
      do {
        for (auto& v : y) v = ud(rng);
        spaced = true;
        for (int i = 0; i < m; ++i)
          for (int j = i + 1; j < m; ++j) spaced = spaced && std::abs(y[i] - y[j]) > 0.05;
      } while (!spaced);
      for (int k = 0; k < m; ++k) ok = ok && lagrange_identity_check(y, k).holds;
    }
    report("lagrange_identity", ok ? 0.0 : 1.0, 1e-9, ok);
  }
  {
    double worst = 0.0;
    std::uniform_real_distribution<double> ud(-5.0, 5.0), tiny(-1e-9, 1e-9);
    for (int t = 0; t < 200; ++t) {
      const int m = 1 + t % 8;
      std::vector<double> c(m);
      const double base = ud(rng);
      for (int i = 0; i < m; ++i) c[i] = t % 2 ? base + tiny(rng) : ud(rng);
      const double ref = highprec_divided_difference(c);
      worst = std::max(worst, std::abs(divided_difference_exp(c) - ref) / ref);
    }
    report("divided_difference_vs_highprec", worst, 1e-12, worst <= 1e-12);
  }
  if (n == 2) {
    const MahlerInequalityReport r = mahler_inequality_suite(random_polygon(rng, 7), 1.0, q_, o_.seed);
    report("mahler_inequalities", r.passed() ? 0.0 : 1.0, 0.0, r.passed());
    int bad = 0;
    for (int t = 0; t < 5; ++t) {
      const ConvexBody S = random_symmetric_polygon(rng);
      if (!polar_volume_monotonicity_check(S, PExponent::finite(1.0), random_direction(rng, 2), q_).holds) ++bad;
    }
    report("steiner_monotonicity_violations", bad, 0.0, bad == 0);
    const SantaloProbeReport pr = santalo_upper_probe(10, {0.5, 1.0, 10.0}, o_.seed, q_);
    report("santalo_probe_violations", pr.violations, 0.0, pr.violations == 0);
  }
  {
    const DiscreteMeasure mu = DiscreteMeasure::simplex_vertices(n);
    const ConvexityProbe probe(mu);
    const ConvexityCertificate good = probe.certificate(n + 1.0), bad = probe.certificate(n - 0.5);
    report("measure_certificate_B_n_plus_1", good.min_eigenvalue, -1e-6, good.pass);
    report("measure_certificate_B_n_minus_half_fails", bad.min_eigenvalue, -1e-6, !bad.pass);
  }
  return all ? 0 : 1;
}

}  // namespace lpgeom::cli
