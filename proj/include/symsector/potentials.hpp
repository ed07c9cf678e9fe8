#pragma once

// Potentials on symmetric powers of the plane: the sum-of-quadratics
// potential, its cluster-additive smoothing with a pluggable deep-stratum
// smoother, the regularized-max patching combinator, sampling checks for
// plurisubharmonicity / center-of-mass splitting / gluing adaptedness, and
// the displaceability potential built from power sums.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "symsector/boxcover.hpp"
#include "symsector/clustering.hpp"
#include "symsector/config.hpp"

namespace symsector {

/// phi(z) = v Q v for v = (Re z, Im z), Q symmetric with positive trace.
/// The default diag(0,1) is Im(z)^2.
struct QuadraticPotential {
  double q11 = 0.0, q12 = 0.0, q22 = 1.0;

  QuadraticPotential() = default;
  QuadraticPotential(double a11, double a12, double a22) : q11(a11), q12(a12), q22(a22) {
    if (!(trace() > 0.0)) throw std::invalid_argument("quadratic potential needs positive trace");
  }

  double trace() const { return q11 + q22; }

  double operator()(Point z) const {
    double x = z.real(), y = z.imag();
    return q11 * x * x + 2.0 * q12 * x * y + q22 * y * y;
  }
};

/// Multiplicity-weighted sum of the base potential over the points.
inline double phi_n(const Configuration& c, const QuadraticPotential& q = {}) {
  double acc = 0.0;
  for (std::size_t i = 0; i < c.points.size(); ++i)
    acc += static_cast<double>(c.mult[i]) * q(c.points[i]);
  return acc;
}

struct TranslationResidual {
  double residual = 0.0;
  double scale = 1.0;
};

/// |phi_n(z) - phi_n(z - c(z)) - n phi(c(z))|, with the natural magnitude
/// scale for relative comparison.
inline TranslationResidual translation_identity_check(const Configuration& c,
                                                      const QuadraticPotential& q = {}) {
  if (c.empty()) throw std::invalid_argument("empty configuration");
  Point ctr = center_of_mass(c);
  double whole = phi_n(c, q);
  double centered = phi_n(c.shifted(-ctr), q);
  double cm = static_cast<double>(c.total_size()) * q(ctr);
  TranslationResidual out;
  out.residual = std::abs(whole - centered - cm);
  out.scale = std::max({1.0, std::abs(whole), std::abs(centered), std::abs(cm)});
  return out;
}

// ---------------------------------------------------------------------------
// Smoothed potential

/// Deep-stratum smoother handle: evaluated on a centered configuration with
/// no nontrivial cluster decomposition; must satisfy
/// |value - phi_n(config)| <= t/2.
using LocalSmoother =
    std::function<double(const Configuration&, double, const QuadraticPotential&)>;

/// Averages phi over a disk of radius s around each lifted point
/// (radial Gauss x angular trapezoid; exact for quadratics).  s is chosen so
/// the deviation from phi_n is exactly t/2 for quadratic bases.
inline double default_local_smoother(const Configuration& centered, double t,
                                     const QuadraticPotential& q = {}) {
  int n = centered.total_size();
  if (n == 0) return 0.0;
  double s = std::sqrt(2.0 * t / (static_cast<double>(n) * q.trace()));
  const auto& [nodes, weights] = gauss_legendre(8);
  constexpr int kAngles = 16;
  double acc = 0.0;
  for (std::size_t i = 0; i < centered.points.size(); ++i) {
    // disk average of phi around the point: (2/s^2) int_0^s r * avg_angle dr
    double point_avg = 0.0;
    for (std::size_t rq = 0; rq < nodes.size(); ++rq) {
      double r = 0.5 * s * (nodes[rq] + 1.0);
      double ang = 0.0;
      for (int aq = 0; aq < kAngles; ++aq) {
        double th = 2.0 * M_PI * aq / kAngles;
        ang += q(centered.points[i] + Point(r * std::cos(th), r * std::sin(th)));
      }
      ang /= kAngles;
      point_avg += weights[rq] * (0.5 * s) * r * ang;
    }
    point_avg *= 2.0 / (s * s);
    acc += static_cast<double>(centered.mult[i]) * point_avg;
  }
  return acc;
}

/// Cluster-additive smoothing family.  eval_smoothed recurses through the
/// finest cluster decomposition; deep strata go through the local smoother
/// with a per-cluster deviation budget of t*k/(2N), so the total C0 error
/// stays below t/2 for any decomposition shape.
struct SmoothedPotential {
  ClusteringRule rule;
  QuadraticPotential base;
  double t = 0.0;
  double eps1 = 1.0;  // cap schedule eps_n = eps1 / 4^{n-1}
  LocalSmoother smoother;  // defaults to default_local_smoother

  double eps_cap(int n) const { return eps1 / std::pow(4.0, n - 1); }
};

inline double eval_smoothed(const Configuration& c, const SmoothedPotential& sp) {
  int n = c.total_size();
  if (n == 0) return 0.0;
  if (n > sp.rule.levels()) throw std::invalid_argument("rule too short");
  if (!(sp.t > 0.0) || !(sp.t < sp.eps_cap(n)))
    throw std::invalid_argument("t out of range");
  std::function<double(const Configuration&)> rec = [&](const Configuration& cfg) -> double {
    int k = cfg.total_size();
    if (k == 0) return 0.0;
    if (k == 1 && cfg.mult[0] == 1) return sp.base(cfg.points[0]);
    auto finest = finest_decomposition(cfg, sp.rule);
    if (finest.parts.size() > 1) {
      double acc = 0.0;
      for (const auto& part : finest.parts) acc += rec(part);
      return acc;
    }
    Point ctr = center_of_mass(cfg);
    Configuration centered = cfg.shifted(-ctr);
    double budget = sp.t * static_cast<double>(k) / static_cast<double>(sp.rule.levels());
    double local = sp.smoother ? sp.smoother(centered, budget, sp.base)
                               : default_local_smoother(centered, budget, sp.base);
    return local + static_cast<double>(k) * sp.base(ctr);
  };
  return rec(c);
}

// ---------------------------------------------------------------------------
// Patching

/// Patches two local smoothings across a partition of unity:
/// M_{s/4}(s etaV + fV, s etaW + fW) - s on the overlap, fV where etaV = 1,
/// fW where etaV = 0.  The -s normalization makes the output agree with fV
/// and fW exactly on those regions (drop-argument locality of the
/// regularized max); requires t < s/4.
template <class X>
std::function<double(const X&)> varouchas_patch(std::function<double(const X&)> fV,
                                                std::function<double(const X&)> fW,
                                                std::function<double(const X&)> etaV, double s,
                                                double t) {
  if (!(t < s / 4.0)) throw std::invalid_argument("varouchas_patch: t < s/4 required");
  return [fV = std::move(fV), fW = std::move(fW), etaV = std::move(etaV), s](const X& x) {
    double ev = etaV(x);
    if (ev >= 1.0) return fV(x);
    if (ev <= 0.0) return fW(x);
    std::vector<double> args{s * ev + fV(x), s * (1.0 - ev) + fW(x)};
    return reg_max_uniform(args, s / 4.0) - s;
  };
}

// ---------------------------------------------------------------------------
// Plurisubharmonicity sampling check

struct PshOptions {
  int samples = 200;
  double tol = 1e-8;
  double disk_radius = 1e-2;
  double diag_clearance = 1e-3;
  double box_halfwidth = 1.0;  // sampling box for each lifted coordinate
  int angles = 16;
  std::uint64_t seed = 1;
  // optional custom sampler (lifted points) and a guard that rejects disk
  // samples leaving the allowed region
  std::function<std::vector<Point>(SplitMix64&)> sampler;
  std::function<bool(const std::vector<Point>&)> region_guard;
};

struct PshReport {
  bool pass = true;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  double min_avg_margin = 0.0;  // disk average minus center value
  double min_lap_margin = 0.0;  // quadrature Laplacian along the disk
  std::vector<std::string> notes;
};

/// Estimates the sub-mean-value margin and the disk Laplacian of a lifted
/// function along random affine analytic disks through random points, away
/// from the big diagonal.
inline PshReport psh_check(const std::function<double(const std::vector<Point>&)>& f, int n,
                           const PshOptions& opt = {}) {
  PshReport rep;
  rep.min_avg_margin = std::numeric_limits<double>::infinity();
  rep.min_lap_margin = std::numeric_limits<double>::infinity();
  SplitMix64 rng(opt.seed);
  int attempts = 0;
  while (rep.checked < static_cast<std::size_t>(opt.samples) && attempts < 50 * opt.samples) {
    ++attempts;
    std::vector<Point> z(static_cast<std::size_t>(n));
    if (opt.sampler) {
      z = opt.sampler(rng);
    } else {
      for (auto& p : z)
        p = Point(rng.uniform(-opt.box_halfwidth, opt.box_halfwidth),
                  rng.uniform(-opt.box_halfwidth, opt.box_halfwidth));
    }
    bool clear = true;
    for (std::size_t i = 0; i < z.size() && clear; ++i)
      for (std::size_t j = i + 1; j < z.size() && clear; ++j)
        if (std::abs(z[i] - z[j]) < opt.diag_clearance + 2.0 * opt.disk_radius) clear = false;
    if (!clear) {
      ++rep.skipped;
      continue;
    }
    std::vector<Point> dir(static_cast<std::size_t>(n));
    double norm = 0.0;
    for (auto& d : dir) {
      d = Point(rng.normal(), rng.normal());
      norm += std::norm(d);
    }
    norm = std::sqrt(norm);
    for (auto& d : dir) d /= norm;

    double center = f(z);
    double avg = 0.0;
    bool guarded = false;
    std::vector<Point> probe(z.size());
    for (int a = 0; a < opt.angles; ++a) {
      double th = 2.0 * M_PI * a / opt.angles;
      Point zeta(opt.disk_radius * std::cos(th), opt.disk_radius * std::sin(th));
      for (std::size_t i = 0; i < z.size(); ++i) probe[i] = z[i] + zeta * dir[i];
      if (opt.region_guard && !opt.region_guard(probe)) {
        guarded = true;
        break;
      }
      avg += f(probe);
    }
    if (guarded) {
      ++rep.skipped;
      rep.notes.push_back("disk sample left the allowed region; skipped");
      continue;
    }
    avg /= opt.angles;
    double margin = avg - center;
    double lap = 4.0 * margin / (opt.disk_radius * opt.disk_radius);
    rep.min_avg_margin = std::min(rep.min_avg_margin, margin);
    rep.min_lap_margin = std::min(rep.min_lap_margin, lap);
    ++rep.checked;
  }
  rep.pass = rep.checked > 0 && rep.min_avg_margin >= -opt.tol &&
             rep.min_lap_margin >= -opt.tol * 4.0 / (opt.disk_radius * opt.disk_radius);
  return rep;
}

/// Lift of phi_n to ordered tuples, for psh_check.
inline std::function<double(const std::vector<Point>&)> lifted_phi_n(
    const QuadraticPotential& q = {}) {
  return [q](const std::vector<Point>& z) {
    double acc = 0.0;
    for (const auto& p : z) acc += q(p);
    return acc;
  };
}

// ---------------------------------------------------------------------------
// Center-of-mass standard / adapted checks

struct CmStandardOptions {
  int samples = 40;
  int trials = 6;
  double tol = 1e-9;
  double cm_step = 1e-2;
  std::uint64_t seed = 1;
  double center_lo = -1.0;  // placement range for cluster centers (real part)
  double center_hi = 1.0;
  double imag_span = 0.05;
};

struct CmStandardReport {
  bool pass = true;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  double max_mixed_residual = 0.0;
  double max_cm_residual = 0.0;
  std::vector<std::string> notes;
};

namespace detail {

/// Configurations whose real parts admit an ordered cluster decomposition of
/// type vec_tau; returns the points grouped by cluster.
inline std::vector<std::vector<Point>> sample_re_stratum(const std::vector<int>& vec_tau,
                                                         const ClusteringRule& rule,
                                                         SplitMix64& rng, double lo, double hi,
                                                         double imag_span) {
  int n = 0;
  for (int t : vec_tau) n += t;
  if (n > rule.levels()) throw std::invalid_argument("rule too short");
  double dmax = rule.d[static_cast<std::size_t>(n - 1)];
  std::size_t ell = vec_tau.size();
  std::vector<std::vector<Point>> clusters(ell);
  // centers spaced more than 2 d_n apart so every pair is separated
  std::vector<double> centers(ell);
  double base = lo;
  for (std::size_t i = 0; i < ell; ++i) {
    centers[i] = base + rng.uniform(0.0, 0.5) * dmax;
    base = centers[i] + 2.5 * dmax;
  }
  (void)hi;
  for (std::size_t i = 0; i < ell; ++i) {
    int k = vec_tau[i];
    double rk = rule.r[static_cast<std::size_t>(k - 1)];
    for (;;) {
      std::vector<Point> pts(static_cast<std::size_t>(k));
      Point mean{0.0, 0.0};
      for (auto& p : pts) {
        p = Point(rng.uniform(-0.3 * rk, 0.3 * rk), rng.uniform(-imag_span * rk, imag_span * rk));
        mean += p;
      }
      mean /= static_cast<double>(k);
      for (auto& p : pts) p = p - mean + Point(centers[i], 0.0);
      // require distinct points
      bool ok = true;
      for (std::size_t a = 0; a < pts.size() && ok; ++a)
        for (std::size_t b = a + 1; b < pts.size() && ok; ++b)
          if (std::abs(pts[a] - pts[b]) < 1e-6 * rk) ok = false;
      if (ok) {
        clusters[i] = std::move(pts);
        break;
      }
    }
  }
  return clusters;
}

inline Configuration clusters_to_config(const std::vector<std::vector<Point>>& clusters) {
  std::vector<Point> pts;
  for (const auto& c : clusters) pts.insert(pts.end(), c.begin(), c.end());
  return Configuration::plane(std::move(pts));
}

}  // namespace detail

/// Tests the splitting f = f_cm + f_int over a fixed ordered stratum: mixed
/// second differences between center moves and center-preserving internal
/// moves must vanish, and the cm part must change exactly like
/// sum tau_i Im(c_i)^2.
inline CmStandardReport cm_standard_check(const std::function<double(const Configuration&)>& f,
                                          const std::vector<int>& vec_tau,
                                          const ClusteringRule& rule,
                                          const CmStandardOptions& opt = {}) {
  CmStandardReport rep;
  SplitMix64 rng(opt.seed);
  std::size_t ell = vec_tau.size();
  for (int s = 0; s < opt.samples; ++s) {
    auto clusters = detail::sample_re_stratum(vec_tau, rule, rng, opt.center_lo, opt.center_hi,
                                              opt.imag_span);
    // verify the constructed grouping is a genuine ordered decomposition
    {
      bool ok = true;
      std::vector<Configuration> parts;
      for (const auto& cl : clusters) parts.push_back(Configuration::plane(cl));
      for (std::size_t i = 0; i < parts.size() && ok; ++i) {
        if (!is_confined(parts[i], rule)) ok = false;
        for (std::size_t j = i + 1; j < parts.size() && ok; ++j)
          if (!is_separated(parts[i], parts[j], rule)) ok = false;
      }
      if (!ok) {
        ++rep.skipped;
        rep.notes.push_back("sample failed the stratum precondition; skipped");
        continue;
      }
    }
    auto eval = [&](const std::vector<std::vector<Point>>& cls) {
      return f(detail::clusters_to_config(cls));
    };
    double base = eval(clusters);
    for (int trial = 0; trial < opt.trials; ++trial) {
      std::size_t ci = rng.next() % ell;
      std::size_t cj = rng.next() % ell;
      // cm move: translate cluster ci
      Point u(rng.uniform(-opt.cm_step, opt.cm_step), rng.uniform(-opt.cm_step, opt.cm_step));
      auto cm_moved = clusters;
      for (auto& p : cm_moved[ci]) p += u;
      // internal move: zero-mean offsets within cluster cj
      auto int_moved = clusters;
      int k = vec_tau[cj];
      if (k > 1) {
        double rk = rule.r[static_cast<std::size_t>(k - 1)];
        std::vector<Point> offs(static_cast<std::size_t>(k));
        Point mean{0.0, 0.0};
        for (auto& o : offs) {
          o = Point(rng.uniform(-0.1 * rk, 0.1 * rk), rng.uniform(-0.1 * rk, 0.1 * rk));
          mean += o;
        }
        mean /= static_cast<double>(k);
        for (std::size_t a = 0; a < offs.size(); ++a) int_moved[cj][a] += offs[a] - mean;
      }
      auto both = cm_moved;
      for (std::size_t a = 0; a < both[cj].size(); ++a)
        both[cj][a] += int_moved[cj][a] - clusters[cj][a];
      double f_cm = eval(cm_moved), f_int = eval(int_moved), f_both = eval(both);
      double mixed = std::abs(f_both - f_cm - f_int + base);
      rep.max_mixed_residual = std::max(rep.max_mixed_residual, mixed);
      // cm part must follow sum tau_i Im(c_i)^2
      Point c_old{0.0, 0.0};
      for (const auto& p : clusters[ci]) c_old += p;
      c_old /= static_cast<double>(clusters[ci].size());
      double expected = vec_tau[ci] * (std::pow((c_old + u).imag(), 2) - std::pow(c_old.imag(), 2));
      rep.max_cm_residual = std::max(rep.max_cm_residual, std::abs((f_cm - base) - expected));
    }
    ++rep.checked;
  }
  rep.pass = rep.checked > 0 && rep.max_mixed_residual <= opt.tol &&
             rep.max_cm_residual <= opt.tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Adaptedness to a gluing window

struct GluingWindow {
  double a, b, c, d;  // a < b < c < d
};

struct WindowSplits {
  int l = 0, k = 0, r = 0;
};

struct AdaptedOptions {
  int samples = 30;
  int trials = 6;
  double tol = 1e-9;
  double step = 1e-2;
  std::uint64_t seed = 1;
};

struct AdaptedReport {
  bool pass = true;
  std::size_t checked = 0;
  double max_mixed_residual = 0.0;
  bool strip_cm_pass = true;
  std::vector<std::string> notes;
};

namespace detail {

inline std::vector<Point> sample_window_points(const GluingWindow& w, const WindowSplits& sp,
                                               SplitMix64& rng) {
  std::vector<Point> pts;
  auto push = [&](double lo, double hi, int count) {
    for (int i = 0; i < count; ++i)
      pts.emplace_back(rng.uniform(lo, hi), rng.uniform(-0.5, 0.5));
  };
  push(w.a - 1.5, w.a - 0.05, sp.l);
  push(w.b + 0.05, w.c - 0.05, sp.k);
  push(w.d + 0.05, w.d + 1.5, sp.r);
  return pts;
}

}  // namespace detail

/// Tests additivity of f across the three window factors (left piece, strips,
/// right piece) by mixed second differences, plus cm-standardness of the
/// strip factor.
inline AdaptedReport adapted_check(const std::function<double(const Configuration&)>& f,
                                   const GluingWindow& w, const WindowSplits& sp,
                                   const ClusteringRule& rule, const AdaptedOptions& opt = {}) {
  if (!(w.a < w.b && w.b < w.c && w.c < w.d))
    throw std::invalid_argument("malformed window");
  int n = sp.l + sp.k + sp.r;
  if (n < 1 || n > rule.levels()) throw std::invalid_argument("malformed window");
  double rn = rule.r[static_cast<std::size_t>(n - 1)];
  if (!(w.b - w.a > 2.0 * rn) || !(w.d - w.c > 2.0 * rn))
    throw std::invalid_argument("malformed window");

  AdaptedReport rep;
  SplitMix64 rng(opt.seed);
  std::vector<std::pair<int, int>> ranges{{0, sp.l}, {sp.l, sp.l + sp.k}, {sp.l + sp.k, n}};
  for (int s = 0; s < opt.samples; ++s) {
    auto pts = detail::sample_window_points(w, sp, rng);
    auto eval = [&](const std::vector<Point>& ps) { return f(Configuration::plane(ps)); };
    double base = eval(pts);
    for (int trial = 0; trial < opt.trials; ++trial) {
      // pick two distinct nonempty factors and perturb a point in each
      std::vector<int> live;
      for (int fi = 0; fi < 3; ++fi)
        if (ranges[fi].second > ranges[fi].first) live.push_back(fi);
      if (live.size() < 2) break;
      int f1 = live[rng.next() % live.size()];
      int f2 = f1;
      while (f2 == f1) f2 = live[rng.next() % live.size()];
      auto perturb = [&](std::vector<Point> base_pts, int factor) {
        auto [lo, hi] = ranges[factor];
        int idx = lo + static_cast<int>(rng.next() % static_cast<std::uint64_t>(hi - lo));
        base_pts[static_cast<std::size_t>(idx)] +=
            Point(rng.uniform(-opt.step, opt.step), rng.uniform(-opt.step, opt.step));
        return base_pts;
      };
      auto p1 = perturb(pts, f1);
      auto p2only = perturb(pts, f2);
      auto p12 = p1;
      for (int i = ranges[f2].first; i < ranges[f2].second; ++i)
        p12[static_cast<std::size_t>(i)] = p2only[static_cast<std::size_t>(i)];
      double mixed = std::abs(eval(p12) - eval(p1) - eval(p2only) + base);
      rep.max_mixed_residual = std::max(rep.max_mixed_residual, mixed);
    }
    ++rep.checked;
  }
  // strip factor cm-standardness: freeze the outer points of one sample and
  // test the induced function of the strip points over the single-cluster
  // stratum (k) placed inside the strip
  if (sp.k >= 1) {
    SplitMix64 rng2(opt.seed + 1);
    auto pts = detail::sample_window_points(w, sp, rng2);
    auto g = [&](const Configuration& strip) {
      std::vector<Point> all;
      for (int i = 0; i < sp.l; ++i) all.push_back(pts[static_cast<std::size_t>(i)]);
      auto sp_pts = strip.expanded();
      all.insert(all.end(), sp_pts.begin(), sp_pts.end());
      for (int i = sp.l + sp.k; i < n; ++i) all.push_back(pts[static_cast<std::size_t>(i)]);
      return f(Configuration::plane(all));
    };
    CmStandardOptions copt;
    copt.samples = 10;
    copt.tol = opt.tol;
    copt.seed = opt.seed + 2;
    copt.center_lo = 0.5 * (w.b + w.c) - 0.05;
    copt.center_hi = 0.5 * (w.b + w.c) + 0.05;
    auto crep = cm_standard_check(g, {sp.k}, rule, copt);
    rep.strip_cm_pass = crep.pass;
  }
  rep.pass = rep.checked > 0 && rep.max_mixed_residual <= opt.tol && rep.strip_cm_pass;
  return rep;
}

/// Residuals of the additivity test as the window gaps widen; adapted
/// functions decay to zero.
inline std::vector<std::pair<double, double>> adapted_sweep(
    const std::function<double(const Configuration&)>& f, const WindowSplits& sp,
    const ClusteringRule& rule, const std::vector<double>& gaps, const AdaptedOptions& opt = {}) {
  std::vector<std::pair<double, double>> out;
  for (double gap : gaps) {
    GluingWindow w{-gap - 1.0, -1.0, 1.0, gap + 1.0};
    AdaptedOptions o = opt;
    o.tol = std::numeric_limits<double>::infinity();  // record, don't judge
    auto rep = adapted_check(f, w, sp, rule, o);
    out.emplace_back(gap, rep.max_mixed_residual);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Displaceability potential

struct DisplaceabilityResult {
  double value_abs = 0.0;
  double gradient_norm = 0.0;
};

/// W(z) = sum_i z_i^p evaluated with multiplicity; the gradient is taken in
/// the lifted coordinates, d/dz_i = p z_i^{p-1}.
inline DisplaceabilityResult displaceability_potential(const Configuration& c, int n_stops) {
  if (n_stops < 1) throw std::invalid_argument("n_stops >= 1 required");
  Point w{0.0, 0.0};
  double grad2 = 0.0;
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    Point zp = std::pow(c.points[i], n_stops);
    w += static_cast<double>(c.mult[i]) * zp;
    Point dz = static_cast<double>(n_stops) * std::pow(c.points[i], n_stops - 1);
    grad2 += static_cast<double>(c.mult[i]) * std::norm(dz);
  }
  return {std::abs(w), std::sqrt(grad2)};
}

}  // namespace symsector
