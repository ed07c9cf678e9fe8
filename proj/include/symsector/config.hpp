#pragma once

// Point configurations on the line and the plane, clustering rules, and the
// partition / ordered-composition combinatorics shared by the other modules.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "symsector/util.hpp"

namespace symsector {

using Point = std::complex<double>;

inline double dist(Point a, Point b) { return std::abs(a - b); }

/// An unordered tuple of points with multiplicity.  Canonical form: points
/// pairwise distinct (exact equality only), sorted lexicographically by
/// (re, im), multiplicities positive and aligned.
struct Configuration {
  int dim = 1;  // 1 = real line, 2 = plane
  std::vector<Point> points;
  std::vector<int> mult;

  Configuration() = default;

  Configuration(int dimension, std::vector<Point> pts, std::vector<int> ms)
      : dim(dimension), points(std::move(pts)), mult(std::move(ms)) {
    canonicalize();
  }

  /// dim-1 configuration from real coordinates, multiplicity 1 each.
  static Configuration line(std::vector<double> xs) {
    std::vector<Point> pts;
    pts.reserve(xs.size());
    for (double x : xs) pts.emplace_back(x, 0.0);
    return Configuration(1, std::move(pts), std::vector<int>(xs.size(), 1));
  }

  static Configuration line(std::vector<double> xs, std::vector<int> ms) {
    std::vector<Point> pts;
    pts.reserve(xs.size());
    for (double x : xs) pts.emplace_back(x, 0.0);
    return Configuration(1, std::move(pts), std::move(ms));
  }

  static Configuration plane(std::vector<Point> pts) {
    std::vector<int> ms(pts.size(), 1);
    return Configuration(2, std::move(pts), std::move(ms));
  }

  static Configuration plane(std::vector<Point> pts, std::vector<int> ms) {
    return Configuration(2, std::move(pts), std::move(ms));
  }

  int total_size() const {
    int n = 0;
    for (int m : mult) n += m;
    return n;
  }

  bool empty() const { return points.empty(); }

  std::size_t distinct_count() const { return points.size(); }

  /// Coordinates expanded by multiplicity, in canonical order.
  std::vector<Point> expanded() const {
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(total_size()));
    for (std::size_t i = 0; i < points.size(); ++i)
      for (int k = 0; k < mult[i]; ++k) out.push_back(points[i]);
    return out;
  }

  /// Sorted real coordinates expanded by multiplicity (dim 1 only).
  std::vector<double> sorted_reals() const {
    if (dim != 1) throw std::invalid_argument("sorted_reals: dim-1 configuration required");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(total_size()));
    for (std::size_t i = 0; i < points.size(); ++i)
      for (int k = 0; k < mult[i]; ++k) out.push_back(points[i].real());
    return out;  // canonical order is already ascending
  }

  Configuration shifted(Point s) const {
    Configuration c = *this;
    for (auto& p : c.points) p += s;
    c.canonicalize();
    return c;
  }

  /// Union with multiplicity.
  Configuration plus(const Configuration& other) const {
    if (dim != other.dim) throw std::invalid_argument("plus: dimension mismatch");
    Configuration c = *this;
    c.points.insert(c.points.end(), other.points.begin(), other.points.end());
    c.mult.insert(c.mult.end(), other.mult.begin(), other.mult.end());
    c.canonicalize();
    return c;
  }

  bool operator==(const Configuration& o) const {
    return dim == o.dim && points == o.points && mult == o.mult;
  }

  void canonicalize() {
    if (dim != 1 && dim != 2) throw std::invalid_argument("dim must be 1 or 2");
    if (points.size() != mult.size())
      throw std::invalid_argument("points/mult length mismatch");
    for (int m : mult)
      if (m <= 0) throw std::invalid_argument("multiplicities must be positive");
    if (dim == 1)
      for (const auto& p : points)
        if (p.imag() != 0.0) throw std::invalid_argument("dim-1 point with nonzero imaginary part");
    std::vector<std::size_t> idx(points.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
      if (points[i].real() != points[j].real()) return points[i].real() < points[j].real();
      return points[i].imag() < points[j].imag();
    });
    std::vector<Point> ps;
    std::vector<int> ms;
    ps.reserve(points.size());
    ms.reserve(points.size());
    for (std::size_t i : idx) {
      // merge exactly equal points only; near-coincident points stay distinct
      if (!ps.empty() && ps.back() == points[i]) {
        ms.back() += mult[i];
      } else {
        ps.push_back(points[i]);
        ms.push_back(mult[i]);
      }
    }
    points = std::move(ps);
    mult = std::move(ms);
  }
};

/// Multiplicity-weighted mean; the unique minimizer of sum of squared
/// distances in the Euclidean model.
inline Point center_of_mass(const Configuration& c) {
  if (c.empty()) throw std::invalid_argument("empty configuration");
  Point acc{0.0, 0.0};
  for (std::size_t i = 0; i < c.points.size(); ++i)
    acc += static_cast<double>(c.mult[i]) * c.points[i];
  return acc / static_cast<double>(c.total_size());
}

/// Max distance from a point of the configuration to its center of mass.
inline double radius(const Configuration& c) {
  Point ctr = center_of_mass(c);
  double r = 0.0;
  for (const auto& p : c.points) r = std::max(r, dist(p, ctr));
  return r;
}

/// Minimum pairwise point distance between two configurations.
inline double separation(const Configuration& a, const Configuration& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty configuration");
  double s = std::numeric_limits<double>::infinity();
  for (const auto& p : a.points)
    for (const auto& q : b.points) s = std::min(s, dist(p, q));
  return s;
}

/// Radius / separation scale sequences governing cluster decompositions.
/// Valid when 0 < r_1 < ... < r_N, 0 = d_1 < ... < d_N, and for k >= 2
/// r_k > d_k + r_{k-1} and d_k > 6 r_{k-1}.
struct ClusteringRule {
  std::vector<double> r;
  std::vector<double> d;
  // Finite convexity-radius bound for non-flat extensions; unused in the
  // Euclidean model (treated as +infinity).
  double r_conv = std::numeric_limits<double>::infinity();

  int levels() const { return static_cast<int>(r.size()); }
};

struct RuleValidation {
  bool ok = true;
  std::vector<std::string> violations;

  void fail(std::string msg) {
    ok = false;
    violations.push_back(std::move(msg));
  }
};

/// Checks the defining inequalities and the derived bounds
/// r_{a+b} > d_{a+b} + max(r_a, r_b), d_{a+b} > 3 (r_a + r_b).
inline RuleValidation validate_rule(const ClusteringRule& rule) {
  RuleValidation v;
  const auto& r = rule.r;
  const auto& d = rule.d;
  int N = rule.levels();
  auto at = [](const std::vector<double>& xs, int k) { return xs[static_cast<std::size_t>(k - 1)]; };
  if (N == 0) {
    v.fail("rule has no levels");
    return v;
  }
  if (d.size() != r.size()) {
    v.fail("r and d length mismatch");
    return v;
  }
  std::ostringstream os;
  if (!(at(r, 1) > 0)) v.fail("r_1 must be positive");
  if (d[0] != 0.0) v.fail("d_1 must be 0");
  for (int k = 2; k <= N; ++k) {
    if (!(at(r, k) > at(r, k - 1))) {
      os.str(""); os << "r_" << k << " <= r_" << (k - 1);
      v.fail(os.str());
    }
    if (!(at(d, k) > at(d, k - 1))) {
      os.str(""); os << "d_" << k << " <= d_" << (k - 1);
      v.fail(os.str());
    }
    if (!(at(r, k) > at(d, k) + at(r, k - 1))) {
      os.str(""); os << "r_" << k << " <= d_" << k << " + r_" << (k - 1);
      v.fail(os.str());
    }
    if (!(at(d, k) > 6.0 * at(r, k - 1))) {
      os.str(""); os << "d_" << k << " <= 6 r_" << (k - 1);
      v.fail(os.str());
    }
  }
  for (int a = 1; a <= N; ++a)
    for (int b = a; a + b <= N; ++b) {
      int s = a + b;
      if (!(at(r, s) > at(d, s) + std::max(at(r, a), at(r, b)))) {
        os.str(""); os << "derived: r_" << s << " <= d_" << s << " + max(r_" << a << ", r_" << b << ")";
        v.fail(os.str());
      }
      if (!(at(d, s) > 3.0 * (at(r, a) + at(r, b)))) {
        os.str(""); os << "derived: d_" << s << " <= 3 (r_" << a << " + r_" << b << ")";
        v.fail(os.str());
      }
    }
  return v;
}

/// Builds a rule by the recursion r_1 = d2/(6(1+eps)),
/// r_k = (1+eps)(d_k + r_{k-1}), d_{k+1} = 6(1+eps) r_k.
inline ClusteringRule make_clustering_rule(int N, double d2, double eps) {
  if (N < 1 || !(d2 > 0.0) || !(eps > 0.0))
    throw std::invalid_argument("make_clustering_rule: N >= 1, d2 > 0, eps > 0 required");
  ClusteringRule rule;
  rule.r.resize(static_cast<std::size_t>(N));
  rule.d.resize(static_cast<std::size_t>(N));
  rule.r[0] = d2 / (6.0 * (1.0 + eps));
  rule.d[0] = 0.0;
  double next_d = d2;
  for (int k = 2; k <= N; ++k) {
    rule.d[static_cast<std::size_t>(k - 1)] = next_d;
    rule.r[static_cast<std::size_t>(k - 1)] =
        (1.0 + eps) * (next_d + rule.r[static_cast<std::size_t>(k - 2)]);
    next_d = 6.0 * (1.0 + eps) * rule.r[static_cast<std::size_t>(k - 1)];
  }
  return rule;
}

/// Strictly enlarges every r_i and shrinks every d_i (i >= 2) while keeping
/// the rule valid.  Each parameter has finitely many open constraints given
/// the others; we move it to the midpoint of its feasible interval, one
/// parameter at a time, so the whole vector stays valid after every step.
inline ClusteringRule relax_rule(const ClusteringRule& rule) {
  if (!validate_rule(rule).ok) throw std::invalid_argument("relax_rule: invalid input rule");
  ClusteringRule out = rule;
  int N = out.levels();
  auto r = [&out](int k) -> double& { return out.r[static_cast<std::size_t>(k - 1)]; };
  auto d = [&out](int k) -> double& { return out.d[static_cast<std::size_t>(k - 1)]; };
  for (int k = 1; k <= N; ++k) {
    if (k >= 2) {
      // lower bounds on d_k: d_{k-1} and 6 r_{k-1} (r_{k-1} already raised)
      double lb = std::max(d(k - 1), 6.0 * r(k - 1));
      d(k) = lb + 0.5 * (d(k) - lb);
    }
    // upper bounds on r_k come from level k+1: r_{k+1} - d_{k+1} and d_{k+1}/6
    if (k < N) {
      double ub = std::min(r(k + 1) - d(k + 1), d(k + 1) / 6.0);
      r(k) = r(k) + 0.5 * (ub - r(k));
    } else {
      r(k) = r(k) + std::max(1.0, r(k));
    }
  }
  if (!validate_rule(out).ok) throw std::logic_error("relax_rule: adjustment left the rule invalid");
  return out;
}

// ---------------------------------------------------------------------------
// Partitions and ordered compositions

/// Weakly decreasing positive integers.
using Partition = std::vector<int>;

inline std::vector<Partition> enumerate_partitions(int n) {
  if (n < 0) throw std::invalid_argument("enumerate_partitions: n >= 0 required");
  std::vector<Partition> out;
  Partition cur;
  // descending lexicographic order
  std::function<void(int, int)> rec = [&](int rest, int cap) {
    if (rest == 0) {
      out.push_back(cur);
      return;
    }
    for (int part = std::min(rest, cap); part >= 1; --part) {
      cur.push_back(part);
      rec(rest - part, part);
      cur.pop_back();
    }
  };
  rec(n, n == 0 ? 1 : n);
  return out;
}

inline Partition multiplicity_partition(const Configuration& c) {
  Partition p(c.mult.begin(), c.mult.end());
  std::sort(p.rbegin(), p.rend());
  return p;
}

/// Tuple (n_L, m_1, ..., m_k, n_R) with n_L, n_R >= 0 and every m_i >= 1.
struct OrderedComposition {
  int left = 0;
  std::vector<int> middles;
  int right = 0;

  OrderedComposition() = default;
  OrderedComposition(int l, std::vector<int> ms, int rt)
      : left(l), middles(std::move(ms)), right(rt) {
    if (left < 0 || right < 0) throw std::invalid_argument("composition: negative end");
    for (int m : middles)
      if (m < 1) throw std::invalid_argument("composition: middle entries must be >= 1");
  }

  int total() const {
    int n = left + right;
    for (int m : middles) n += m;
    return n;
  }

  /// Cut indices n_L, n_L+m_1, ..., n_L+...+m_k (k+1 of them).
  std::vector<int> cuts() const {
    std::vector<int> out{left};
    for (int m : middles) out.push_back(out.back() + m);
    return out;
  }

  bool operator==(const OrderedComposition& o) const {
    return left == o.left && right == o.right && middles == o.middles;
  }

  bool operator<(const OrderedComposition& o) const {
    return std::tie(left, middles, right) < std::tie(o.left, o.middles, o.right);
  }

  std::string str() const {
    std::ostringstream os;
    os << "(" << left;
    for (int m : middles) os << "," << m;
    os << "|" << right << ")";
    return os.str();
  }
};

inline std::vector<OrderedComposition> enumerate_compositions(int n) {
  if (n < 0) throw std::invalid_argument("enumerate_compositions: n >= 0 required");
  std::vector<OrderedComposition> out;
  std::vector<int> mids;
  for (int left = 0; left <= n; ++left) {
    std::function<void(int)> go = [&](int rest) {
      out.emplace_back(left, mids, rest);
      for (int m = 1; m <= rest; ++m) {
        mids.push_back(m);
        go(rest - m);
        mids.pop_back();
      }
    };
    go(n - left);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace symsector
