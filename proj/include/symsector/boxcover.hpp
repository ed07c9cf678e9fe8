#pragma once

// Box decompositions of configurations on the line, the associated cover of
// the n-th symmetric power by cut-indexed opens, boundary defining functions
// rho and their regularized-max smoothings, and the refinement / intersection
// / product combinatorics of the cover.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "symsector/config.hpp"

namespace symsector {

/// Cut points a_0 < ... < a_n in [-1,1] with gaps > 2b, a box half-width unit
/// b, and a smoothing width delta < b/10.
struct BoxParams {
  double b = 0.1;
  std::vector<double> a;
  double delta = 0.0;

  BoxParams() = default;
  BoxParams(double unit, std::vector<double> cuts, double smoothing = 0.0)
      : b(unit), a(std::move(cuts)), delta(smoothing) {
    if (!(b > 0.0)) throw std::invalid_argument("box half-width b must be positive");
    if (a.empty()) throw std::invalid_argument("cut vector must be nonempty");
    if (!(a.front() >= -1.0) || !(a.back() <= 1.0))
      throw std::invalid_argument("cuts must lie in [-1, 1]");
    for (std::size_t i = 0; i + 1 < a.size(); ++i)
      if (!(a[i + 1] - a[i] > 2.0 * b)) throw std::invalid_argument("cut gaps must exceed 2b");
    if (delta < 0.0 || (delta > 0.0 && !(delta < b / 10.0)))
      throw std::invalid_argument("smoothing width must satisfy 0 <= delta < b/10");
  }

  int max_points() const { return static_cast<int>(a.size()) - 1; }

  /// Evenly spaced cuts for an n-point configuration.
  static BoxParams standard(int n, double b, double delta = 0.0) {
    std::vector<double> cuts(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i)
      cuts[static_cast<std::size_t>(i)] = n == 0 ? 0.0 : -1.0 + 2.0 * i / n;
    return BoxParams(b, std::move(cuts), delta);
  }
};

/// Closed interval [center - halfwidth, center + halfwidth].
struct Box {
  double center = 0.0;
  double halfwidth = 0.0;

  double lo() const { return center - halfwidth; }
  double hi() const { return center + halfwidth; }
  bool contains(double x) const { return lo() <= x && x <= hi(); }
  bool overlaps(const Box& o) const { return lo() <= o.hi() && o.lo() <= hi(); }
};

namespace detail {

inline double mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline Box box_of(std::span<const double> xs, double b) {
  return Box{mean(xs), static_cast<double>(xs.size()) * b};
}

}  // namespace detail

/// Every consecutive subset's box is contained in the whole part's box.
inline bool is_well_contained(std::span<const double> part, double b) {
  if (part.empty()) throw std::invalid_argument("empty part");
  Box whole = detail::box_of(part, b);
  for (std::size_t i = 0; i < part.size(); ++i)
    for (std::size_t j = i; j < part.size(); ++j) {
      Box sub = detail::box_of(part.subspan(i, j - i + 1), b);
      if (!(whole.lo() <= sub.lo() && sub.hi() <= whole.hi())) return false;
    }
  return true;
}

/// The unique split of a sorted configuration into consecutive runs with
/// pairwise disjoint, increasing boxes.
struct BoxDecomposition {
  std::vector<double> xs;                       // sorted, multiplicity-expanded
  std::vector<std::pair<int, int>> runs;        // half-open index ranges
  std::vector<Box> boxes;

  bool covers(double t) const {
    for (const auto& box : boxes)
      if (box.contains(t)) return true;
    return false;
  }
};

/// Iterative merge of overlapping consecutive boxes, starting from one part
/// per point.  If any two boxes overlap then some consecutive pair does, so
/// scanning neighbours suffices; the limit is order-independent.
inline BoxDecomposition box_decompose(const Configuration& c, double b) {
  if (c.dim != 1) throw std::invalid_argument("box_decompose: dim-1 configuration required");
  BoxDecomposition dec;
  dec.xs = c.sorted_reals();
  int n = static_cast<int>(dec.xs.size());
  for (int i = 0; i < n; ++i) dec.runs.emplace_back(i, i + 1);
  auto recompute = [&dec, b]() {
    dec.boxes.clear();
    for (auto [lo, hi] : dec.runs)
      dec.boxes.push_back(detail::box_of(
          std::span<const double>(dec.xs).subspan(static_cast<std::size_t>(lo),
                                                  static_cast<std::size_t>(hi - lo)),
          b));
  };
  recompute();
  for (;;) {
    bool merged = false;
    for (std::size_t i = 0; i + 1 < dec.runs.size(); ++i) {
      if (dec.boxes[i].overlaps(dec.boxes[i + 1])) {
        dec.runs[i].second = dec.runs[i + 1].second;
        dec.runs.erase(dec.runs.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        recompute();
        merged = true;
        break;
      }
    }
    if (!merged) break;
  }
  return dec;
}

/// True iff a_k is uncovered by the box decomposition and exactly k points
/// (with multiplicity) lie to its left.
inline bool membership_boxes(const Configuration& c, const BoxParams& params, int k) {
  int n = c.total_size();
  if (params.max_points() != n) throw std::invalid_argument("cut vector size mismatch");
  if (k < 0 || k > n) throw std::invalid_argument("cut index out of range");
  double ak = params.a[static_cast<std::size_t>(k)];
  BoxDecomposition dec = box_decompose(c, params.b);
  if (dec.covers(ak)) return false;
  int left = 0;
  for (double x : dec.xs)
    if (x < ak) ++left;
  return left == k;
}

// ---------------------------------------------------------------------------
// Boundary defining functions

/// The max terms for rho at cut k: window means of sizes 1..k ending at x_k
/// (left side) and sizes 1..n-k starting at x_{k+1} (right side).
inline std::vector<double> rho_terms(const Configuration& c, const BoxParams& params, int k) {
  int n = c.total_size();
  if (params.max_points() != n) throw std::invalid_argument("cut vector size mismatch");
  if (k < 0 || k > n) throw std::invalid_argument("cut index out of range");
  std::vector<double> xs = c.sorted_reals();
  double ak = params.a[static_cast<std::size_t>(k)];
  double b = params.b;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(n));
  std::span<const double> all(xs);
  for (int i = 0; i <= k - 1; ++i) {
    auto window = all.subspan(static_cast<std::size_t>(k - 1 - i), static_cast<std::size_t>(i + 1));
    terms.push_back(detail::mean(window) + (i + 1) * b - ak);
  }
  for (int i = 0; i <= n - k - 1; ++i) {
    auto window = all.subspan(static_cast<std::size_t>(k), static_cast<std::size_t>(i + 1));
    terms.push_back(ak - detail::mean(window) + (i + 1) * b);
  }
  return terms;
}

inline double rho(const Configuration& c, const BoxParams& params, int k) {
  auto terms = rho_terms(c, params, k);
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  return *std::max_element(terms.begin(), terms.end());
}

// ---------------------------------------------------------------------------
// Regularized max

enum class BumpKind { SmoothExp, Triweight, Custom };

/// Mollifier on [-1,1]: nonnegative, unit mass, zero first moment.
struct BumpSpec {
  BumpKind kind = BumpKind::SmoothExp;
  std::function<double(double)> pdf;  // Custom only
};

/// Evaluates M_eta(t_1..t_p), the expectation of max_j(t_j + eta_j U_j) for
/// independent U_j ~ theta.  Computed through the one-dimensional identity
/// E[max X_j] = upper - int (prod_j F_j) over the support hull, which equals
/// the defining tensor integral by independence but needs only panelwise
/// Gauss quadrature of the product of marginal CDFs.
class RegMaxKernel {
 public:
  explicit RegMaxKernel(const BumpSpec& spec = {}) : kind_(spec.kind) {
    switch (spec.kind) {
      case BumpKind::SmoothExp:
        pdf_ = [](double u) {
          double w = 1.0 - u * u;
          return w > 0.0 ? std::exp(-1.0 / w) : 0.0;
        };
        break;
      case BumpKind::Triweight:
        pdf_ = [](double u) {
          double w = 1.0 - u * u;
          return w > 0.0 ? (35.0 / 32.0) * w * w * w : 0.0;
        };
        break;
      case BumpKind::Custom:
        if (!spec.pdf) throw std::invalid_argument("invalid bump spec");
        pdf_ = spec.pdf;
        break;
    }
    build_table();
    validate();
  }

  double pdf(double u) const { return norm_ * pdf_(u); }

  /// CDF of the normalized bump, clamped to [0,1].
  double cdf(double u) const {
    if (u <= -1.0) return 0.0;
    if (u >= 1.0) return 1.0;
    double pos = (u + 1.0) / cell_;
    auto i = static_cast<std::size_t>(pos);
    if (i >= kCells) i = kCells - 1;
    double t = pos - static_cast<double>(i);
    // cubic Hermite with exact endpoint derivatives (the pdf)
    double y0 = table_[i], y1 = table_[i + 1];
    double m0 = pdf(-1.0 + cell_ * static_cast<double>(i)) * cell_;
    double m1 = pdf(-1.0 + cell_ * static_cast<double>(i + 1)) * cell_;
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 +
           (t3 - t2) * m1;
  }

  double operator()(std::span<const double> t, std::span<const double> eta) const {
    if (t.size() != eta.size()) throw std::invalid_argument("reg_max: length mismatch");
    for (double e : eta)
      if (!(e > 0.0)) throw std::invalid_argument("reg_max: eta must be positive");
    std::size_t p = t.size();
    if (p == 0) return -std::numeric_limits<double>::infinity();
    if (p == 1) return t[0];  // zero first moment
    double lower = std::numeric_limits<double>::infinity();
    double upper = -std::numeric_limits<double>::infinity();
    std::vector<double> breaks;
    breaks.reserve(2 * p);
    for (std::size_t j = 0; j < p; ++j) {
      lower = std::min(lower, t[j] - eta[j]);
      upper = std::max(upper, t[j] + eta[j]);
      breaks.push_back(t[j] - eta[j]);
      breaks.push_back(t[j] + eta[j]);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    const auto& [nodes, weights] = gauss_legendre(48);
    double integral = 0.0;
    for (std::size_t seg = 0; seg + 1 < breaks.size(); ++seg) {
      double aa = breaks[seg], bb = breaks[seg + 1];
      if (!(bb > aa)) continue;
      double mid = 0.5 * (aa + bb), half = 0.5 * (bb - aa);
      double acc = 0.0;
      for (std::size_t q = 0; q < nodes.size(); ++q) {
        double s = mid + half * nodes[q];
        double prod = 1.0;
        for (std::size_t j = 0; j < p && prod != 0.0; ++j) prod *= cdf((s - t[j]) / eta[j]);
        acc += weights[q] * prod;
      }
      integral += half * acc;
    }
    return upper - integral;
  }

  double uniform(std::span<const double> t, double eta) const {
    std::vector<double> etas(t.size(), eta);
    return (*this)(t, etas);
  }

 private:
  static constexpr std::size_t kCells = 4096;

  void build_table() {
    const auto& [nodes, weights] = gauss_legendre(16);
    cell_ = 2.0 / static_cast<double>(kCells);
    table_.assign(kCells + 1, 0.0);
    double mass = 0.0, moment = 0.0;
    for (std::size_t i = 0; i < kCells; ++i) {
      double aa = -1.0 + cell_ * static_cast<double>(i);
      double bb = aa + cell_;
      double mid = 0.5 * (aa + bb), half = 0.5 * (bb - aa);
      double acc = 0.0, macc = 0.0;
      for (std::size_t q = 0; q < nodes.size(); ++q) {
        double u = mid + half * nodes[q];
        double v = pdf_(u);
        acc += weights[q] * v;
        macc += weights[q] * u * v;
      }
      mass += half * acc;
      moment += half * macc;
      table_[i + 1] = mass;
    }
    if (!(mass > 0.0)) throw std::invalid_argument("invalid bump spec");
    norm_ = 1.0 / mass;
    moment_ = moment * norm_;
    for (auto& v : table_) v *= norm_;
  }

  void validate() const {
    if (std::abs(moment_) > 1e-8) throw std::invalid_argument("invalid bump spec");
    for (int i = 0; i <= 64; ++i) {
      double u = -1.0 + 2.0 * i / 64.0;
      if (pdf_(u) < 0.0) throw std::invalid_argument("invalid bump spec");
    }
  }

  BumpKind kind_;
  std::function<double(double)> pdf_;
  std::vector<double> table_;
  double cell_ = 0.0;
  double norm_ = 1.0;
  double moment_ = 0.0;
};

inline const RegMaxKernel& default_reg_max_kernel() {
  static RegMaxKernel kernel{};
  return kernel;
}

inline double reg_max(std::span<const double> values, std::span<const double> eta,
                      const BumpSpec& bump) {
  RegMaxKernel kernel(bump);
  return kernel(values, eta);
}

inline double reg_max(std::span<const double> values, std::span<const double> eta) {
  return default_reg_max_kernel()(values, eta);
}

inline double reg_max_uniform(std::span<const double> values, double eta) {
  return default_reg_max_kernel().uniform(values, eta);
}

/// reg_max over the rho term list with uniform width delta.
inline double rho_smoothed(const Configuration& c, const BoxParams& params, int k) {
  if (!(params.delta > 0.0)) throw std::invalid_argument("rho_smoothed: delta must be positive");
  auto terms = rho_terms(c, params, k);
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  return default_reg_max_kernel().uniform(terms, params.delta);
}

/// First k with membership_boxes true; the cover lemma guarantees existence,
/// so nullopt indicates a violation of that result.
inline std::optional<int> cover_witness(const Configuration& c, const BoxParams& params) {
  int n = c.total_size();
  for (int k = 0; k <= n; ++k)
    if (membership_boxes(c, params, k)) return k;
  return std::nullopt;
}

/// Conjunction of membership_boxes at the composition's cut indices.
inline bool refined_membership(const Configuration& c, const BoxParams& params,
                               const OrderedComposition& comp) {
  if (comp.total() != c.total_size())
    throw std::invalid_argument("refined_membership: composition size mismatch");
  for (int k : comp.cuts())
    if (!membership_boxes(c, params, k)) return false;
  return true;
}

/// Cut indices k_1 < ... < k_r to the composition (k_1, k_2-k_1, ..., n-k_r).
inline OrderedComposition intersection_as_refinement(const std::vector<int>& cuts, int n) {
  if (cuts.empty()) throw std::invalid_argument("intersection_as_refinement: no cuts");
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (!(cuts[i] < cuts[i + 1]))
      throw std::invalid_argument("intersection_as_refinement: cuts must be strictly increasing");
  if (cuts.front() < 0 || cuts.back() > n)
    throw std::invalid_argument("intersection_as_refinement: cut out of range");
  std::vector<int> mids;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) mids.push_back(cuts[i + 1] - cuts[i]);
  return OrderedComposition(cuts.front(), std::move(mids), n - cuts.back());
}

/// One factor of the product decomposition of a refined cover set: a block of
/// consecutive points, the cut subvector spanning it, and the membership
/// condition it carries.
struct ProductFactor {
  int point_lo = 0;  // half-open range into the sorted multiplicity-expanded points
  int point_hi = 0;
  std::vector<double> cuts;
  OrderedComposition comp;
};

/// Splits the refined set for `comp` into factors: the left block with cuts
/// a_0..a_{n_L}, one block per middle with its spanning cuts, and the right
/// block.  Membership in the refined set equals the conjunction of factor
/// memberships on the split point groups.
inline std::vector<ProductFactor> product_split(const OrderedComposition& comp,
                                                const BoxParams& params) {
  int n = comp.total();
  if (params.max_points() != n) throw std::invalid_argument("cut vector size mismatch");
  std::vector<ProductFactor> factors;
  // left factor: points [0, n_L), cuts a_0..a_{n_L}, condition U_{n_L, 0}
  {
    ProductFactor f;
    f.point_lo = 0;
    f.point_hi = comp.left;
    f.cuts.assign(params.a.begin(), params.a.begin() + comp.left + 1);
    f.comp = OrderedComposition(comp.left, {}, 0);
    factors.push_back(std::move(f));
  }
  int pos = comp.left;
  for (std::size_t i = 0; i < comp.middles.size(); ++i) {
    int m = comp.middles[i];
    ProductFactor f;
    f.point_lo = pos;
    f.point_hi = pos + m;
    f.cuts.assign(params.a.begin() + pos, params.a.begin() + pos + m + 1);
    f.comp = OrderedComposition(0, {m}, 0);
    factors.push_back(std::move(f));
    pos += m;
  }
  {
    ProductFactor f;
    f.point_lo = pos;
    f.point_hi = n;
    f.cuts.assign(params.a.begin() + pos, params.a.end());
    f.comp = OrderedComposition(0, {}, comp.right);
    factors.push_back(std::move(f));
  }
  return factors;
}

/// Evaluates the factorized membership of product_split.
inline bool product_membership(const Configuration& c, const BoxParams& params,
                               const OrderedComposition& comp) {
  auto xs = c.sorted_reals();
  for (const auto& f : product_split(comp, params)) {
    std::vector<double> block(xs.begin() + f.point_lo, xs.begin() + f.point_hi);
    Configuration sub = Configuration::line(block);
    BoxParams sub_params(params.b, f.cuts, 0.0);
    if (!refined_membership(sub, sub_params, f.comp)) return false;
  }
  return true;
}

}  // namespace symsector
