#pragma once

// Cluster decompositions: confinement / separation predicates, greedy and
// exact decomposition algorithms, the refinement lattice, stratum membership,
// and the sampling check for center-of-mass functions.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "symsector/config.hpp"

namespace symsector {

/// r(config) < r_{|config|}.  Pre-confinement is automatic in the Euclidean
/// model, so this is the whole condition.
inline bool is_confined(const Configuration& c, const ClusteringRule& rule) {
  int n = c.total_size();
  if (n < 1) throw std::invalid_argument("empty configuration");
  if (n > rule.levels()) throw std::invalid_argument("rule too short");
  return radius(c) < rule.r[static_cast<std::size_t>(n - 1)];
}

/// dist(c(a), c(b)) > d_{|a|+|b|}.
inline bool is_separated(const Configuration& a, const Configuration& b,
                         const ClusteringRule& rule) {
  int s = a.total_size() + b.total_size();
  if (a.empty() || b.empty()) throw std::invalid_argument("empty configuration");
  if (s > rule.levels()) throw std::invalid_argument("rule too short");
  return dist(center_of_mass(a), center_of_mass(b)) > rule.d[static_cast<std::size_t>(s - 1)];
}

namespace detail {

// Parts as index sets into the parent's distinct points.  A part always
// carries a distinct point together with its full multiplicity.
using IndexPart = std::vector<std::size_t>;

inline Configuration part_config(const Configuration& parent, const IndexPart& part) {
  std::vector<Point> pts;
  std::vector<int> ms;
  pts.reserve(part.size());
  ms.reserve(part.size());
  for (std::size_t i : part) {
    pts.push_back(parent.points[i]);
    ms.push_back(parent.mult[i]);
  }
  return Configuration(parent.dim, std::move(pts), std::move(ms));
}

inline void sort_parts(std::vector<IndexPart>& parts) {
  for (auto& p : parts) std::sort(p.begin(), p.end());
  std::sort(parts.begin(), parts.end());
}

// All set partitions of {0..m-1} via restricted growth strings.
inline std::vector<std::vector<IndexPart>> set_partitions(std::size_t m) {
  std::vector<std::vector<IndexPart>> out;
  std::vector<int> rgs(m, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int maxb) {
    if (i == m) {
      int blocks = maxb + 1;
      std::vector<IndexPart> parts(static_cast<std::size_t>(blocks));
      for (std::size_t j = 0; j < m; ++j)
        parts[static_cast<std::size_t>(rgs[j])].push_back(j);
      out.push_back(std::move(parts));
      return;
    }
    for (int b = 0; b <= maxb + 1; ++b) {
      rgs[i] = b;
      rec(i + 1, std::max(maxb, b));
    }
  };
  if (m == 0) {
    out.push_back({});
    return out;
  }
  rec(0, -1);
  return out;
}

}  // namespace detail

/// A partition of the parent multiset into confined, pairwise separated
/// parts.  Validated on construction.
struct ClusterDecomposition {
  Configuration parent;
  std::vector<Configuration> parts;
  ClusteringRule rule;

  ClusterDecomposition(Configuration par, std::vector<Configuration> ps, ClusteringRule ru)
      : parent(std::move(par)), parts(std::move(ps)), rule(std::move(ru)) {
    std::sort(parts.begin(), parts.end(), [](const Configuration& a, const Configuration& b) {
      if (a.points.empty() || b.points.empty()) return b.points.empty() < a.points.empty();
      auto ka = std::make_pair(a.points[0].real(), a.points[0].imag());
      auto kb = std::make_pair(b.points[0].real(), b.points[0].imag());
      return ka < kb;
    });
    validate();
  }

  Partition type() const {
    Partition t;
    t.reserve(parts.size());
    for (const auto& p : parts) t.push_back(p.total_size());
    std::sort(t.rbegin(), t.rend());
    return t;
  }

  /// True if every part of this decomposition is contained in a part of `coarser`.
  bool refines(const ClusterDecomposition& coarser) const {
    for (const auto& p : parts) {
      bool found = false;
      for (const auto& q : coarser.parts) {
        bool contained = true;
        for (const auto& pt : p.points)
          if (std::find(q.points.begin(), q.points.end(), pt) == q.points.end()) {
            contained = false;
            break;
          }
        if (contained) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  }

 private:
  void validate() const {
    Configuration sum;
    sum.dim = parent.dim;
    for (const auto& p : parts) {
      if (p.empty()) throw std::logic_error("cluster decomposition: empty part");
      sum = sum.empty() ? p : sum.plus(p);
      if (!is_confined(p, rule)) throw std::logic_error("cluster decomposition: part not confined");
    }
    if (!(sum == parent)) throw std::logic_error("cluster decomposition: parts do not sum to parent");
    for (std::size_t i = 0; i < parts.size(); ++i)
      for (std::size_t j = i + 1; j < parts.size(); ++j)
        if (!is_separated(parts[i], parts[j], rule))
          throw std::logic_error("cluster decomposition: parts not separated");
  }
};

namespace detail {

inline bool parts_separated(const Configuration& parent, const ClusteringRule& rule,
                            const IndexPart& a, const IndexPart& b) {
  return is_separated(part_config(parent, a), part_config(parent, b), rule);
}

inline bool parts_valid(const Configuration& parent, const ClusteringRule& rule,
                        const std::vector<IndexPart>& parts) {
  for (const auto& p : parts)
    if (!is_confined(part_config(parent, p), rule)) return false;
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = i + 1; j < parts.size(); ++j)
      if (!parts_separated(parent, rule, parts[i], parts[j])) return false;
  return true;
}

inline ClusterDecomposition to_decomposition(const Configuration& parent,
                                             const ClusteringRule& rule,
                                             const std::vector<IndexPart>& parts) {
  std::vector<Configuration> cfgs;
  cfgs.reserve(parts.size());
  for (const auto& p : parts) cfgs.push_back(part_config(parent, p));
  return ClusterDecomposition(parent, std::move(cfgs), rule);
}

// Merge non-separated pairs until all pairs separate.  Pair choice is driven
// by rng; the merging lemma keeps every intermediate part confined.
inline std::vector<IndexPart> merge_loop(const Configuration& parent, const ClusteringRule& rule,
                                         std::vector<IndexPart> parts, SplitMix64 rng) {
  for (;;) {
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (std::size_t i = 0; i < parts.size(); ++i)
      for (std::size_t j = i + 1; j < parts.size(); ++j)
        if (!parts_separated(parent, rule, parts[i], parts[j])) candidates.emplace_back(i, j);
    if (candidates.empty()) break;
    auto [i, j] = candidates[rng.next() % candidates.size()];
    parts[i].insert(parts[i].end(), parts[j].begin(), parts[j].end());
    std::sort(parts[i].begin(), parts[i].end());
    parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(j));
  }
  sort_parts(parts);
  return parts;
}

inline std::vector<IndexPart> singleton_parts(const Configuration& c) {
  std::vector<IndexPart> parts(c.points.size());
  for (std::size_t i = 0; i < c.points.size(); ++i) parts[i] = {i};
  return parts;
}

}  // namespace detail

/// Starts from the multiplicity decomposition and repeatedly merges a
/// non-separated pair (selection order from order_seed).
inline ClusterDecomposition greedy_cluster_decompose(const Configuration& c,
                                                     const ClusteringRule& rule,
                                                     std::uint64_t order_seed = 0) {
  if (c.empty()) throw std::invalid_argument("empty configuration");
  if (c.total_size() > rule.levels()) throw std::invalid_argument("rule too short");
  auto parts = detail::merge_loop(c, rule, detail::singleton_parts(c), SplitMix64(order_seed));
  return detail::to_decomposition(c, rule, parts);
}

/// The meet of all valid cluster decompositions.  Exact (set-partition
/// enumeration) up to `bruteforce_limit` distinct points; above that,
/// intersects greedy outputs over several seeds.
inline ClusterDecomposition finest_decomposition(const Configuration& c,
                                                 const ClusteringRule& rule,
                                                 std::size_t bruteforce_limit = 8) {
  if (c.empty()) throw std::invalid_argument("empty configuration");
  if (c.total_size() > rule.levels()) throw std::invalid_argument("rule too short");
  std::size_t m = c.distinct_count();
  std::vector<std::vector<detail::IndexPart>> valid;
  if (m <= bruteforce_limit) {
    for (auto& parts : detail::set_partitions(m))
      if (detail::parts_valid(c, rule, parts)) valid.push_back(std::move(parts));
  } else {
    for (std::uint64_t seed = 0; seed < 16; ++seed) {
      auto parts = detail::merge_loop(c, rule, detail::singleton_parts(c), SplitMix64(seed));
      valid.push_back(std::move(parts));
    }
  }
  if (valid.empty()) throw std::logic_error("finest_decomposition: no valid decomposition found");
  // meet: group points by their membership signature across all valid decompositions
  std::map<std::vector<std::size_t>, detail::IndexPart> groups;
  for (std::size_t pt = 0; pt < m; ++pt) {
    std::vector<std::size_t> sig;
    sig.reserve(valid.size());
    for (const auto& parts : valid)
      for (std::size_t b = 0; b < parts.size(); ++b)
        if (std::find(parts[b].begin(), parts[b].end(), pt) != parts[b].end()) {
          sig.push_back(b);
          break;
        }
    groups[sig].push_back(pt);
  }
  std::vector<detail::IndexPart> meet;
  meet.reserve(groups.size());
  for (auto& [sig, part] : groups) meet.push_back(part);
  detail::sort_parts(meet);
  if (!detail::parts_valid(c, rule, meet))
    throw std::logic_error("PAPER-VIOLATION: meet of valid decompositions is not valid");
  return detail::to_decomposition(c, rule, meet);
}

namespace detail {

inline std::vector<IndexPart> index_parts_of(const ClusterDecomposition& dec) {
  std::vector<IndexPart> out;
  out.reserve(dec.parts.size());
  for (const auto& part : dec.parts) {
    IndexPart ip;
    for (const auto& pt : part.points) {
      auto it = std::find(dec.parent.points.begin(), dec.parent.points.end(), pt);
      ip.push_back(static_cast<std::size_t>(it - dec.parent.points.begin()));
    }
    std::sort(ip.begin(), ip.end());
    out.push_back(std::move(ip));
  }
  return out;
}

}  // namespace detail

/// Nonempty pairwise intersections of the two part lists.  Validity is
/// asserted (the common-refinement proposition); failure is reported as a
/// violation of the underlying result.
inline ClusterDecomposition common_refinement(const ClusterDecomposition& d1,
                                              const ClusterDecomposition& d2) {
  if (!(d1.parent == d2.parent)) throw std::invalid_argument("common_refinement: parent mismatch");
  auto p1 = detail::index_parts_of(d1);
  auto p2 = detail::index_parts_of(d2);
  std::vector<detail::IndexPart> parts;
  for (const auto& a : p1)
    for (const auto& b : p2) {
      detail::IndexPart inter;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
      if (!inter.empty()) parts.push_back(std::move(inter));
    }
  detail::sort_parts(parts);
  if (!detail::parts_valid(d1.parent, d1.rule, parts))
    throw std::logic_error("PAPER-VIOLATION: common refinement failed validation");
  return detail::to_decomposition(d1.parent, d1.rule, parts);
}

/// Maximal parts under containment (nesting is guaranteed), then the merge
/// loop until separated.
inline ClusterDecomposition common_coarsening(const ClusterDecomposition& d1,
                                              const ClusterDecomposition& d2) {
  if (!(d1.parent == d2.parent)) throw std::invalid_argument("common_coarsening: parent mismatch");
  auto all = detail::index_parts_of(d1);
  auto p2 = detail::index_parts_of(d2);
  all.insert(all.end(), p2.begin(), p2.end());
  std::vector<detail::IndexPart> maximal;
  for (std::size_t i = 0; i < all.size(); ++i) {
    bool strictly_inside = false;
    for (std::size_t j = 0; j < all.size(); ++j) {
      if (all[j].size() <= all[i].size()) continue;
      if (std::includes(all[j].begin(), all[j].end(), all[i].begin(), all[i].end())) {
        strictly_inside = true;
        break;
      }
    }
    if (!strictly_inside) maximal.push_back(all[i]);
  }
  detail::sort_parts(maximal);
  maximal.erase(std::unique(maximal.begin(), maximal.end()), maximal.end());
  auto parts = detail::merge_loop(d1.parent, d1.rule, std::move(maximal), SplitMix64(0));
  return detail::to_decomposition(d1.parent, d1.rule, parts);
}

/// True iff some grouping of the multiset into parts of sizes tau is a
/// cluster decomposition.  Brute force over set partitions of the distinct
/// points.
inline bool stratum_membership(const Configuration& c, const ClusteringRule& rule,
                               const Partition& tau, std::size_t bruteforce_limit = 8) {
  int n = 0;
  for (int t : tau) n += t;
  if (n != c.total_size()) throw std::invalid_argument("stratum_membership: size mismatch");
  if (c.distinct_count() > bruteforce_limit)
    throw std::invalid_argument("stratum_membership: too many distinct points for brute force");
  Partition want = tau;
  std::sort(want.rbegin(), want.rend());
  for (const auto& parts : detail::set_partitions(c.distinct_count())) {
    Partition got;
    got.reserve(parts.size());
    for (const auto& p : parts) {
      int s = 0;
      for (std::size_t i : p) s += c.mult[i];
      got.push_back(s);
    }
    std::sort(got.rbegin(), got.rend());
    if (got == want && detail::parts_valid(c, rule, parts)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Center-of-mass function check

struct CmOptions {
  double tol = 1e-9;
  int trials_per_sample = 8;
  double scale_fraction = 0.25;  // perturbation size as a fraction of confinement slack
  std::uint64_t seed = 1;
};

struct CmReport {
  bool pass = true;
  double max_change = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::vector<std::string> notes;
};

/// Perturbs each sample within its type-tau decomposition, preserving every
/// part's center of mass and confinement, and reports the largest |f change|.
/// Samples that do not lie in the claimed stratum are skipped with a note.
inline CmReport is_cm_function(const std::function<double(const Configuration&)>& f,
                               const std::vector<Configuration>& samples, const Partition& tau,
                               const ClusteringRule& rule, const CmOptions& opt = {}) {
  CmReport rep;
  SplitMix64 rng(opt.seed);
  for (const auto& sample : samples) {
    // locate a type-tau decomposition
    Partition want = tau;
    std::sort(want.rbegin(), want.rend());
    std::optional<std::vector<detail::IndexPart>> found;
    if (sample.distinct_count() <= 8 && sample.total_size() == [&] {
          int s = 0;
          for (int t : want) s += t;
          return s;
        }()) {
      for (const auto& parts : detail::set_partitions(sample.distinct_count())) {
        Partition got;
        for (const auto& p : parts) {
          int s = 0;
          for (std::size_t i : p) s += sample.mult[i];
          got.push_back(s);
        }
        std::sort(got.rbegin(), got.rend());
        if (got == want && detail::parts_valid(sample, rule, parts)) {
          found = parts;
          break;
        }
      }
    }
    if (!found) {
      ++rep.skipped;
      rep.notes.push_back("sample not in claimed stratum; skipped");
      continue;
    }
    double base = f(sample);
    for (int trial = 0; trial < opt.trials_per_sample; ++trial) {
      // Build a perturbed configuration: expand each part's points and add
      // zero-mean offsets small enough to keep the part confined.
      std::vector<Point> pts;
      std::vector<int> ms;
      for (const auto& part : *found) {
        Configuration pc = detail::part_config(sample, part);
        int k = pc.total_size();
        double slack = rule.r[static_cast<std::size_t>(k - 1)] - radius(pc);
        double scale = opt.scale_fraction * slack / 2.0;
        auto expanded = pc.expanded();
        if (k == 1) {
          pts.push_back(expanded[0]);
          ms.push_back(1);
          continue;
        }
        std::vector<Point> offs(expanded.size());
        Point mean{0.0, 0.0};
        for (auto& o : offs) {
          double ox = rng.uniform(-scale, scale);
          double oy = sample.dim == 2 ? rng.uniform(-scale, scale) : 0.0;
          o = Point(ox, oy);
          mean += o;
        }
        mean /= static_cast<double>(offs.size());
        for (std::size_t i = 0; i < expanded.size(); ++i) {
          pts.push_back(expanded[i] + (offs[i] - mean));
          ms.push_back(1);
        }
      }
      Configuration perturbed(sample.dim, pts, ms);
      rep.max_change = std::max(rep.max_change, std::abs(f(perturbed) - base));
    }
    ++rep.checked;
  }
  rep.pass = rep.max_change <= opt.tol;
  return rep;
}

}  // namespace symsector
