#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dydap/access_graph.hpp"
#include "dydap/common.hpp"

namespace dydap {

// Slack applied to every tolerance comparison so that shares like 1/3
// do not fail a tight bound through rounding alone.
inline constexpr double kToleranceEps = 1e-9;

struct PartitionSpec {
  std::uint32_t num_parts = 2;
  // Max allowed imbalance per constraint; missing entries default to 1.05.
  std::vector<double> tolerance;

  double tolerance_for(std::uint64_t i) const {
    return i < tolerance.size() ? tolerance[i] : 1.05;
  }

  void validate() const {
    if (num_parts < 1)
      throw std::invalid_argument("PartitionSpec: num_parts must be >= 1");
    for (double c : tolerance)
      if (c < 1.0)
        throw std::invalid_argument("PartitionSpec: tolerances must be >= 1");
  }
};

struct Partitioning {
  std::vector<std::uint32_t> assignment;  // extent -> part

  bool operator==(const Partitioning&) const = default;
};

struct PartitionMetrics {
  double edge_cut = 0.0;
  std::vector<double> imbalance;  // l_i = num_parts * max part share
};

// Total map from extent ids to node ids.
struct DistributionFunction {
  std::vector<std::uint32_t> node_of;
  std::uint32_t num_nodes = 1;

  std::uint32_t operator()(extent_id e) const { return node_of[e]; }
  std::uint64_t size() const { return node_of.size(); }
  bool operator==(const DistributionFunction&) const = default;
};

inline PartitionMetrics evaluate(const AccessGraph& g,
                                 const ConstraintMatrix& c,
                                 const PartitionSpec& spec,
                                 const Partitioning& p) {
  const std::uint64_t n = g.size();
  if (c.size() != n || p.assignment.size() != n)
    throw std::invalid_argument("evaluate: dimension mismatch");
  for (std::uint32_t part : p.assignment)
    if (part >= spec.num_parts)
      throw std::invalid_argument("evaluate: part id out of range");
  PartitionMetrics m;
  for (std::uint64_t u = 0; u < n; ++u)
    for (std::uint64_t v = u + 1; v < n; ++v)
      if (p.assignment[u] != p.assignment[v]) m.edge_cut += g.weight(u, v);
  m.imbalance.assign(c.num_constraints(), 0.0);
  std::vector<double> part_sum(spec.num_parts);
  for (std::uint64_t i = 0; i < c.num_constraints(); ++i) {
    std::fill(part_sum.begin(), part_sum.end(), 0.0);
    for (std::uint64_t v = 0; v < n; ++v)
      part_sum[p.assignment[v]] += c.at(v, i);
    m.imbalance[i] = spec.num_parts *
                     *std::max_element(part_sum.begin(), part_sum.end());
  }
  return m;
}

namespace detail {

inline bool within_tolerance(const PartitionMetrics& m,
                             const PartitionSpec& spec) {
  for (std::size_t i = 0; i < m.imbalance.size(); ++i)
    if (m.imbalance[i] > spec.tolerance_for(i) + kToleranceEps) return false;
  return true;
}

// Tracks per-part per-constraint sums incrementally during search.
class BalanceState {
 public:
  BalanceState(const ConstraintMatrix& c, const PartitionSpec& spec)
      : c_(&c), spec_(&spec),
        sums_(spec.num_parts * c.num_constraints(), 0.0) {}

  void add(std::uint64_t v, std::uint32_t part) { apply(v, part, 1.0); }
  void remove(std::uint64_t v, std::uint32_t part) { apply(v, part, -1.0); }

  // True if placing would keep `part` within every constraint's budget,
  // i.e. part share <= (c_i + eps) / num_parts, the same bound
  // within_tolerance applies to the full imbalance.
  bool fits(std::uint64_t v, std::uint32_t part) const {
    for (std::uint64_t i = 0; i < c_->num_constraints(); ++i) {
      const double budget =
          (spec_->tolerance_for(i) + kToleranceEps) / spec_->num_parts;
      if (sum(part, i) + c_->at(v, i) > budget) return false;
    }
    return true;
  }

  double sum(std::uint32_t part, std::uint64_t i) const {
    return sums_[part * c_->num_constraints() + i];
  }

 private:
  void apply(std::uint64_t v, std::uint32_t part, double sign) {
    for (std::uint64_t i = 0; i < c_->num_constraints(); ++i)
      sums_[part * c_->num_constraints() + i] += sign * c_->at(v, i);
  }

  const ConstraintMatrix* c_;
  const PartitionSpec* spec_;
  std::vector<double> sums_;
};

}  // namespace detail

namespace detail {

struct ExhaustiveSearch {
  const AccessGraph& g;
  const ConstraintMatrix& c;
  const PartitionSpec& spec;
  Partitioning current;
  BalanceState balance;
  std::optional<Partitioning> best;
  double best_cut = std::numeric_limits<double>::infinity();

  ExhaustiveSearch(const AccessGraph& g_, const ConstraintMatrix& c_,
                   const PartitionSpec& spec_)
      : g(g_), c(c_), spec(spec_),
        current{std::vector<std::uint32_t>(g_.size(), 0)},
        balance(c_, spec_) {}

  // Depth-first over restricted growth strings (parts tried in ascending
  // order), pruning prefixes whose cut already meets the best or whose part
  // sums already blow a constraint budget. Ascending order means ties keep
  // the lexicographically smallest canonical assignment.
  void descend(std::uint64_t v, std::uint32_t max_used, double cut) {
    if (v == g.size()) {
      if (cut < best_cut) {
        best_cut = cut;
        best = current;
      }
      return;
    }
    const std::uint32_t limit =
        std::min<std::uint32_t>(max_used + 1, spec.num_parts - 1);
    for (std::uint32_t part = 0; part <= limit; ++part) {
      if (!balance.fits(v, part)) continue;
      double added = 0.0;
      for (std::uint64_t u = 0; u < v; ++u)
        if (current.assignment[u] != part) added += g.weight(u, v);
      if (cut + added >= best_cut) continue;
      current.assignment[v] = part;
      balance.add(v, part);
      descend(v + 1, std::max(max_used, part), cut + added);
      balance.remove(v, part);
    }
  }
};

}  // namespace detail

// Global optimum by enumeration of canonical assignments (restricted growth
// strings: vertex 0 pinned to part 0, each later vertex at most one part
// beyond the maximum used so far). Every relabeling class is visited exactly
// once, so the tie-break is the lexicographically smallest canonical
// representative.
inline Partitioning partition_exhaustive(const AccessGraph& g,
                                         const ConstraintMatrix& c,
                                         const PartitionSpec& spec) {
  spec.validate();
  const std::uint64_t n = g.size();
  if (n == 0) throw std::invalid_argument("partition_exhaustive: empty graph");
  if (c.size() != n)
    throw std::invalid_argument("partition_exhaustive: dimension mismatch");
  double space = 1.0;
  for (std::uint64_t v = 1; v < n; ++v) space *= spec.num_parts;
  if (space > 1e6)
    throw guard_error("partition_exhaustive: search space above 10^6");

  detail::ExhaustiveSearch search(g, c, spec);
  search.balance.add(0, 0);
  search.current.assignment[0] = 0;
  search.descend(1, 0, 0.0);
  if (!search.best)
    throw infeasible_error(
        "partition_exhaustive: no assignment satisfies the tolerances");
  return *search.best;
}

namespace detail {

// connection[v][p] = total edge weight between v and part p.
class ConnectionTable {
 public:
  ConnectionTable(const AccessGraph& g, std::uint32_t parts)
      : g_(&g), parts_(parts), conn_(g.size() * parts, 0.0) {}

  double at(std::uint64_t v, std::uint32_t p) const {
    return conn_[v * parts_ + p];
  }

  void place(std::uint64_t v, std::uint32_t p) {
    for (std::uint64_t u = 0; u < g_->size(); ++u) {
      const double w = g_->weight(u, v);
      if (w > 0.0) conn_[u * parts_ + p] += w;
    }
  }

  void unplace(std::uint64_t v, std::uint32_t p) {
    for (std::uint64_t u = 0; u < g_->size(); ++u) {
      const double w = g_->weight(u, v);
      if (w > 0.0) conn_[u * parts_ + p] -= w;
    }
  }

 private:
  const AccessGraph* g_;
  std::uint32_t parts_;
  std::vector<double> conn_;
};

struct Candidate {
  Partitioning partitioning;
  double cut = std::numeric_limits<double>::infinity();
  bool feasible = false;
};

// Move-based refinement: repeated passes over the vertices, moving one
// vertex at a time when the move strictly reduces the cut and keeps every
// constraint inside tolerance. Stops on a moveless pass or at the pass cap.
inline void refine(const AccessGraph& g, const PartitionSpec& spec,
                   Partitioning& p, BalanceState& balance,
                   ConnectionTable& conn, int max_passes) {
  const std::uint64_t n = g.size();
  for (int pass = 0; pass < max_passes; ++pass) {
    bool moved = false;
    for (std::uint64_t v = 0; v < n; ++v) {
      const std::uint32_t from = p.assignment[v];
      std::uint32_t best_part = from;
      double best_gain = 0.0;
      for (std::uint32_t q = 0; q < spec.num_parts; ++q) {
        if (q == from) continue;
        const double gain = conn.at(v, q) - conn.at(v, from);
        if (gain > best_gain + 1e-12 && balance.fits(v, q)) {
          best_gain = gain;
          best_part = q;
        }
      }
      if (best_part != from) {
        balance.remove(v, from);
        balance.add(v, best_part);
        conn.unplace(v, from);
        conn.place(v, best_part);
        p.assignment[v] = best_part;
        moved = true;
      }
    }
    if (!moved) break;
  }
}

inline Candidate finish_candidate(const AccessGraph& g,
                                  const ConstraintMatrix& c,
                                  const PartitionSpec& spec, Partitioning p,
                                  int max_passes) {
  BalanceState balance(c, spec);
  ConnectionTable conn(g, spec.num_parts);
  for (std::uint64_t v = 0; v < g.size(); ++v) {
    balance.add(v, p.assignment[v]);
    conn.place(v, p.assignment[v]);
  }
  refine(g, spec, p, balance, conn, max_passes);
  Candidate cand;
  PartitionMetrics m = evaluate(g, c, spec, p);
  cand.partitioning = std::move(p);
  cand.cut = m.edge_cut;
  cand.feasible = within_tolerance(m, spec);
  return cand;
}

// Deals vertices round-robin in (constraint-profile, id) order. For the
// uniform + indicator constraints used here this start is within one vertex
// of perfect balance on every constraint simultaneously.
inline Partitioning dealt_start(const ConstraintMatrix& c,
                                const PartitionSpec& spec) {
  const std::uint64_t n = c.size();
  std::vector<std::uint64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint64_t a, std::uint64_t b) {
                     for (std::uint64_t i = 1; i < c.num_constraints(); ++i) {
                       if (c.at(a, i) != c.at(b, i))
                         return c.at(a, i) > c.at(b, i);
                     }
                     return a < b;
                   });
  Partitioning p{std::vector<std::uint32_t>(n, 0)};
  for (std::uint64_t idx = 0; idx < n; ++idx)
    p.assignment[order[idx]] = static_cast<std::uint32_t>(idx % spec.num_parts);
  return p;
}

// Grows all fronts at once: repeatedly commits the unassigned vertex with
// the strongest connection to any part that still has budget for it.
inline Partitioning grown_start(const AccessGraph& g, const ConstraintMatrix& c,
                                const PartitionSpec& spec,
                                const std::vector<std::uint64_t>& seeds) {
  const std::uint64_t n = g.size();
  Partitioning p{std::vector<std::uint32_t>(n, 0)};
  std::vector<bool> assigned(n, false);
  BalanceState balance(c, spec);
  ConnectionTable conn(g, spec.num_parts);
  std::uint64_t placed = 0;

  auto commit = [&](std::uint64_t v, std::uint32_t part) {
    p.assignment[v] = part;
    assigned[v] = true;
    balance.add(v, part);
    conn.place(v, part);
    ++placed;
  };

  for (std::uint32_t q = 0; q < spec.num_parts && q < seeds.size(); ++q)
    if (!assigned[seeds[q]]) commit(seeds[q], q);

  while (placed < n) {
    std::uint64_t best_v = n;
    std::uint32_t best_p = 0;
    double best_key = -1.0;
    for (std::uint64_t v = 0; v < n; ++v) {
      if (assigned[v]) continue;
      for (std::uint32_t q = 0; q < spec.num_parts; ++q) {
        if (!balance.fits(v, q)) continue;
        const double key = conn.at(v, q);
        if (key > best_key) {
          best_key = key;
          best_v = v;
          best_p = q;
        }
      }
    }
    if (best_v == n) {
      // No placement fits every budget; fall back to the least-loaded part
      // for the first unassigned vertex and let refinement repair.
      for (std::uint64_t v = 0; v < n && placed < n; ++v) {
        if (assigned[v]) continue;
        std::uint32_t lightest = 0;
        for (std::uint32_t q = 1; q < spec.num_parts; ++q)
          if (balance.sum(q, 0) < balance.sum(lightest, 0)) lightest = q;
        commit(v, lightest);
      }
      break;
    }
    commit(best_v, best_p);
  }
  return p;
}

}  // namespace detail

// Greedy multi-start heuristic for the multiconstraint min-cut problem.
// Candidate starts (balanced deal, seeded region growing, caller hints) are
// each refined by move passes; the best feasible result wins. Deterministic
// for a fixed seed and hint list.
inline Partitioning partition_heuristic(
    const AccessGraph& g, const ConstraintMatrix& c, const PartitionSpec& spec,
    std::uint64_t seed, const std::vector<Partitioning>& hints = {},
    int max_passes = 32) {
  spec.validate();
  const std::uint64_t n = g.size();
  if (n == 0) throw std::invalid_argument("partition_heuristic: empty graph");
  if (c.size() != n)
    throw std::invalid_argument("partition_heuristic: dimension mismatch");
  if (spec.num_parts == 1)
    return Partitioning{std::vector<std::uint32_t>(n, 0)};

  std::vector<Partitioning> starts;
  starts.push_back(detail::dealt_start(c, spec));

  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t restarts = std::min<std::size_t>(n, 8);
  for (std::size_t r = 0; r < restarts; ++r) {
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < spec.num_parts; ++i)
      seeds.push_back(order[(r + i * restarts) % n]);
    starts.push_back(detail::grown_start(g, c, spec, seeds));
  }
  for (const Partitioning& h : hints) {
    if (h.assignment.size() != n) continue;
    bool in_range = true;
    for (std::uint32_t part : h.assignment)
      if (part >= spec.num_parts) in_range = false;
    if (in_range) starts.push_back(h);
  }

  detail::Candidate best;
  for (Partitioning& start : starts) {
    detail::Candidate cand =
        detail::finish_candidate(g, c, spec, std::move(start), max_passes);
    if (!cand.feasible) continue;
    if (!best.feasible || cand.cut < best.cut) best = std::move(cand);
  }
  if (!best.feasible)
    throw infeasible_error(
        "partition_heuristic: no start satisfied the tolerances");
  return best.partitioning;
}

// The solved partitioning read as a placement map: part ids become node ids.
inline DistributionFunction derive_distribution(const Partitioning& p,
                                                std::uint32_t num_nodes) {
  DistributionFunction df;
  df.node_of = p.assignment;
  df.num_nodes = num_nodes;
  return df;
}

// CSV with header: extent_id,node_id.
inline void write_partitioning_csv(const DistributionFunction& df,
                                   std::ostream& os) {
  os << "extent_id,node_id\n";
  for (std::uint64_t e = 0; e < df.size(); ++e)
    os << e << ',' << df.node_of[e] << '\n';
}

}  // namespace dydap
