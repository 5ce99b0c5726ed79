#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <variant>
#include <vector>

#include "dydap/access_graph.hpp"
#include "dydap/common.hpp"
#include "dydap/dn_tree.hpp"
#include "dydap/dn_tree_io.hpp"
#include "dydap/partition.hpp"
#include "dydap/synthetic_graph.hpp"
#include "dydap/workload.hpp"

namespace dydap {

// Static baseline placement: extent e lives on node e mod n.
inline DistributionFunction hash_distribution(std::uint64_t extents,
                                              std::uint32_t nodes) {
  DistributionFunction df;
  df.num_nodes = nodes;
  df.node_of.resize(extents);
  for (std::uint64_t e = 0; e < extents; ++e)
    df.node_of[e] = static_cast<std::uint32_t>(e % nodes);
  return df;
}

struct BfsQuery {
  std::vector<std::uint64_t> roots;  // multi-source frontier of phase 0
  std::uint32_t max_phases = 10;

  BfsQuery() = default;
  BfsQuery(std::uint64_t root, std::uint32_t phases)
      : roots{root}, max_phases(phases) {}
};

// First hop over type-0 links, second hop over the type-1 lists of the
// vertices found.
struct TwoHopQuery {
  std::uint64_t user = 0;
};

using Query = std::variant<BfsQuery, TwoHopQuery>;

// Per-phase, per-node record of one simulated query. Loads count extent
// accesses (one per frontier vertex processed); costs apply the cache
// discount; net_in counts cross-node extent transitions charged to the
// receiving node at the boundary after each phase.
struct BspTrace {
  std::vector<std::vector<std::uint64_t>> loads;   // [phase][node]
  std::vector<std::vector<double>> costs;          // [phase][node]
  std::vector<std::vector<std::uint64_t>> net_in;  // [phase][node]
  std::uint64_t edges_traversed = 0;
  std::uint64_t extents_accessed = 0;

  std::size_t num_phases() const { return loads.size(); }
};

struct BspOptions {
  std::vector<DnTree>* recorders = nullptr;  // one tree per node
  std::uint64_t freeze_after = 0;            // stop recording past this; 0 = never
  // Extents whose owner matches this map are charged cache_factor per access.
  const DistributionFunction* cache_residency = nullptr;
  double cache_factor = 0.5;
};

namespace detail {

inline void record_transition(std::vector<DnTree>* recorders,
                              std::uint32_t node, extent_id from, extent_id to,
                              std::uint64_t freeze_after) {
  if (!recorders) return;
  DnTree& tree = (*recorders)[node];
  if (freeze_after != 0 && tree.total_recorded() >= freeze_after) return;
  tree.record(from, to);
}

}  // namespace detail

// Deterministic bulk-synchronous execution of one query. Each phase
// processes the frontier in ascending (extent, vertex) order; every frontier
// vertex costs one access to its adjacency extent on the owning node. A
// node's consecutive distinct extent accesses within the phase are recorded
// into its tree. Newly discovered work defines the extent transitions of the
// following boundary: distinct (source extent, target extent) pairs, each
// recorded at the source extent's node and, when the ends live on different
// nodes, charged one network unit to the receiving node.
inline BspTrace run_query_bsp(const SyntheticGraph& graph,
                              const DistributionFunction& df,
                              const Query& query, const BspOptions& opts = {}) {
  if (df.size() != graph.num_extents())
    throw std::invalid_argument("run_query_bsp: distribution size mismatch");
  const std::uint32_t nodes = df.num_nodes;
  BspTrace trace;

  const bool is_bfs = std::holds_alternative<BfsQuery>(query);
  std::vector<std::uint64_t> frontier;
  std::uint32_t max_phases;
  if (is_bfs) {
    const auto& q = std::get<BfsQuery>(query);
    if (q.roots.empty())
      throw std::invalid_argument("run_query_bsp: BFS needs a root");
    frontier = q.roots;
    max_phases = q.max_phases;
  } else {
    frontier = {std::get<TwoHopQuery>(query).user};
    max_phases = 2;
  }
  for (std::uint64_t v : frontier)
    if (v >= graph.num_vertices())
      throw std::invalid_argument("run_query_bsp: start vertex out of range");
  if (!is_bfs && graph.num_types() < 2)
    throw std::invalid_argument("run_query_bsp: two-hop needs a typed graph");

  std::vector<bool> visited(graph.num_vertices(), false);
  for (std::uint64_t v : frontier) visited[v] = true;

  for (std::uint32_t phase = 0; phase < max_phases && !frontier.empty();
       ++phase) {
    const std::uint32_t access_type = is_bfs ? 0 : (phase == 0 ? 0 : 1);
    const std::uint32_t expand_type = access_type;
    // Type of the extent the next phase will read for a discovered vertex.
    const std::uint32_t target_type = is_bfs ? 0 : 1;

    std::sort(frontier.begin(), frontier.end(),
              [&](std::uint64_t a, std::uint64_t b) {
                const extent_id ea = graph.extent_of(access_type, a);
                const extent_id eb = graph.extent_of(access_type, b);
                return ea != eb ? ea < eb : a < b;
              });

    trace.loads.emplace_back(nodes, 0);
    trace.costs.emplace_back(nodes, 0.0);
    std::vector<std::uint64_t>& loads = trace.loads.back();
    std::vector<double>& costs = trace.costs.back();

    // Access pass: one extent access per frontier vertex, recorded as a
    // transition whenever a node's access stream changes extent.
    std::vector<extent_id> last_extent(nodes, 0);
    std::vector<bool> node_touched(nodes, false);
    for (std::uint64_t v : frontier) {
      const extent_id e = graph.extent_of(access_type, v);
      const std::uint32_t node = df(e);
      ++loads[node];
      ++trace.extents_accessed;
      double unit = 1.0;
      if (opts.cache_residency && (*opts.cache_residency)(e) == node)
        unit = opts.cache_factor;
      costs[node] += unit;
      if (node_touched[node] && last_extent[node] != e)
        detail::record_transition(opts.recorders, node, last_extent[node], e,
                                  opts.freeze_after);
      last_extent[node] = e;
      node_touched[node] = true;
    }

    // Expansion pass: discover next frontier, collect extent transitions.
    std::vector<std::uint64_t> next;
    std::set<std::pair<extent_id, extent_id>> handoffs;
    const bool last_hop_of_two = !is_bfs && phase == 1;
    for (std::uint64_t v : frontier) {
      const extent_id src = graph.extent_of(access_type, v);
      for (std::uint64_t u : graph.neighbors(expand_type, v)) {
        ++trace.edges_traversed;
        if (last_hop_of_two) continue;  // second-hop results are terminal
        if (!visited[u]) {
          visited[u] = true;
          next.push_back(u);
          handoffs.insert({src, graph.extent_of(target_type, u)});
        }
      }
    }

    const bool next_phase_runs = !next.empty() && phase + 1 < max_phases;
    if (next_phase_runs) {
      trace.net_in.emplace_back(nodes, 0);
      std::vector<std::uint64_t>& net = trace.net_in.back();
      for (const auto& [src, dst] : handoffs) {
        detail::record_transition(opts.recorders, df(src), src, dst,
                                  opts.freeze_after);
        if (df(src) != df(dst)) ++net[df(dst)];
      }
      frontier = std::move(next);
    } else {
      trace.net_in.emplace_back(nodes, 0);  // final boundary carries nothing
      frontier.clear();
    }
  }
  return trace;
}

struct RunMetrics {
  double time_units = 0.0;  // sum over phases of the slowest node's cost
  double net_units = 0.0;   // total cross-node extent transitions
  double makespan = 0.0;    // time_units + net_units
  double teps_proxy = 0.0;  // edges traversed per makespan unit
  std::vector<double> load_stddev;  // per phase, across nodes
  std::vector<double> net_stddev;   // per boundary, across nodes
  std::uint64_t edge_cut_messages = 0;
  std::uint64_t edges_traversed = 0;
  std::uint64_t extents_accessed = 0;

  double mean_load_stddev() const {
    if (load_stddev.empty()) return 0.0;
    double s = 0.0;
    for (double v : load_stddev) s += v;
    return s / static_cast<double>(load_stddev.size());
  }
};

namespace detail {

template <typename T>
double population_stddev(const std::vector<T>& values) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (T v : values) mean += static_cast<double>(v);
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (T v : values) {
    const double d = static_cast<double>(v) - mean;
    var += d * d;
  }
  return std::sqrt(var / static_cast<double>(values.size()));
}

}  // namespace detail

inline RunMetrics metrics(std::span<const BspTrace> traces) {
  RunMetrics m;
  for (const BspTrace& trace : traces) {
    m.edges_traversed += trace.edges_traversed;
    m.extents_accessed += trace.extents_accessed;
    for (std::size_t p = 0; p < trace.num_phases(); ++p) {
      m.time_units +=
          *std::max_element(trace.costs[p].begin(), trace.costs[p].end());
      m.load_stddev.push_back(detail::population_stddev(trace.loads[p]));
      std::uint64_t boundary_total = 0;
      for (std::uint64_t units : trace.net_in[p]) boundary_total += units;
      m.net_units += static_cast<double>(boundary_total);
      m.edge_cut_messages += boundary_total;
      m.net_stddev.push_back(detail::population_stddev(trace.net_in[p]));
    }
  }
  m.makespan = m.time_units + m.net_units;
  m.teps_proxy = m.makespan > 0.0
                     ? static_cast<double>(m.edges_traversed) / m.makespan
                     : 0.0;
  return m;
}

inline RunMetrics metrics(const BspTrace& trace) {
  return metrics(std::span<const BspTrace>(&trace, 1));
}

struct ClusterConfig {
  std::uint32_t num_nodes = 4;
  std::uint64_t base_threshold = 16;      // DN-tree t
  double growth_factor = 1.5;             // DN-tree k
  std::uint32_t repartition_interval = 2; // queries per cycle
  std::uint64_t freeze_after = 0;         // accesses per node tree; 0 = never
  double tolerance = 1.05;
  double cache_factor = 0.5;
  std::uint64_t partition_seed = 1;
  bool reset_trees_after_cycle = false;
};

// One simulated cluster: a distribution function plus one DN-tree per node.
class SimCluster {
 public:
  SimCluster(const SyntheticGraph& graph, ClusterConfig config)
      : graph_(&graph), config_(config),
        df_(hash_distribution(graph.num_extents(), config.num_nodes)) {
    DnTreeConfig tree_config{config.base_threshold, config.growth_factor,
                             graph.num_extents()};
    for (std::uint32_t n = 0; n < config.num_nodes; ++n)
      trees_.emplace_back(tree_config);
  }

  const DistributionFunction& distribution() const { return df_; }
  const ClusterConfig& config() const { return config_; }
  std::vector<DnTree>& trees() { return trees_; }
  const std::vector<DnTree>& trees() const { return trees_; }
  std::uint64_t remapped_extents() const { return remapped_; }

  BspTrace run_recorded(const Query& query) {
    BspOptions opts;
    opts.recorders = &trees_;
    opts.freeze_after = config_.freeze_after;
    return run_query_bsp(*graph_, df_, query, opts);
  }

  std::uint64_t recorded_total() const {
    std::uint64_t total = 0;
    for (const DnTree& t : trees_) total += t.total_recorded();
    return total;
  }

  // Merges all node summaries, rebuilds the access graph and constraints,
  // and solves for a new placement. Current and hash placements join the
  // heuristic's candidate list, so the result never cuts more of the
  // recorded transition mass than either. Returns false (placement kept)
  // when nothing has been recorded yet.
  bool repartition_cycle() {
    if (recorded_total() == 0) return false;
    std::vector<SerializedDnTree> parts;
    parts.reserve(trees_.size());
    for (const DnTree& t : trees_) parts.push_back(serialize(t));
    const AggregationResult agg = aggregate(std::move(parts));
    const DnTree merged = deserialize(agg.tree);
    const TransitionMatrix m_hat = merged.reconstruct_matrix();

    const AccessGraph g = build_access_graph(m_hat);
    const ConstraintMatrix constraints = ConstraintMatrix::with_ds_tags(
        graph_->ds_tags(), graph_->num_types());
    PartitionSpec spec;
    spec.num_parts = config_.num_nodes;
    spec.tolerance.assign(constraints.num_constraints(), config_.tolerance);

    const DistributionFunction hash =
        hash_distribution(graph_->num_extents(), config_.num_nodes);
    const Partitioning solved = partition_heuristic(
        g, constraints, spec, config_.partition_seed,
        {Partitioning{df_.node_of}, Partitioning{hash.node_of}});
    DistributionFunction next = derive_distribution(solved, config_.num_nodes);
    for (std::uint64_t e = 0; e < next.size(); ++e)
      if (next.node_of[e] != df_.node_of[e]) ++remapped_;
    df_ = std::move(next);
    if (config_.reset_trees_after_cycle) {
      DnTreeConfig tree_config{config_.base_threshold, config_.growth_factor,
                               graph_->num_extents()};
      trees_.clear();
      for (std::uint32_t n = 0; n < config_.num_nodes; ++n)
        trees_.emplace_back(tree_config);
    }
    return true;
  }

 private:
  const SyntheticGraph* graph_;
  ClusterConfig config_;
  DistributionFunction df_;
  std::vector<DnTree> trees_;
  std::uint64_t remapped_ = 0;
};

struct ExecutionResult {
  RunMetrics run;
  std::vector<BspTrace> traces;
};

struct ComparisonResult {
  ExecutionResult static1;
  ExecutionResult dydap1;
  ExecutionResult dydap2;
  DistributionFunction final_df;
  std::uint64_t remapped_extents = 0;
  // Edge cut of the recorded transition graph under both placements; the
  // adaptive placement never exceeds the hash baseline here.
  double recorded_cut_dydap = 0.0;
  double recorded_cut_hash = 0.0;
};

// The two-execution protocol: the workload runs once under the static hash
// placement; once under the adaptive loop starting from hash (recording, a
// repartition every repartition_interval queries and a final one); and once
// more re-using the final placement with warm caches.
inline ComparisonResult compare_systems(const SyntheticGraph& graph,
                                        const std::vector<Query>& workload,
                                        const ClusterConfig& config) {
  ComparisonResult result;
  const DistributionFunction hash =
      hash_distribution(graph.num_extents(), config.num_nodes);

  for (const Query& q : workload)
    result.static1.traces.push_back(run_query_bsp(graph, hash, q));
  result.static1.run = metrics(result.static1.traces);

  SimCluster cluster(graph, config);
  std::uint32_t since_cycle = 0;
  for (const Query& q : workload) {
    result.dydap1.traces.push_back(cluster.run_recorded(q));
    if (++since_cycle == config.repartition_interval) {
      cluster.repartition_cycle();
      since_cycle = 0;
    }
  }
  if (since_cycle > 0) cluster.repartition_cycle();
  result.dydap1.run = metrics(result.dydap1.traces);
  result.final_df = cluster.distribution();
  result.remapped_extents = cluster.remapped_extents();

  BspOptions warm;
  warm.recorders = &cluster.trees();
  warm.freeze_after = config.freeze_after;
  warm.cache_residency = &result.final_df;
  warm.cache_factor = config.cache_factor;
  for (const Query& q : workload)
    result.dydap2.traces.push_back(
        run_query_bsp(graph, result.final_df, q, warm));
  result.dydap2.run = metrics(result.dydap2.traces);

  // Cut of the recorded transition graph under both placements.
  std::vector<SerializedDnTree> parts;
  for (const DnTree& t : cluster.trees()) parts.push_back(serialize(t));
  if (cluster.recorded_total() > 0) {
    const DnTree merged = deserialize(aggregate(std::move(parts)).tree);
    const AccessGraph g = build_access_graph(merged.reconstruct_matrix());
    const ConstraintMatrix constraints =
        ConstraintMatrix::with_ds_tags(graph.ds_tags(), graph.num_types());
    PartitionSpec spec;
    spec.num_parts = config.num_nodes;
    spec.tolerance.assign(constraints.num_constraints(), config.tolerance);
    result.recorded_cut_dydap =
        evaluate(g, constraints, spec, Partitioning{result.final_df.node_of})
            .edge_cut;
    result.recorded_cut_hash =
        evaluate(g, constraints, spec, Partitioning{hash.node_of}).edge_cut;
  }
  return result;
}

// --- CSV emission (stable columns, headers included) ---

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace detail

inline void write_trace_csv(std::span<const BspTrace> traces,
                            std::ostream& os) {
  os << "phase,node,load,net_in\n";
  std::size_t phase = 0;
  for (const BspTrace& trace : traces) {
    for (std::size_t p = 0; p < trace.num_phases(); ++p, ++phase) {
      for (std::size_t node = 0; node < trace.loads[p].size(); ++node) {
        os << phase << ',' << node << ',' << trace.loads[p][node] << ','
           << trace.net_in[p][node] << '\n';
      }
    }
  }
}

inline void write_stddev_csv(const RunMetrics& m, std::ostream& os) {
  os << "phase,load_stddev,net_stddev\n";
  for (std::size_t p = 0; p < m.load_stddev.size(); ++p) {
    const double net = p < m.net_stddev.size() ? m.net_stddev[p] : 0.0;
    os << p << ',' << detail::fmt_double(m.load_stddev[p]) << ','
       << detail::fmt_double(net) << '\n';
  }
}

inline void write_metrics_csv(const ComparisonResult& result,
                              std::ostream& os) {
  os << "system,execution,makespan,teps_proxy,edge_cut_messages\n";
  auto row = [&](const char* system, int execution, const RunMetrics& m) {
    os << system << ',' << execution << ',' << detail::fmt_double(m.makespan)
       << ',' << detail::fmt_double(m.teps_proxy) << ','
       << m.edge_cut_messages << '\n';
  };
  row("static", 1, result.static1.run);
  row("dydap", 1, result.dydap1.run);
  row("dydap", 2, result.dydap2.run);
}

}  // namespace dydap
