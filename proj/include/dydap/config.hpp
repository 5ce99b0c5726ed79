#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dydap/simulator.hpp"

namespace dydap {

// "key = value" lines; '#' starts a comment; later keys win.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& is) {
    KeyValueConfig cfg;
    std::string line;
    while (std::getline(is, line)) {
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        if (line.find_first_not_of(" \t\r") != std::string::npos)
          throw format_error("config: expected 'key = value': " + line);
        continue;
      }
      cfg.values_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
  }

  static KeyValueConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse(in);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stoull(it->second);
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stod(it->second);
  }

  std::vector<std::uint64_t> get_u64_list(const std::string& key) const {
    std::vector<std::uint64_t> out;
    auto it = values_.find(key);
    if (it == values_.end()) return out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    const std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  std::map<std::string, std::string> values_;
};

// Full description of one comparison experiment: graph, workload, cluster.
struct SimulationSetup {
  std::string workload_kind = "bfs";  // bfs | two-hop
  unsigned scale = 16;                // bfs graph: 2^scale vertices
  std::uint64_t mean_degree = 16;
  std::uint64_t vertices = 4096;      // two-hop graph size
  std::uint64_t degree_a = 16;
  std::uint64_t degree_b = 16;
  std::uint64_t extent_size = 256;
  std::uint32_t queries = 6;
  std::uint32_t max_phases = 10;
  std::uint64_t graph_seed = 1;
  std::uint64_t workload_seed = 2;
  ClusterConfig cluster;

  static SimulationSetup from_config(const KeyValueConfig& cfg) {
    SimulationSetup s;
    s.workload_kind = cfg.get("workload", s.workload_kind);
    s.scale = static_cast<unsigned>(cfg.get_u64("scale", s.scale));
    s.mean_degree = cfg.get_u64("mean_degree", s.mean_degree);
    s.vertices = cfg.get_u64("vertices", s.vertices);
    s.degree_a = cfg.get_u64("degree_a", s.degree_a);
    s.degree_b = cfg.get_u64("degree_b", s.degree_b);
    s.extent_size = cfg.get_u64("extent_size", s.extent_size);
    s.queries = static_cast<std::uint32_t>(cfg.get_u64("queries", s.queries));
    s.max_phases =
        static_cast<std::uint32_t>(cfg.get_u64("max_phases", s.max_phases));
    s.cluster.num_nodes =
        static_cast<std::uint32_t>(cfg.get_u64("nodes", s.cluster.num_nodes));
    s.cluster.base_threshold = cfg.get_u64("t", s.cluster.base_threshold);
    s.cluster.growth_factor =
        cfg.get_double("k_growth", s.cluster.growth_factor);
    s.cluster.repartition_interval = static_cast<std::uint32_t>(
        cfg.get_u64("repartition_interval", s.cluster.repartition_interval));
    s.cluster.freeze_after = cfg.get_u64("freeze_after", 0);
    s.cluster.tolerance = cfg.get_double("tolerance", s.cluster.tolerance);
    s.cluster.cache_factor =
        cfg.get_double("cache_factor", s.cluster.cache_factor);
    s.cluster.reset_trees_after_cycle =
        cfg.get_u64("reset_trees", 0) != 0;
    // seeds = graph,workload,partition
    const std::vector<std::uint64_t> seeds = cfg.get_u64_list("seeds");
    if (seeds.size() > 0) s.graph_seed = seeds[0];
    if (seeds.size() > 1) s.workload_seed = seeds[1];
    if (seeds.size() > 2) s.cluster.partition_seed = seeds[2];
    return s;
  }

  SyntheticGraph build_graph() const {
    if (workload_kind == "two-hop")
      return typed_graph(vertices, degree_a, degree_b, graph_seed,
                         extent_size);
    return rmat_graph(scale, mean_degree, graph_seed, extent_size);
  }

  std::vector<Query> build_workload(const SyntheticGraph& graph) const {
    std::vector<Query> queries_out;
    Rng rng(workload_seed);
    if (workload_kind == "two-hop") {
      std::uniform_int_distribution<std::uint64_t> pick(
          0, graph.num_vertices() - 1);
      for (std::uint32_t q = 0; q < queries; ++q)
        queries_out.push_back(TwoHopQuery{pick(rng)});
      return queries_out;
    }
    // One fixed root with at least one edge, repeated for every query.
    std::uniform_int_distribution<std::uint64_t> pick(
        0, graph.num_vertices() - 1);
    std::uint64_t root = pick(rng);
    while (graph.neighbors(0, root).empty()) root = pick(rng);
    for (std::uint32_t q = 0; q < queries; ++q)
      queries_out.push_back(BfsQuery(root, max_phases));
    return queries_out;
  }
};

}  // namespace dydap
