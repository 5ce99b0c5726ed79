// Batch experiment driver: replays the bundled reference workload, sweeps
// summary error and size, solves growth exponents, partitions edge lists and
// runs the static-versus-adaptive cluster comparison. Every command is
// deterministic given its configuration and seed.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dydap/analysis.hpp"
#include "dydap/config.hpp"
#include "dydap/dn_tree.hpp"
#include "dydap/dn_tree_io.hpp"
#include "dydap/partition.hpp"
#include "dydap/reference_workload.hpp"
#include "dydap/simulator.hpp"
#include "dydap/workload.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dydap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;

// DYDAP_LOG=quiet|info|debug (default info)
int log_level() {
  const char* env = std::getenv("DYDAP_LOG");
  if (!env) return 1;
  const std::string v(env);
  if (v == "quiet") return 0;
  if (v == "debug") return 2;
  return 1;
}

std::ostream& info() {
  static std::ofstream null_stream;
  return log_level() >= 1 ? std::cout : null_stream;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::array<double, 4> parse_probabilities(const std::string& text) {
  std::array<double, 4> p{};
  std::stringstream ss(text);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',') && i < 4) p[i++] = std::stod(item);
  if (i != 4)
    throw CLI::ValidationError("--p expects four comma-separated values");
  return p;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// --- replay-golden ---

struct GoldenReport {
  bool ok = true;
  std::string first_mismatch;
  json data;

  void check_cell(const std::string& name, std::uint64_t i, std::uint64_t j,
                  double expected, double actual) {
    if (expected == actual) return;
    if (ok) {
      std::ostringstream msg;
      msg << name << "(" << i << "," << j << "): expected " << expected
          << ", got " << actual;
      first_mismatch = msg.str();
    }
    ok = false;
  }
};

json matrix_to_json(const TransitionMatrix& m) {
  json rows = json::array();
  for (std::uint64_t i = 0; i < m.side(); ++i) {
    json row = json::array();
    for (std::uint64_t j = 0; j < m.side(); ++j) row.push_back(m.at(i, j));
    rows.push_back(row);
  }
  return rows;
}

void print_matrix(const std::string& title, const TransitionMatrix& m) {
  info() << title << ":\n";
  for (std::uint64_t i = 0; i < m.side(); ++i) {
    info() << "  ";
    for (std::uint64_t j = 0; j < m.side(); ++j)
      info() << fmt(m.at(i, j)) << (j + 1 < m.side() ? " " : "");
    info() << "\n";
  }
}

int cmd_replay_golden(const std::string& sequence_path, bool as_json) {
  AccessSequence seq = sequence_path.empty()
                           ? reference::access_sequence()
                           : read_sequence(sequence_path);

  DnTree tree(reference::tree_config());
  TransitionMatrix counts(4);
  replay(seq, tree, counts);
  const TransitionMatrix rounded = tree.reconstruct_matrix().rounded();
  const AccessGraph exact_graph = build_access_graph(counts);
  const AccessGraph approx_graph = build_access_graph(rounded);

  GoldenReport report;
  const auto expected_counts = reference::transition_counts();
  const auto expected_rounded = reference::rounded_reconstruction();
  const auto expected_sym = reference::symmetrized_counts();
  for (std::uint64_t i = 0; i < 4; ++i)
    for (std::uint64_t j = 0; j < 4; ++j) {
      report.check_cell("M", i, j, double(expected_counts[i][j]),
                        counts.at(i, j));
      report.check_cell("M_hat", i, j, double(expected_rounded[i][j]),
                        rounded.at(i, j));
      report.check_cell("M_plus_MT", i, j, double(expected_sym[i][j]),
                        exact_graph.weight(i, j));
    }

  const ConstraintMatrix constraints = ConstraintMatrix::uniform(4);
  PartitionSpec spec;
  spec.num_parts = 2;
  spec.tolerance = {1.0};
  json cuts = json::array();
  for (const auto& sc : reference::split_cuts()) {
    Partitioning p{std::vector<std::uint32_t>(4, 1)};
    p.assignment[0] = 0;
    p.assignment[sc.part0[1]] = 0;
    const double cut_exact = evaluate(exact_graph, constraints, spec, p).edge_cut;
    const double cut_approx =
        evaluate(approx_graph, constraints, spec, p).edge_cut;
    report.check_cell("cut_exact", sc.part0[0], sc.part0[1], sc.cut_exact,
                      cut_exact);
    report.check_cell("cut_reconstructed", sc.part0[0], sc.part0[1],
                      sc.cut_reconstructed, cut_approx);
    cuts.push_back({{"part0", {sc.part0[0], sc.part0[1]}},
                    {"cut_exact", cut_exact},
                    {"cut_reconstructed", cut_approx}});
  }

  const Partitioning best_exact =
      partition_exhaustive(exact_graph, constraints, spec);
  const Partitioning best_approx =
      partition_exhaustive(approx_graph, constraints, spec);
  const auto expected_best = reference::optimal_assignment();
  for (std::uint64_t v = 0; v < 4; ++v) {
    report.check_cell("optimal_split_exact", v, 0, expected_best[v],
                      best_exact.assignment[v]);
    report.check_cell("optimal_split_reconstructed", v, 0, expected_best[v],
                      best_approx.assignment[v]);
  }

  if (as_json) {
    json out;
    out["matrix"] = matrix_to_json(counts);
    out["reconstruction_rounded"] = matrix_to_json(rounded);
    out["cuts"] = cuts;
    out["optimal_split"] = best_exact.assignment;
    out["total_recorded"] = tree.total_recorded();
    out["ok"] = report.ok;
    if (!report.ok) out["first_mismatch"] = report.first_mismatch;
    std::cout << out.dump(2) << "\n";
  } else {
    print_matrix("transition counts M", counts);
    print_matrix("rounded reconstruction", rounded);
    info() << "M + M^T:\n";
    for (std::uint64_t i = 0; i < 4; ++i) {
      info() << "  ";
      for (std::uint64_t j = 0; j < 4; ++j)
        info() << exact_graph.weight(i, j) << (j < 3 ? " " : "\n");
    }
    for (const auto& c : cuts)
      info() << "split {" << c["part0"][0] << "," << c["part0"][1]
             << "}: cut " << c["cut_exact"] << " (exact), "
             << c["cut_reconstructed"] << " (reconstructed)\n";
    info() << "optimal split: ";
    for (std::uint32_t part : best_exact.assignment) info() << part;
    info() << "\n";
    if (!report.ok) std::cerr << "MISMATCH: " << report.first_mismatch << "\n";
  }
  return report.ok ? kExitOk : kExitMismatch;
}

// --- error-sweep ---

int cmd_error_sweep(const std::array<double, 4>& p,
                    const std::vector<std::uint64_t>& sides,
                    const std::vector<double>& k_list, std::uint64_t n,
                    std::uint64_t t, std::uint64_t seed,
                    const std::string& out_dir) {
  std::ostringstream csv;
  csv << "side,k,t,n,seed,error\n";
  for (std::uint64_t side : sides) {
    RmatParams params;
    params.p = p;
    params.depth = log2_exact(next_pow2(side));
    if (params.side() != side)
      throw CLI::ValidationError("--sides entries must be powers of two");
    params.validate();

    // One shared stream per side: all growth factors see identical cells.
    std::vector<std::pair<extent_id, extent_id>> stream;
    stream.reserve(n > 0 ? n - 1 : 0);
    Rng rng(seed);
    for (std::uint64_t i = 0; i + 1 < n; ++i)
      stream.push_back(rmat_sample_cell(params, rng));

    TransitionMatrix oracle(side);
    for (auto [r, c] : stream) oracle.at(r, c) += 1.0;

    for (double k : k_list) {
      DnTree tree(DnTreeConfig{t, k, side});
      for (auto [r, c] : stream) tree.record(r, c);
      const ErrorReport report =
          compression_error(oracle, tree.reconstruct_matrix(), n);
      csv << side << ',' << fmt(k) << ',' << t << ',' << n << ',' << seed
          << ',' << fmt(report.error) << '\n';
    }
  }
  if (out_dir.empty()) {
    std::cout << csv.str();
  } else {
    open_out(out_dir, "error_sweep.csv") << csv.str();
    info() << "wrote " << (fs::path(out_dir) / "error_sweep.csv").string()
           << "\n";
  }
  return kExitOk;
}

// --- size-sweep ---

int cmd_size_sweep(const std::array<double, 4>& p, double k, std::uint64_t t,
                   std::uint64_t n_max, unsigned depth, std::uint64_t seed,
                   const std::string& out_dir) {
  RmatParams params;
  params.p = p;
  params.depth = depth;
  params.validate();

  DnTree tree(DnTreeConfig{t, k, params.side()});
  Rng rng(seed);
  std::vector<GrowthSample> samples;
  std::ostringstream csv;
  csv << "n,node_count,memory_bytes\n";
  std::uint64_t next_checkpoint = 1000;
  for (std::uint64_t i = 1; i <= n_max; ++i) {
    auto [r, c] = rmat_sample_cell(params, rng);
    tree.record(r, c);
    if (i == next_checkpoint || i == n_max) {
      const DnTree::Stats s = tree.stats();
      samples.push_back({i, s.node_count});
      csv << i << ',' << s.node_count << ',' << s.memory_estimate << '\n';
      while (next_checkpoint <= i) next_checkpoint *= 10;
    }
  }
  ExponentQuery q;
  q.p = p;
  q.growth_factor = k;
  const double solved = solve_size_exponent(q);
  const double fitted =
      samples.size() >= 2 ? fit_growth_exponent(samples) : 0.0;
  if (out_dir.empty()) {
    std::cout << csv.str();
  } else {
    open_out(out_dir, "size_sweep.csv") << csv.str();
  }
  info() << "fitted_exponent=" << fmt(fitted)
         << " solved_exponent=" << fmt(solved) << "\n";
  return kExitOk;
}

// --- exponent ---

int cmd_exponent(const std::array<double, 4>& p,
                 const std::vector<double>& k_list,
                 const std::string& out_dir) {
  std::ostringstream csv;
  csv << "p0,p1,p2,p3,k,s\n";
  for (double k : k_list) {
    ExponentQuery q;
    q.p = p;
    q.growth_factor = k;
    csv << fmt(p[0]) << ',' << fmt(p[1]) << ',' << fmt(p[2]) << ','
        << fmt(p[3]) << ',' << fmt(k) << ',' << fmt(solve_size_exponent(q))
        << '\n';
  }
  if (out_dir.empty()) {
    std::cout << csv.str();
  } else {
    open_out(out_dir, "exponent.csv") << csv.str();
  }
  return kExitOk;
}

// --- partition ---

int cmd_partition(const std::string& graph_path, const std::string& tags_path,
                  std::uint32_t parts, double tolerance, std::uint64_t seed,
                  bool exact, const std::string& out_dir) {
  std::ifstream in(graph_path);
  if (!in) throw std::runtime_error("cannot open " + graph_path);
  const AccessGraph g = read_edge_list(in);
  if (g.size() == 0) throw std::runtime_error("empty graph");

  ConstraintMatrix constraints;
  if (tags_path.empty()) {
    constraints = ConstraintMatrix::uniform(g.size());
  } else {
    std::ifstream tags_in(tags_path);
    if (!tags_in) throw std::runtime_error("cannot open " + tags_path);
    std::vector<std::uint32_t> tags(g.size(), 0);
    std::uint64_t e;
    std::uint32_t tag;
    std::uint32_t max_tag = 0;
    while (tags_in >> e >> tag) {
      if (e >= g.size()) throw std::runtime_error("tag extent out of range");
      tags[e] = tag;
      max_tag = std::max(max_tag, tag);
    }
    constraints = ConstraintMatrix::with_ds_tags(tags, max_tag + 1);
  }

  PartitionSpec spec;
  spec.num_parts = parts;
  spec.tolerance.assign(constraints.num_constraints(), tolerance);
  const Partitioning p =
      exact ? partition_exhaustive(g, constraints, spec)
            : partition_heuristic(g, constraints, spec, seed);
  const PartitionMetrics m = evaluate(g, constraints, spec, p);

  const DistributionFunction df = derive_distribution(p, parts);
  if (out_dir.empty()) {
    write_partitioning_csv(df, std::cout);
  } else {
    auto out = open_out(out_dir, "partition.csv");
    write_partitioning_csv(df, out);
  }
  info() << "edge_cut=" << fmt(m.edge_cut) << " imbalance=";
  for (std::size_t i = 0; i < m.imbalance.size(); ++i)
    info() << (i ? "," : "") << fmt(m.imbalance[i]);
  info() << "\n";
  return kExitOk;
}

// --- compare ---

int cmd_compare(const std::string& config_path, const std::string& out_dir) {
  const SimulationSetup setup =
      config_path.empty()
          ? SimulationSetup{}
          : SimulationSetup::from_config(KeyValueConfig::parse_file(config_path));
  const SyntheticGraph graph = setup.build_graph();
  const std::vector<Query> workload = setup.build_workload(graph);
  if (log_level() >= 2)
    std::cout << "graph: " << graph.num_vertices() << " vertices, "
              << graph.num_extents() << " extents\n";

  const ComparisonResult result =
      compare_systems(graph, workload, setup.cluster);

  if (!out_dir.empty()) {
    {
      auto out = open_out(out_dir, "metrics.csv");
      write_metrics_csv(result, out);
    }
    const std::pair<const char*, const ExecutionResult*> systems[] = {
        {"static1", &result.static1},
        {"dydap1", &result.dydap1},
        {"dydap2", &result.dydap2}};
    for (const auto& [name, exec] : systems) {
      const std::string sub = (fs::path(out_dir) / name).string();
      {
        auto out = open_out(sub, "trace.csv");
        write_trace_csv(exec->traces, out);
      }
      auto out = open_out(sub, "stddev.csv");
      write_stddev_csv(exec->run, out);
    }
  } else {
    write_metrics_csv(result, std::cout);
  }

  auto summary = [&](const char* name, const RunMetrics& m) {
    info() << name << ": makespan=" << fmt(m.makespan)
           << " teps_proxy=" << fmt(m.teps_proxy)
           << " edge_cut_messages=" << m.edge_cut_messages
           << " mean_load_stddev=" << fmt(m.mean_load_stddev()) << "\n";
  };
  summary("static1", result.static1.run);
  summary("dydap1", result.dydap1.run);
  summary("dydap2", result.dydap2.run);
  info() << "recorded transition cut: dydap=" << fmt(result.recorded_cut_dydap)
         << " hash=" << fmt(result.recorded_cut_hash)
         << " remapped_extents=" << result.remapped_extents << "\n";

  if (result.recorded_cut_dydap > result.recorded_cut_hash + 1e-9) {
    std::cerr << "MISMATCH: adaptive placement cuts more recorded mass than "
                 "the hash baseline\n";
    return kExitMismatch;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workload-adaptive graph partitioning toolkit"};
  app.require_subcommand(1);

  // replay-golden
  auto* golden = app.add_subcommand(
      "replay-golden",
      "replay the bundled reference workload and verify every stage");
  std::string golden_sequence;
  bool golden_json = false;
  golden->add_option("--sequence", golden_sequence,
                     "newline-delimited extent ids replacing the bundled "
                     "sequence");
  golden->add_flag("--json", golden_json, "machine-readable output");

  // shared options
  std::string p_text = "0.25,0.25,0.25,0.25";
  std::string out_dir;
  std::uint64_t seed = 1;

  auto* sweep = app.add_subcommand("error-sweep",
                                   "compression error across growth factors");
  std::vector<std::uint64_t> sweep_sides{512};
  std::vector<double> sweep_k{1.5, 2, 4, 8};
  std::uint64_t sweep_n = 1000000, sweep_t = 16;
  sweep->add_option("--p", p_text, "quadrant probabilities p0,p1,p2,p3");
  sweep->add_option("--sides", sweep_sides, "matrix sides (powers of two)")
      ->delimiter(',');
  sweep->add_option("--k-list", sweep_k, "growth factors")->delimiter(',');
  sweep->add_option("--n", sweep_n, "accesses per stream");
  sweep->add_option("--t", sweep_t, "base threshold");
  sweep->add_option("--seed", seed, "stream seed");
  sweep->add_option("--out", out_dir, "output directory");

  auto* size = app.add_subcommand("size-sweep",
                                  "summary growth along one seeded stream");
  double size_k = 2.0;
  std::uint64_t size_t_ = 16, size_n = 1000000;
  unsigned size_depth = 12;
  size->add_option("--p", p_text, "quadrant probabilities");
  size->add_option("--k", size_k, "growth factor");
  size->add_option("--t", size_t_, "base threshold");
  size->add_option("--n-max", size_n, "stream length");
  size->add_option("--depth", size_depth, "log2 of the matrix side");
  size->add_option("--seed", seed, "stream seed");
  size->add_option("--out", out_dir, "output directory");

  auto* expo = app.add_subcommand("exponent", "solve the size exponent");
  std::vector<double> expo_k{1.5, 2, 4, 8};
  expo->add_option("--p", p_text, "quadrant probabilities");
  expo->add_option("--k-list", expo_k, "growth factors")->delimiter(',');
  expo->add_option("--out", out_dir, "output directory");

  auto* part = app.add_subcommand("partition", "partition an edge-list graph");
  std::string part_graph, part_tags;
  std::uint32_t part_parts = 2;
  double part_tolerance = 1.05;
  bool part_exact = false;
  part->add_option("--graph", part_graph, "edge list path")->required();
  part->add_option("--tags", part_tags, "extent to data-structure tag file");
  part->add_option("--parts", part_parts, "number of parts");
  part->add_option("--tolerance", part_tolerance, "imbalance tolerance");
  part->add_option("--seed", seed, "heuristic seed");
  part->add_flag("--exact", part_exact, "exhaustive search");
  part->add_option("--out", out_dir, "output directory");

  auto* compare = app.add_subcommand(
      "compare", "static hash versus adaptive placement comparison");
  std::string compare_config;
  compare->add_option("--config", compare_config, "key-value config file");
  compare->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (golden->parsed()) return cmd_replay_golden(golden_sequence, golden_json);
    if (sweep->parsed())
      return cmd_error_sweep(parse_probabilities(p_text), sweep_sides, sweep_k,
                             sweep_n, sweep_t, seed, out_dir);
    if (size->parsed())
      return cmd_size_sweep(parse_probabilities(p_text), size_k, size_t_,
                            size_n, size_depth, seed, out_dir);
    if (expo->parsed())
      return cmd_exponent(parse_probabilities(p_text), expo_k, out_dir);
    if (part->parsed())
      return cmd_partition(part_graph, part_tags, part_parts, part_tolerance,
                           seed, part_exact, out_dir);
    if (compare->parsed()) return cmd_compare(compare_config, out_dir);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMismatch;
  }
  return kExitUsage;
}
