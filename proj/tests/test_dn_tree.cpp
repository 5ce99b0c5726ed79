#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "dydap/dn_tree.hpp"
#include "dydap/reference_workload.hpp"
#include "dydap/workload.hpp"

using namespace dydap;

namespace {

DnTree reference_tree() {
  DnTree tree(reference::tree_config());
  const AccessSequence seq = reference::access_sequence();
  for (std::size_t i = 1; i < seq.size(); ++i) tree.record(seq[i - 1], seq[i]);
  return tree;
}

// Random access sequence replayed into a tree plus a dense oracle.
struct ReplayedPair {
  DnTree tree;
  TransitionMatrix oracle;
};

ReplayedPair random_replay(std::uint64_t m, std::uint64_t t, double k,
                           std::size_t accesses, std::uint64_t seed) {
  ReplayedPair pair{DnTree(DnTreeConfig{t, k, m}), TransitionMatrix(m)};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, m - 1);
  extent_id prev = pick(rng);
  for (std::size_t i = 1; i < accesses; ++i) {
    extent_id next = pick(rng);
    pair.oracle.at(prev, next) += 1.0;
    pair.tree.record(prev, next);
    prev = next;
  }
  return pair;
}

}  // namespace

TEST_CASE("first four accesses fill the expected level-1 counters") {
  DnTree tree(reference::tree_config());
  const AccessSequence seq = reference::access_sequence();
  for (std::size_t i = 1; i < 4; ++i) tree.record(seq[i - 1], seq[i]);
  const auto& roots = tree.root_children();
  CHECK(roots[0].count == 0);
  CHECK(roots[1].count == 2);
  CHECK(roots[2].count == 1);
  CHECK(roots[3].count == 0);
  CHECK(tree.total_recorded() == 3);
}

TEST_CASE("full reference replay records 43 transitions") {
  DnTree tree = reference_tree();
  CHECK(tree.total_recorded() == 43);
  std::uint64_t counter_sum = 0;
  tree.for_each_node(
      [&](unsigned, const DnNode& n) { counter_sum += n.count; });
  CHECK(counter_sum == 43);
}

TEST_CASE("single record on an empty tree") {
  DnTree tree(DnTreeConfig{4, 1.0, 4});
  tree.record(0, 0);
  CHECK(tree.total_recorded() == 1);
  std::uint64_t nonzero = 0;
  tree.for_each_node([&](unsigned level, const DnNode& n) {
    if (n.count > 0) {
      ++nonzero;
      CHECK(level == 1);
      CHECK(n.count == 1);
    }
  });
  CHECK(nonzero == 1);
}

TEST_CASE("record rejects out-of-range extents") {
  DnTree tree(DnTreeConfig{4, 1.0, 4});
  CHECK_THROWS_AS(tree.record(4, 0), std::out_of_range);
  CHECK_THROWS_AS(tree.record(0, 17), std::out_of_range);
  CHECK_THROWS_AS(tree.reconstruct_cell(0, 4), std::out_of_range);
}

TEST_CASE("reference reconstruction matches the known rounded summary") {
  DnTree tree = reference_tree();
  CHECK(tree.reconstruct_cell(2, 1) == Catch::Approx(68.0 / 13.0));
  CHECK(tree.reconstruct_cell(3, 1) == Catch::Approx(85.0 / 13.0));

  const TransitionMatrix rounded = tree.reconstruct_matrix().rounded();
  const auto expected = reference::rounded_reconstruction();
  for (std::uint64_t i = 0; i < 4; ++i)
    for (std::uint64_t j = 0; j < 4; ++j)
      CHECK(rounded.at(i, j) == static_cast<double>(expected[i][j]));
}

TEST_CASE("empty tree reconstructs to zero") {
  DnTree tree(DnTreeConfig{4, 1.0, 8});
  for (extent_id i = 0; i < 8; ++i)
    for (extent_id j = 0; j < 8; ++j) CHECK(tree.reconstruct_cell(i, j) == 0.0);
  CHECK(tree.reconstruct_matrix().total() == 0.0);
}

TEST_CASE("zero threshold pushes all mass to cells: exact reconstruction") {
  auto [tree, oracle] = random_replay(16, 0, 1.0, 1000, 99);
  const TransitionMatrix approx = tree.reconstruct_matrix();
  for (extent_id i = 0; i < 16; ++i)
    for (extent_id j = 0; j < 16; ++j) {
      CHECK(approx.at(i, j) == oracle.at(i, j));
      CHECK(tree.reconstruct_cell(i, j) == oracle.at(i, j));
    }
}

TEST_CASE("reconstruction is mass preserving and nonnegative") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    std::mt19937_64 cfg_rng(seed * 77);
    const std::uint64_t m = 1 + cfg_rng() % 64;
    const std::uint64_t t = cfg_rng() % 8;
    const double k = 1.0 + (cfg_rng() % 30) / 10.0;
    const std::size_t n = 2 + cfg_rng() % 5000;
    auto [tree, oracle] = random_replay(m, t, k, n, seed);
    REQUIRE(tree.total_recorded() == n - 1);
    const TransitionMatrix approx = tree.reconstruct_matrix();
    for (double c : approx.cells()) CHECK(c >= 0.0);
    // algebraic identity, checked to float round-off
    CHECK(approx.total() ==
          Catch::Approx(static_cast<double>(n - 1)).epsilon(1e-9));
  }
}

TEST_CASE("matrix and cell reconstruction agree") {
  auto [tree, oracle] = random_replay(23, 3, 1.5, 4000, 5);
  const TransitionMatrix matrix = tree.reconstruct_matrix();
  for (extent_id i = 0; i < 23; ++i)
    for (extent_id j = 0; j < 23; ++j)
      CHECK(matrix.at(i, j) == tree.reconstruct_cell(i, j));
}

TEST_CASE("record-built trees respect saturation caps") {
  auto [tree, oracle] = random_replay(32, 5, 1.5, 20000, 11);
  const DnTreeConfig cfg = tree.config();
  tree.for_each_node([&](unsigned level, const DnNode& node) {
    if (level < cfg.max_depth()) {
      CHECK(node.count <= cfg.threshold(level));
      if (node.has_children()) CHECK(node.count == cfg.threshold(level));
    }
  });
}

TEST_CASE("thresholds use the ceiling of t * k^level") {
  DnTreeConfig cfg{4, 1.5, 16};
  CHECK(cfg.threshold(1) == 6);   // 4 * 1.5
  CHECK(cfg.threshold(2) == 9);   // 4 * 2.25
  CHECK(cfg.threshold(3) == 14);  // ceil(13.5)
  DnTreeConfig unit{4, 1.0, 16};
  CHECK(unit.threshold(1) == 4);
  CHECK(unit.threshold(4) == 4);
}

TEST_CASE("stats counts nodes below the root sentinel") {
  DnTree empty(reference::tree_config());
  CHECK(empty.stats().node_count == 4);
  CHECK(empty.stats().memory_estimate == 4 * DnTree::kBytesPerNode);

  DnTree tree = reference_tree();
  const DnTree::Stats s = tree.stats();
  CHECK(s.node_count == 16);
  CHECK(s.total_recorded == 43);
}

TEST_CASE("node count is nondecreasing along a replay") {
  DnTree tree(DnTreeConfig{2, 2.0, 64});
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint64_t> pick(0, 63);
  std::uint64_t last = tree.stats().node_count;
  extent_id prev = pick(rng);
  for (int i = 0; i < 3000; ++i) {
    extent_id next = pick(rng);
    tree.record(prev, next);
    prev = next;
    const std::uint64_t now = tree.stats().node_count;
    CHECK(now >= last);
    last = now;
  }
}

TEST_CASE("non-power-of-two extent spaces stay exact about padding") {
  auto [tree, oracle] = random_replay(13, 2, 1.0, 3000, 21);
  const TransitionMatrix approx = tree.reconstruct_matrix();
  CHECK(approx.side() == 13);
  CHECK(approx.total() == Catch::Approx(2999.0).epsilon(1e-9));
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(DnTree(DnTreeConfig{4, 0.5, 4}), std::invalid_argument);
  CHECK_THROWS_AS(DnTree(DnTreeConfig{4, 1.0, 0}), std::invalid_argument);
  // t = 0 is allowed; it is the exactness configuration
  CHECK_NOTHROW(DnTree(DnTreeConfig{0, 1.0, 4}));
}

TEST_CASE("single-extent space is always exact") {
  DnTree tree(DnTreeConfig{4, 2.0, 1});
  for (int i = 0; i < 10; ++i) tree.record(0, 0);
  CHECK(tree.reconstruct_cell(0, 0) == 10.0);
  CHECK(tree.reconstruct_matrix().total() == 10.0);
}
