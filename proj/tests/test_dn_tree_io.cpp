#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "dydap/dn_tree.hpp"
#include "dydap/dn_tree_io.hpp"
#include "dydap/reference_workload.hpp"

using namespace dydap;

namespace {

DnTree replay(const AccessSequence& seq, DnTreeConfig cfg) {
  DnTree tree(cfg);
  for (std::size_t i = 1; i < seq.size(); ++i) tree.record(seq[i - 1], seq[i]);
  return tree;
}

DnTree random_tree(std::uint64_t m, std::uint64_t t, double k, std::size_t n,
                   std::uint64_t seed) {
  DnTree tree(DnTreeConfig{t, k, m});
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, m - 1);
  extent_id prev = pick(rng);
  for (std::size_t i = 1; i < n; ++i) {
    extent_id next = pick(rng);
    tree.record(prev, next);
    prev = next;
  }
  return tree;
}

}  // namespace

TEST_CASE("empty tree serializes to four unmarked entries") {
  DnTree tree(reference::tree_config());
  const SerializedDnTree s = serialize(tree);
  REQUIRE(s.entries.size() == 4);
  for (const auto& e : s.entries) {
    CHECK(e.count == 0);
    CHECK(e.marker == false);
  }
}

TEST_CASE("reference tree preorder starts with the saturated quadrant") {
  DnTree tree = replay(reference::access_sequence(), reference::tree_config());
  const SerializedDnTree s = serialize(tree);
  REQUIRE(!s.entries.empty());
  CHECK(s.entries[0].count == 4);
  CHECK(s.entries[0].marker == true);
  CHECK(s.entries.size() == 16);
  CHECK(s.total() == 43);
}

TEST_CASE("serialize then deserialize is the identity") {
  const DnTree tree = random_tree(37, 3, 1.5, 5000, 42);
  const SerializedDnTree s = serialize(tree);
  const DnTree back = deserialize(s);
  CHECK(serialize(back) == s);
  CHECK(back.total_recorded() == tree.total_recorded());
}

TEST_CASE("deserialize rejects malformed encodings") {
  DnTree tree = replay(reference::access_sequence(), reference::tree_config());
  SerializedDnTree good = serialize(tree);

  SECTION("truncated list") {
    SerializedDnTree bad = good;
    bad.entries.pop_back();
    CHECK_THROWS_AS(deserialize(bad), format_error);
  }
  SECTION("marker with missing subtrees") {
    SerializedDnTree bad = good;
    bad.entries.back().marker = true;
    CHECK_THROWS_AS(deserialize(bad), format_error);
  }
  SECTION("children below max depth") {
    SerializedDnTree bad;
    bad.config = DnTreeConfig{4, 1.0, 2};  // depth 1: no children possible
    bad.entries = {{4, true}, {1, false}, {1, false}, {1, false}, {1, false},
                   {0, false}, {0, false}, {0, false}};
    CHECK_THROWS_AS(deserialize(bad), format_error);
  }
  SECTION("trailing entries") {
    SerializedDnTree bad = good;
    bad.entries.push_back({0, false});
    CHECK_THROWS_AS(deserialize(bad), format_error);
  }
}

TEST_CASE("join with the empty tree is the identity") {
  const DnTree tree = random_tree(16, 2, 1.0, 2000, 7);
  const SerializedDnTree s = serialize(tree);
  const SerializedDnTree empty = serialize(DnTree(tree.config()));
  CHECK(join(s, empty) == s);
  CHECK(join(empty, s) == s);
}

TEST_CASE("join is commutative and adds totals") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const DnTree a = random_tree(32, 3, 2.0, 1500, seed);
    const DnTree b = random_tree(32, 3, 2.0, 900, seed + 100);
    const SerializedDnTree sa = serialize(a);
    const SerializedDnTree sb = serialize(b);
    const SerializedDnTree ab = join(sa, sb);
    CHECK(ab == join(sb, sa));
    CHECK(ab.total() == sa.total() + sb.total());
  }
}

TEST_CASE("joined halves of the reference sequence carry the full total") {
  const AccessSequence seq = reference::access_sequence();
  AccessSequence first(seq.begin(), seq.begin() + 22);
  AccessSequence second(seq.begin() + 21, seq.end());  // overlap one access
  // 21 + 22 transitions = 43, matching the unsplit replay
  DnTree a = replay(first, reference::tree_config());
  DnTree b = replay(second, reference::tree_config());
  const SerializedDnTree joined = join(serialize(a), serialize(b));
  CHECK(joined.total() == 43);
}

TEST_CASE("join rejects mismatched configs") {
  const SerializedDnTree a = serialize(DnTree(DnTreeConfig{4, 1.0, 16}));
  const SerializedDnTree b = serialize(DnTree(DnTreeConfig{4, 1.0, 32}));
  CHECK_THROWS_AS(join(a, b), std::invalid_argument);
  const SerializedDnTree c = serialize(DnTree(DnTreeConfig{5, 1.0, 16}));
  CHECK_THROWS_AS(join(a, c), std::invalid_argument);
}

TEST_CASE("a joined tree reconstructs the sum of its inputs' mass") {
  const DnTree a = random_tree(16, 2, 1.5, 800, 5);
  const DnTree b = random_tree(16, 2, 1.5, 1200, 6);
  const DnTree merged = deserialize(join(serialize(a), serialize(b)));
  CHECK(merged.reconstruct_matrix().total() ==
        Catch::Approx(800.0 + 1200.0 - 2.0).epsilon(1e-9));
}

TEST_CASE("aggregate performs exactly n-1 joins") {
  std::vector<SerializedDnTree> trees;
  for (std::uint64_t s = 0; s < 4; ++s)
    trees.push_back(serialize(random_tree(16, 2, 1.0, 500, s)));
  const AggregationResult result = aggregate(trees);
  CHECK(result.join_calls == 3);
  std::uint64_t total = 0;
  for (const auto& t : trees) total += t.total();
  CHECK(result.tree.total() == total);

  // single tree: no joins, returned unchanged
  const AggregationResult single = aggregate({trees[0]});
  CHECK(single.join_calls == 0);
  CHECK(single.tree == trees[0]);

  CHECK_THROWS_AS(aggregate({}), std::invalid_argument);
}

TEST_CASE("aggregation result does not depend on input order") {
  std::vector<SerializedDnTree> trees;
  for (std::uint64_t s = 0; s < 5; ++s)
    trees.push_back(serialize(random_tree(24, 1, 2.0, 700, 50 + s)));
  const SerializedDnTree forward = aggregate(trees).tree;
  std::vector<SerializedDnTree> shuffled = {trees[3], trees[0], trees[4],
                                            trees[2], trees[1]};
  CHECK(aggregate(shuffled).tree == forward);
}

TEST_CASE("binary round trip preserves the encoding") {
  const DnTree tree = random_tree(48, 4, 1.5, 3000, 9);
  const SerializedDnTree s = serialize(tree);
  std::stringstream buf;
  write_binary(s, buf);
  CHECK(read_binary(buf) == s);
}

TEST_CASE("binary header layout is pinned") {
  DnTree tree(DnTreeConfig{4, 1.0, 4});
  std::stringstream buf;
  write_binary(serialize(tree), buf);
  const std::string bytes = buf.str();
  REQUIRE(bytes.size() == 4 + 8 * 4 + 4 * 9);
  CHECK(bytes.substr(0, 4) == "DNT1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 4);  // extent_space LE
  CHECK(static_cast<unsigned char>(bytes[12]) == 4); // base_threshold LE
}

TEST_CASE("binary reader rejects corrupt streams") {
  SECTION("bad magic") {
    std::stringstream buf("XXXX");
    CHECK_THROWS_AS(read_binary(buf), format_error);
  }
  SECTION("truncated entries") {
    DnTree tree(DnTreeConfig{4, 1.0, 4});
    std::stringstream buf;
    write_binary(serialize(tree), buf);
    std::string bytes = buf.str();
    std::stringstream cut(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_binary(cut), format_error);
  }
  SECTION("bad marker byte") {
    DnTree tree(DnTreeConfig{4, 1.0, 4});
    std::stringstream buf;
    write_binary(serialize(tree), buf);
    std::string bytes = buf.str();
    bytes[bytes.size() - 1] = 7;
    std::stringstream bad(bytes);
    CHECK_THROWS_AS(read_binary(bad), format_error);
  }
}
