#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <vector>

#include "dydap/common.hpp"
#include "dydap/dn_tree.hpp"

namespace dydap {

// Preorder encoding of a DN-tree: one (count, marker) entry per node below
// the root sentinel, marker true iff the node has children. Each marker=true
// entry is followed by its four child subtrees in quadrant order. This is
// both the merge representation and the wire/on-disk format.
struct SerializedDnTree {
  struct Entry {
    std::uint64_t count = 0;
    bool marker = false;
    bool operator==(const Entry&) const = default;
  };

  DnTreeConfig config;
  std::vector<Entry> entries;

  bool operator==(const SerializedDnTree&) const = default;

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const Entry& e : entries) t += e.count;
    return t;
  }
};

namespace detail {

// Validates that entries[pos..] starts with `groups` well-formed sibling
// groups of four, none deeper than max_depth. Returns one past the end.
inline std::size_t check_group(const std::vector<SerializedDnTree::Entry>& es,
                               std::size_t pos, unsigned level,
                               unsigned max_depth) {
  for (int q = 0; q < 4; ++q) {
    if (pos >= es.size())
      throw format_error("SerializedDnTree: truncated encoding");
    const bool marker = es[pos].marker;
    ++pos;
    if (marker) {
      if (level >= max_depth)
        throw format_error("SerializedDnTree: children below max depth");
      pos = check_group(es, pos, level + 1, max_depth);
    }
  }
  return pos;
}

inline void validate(const SerializedDnTree& s) {
  s.config.validate();
  std::size_t end = check_group(s.entries, 0, 1, s.config.max_depth());
  if (end != s.entries.size())
    throw format_error("SerializedDnTree: trailing entries after tree");
}

inline void emit(const DnNode& node,
                 std::vector<SerializedDnTree::Entry>& out) {
  out.push_back({node.count, node.has_children()});
  if (node.has_children())
    for (int q = 0; q < 4; ++q) emit((*node.children)[q], out);
}

inline std::size_t build(const std::vector<SerializedDnTree::Entry>& es,
                         std::size_t pos, DnNode& node) {
  node.count = es[pos].count;
  const bool marker = es[pos].marker;
  ++pos;
  if (marker) {
    node.children = std::make_unique<std::array<DnNode, 4>>();
    for (int q = 0; q < 4; ++q) pos = build(es, pos, (*node.children)[q]);
  }
  return pos;
}

// Copies one complete subtree from src[pos..] to out.
inline std::size_t copy_subtree(const std::vector<SerializedDnTree::Entry>& src,
                                std::size_t pos,
                                std::vector<SerializedDnTree::Entry>& out) {
  const SerializedDnTree::Entry e = src[pos++];
  out.push_back(e);
  if (e.marker)
    for (int q = 0; q < 4; ++q) pos = copy_subtree(src, pos, out);
  return pos;
}

// Merges two sibling groups of four: counters add, structure is the union.
inline void join_group(const std::vector<SerializedDnTree::Entry>& a,
                       std::size_t& ia,
                       const std::vector<SerializedDnTree::Entry>& b,
                       std::size_t& ib,
                       std::vector<SerializedDnTree::Entry>& out) {
  for (int q = 0; q < 4; ++q) {
    const SerializedDnTree::Entry ea = a[ia++];
    const SerializedDnTree::Entry eb = b[ib++];
    out.push_back({ea.count + eb.count, ea.marker || eb.marker});
    if (ea.marker && eb.marker) {
      join_group(a, ia, b, ib, out);
    } else if (ea.marker) {
      for (int c = 0; c < 4; ++c) ia = copy_subtree(a, ia, out);
    } else if (eb.marker) {
      for (int c = 0; c < 4; ++c) ib = copy_subtree(b, ib, out);
    }
  }
}

}  // namespace detail

inline SerializedDnTree serialize(const DnTree& tree) {
  SerializedDnTree s;
  s.config = tree.config();
  for (int q = 0; q < 4; ++q) detail::emit(tree.root_children()[q], s.entries);
  return s;
}

inline DnTree deserialize(const SerializedDnTree& s) {
  detail::validate(s);
  DnTree tree(s.config);
  std::size_t pos = 0;
  std::uint64_t total = 0;
  for (int q = 0; q < 4; ++q)
    pos = detail::build(s.entries, pos, tree.mutable_root_children()[q]);
  for (const auto& e : s.entries) total += e.count;
  tree.set_total_recorded(total);
  return tree;
}

// Compressed representation of the sum of the two summarized matrices.
// Counters in the result may exceed their level threshold; merged trees are
// read-only inputs to reconstruction.
inline SerializedDnTree join(const SerializedDnTree& a,
                             const SerializedDnTree& b) {
  if (!(a.config == b.config))
    throw std::invalid_argument("join: DN-tree configs differ");
  detail::validate(a);
  detail::validate(b);
  SerializedDnTree out;
  out.config = a.config;
  out.entries.reserve(std::max(a.entries.size(), b.entries.size()));
  std::size_t ia = 0, ib = 0;
  detail::join_group(a.entries, ia, b.entries, ib, out.entries);
  return out;
}

struct AggregationResult {
  SerializedDnTree tree;
  std::size_t join_calls = 0;
};

// Balanced pairwise reduction of n trees, mirroring a binary communication
// tree: exactly n-1 joins. Join is commutative and associative, so the
// result does not depend on input order.
inline AggregationResult aggregate(std::vector<SerializedDnTree> trees) {
  if (trees.empty())
    throw std::invalid_argument("aggregate: need at least one tree");
  AggregationResult result;
  while (trees.size() > 1) {
    std::vector<SerializedDnTree> next;
    next.reserve(trees.size() / 2 + 1);
    std::size_t i = 0;
    for (; i + 1 < trees.size(); i += 2) {
      next.push_back(join(trees[i], trees[i + 1]));
      ++result.join_calls;
    }
    if (i < trees.size()) next.push_back(std::move(trees[i]));
    trees = std::move(next);
  }
  result.tree = std::move(trees.front());
  return result;
}

// Binary layout (little endian): magic "DNT1", extent_space u64,
// base_threshold u64, growth_factor f64, entry_count u64, then per entry
// {count u64, marker u8}.
namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

inline std::uint64_t get_u64(std::istream& is) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw format_error("DN-tree stream: truncated integer");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{buf[i]} << (8 * i);
  return v;
}

}  // namespace detail

inline void write_binary(const SerializedDnTree& s, std::ostream& os) {
  os.write("DNT1", 4);
  detail::put_u64(os, s.config.extent_space);
  detail::put_u64(os, s.config.base_threshold);
  std::uint64_t kbits;
  static_assert(sizeof(double) == sizeof(std::uint64_t));
  std::memcpy(&kbits, &s.config.growth_factor, 8);
  detail::put_u64(os, kbits);
  detail::put_u64(os, s.entries.size());
  for (const auto& e : s.entries) {
    detail::put_u64(os, e.count);
    os.put(e.marker ? '\1' : '\0');
  }
}

inline SerializedDnTree read_binary(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "DNT1", 4) != 0)
    throw format_error("DN-tree stream: bad magic");
  SerializedDnTree s;
  s.config.extent_space = detail::get_u64(is);
  s.config.base_threshold = detail::get_u64(is);
  std::uint64_t kbits = detail::get_u64(is);
  std::memcpy(&s.config.growth_factor, &kbits, 8);
  const std::uint64_t n = detail::get_u64(is);
  s.entries.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    SerializedDnTree::Entry e;
    e.count = detail::get_u64(is);
    int marker = is.get();
    if (marker != 0 && marker != 1)
      throw format_error("DN-tree stream: bad marker byte");
    e.marker = marker == 1;
    s.entries.push_back(e);
  }
  detail::validate(s);
  return s;
}

}  // namespace dydap
