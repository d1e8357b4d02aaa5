//===-- cfg.hpp - Control-flow graph, dominators, natural loops -*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include "irforge/errors.hpp"
#include "irforge/ir.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace irforge {

inline constexpr std::size_t cfg_npos = std::numeric_limits<std::size_t>::max();

/// Block-index adjacency for one function. Successor lists keep one slot per
/// terminator target as written, so a switch with two cases on the same label
/// contributes two slots; predecessor lists are the exact inverse.
struct Cfg {
  std::size_t entry = 0;
  std::vector<std::vector<std::size_t>> successors;
  std::vector<std::vector<std::size_t>> predecessors;

  std::size_t node_count() const { return successors.size(); }

  std::size_t distinct_successor_count(std::size_t n) const {
    std::vector<std::size_t> s = successors[n];
    std::sort(s.begin(), s.end());
    return static_cast<std::size_t>(
        std::unique(s.begin(), s.end()) - s.begin());
  }
  std::size_t distinct_predecessor_count(std::size_t n) const {
    std::vector<std::size_t> p = predecessors[n];
    std::sort(p.begin(), p.end());
    return static_cast<std::size_t>(
        std::unique(p.begin(), p.end()) - p.begin());
  }
};

namespace detail {

// "%label" or "%\"quoted label\"" -> the bare label text.
inline std::string strip_label_sigil(std::string_view token) {
  if (!token.empty() && token.front() == '%')
    token.remove_prefix(1);
  if (token.size() >= 2 && token.front() == '"' && token.back() == '"') {
    token.remove_prefix(1);
    token.remove_suffix(1);
  }
  return std::string(token);
}

} // namespace detail

/// Builds the CFG of a function definition. Terminator targets are the
/// block-label operands of each block's final instruction. Throws an
/// analysis error on a branch to an undefined label.
inline Cfg build_cfg(const IrFunction &fn) {
  if (!fn.is_definition || fn.blocks.empty())
    throw Error(ErrorKind::Analysis,
                "cannot build CFG for declaration @" + fn.name);

  std::unordered_map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < fn.blocks.size(); ++i)
    index_of.emplace(fn.blocks[i].label, i);

  Cfg cfg;
  cfg.successors.resize(fn.blocks.size());
  cfg.predecessors.resize(fn.blocks.size());

  for (std::size_t i = 0; i < fn.blocks.size(); ++i) {
    const IrBlock &block = fn.blocks[i];
    if (block.instructions.empty())
      continue;
    const IrInstruction &term = block.instructions.back();
    if (!is_terminator(term.opcode))
      continue; // unsupported terminator opcode: no known targets
    for (const OperandRef &op : term.operands) {
      if (op.kind != OperandRef::Kind::BlockLabel)
        continue;
      std::string label = detail::strip_label_sigil(op.text);
      auto it = index_of.find(label);
      if (it == index_of.end())
        throw Error(ErrorKind::Analysis, "branch to undefined label '" +
                                             label + "' in @" + fn.name);
      cfg.successors[i].push_back(it->second);
    }
  }
  for (std::size_t i = 0; i < cfg.successors.size(); ++i)
    for (std::size_t s : cfg.successors[i])
      cfg.predecessors[s].push_back(i);
  return cfg;
}

/// Immediate-dominator tree. The entry is self-rooted; blocks the entry
/// cannot reach are excluded (idom = cfg_npos, reachable = false).
struct DomTree {
  std::vector<std::size_t> idom;
  std::vector<bool> reachable;
  std::size_t unreachable_count = 0;

  /// True when a dominates b (reflexive). False if either is unreachable.
  bool dominates(std::size_t a, std::size_t b) const {
    if (!reachable[a] || !reachable[b])
      return false;
    std::size_t v = b;
    for (;;) {
      if (v == a)
        return true;
      std::size_t up = idom[v];
      if (up == v)
        return false; // reached the root
      v = up;
    }
  }
};

namespace detail {

inline void reverse_postorder_dfs(const Cfg &cfg, std::size_t node,
                                  std::vector<bool> &seen,
                                  std::vector<std::size_t> &postorder) {
  // Iterative DFS; recursion would overflow on long chains.
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  stack.emplace_back(node, 0);
  seen[node] = true;
  while (!stack.empty()) {
    auto &[n, next_child] = stack.back();
    if (next_child < cfg.successors[n].size()) {
      std::size_t s = cfg.successors[n][next_child++];
      if (!seen[s]) {
        seen[s] = true;
        stack.emplace_back(s, 0);
      }
    } else {
      postorder.push_back(n);
      stack.pop_back();
    }
  }
}

} // namespace detail

/// Iterative dataflow dominators over reverse postorder (the two-finger
/// intersection scheme). Runs until fixpoint; near-linear on real CFGs.
inline DomTree compute_dominators(const Cfg &cfg) {
  std::size_t n = cfg.node_count();
  DomTree tree;
  tree.idom.assign(n, cfg_npos);
  tree.reachable.assign(n, false);

  std::vector<std::size_t> postorder;
  detail::reverse_postorder_dfs(cfg, cfg.entry, tree.reachable, postorder);
  tree.unreachable_count =
      n - static_cast<std::size_t>(
              std::count(tree.reachable.begin(), tree.reachable.end(), true));

  std::vector<std::size_t> po_number(n, cfg_npos);
  for (std::size_t i = 0; i < postorder.size(); ++i)
    po_number[postorder[i]] = i;

  std::vector<std::size_t> rpo(postorder.rbegin(), postorder.rend());
  tree.idom[cfg.entry] = cfg.entry;

  auto intersect = [&](std::size_t a, std::size_t b) {
    while (a != b) {
      while (po_number[a] < po_number[b])
        a = tree.idom[a];
      while (po_number[b] < po_number[a])
        b = tree.idom[b];
    }
    return a;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t node : rpo) {
      if (node == cfg.entry)
        continue;
      std::size_t new_idom = cfg_npos;
      for (std::size_t p : cfg.predecessors[node]) {
        if (!tree.reachable[p] || tree.idom[p] == cfg_npos)
          continue;
        new_idom = new_idom == cfg_npos ? p : intersect(new_idom, p);
      }
      if (new_idom != cfg_npos && tree.idom[node] != new_idom) {
        tree.idom[node] = new_idom;
        changed = true;
      }
    }
  }
  return tree;
}

/// One natural loop: all back edges u→header sharing a header are merged.
struct Loop {
  std::size_t header = 0;
  std::vector<std::size_t> latches;      // sorted back-edge sources
  std::vector<std::size_t> body;         // sorted, includes the header
  std::size_t parent = cfg_npos;         // index into LoopForest::loops
  std::size_t depth = 1;                 // 1 = top level

  bool contains(std::size_t block) const {
    return std::binary_search(body.begin(), body.end(), block);
  }
};

struct LoopForest {
  std::vector<Loop> loops; // ordered by header block index

  std::size_t top_level_count() const {
    std::size_t c = 0;
    for (const Loop &l : loops)
      c += l.parent == cfg_npos ? 1 : 0;
    return c;
  }
  std::size_t max_depth() const {
    std::size_t d = 0;
    for (const Loop &l : loops)
      d = std::max(d, l.depth);
    return d;
  }
};

/// Detects natural loops: a back edge is u→h with h dominating u; the body is
/// everything that reaches a latch without passing through the header.
/// Nesting comes from body containment.
inline LoopForest find_natural_loops(const Cfg &cfg, const DomTree &dom) {
  std::size_t n = cfg.node_count();
  // header -> latches
  std::vector<std::vector<std::size_t>> latches_of(n);
  for (std::size_t u = 0; u < n; ++u) {
    if (!dom.reachable[u])
      continue;
    for (std::size_t h : cfg.successors[u])
      if (dom.dominates(h, u))
        latches_of[h].push_back(u);
  }

  LoopForest forest;
  for (std::size_t h = 0; h < n; ++h) {
    if (latches_of[h].empty())
      continue;
    Loop loop;
    loop.header = h;
    std::sort(latches_of[h].begin(), latches_of[h].end());
    latches_of[h].erase(
        std::unique(latches_of[h].begin(), latches_of[h].end()),
        latches_of[h].end());
    loop.latches = latches_of[h];

    // Reverse reachability from the latches, stopping at the header.
    std::unordered_set<std::size_t> body{h};
    std::vector<std::size_t> work;
    for (std::size_t latch : loop.latches)
      if (body.insert(latch).second)
        work.push_back(latch);
    while (!work.empty()) {
      std::size_t v = work.back();
      work.pop_back();
      for (std::size_t p : cfg.predecessors[v])
        if (dom.reachable[p] && body.insert(p).second)
          work.push_back(p);
    }
    loop.body.assign(body.begin(), body.end());
    std::sort(loop.body.begin(), loop.body.end());
    forest.loops.push_back(std::move(loop));
  }

  // Parent = smallest strictly larger loop whose body contains this loop's
  // entire body. Partially overlapping loops (irreducible control flow) get
  // no parent rather than a bogus one.
  std::vector<std::size_t> by_size(forest.loops.size());
  for (std::size_t i = 0; i < by_size.size(); ++i)
    by_size[i] = i;
  std::sort(by_size.begin(), by_size.end(), [&](std::size_t a, std::size_t b) {
    if (forest.loops[a].body.size() != forest.loops[b].body.size())
      return forest.loops[a].body.size() < forest.loops[b].body.size();
    return forest.loops[a].header < forest.loops[b].header;
  });
  for (std::size_t ii = 0; ii < by_size.size(); ++ii) {
    std::size_t i = by_size[ii];
    for (std::size_t jj = ii + 1; jj < by_size.size(); ++jj) {
      std::size_t j = by_size[jj];
      if (forest.loops[j].body.size() <= forest.loops[i].body.size())
        continue;
      if (std::includes(forest.loops[j].body.begin(),
                        forest.loops[j].body.end(),
                        forest.loops[i].body.begin(),
                        forest.loops[i].body.end())) {
        forest.loops[i].parent = j;
        break;
      }
    }
  }
  // Depths follow parent chains.
  for (Loop &l : forest.loops) {
    std::size_t d = 1;
    for (std::size_t p = l.parent; p != cfg_npos; p = forest.loops[p].parent)
      ++d;
    l.depth = d;
  }
  return forest;
}

/// Critical edges: distinct (u,v) pairs where u has more than one successor
/// slot and v more than one predecessor slot.
inline std::size_t count_critical_edges(const Cfg &cfg) {
  std::size_t count = 0;
  for (std::size_t u = 0; u < cfg.node_count(); ++u) {
    if (cfg.successors[u].size() <= 1)
      continue;
    std::vector<std::size_t> targets = cfg.successors[u];
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    for (std::size_t v : targets)
      if (cfg.predecessors[v].size() > 1)
        ++count;
  }
  return count;
}

} // namespace irforge
