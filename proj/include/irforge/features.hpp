//===-- features.hpp - Function property vectors and histograms -*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Fixed-order numeric property vectors per function definition, deterministic
// sampling helpers, histogram binning, and a CSV exporter. Consumers should
// use the exported header names, never positional guessing.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "irforge/cfg.hpp"
#include "irforge/errors.hpp"
#include "irforge/ir.hpp"
#include "irforge/lang.hpp"

#include <array>
#include <cstdint>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace irforge {

struct FeatureVector {
  std::uint64_t total_instructions = 0;
  std::uint64_t basic_block_count = 0;
  std::uint64_t blocks_reached_from_cond_branch = 0;
  std::uint64_t direct_call_count = 0;
  std::uint64_t indirect_call_count = 0;
  std::uint64_t intrinsic_call_count = 0;
  std::uint64_t load_count = 0;
  std::uint64_t store_count = 0;
  std::uint64_t alloca_count = 0;
  std::uint64_t integer_arith_count = 0;
  std::uint64_t float_arith_count = 0;
  std::uint64_t cast_count = 0;
  std::uint64_t cmp_count = 0;
  std::uint64_t phi_count = 0;
  std::uint64_t select_count = 0;
  std::uint64_t gep_count = 0;
  std::uint64_t cond_branch_count = 0;
  std::uint64_t uncond_branch_count = 0;
  std::uint64_t switch_count = 0;
  std::uint64_t return_count = 0;
  std::uint64_t unreachable_count = 0;
  std::uint64_t argument_count = 0;
  std::uint64_t top_level_loop_count = 0;
  std::uint64_t max_loop_depth = 0;
  std::uint64_t critical_edge_count = 0;
  double mean_block_size = 0.0;

  static constexpr std::size_t entry_count = 26;

  static const std::array<const char *, entry_count> &names() {
    static const std::array<const char *, entry_count> n = {
        "total_instructions",
        "basic_block_count",
        "blocks_reached_from_cond_branch",
        "direct_call_count",
        "indirect_call_count",
        "intrinsic_call_count",
        "load_count",
        "store_count",
        "alloca_count",
        "integer_arith_count",
        "float_arith_count",
        "cast_count",
        "cmp_count",
        "phi_count",
        "select_count",
        "gep_count",
        "cond_branch_count",
        "uncond_branch_count",
        "switch_count",
        "return_count",
        "unreachable_count",
        "argument_count",
        "top_level_loop_count",
        "max_loop_depth",
        "critical_edge_count",
        "mean_block_size",
    };
    return n;
  }

  std::array<double, entry_count> values() const {
    return {static_cast<double>(total_instructions),
            static_cast<double>(basic_block_count),
            static_cast<double>(blocks_reached_from_cond_branch),
            static_cast<double>(direct_call_count),
            static_cast<double>(indirect_call_count),
            static_cast<double>(intrinsic_call_count),
            static_cast<double>(load_count),
            static_cast<double>(store_count),
            static_cast<double>(alloca_count),
            static_cast<double>(integer_arith_count),
            static_cast<double>(float_arith_count),
            static_cast<double>(cast_count),
            static_cast<double>(cmp_count),
            static_cast<double>(phi_count),
            static_cast<double>(select_count),
            static_cast<double>(gep_count),
            static_cast<double>(cond_branch_count),
            static_cast<double>(uncond_branch_count),
            static_cast<double>(switch_count),
            static_cast<double>(return_count),
            static_cast<double>(unreachable_count),
            static_cast<double>(argument_count),
            static_cast<double>(top_level_loop_count),
            static_cast<double>(max_loop_depth),
            static_cast<double>(critical_edge_count),
            mean_block_size};
  }
};

namespace detail {

inline bool is_integer_arith(Opcode op) {
  switch (op) {
  case Opcode::Add:
  case Opcode::Sub:
  case Opcode::Mul:
  case Opcode::UDiv:
  case Opcode::SDiv:
  case Opcode::URem:
  case Opcode::SRem:
  case Opcode::Shl:
  case Opcode::LShr:
  case Opcode::AShr:
  case Opcode::And:
  case Opcode::Or:
  case Opcode::Xor:
    return true;
  default:
    return false;
  }
}

inline bool is_float_arith(Opcode op) {
  switch (op) {
  case Opcode::FAdd:
  case Opcode::FSub:
  case Opcode::FMul:
  case Opcode::FDiv:
  case Opcode::FRem:
    return true;
  default:
    return false;
  }
}

inline bool is_cast(Opcode op) {
  switch (op) {
  case Opcode::BitCast:
  case Opcode::Trunc:
  case Opcode::ZExt:
  case Opcode::SExt:
  case Opcode::FPTrunc:
  case Opcode::FPExt:
  case Opcode::FPToUI:
  case Opcode::FPToSI:
  case Opcode::UIToFP:
  case Opcode::SIToFP:
  case Opcode::PtrToInt:
  case Opcode::IntToPtr:
  case Opcode::AddrSpaceCast:
    return true;
  default:
    return false;
  }
}

} // namespace detail

/// Extracts the property vector using precomputed CFG analyses (use this
/// overload when the caller already has them).
inline FeatureVector extract_features(const IrFunction &fn, const Cfg &cfg,
                                      const LoopForest &loops) {
  FeatureVector v;
  v.basic_block_count = fn.blocks.size();
  v.argument_count = fn.params.size();

  std::set<std::size_t> cond_targets;
  for (std::size_t b = 0; b < fn.blocks.size(); ++b) {
    const IrBlock &block = fn.blocks[b];
    for (const IrInstruction &inst : block.instructions) {
      if (inst.is_debug_intrinsic)
        continue; // excluded from every tally
      ++v.total_instructions;
      Opcode op = inst.opcode;
      if (detail::is_integer_arith(op))
        ++v.integer_arith_count;
      else if (detail::is_float_arith(op))
        ++v.float_arith_count;
      else if (detail::is_cast(op))
        ++v.cast_count;
      else if (op == Opcode::ICmp || op == Opcode::FCmp)
        ++v.cmp_count;
      else if (op == Opcode::Load)
        ++v.load_count;
      else if (op == Opcode::Store)
        ++v.store_count;
      else if (op == Opcode::Alloca)
        ++v.alloca_count;
      else if (op == Opcode::Phi)
        ++v.phi_count;
      else if (op == Opcode::Select)
        ++v.select_count;
      else if (op == Opcode::GetElementPtr)
        ++v.gep_count;
      else if (op == Opcode::Call || op == Opcode::Invoke) {
        if (inst.is_intrinsic_call)
          ++v.intrinsic_call_count;
        else if (inst.callee)
          ++v.direct_call_count;
        else
          ++v.indirect_call_count;
      } else if (op == Opcode::CondBr) {
        ++v.cond_branch_count;
        for (std::size_t s : cfg.successors[b])
          cond_targets.insert(s);
      } else if (op == Opcode::Br)
        ++v.uncond_branch_count;
      else if (op == Opcode::Switch)
        ++v.switch_count;
      else if (op == Opcode::Ret)
        ++v.return_count;
      else if (op == Opcode::Unreachable)
        ++v.unreachable_count;
      // remaining opcodes contribute to total_instructions only
    }
  }
  v.blocks_reached_from_cond_branch = cond_targets.size();
  v.top_level_loop_count = loops.top_level_count();
  v.max_loop_depth = loops.max_depth();
  v.critical_edge_count = count_critical_edges(cfg);
  v.mean_block_size =
      v.basic_block_count == 0
          ? 0.0
          : static_cast<double>(v.total_instructions) /
                static_cast<double>(v.basic_block_count);
  return v;
}

inline FeatureVector extract_features(const IrFunction &fn) {
  Cfg cfg = build_cfg(fn);
  DomTree dom = compute_dominators(cfg);
  LoopForest loops = find_natural_loops(cfg, dom);
  return extract_features(fn, cfg, loops);
}

// --- deterministic sampling -------------------------------------------------

namespace detail {

inline std::uint64_t fnv1a_text(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char ch : s) {
    h ^= static_cast<std::uint8_t>(ch);
    h *= 0x100000001b3ull;
  }
  return h;
}

} // namespace detail

/// Uniform sample of `n` distinct indices from [0, population), capped at the
/// population size. Partial Fisher-Yates over an index array; mt19937_64 has
/// a fully specified sequence, so results are identical across platforms.
inline std::vector<std::size_t> sample_indices(std::size_t population,
                                               std::size_t n,
                                               std::uint64_t seed) {
  std::vector<std::size_t> indices(population);
  for (std::size_t i = 0; i < population; ++i)
    indices[i] = i;
  std::size_t take = n < population ? n : population;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng() % (population - i));
    std::swap(indices[i], indices[j]);
  }
  indices.resize(take);
  return indices;
}

/// Per-language seed derivation, so adding a language to a corpus never
/// shifts another language's sample.
inline std::uint64_t language_seed(std::uint64_t seed, LanguageTag lang) {
  return seed ^ detail::fnv1a_text(to_string(lang));
}

// --- histograms ---------------------------------------------------------

struct Histogram {
  std::string property;
  std::vector<double> edges; // strictly increasing, >= 2 entries
  bool log_scale = false;    // rendering hint only; bins are as given
  struct Series {
    LanguageTag language = LanguageTag::Other;
    std::vector<std::uint64_t> counts; // size = edges.size() - 1
    std::uint64_t out_of_range = 0;
    std::uint64_t sample_size = 0;
  };
  std::vector<Series> series;
};

/// Bins values per language into half-open cells [edge[i], edge[i+1]).
/// Values outside [first, last) land in the out_of_range tally.
inline Histogram histogram(
    const std::vector<std::pair<LanguageTag, std::vector<double>>> &values,
    const std::vector<double> &edges, bool log_scale,
    std::string property = {}) {
  if (edges.size() < 2)
    throw Error(ErrorKind::Validation, "histogram needs at least one bin");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i - 1] < edges[i]))
      throw Error(ErrorKind::Validation, "histogram bin edges must increase");

  Histogram h;
  h.property = std::move(property);
  h.edges = edges;
  h.log_scale = log_scale;
  for (const auto &[lang, vals] : values) {
    Histogram::Series s;
    s.language = lang;
    s.counts.assign(edges.size() - 1, 0);
    s.sample_size = vals.size();
    for (double x : vals) {
      if (x < edges.front() || x >= edges.back()) {
        ++s.out_of_range;
        continue;
      }
      // rightmost edge not exceeding x
      std::size_t lo = 0, hi = edges.size() - 1;
      while (lo + 1 < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (edges[mid] <= x)
          lo = mid;
        else
          hi = mid;
      }
      ++s.counts[lo];
    }
    h.series.push_back(std::move(s));
  }
  return h;
}

// --- export -----------------------------------------------------------------

/// One sampled function's row for the export table.
struct FeatureRow {
  LanguageTag language = LanguageTag::Other;
  std::string function_name;
  FeatureVector features;
};

/// Renders the header line of the CSV export.
inline std::string feature_table_header() {
  std::string out = "language,function";
  for (const char *name : FeatureVector::names()) {
    out += ',';
    out += name;
  }
  return out;
}

/// Formats one value: integers exactly, the rational tail with round-trip
/// precision.
inline std::string format_feature_value(double v) {
  if (v >= 0 && v <= 1e15 &&
      v == static_cast<double>(static_cast<std::uint64_t>(v))) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%llu",
                  static_cast<unsigned long long>(v));
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Serializes rows as CSV text (header + one line per row, '\n' endings).
/// Row order is the caller's; corpus-level callers sort by language then
/// sample index before calling.
inline std::string render_feature_table(const std::vector<FeatureRow> &rows) {
  std::string out = feature_table_header();
  out += '\n';
  for (const FeatureRow &row : rows) {
    out += to_string(row.language);
    out += ',';
    out += row.function_name;
    for (double v : row.features.values()) {
      out += ',';
      out += format_feature_value(v);
    }
    out += '\n';
  }
  return out;
}

} // namespace irforge
