//===-- stats.hpp - Opcode distributions and duplication matrix -*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Corpus-level statistics: per-language opcode counts with top-k views, and
// the cross-language function-duplication matrix over structural hashes.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "irforge/corpus.hpp"
#include "irforge/hash.hpp"
#include "irforge/lang.hpp"
#include "irforge/parser.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace irforge {

// --- opcode counting ---------------------------------------------------

struct OpcodeCounts {
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;
  LanguageTag language_tag = LanguageTag::Other;
};

/// Counts every instruction in a module by its opcode token. Debug
/// intrinsic calls are excluded; other intrinsic calls (lifetime markers
/// and friends) count as ordinary calls.
inline OpcodeCounts count_opcodes(const IrModule &module) {
  OpcodeCounts result;
  for (const IrFunction &fn : module.functions) {
    if (!fn.is_definition)
      continue;
    for (const IrBlock &block : fn.blocks)
      for (const IrInstruction &inst : block.instructions) {
        if (inst.is_debug_intrinsic)
          continue;
        result.counts[inst.raw_opcode] += 1;
        result.total += 1;
      }
  }
  return result;
}

struct OpcodeTable {
  struct Entry {
    std::string opcode;
    std::uint64_t count = 0;
  };
  struct TopK {
    std::vector<Entry> top;  // count descending, name ascending
    std::uint64_t other = 0; // pooled remainder
    std::uint64_t total = 0;
  };
  std::size_t k = 0;
  std::map<LanguageTag, TopK> per_language;
  TopK aggregate;
};

namespace detail {

inline OpcodeTable::TopK
top_k_view(const std::map<std::string, std::uint64_t> &counts, std::size_t k) {
  OpcodeTable::TopK view;
  std::vector<OpcodeTable::Entry> entries;
  for (const auto &[op, n] : counts) {
    entries.push_back({op, n});
    view.total += n;
  }
  std::sort(entries.begin(), entries.end(),
            [](const OpcodeTable::Entry &a, const OpcodeTable::Entry &b) {
              if (a.count != b.count)
                return a.count > b.count;
              return a.opcode < b.opcode;
            });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i < k)
      view.top.push_back(entries[i]);
    else
      view.other += entries[i].count;
  }
  return view;
}

} // namespace detail

/// Aggregates opcode counts over every non-removed, parseable record and
/// returns per-language and overall top-k tables; counts beyond the top k
/// pool into "other".
inline OpcodeTable opcode_distribution(const CorpusManifest &manifest,
                                       const std::filesystem::path &corpus_dir,
                                       std::size_t k) {
  std::map<LanguageTag, std::map<std::string, std::uint64_t>> per_language;
  std::map<std::string, std::uint64_t> aggregate;

  for (const ModuleRecord &record : manifest.records) {
    if (record.dedup_status == DedupStatus::RemovedDuplicate)
      continue;
    IrModule module;
    try {
      module = parse_module(read_file(record_text_path(record, corpus_dir)));
    } catch (const Error &) {
      continue;
    }
    OpcodeCounts counts = count_opcodes(module);
    auto &lang_counts = per_language[record.language_tag];
    for (const auto &[op, n] : counts.counts) {
      lang_counts[op] += n;
      aggregate[op] += n;
    }
  }

  OpcodeTable table;
  table.k = k;
  for (const auto &[lang, counts] : per_language)
    table.per_language[lang] = detail::top_k_view(counts, k);
  table.aggregate = detail::top_k_view(aggregate, k);
  return table;
}

inline nlohmann::json opcode_table_to_json(const OpcodeTable &t) {
  auto view = [](const OpcodeTable::TopK &v) {
    nlohmann::json j;
    j["top"] = nlohmann::json::array();
    for (const OpcodeTable::Entry &e : v.top)
      j["top"].push_back({{"opcode", e.opcode}, {"count", e.count}});
    j["other"] = v.other;
    j["total"] = v.total;
    return j;
  };
  nlohmann::json j;
  j["k"] = t.k;
  j["aggregate"] = view(t.aggregate);
  j["per_language"] = nlohmann::json::object();
  for (const auto &[lang, v] : t.per_language)
    j["per_language"][to_string(lang)] = view(v);
  return j;
}

// --- cross-language duplication matrix ------------------------------------

struct DuplicationMatrix {
  std::vector<LanguageTag> languages;
  // cells[i][j]: absent when either language holds no functions
  std::vector<std::vector<std::optional<double>>> cells;
  std::string definition =
      "off-diagonal(a,b) = |distinct(a) intersect distinct(b)| / |distinct(a)|;"
      " diagonal(a) = 1 - |distinct(a)| / |a|";
};

/// Builds the function-duplication matrix from per-language hash multisets.
/// Off-diagonal cells are row-normalized (asymmetric); the diagonal is the
/// within-language duplicate fraction. Languages without functions produce
/// absent cells rather than zeros.
inline DuplicationMatrix duplication_heatmap(
    const std::map<LanguageTag, std::vector<std::uint64_t>> &index) {
  DuplicationMatrix matrix;
  std::vector<std::unordered_set<std::uint64_t>> distinct;
  std::vector<std::uint64_t> totals;
  for (const auto &[lang, hashes] : index) {
    matrix.languages.push_back(lang);
    distinct.emplace_back(hashes.begin(), hashes.end());
    totals.push_back(hashes.size());
  }

  std::size_t n = matrix.languages.size();
  matrix.cells.assign(n, std::vector<std::optional<double>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (totals[i] == 0)
      continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (totals[j] == 0)
        continue;
      if (i == j) {
        matrix.cells[i][j] = 1.0 - static_cast<double>(distinct[i].size()) /
                                       static_cast<double>(totals[i]);
        continue;
      }
      std::uint64_t shared = 0;
      for (std::uint64_t h : distinct[j])
        if (distinct[i].count(h))
          ++shared;
      matrix.cells[i][j] = static_cast<double>(shared) /
                           static_cast<double>(distinct[i].size());
    }
  }
  return matrix;
}

inline nlohmann::json duplication_matrix_to_json(const DuplicationMatrix &m) {
  nlohmann::json j;
  j["definition"] = m.definition;
  j["languages"] = nlohmann::json::array();
  for (LanguageTag lang : m.languages)
    j["languages"].push_back(to_string(lang));
  j["cells"] = nlohmann::json::array();
  for (const auto &row : m.cells) {
    nlohmann::json rj = nlohmann::json::array();
    for (const auto &cell : row) {
      if (cell)
        rj.push_back(*cell);
      else
        rj.push_back(nullptr);
    }
    j["cells"].push_back(rj);
  }
  return j;
}

} // namespace irforge
