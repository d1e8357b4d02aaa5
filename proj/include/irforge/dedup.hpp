//===-- dedup.hpp - Corpus-level deduplication ----------------*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Module-level dedup over structural hashes: the first occurrence in
// manifest order is kept, later equal-hash modules are marked
// removed-duplicate. Marking only; no file is ever deleted. Function-level
// duplicates are counted, never removed.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "irforge/corpus.hpp"
#include "irforge/hash.hpp"
#include "irforge/parser.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace irforge {

struct DedupReport {
  struct LanguageStats {
    std::uint64_t total = 0;
    std::uint64_t removed = 0;
    double duplication_rate = 0.0; // removed / total, 0 when total is 0
  };
  std::uint64_t total_modules = 0;
  std::uint64_t kept = 0;
  std::uint64_t removed = 0;
  std::uint64_t parse_failures = 0; // kept and flagged, never dropped
  std::map<LanguageTag, LanguageStats> per_language;
  std::uint64_t bytes_before = 0;
  std::uint64_t bytes_after = 0;
};

struct DedupResult {
  CorpusManifest manifest;
  DedupReport report;
};

/// Marks duplicate modules in a disassembled corpus. Reads each record's
/// textual IR sibling, hashes the module, and keeps the first occurrence of
/// every hash in manifest order. Unreadable or unparseable records are kept
/// and flagged. Running the result through dedup again changes nothing.
inline DedupResult dedup_corpus(const CorpusManifest &manifest,
                                const std::filesystem::path &corpus_dir,
                                HashMode mode = HashMode::Coarse) {
  DedupResult result;
  result.manifest = manifest;
  DedupReport &report = result.report;

  std::unordered_map<std::uint64_t, bool> seen;
  for (ModuleRecord &record : result.manifest.records) {
    record.dedup_status = DedupStatus::Kept;
    record.parse_failed = false;
    record.module_hash.reset();

    report.total_modules += 1;
    report.bytes_before += record.artifact.byte_size;
    DedupReport::LanguageStats &lang = report.per_language[record.language_tag];
    lang.total += 1;

    std::string text;
    bool parsed = false;
    try {
      text = read_file(record_text_path(record, corpus_dir));
      IrModule module = parse_module(text);
      record.module_hash = hash_module(module, mode).value;
      parsed = true;
    } catch (const Error &) {
      record.parse_failed = true;
      report.parse_failures += 1;
    }

    if (parsed && !seen.emplace(*record.module_hash, true).second) {
      record.dedup_status = DedupStatus::RemovedDuplicate;
      report.removed += 1;
      lang.removed += 1;
    } else {
      report.kept += 1;
      report.bytes_after += record.artifact.byte_size;
    }
  }

  for (auto &[tag, stats] : report.per_language)
    stats.duplication_rate =
        stats.total ? static_cast<double>(stats.removed) /
                          static_cast<double>(stats.total)
                    : 0.0;
  return result;
}

/// Detailed-mode (by default) hashes of every defined function, grouped by
/// the module's language. Declarations contribute nothing. Unparseable
/// records are skipped.
inline std::map<LanguageTag, std::vector<std::uint64_t>>
function_hash_index(const CorpusManifest &manifest,
                    const std::filesystem::path &corpus_dir,
                    HashMode mode = HashMode::Detailed) {
  std::map<LanguageTag, std::vector<std::uint64_t>> index;
  for (const ModuleRecord &record : manifest.records) {
    std::string text;
    IrModule module;
    try {
      text = read_file(record_text_path(record, corpus_dir));
      module = parse_module(text);
    } catch (const Error &) {
      continue;
    }
    std::vector<std::uint64_t> &hashes = index[record.language_tag];
    for (const IrFunction &fn : module.functions)
      if (fn.is_definition)
        hashes.push_back(hash_function(fn, mode).value);
  }
  return index;
}

/// Count-only function-level report: "removed" counts within-language
/// duplicate functions (multiset size minus distinct hashes); nothing is
/// marked or deleted.
inline DedupReport function_dedup_report(
    const std::map<LanguageTag, std::vector<std::uint64_t>> &index) {
  DedupReport report;
  for (const auto &[lang, hashes] : index) {
    std::unordered_map<std::uint64_t, bool> distinct;
    for (std::uint64_t h : hashes)
      distinct.emplace(h, true);
    DedupReport::LanguageStats stats;
    stats.total = hashes.size();
    stats.removed = hashes.size() - distinct.size();
    stats.duplication_rate =
        stats.total ? static_cast<double>(stats.removed) /
                          static_cast<double>(stats.total)
                    : 0.0;
    report.per_language[lang] = stats;
    report.total_modules += stats.total;
    report.removed += stats.removed;
    report.kept += stats.total - stats.removed;
  }
  return report;
}

inline nlohmann::json dedup_report_to_json(const DedupReport &r) {
  nlohmann::json j;
  j["total_modules"] = r.total_modules;
  j["kept"] = r.kept;
  j["removed"] = r.removed;
  j["parse_failures"] = r.parse_failures;
  j["bytes_before"] = r.bytes_before;
  j["bytes_after"] = r.bytes_after;
  j["per_language"] = nlohmann::json::object();
  for (const auto &[lang, stats] : r.per_language) {
    nlohmann::json lj;
    lj["total"] = stats.total;
    lj["removed"] = stats.removed;
    lj["duplication_rate"] = stats.duplication_rate;
    j["per_language"][to_string(lang)] = lj;
  }
  return j;
}

} // namespace irforge
