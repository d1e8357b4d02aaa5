//===-- passtrace.hpp - Optimizer change-log analysis ---------*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Drives an external optimizer with change reporting enabled, parses the
// dump banners from its diagnostic stream, and aggregates per-pass mutation
// frequencies per language. Recorded logs are first-class inputs, so all of
// this is testable without a toolchain.
//
// Banner grammar (bit-exact):
//   changed    *** IR Dump After <PassName> on <target> ***
//   unchanged  *** IR Dump After <PassName> on <target> omitted because no change ***
//   ignored    *** IR Dump After <PassName> on <target> filtered out ***
//
//===----------------------------------------------------------------------===//

#pragma once

#include "irforge/corpus.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irforge {

enum class PassStatus { Changed, Unchanged, Ignored };

struct PassEvent {
  std::string pass_name;
  std::string target;
  PassStatus status = PassStatus::Changed;
};

/// Extracts pass events from an optimizer log. Total: every line either
/// matches the banner grammar or is skipped, so injected noise never breaks
/// parsing. Events come back in log order.
inline std::vector<PassEvent> parse_print_changed(std::string_view log) {
  constexpr std::string_view prefix = "*** IR Dump After ";
  constexpr std::string_view suffix = " ***";
  constexpr std::string_view unchanged_mark = " omitted because no change";
  constexpr std::string_view ignored_mark = " filtered out";

  std::vector<PassEvent> events;
  std::size_t pos = 0;
  while (pos <= log.size()) {
    std::size_t eol = log.find('\n', pos);
    std::string_view line = log.substr(
        pos, eol == std::string_view::npos ? log.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? log.size() + 1 : eol + 1;
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);

    if (line.size() < prefix.size() + suffix.size() ||
        line.substr(0, prefix.size()) != prefix ||
        line.substr(line.size() - suffix.size()) != suffix)
      continue;
    std::string_view middle =
        line.substr(prefix.size(), line.size() - prefix.size() - suffix.size());

    PassStatus status = PassStatus::Changed;
    if (middle.size() >= unchanged_mark.size() &&
        middle.substr(middle.size() - unchanged_mark.size()) ==
            unchanged_mark) {
      status = PassStatus::Unchanged;
      middle.remove_suffix(unchanged_mark.size());
    } else if (middle.size() >= ignored_mark.size() &&
               middle.substr(middle.size() - ignored_mark.size()) ==
                   ignored_mark) {
      status = PassStatus::Ignored;
      middle.remove_suffix(ignored_mark.size());
    }

    std::size_t on = middle.find(" on ");
    if (on == std::string_view::npos || on == 0 || on + 4 >= middle.size())
      continue;
    PassEvent event;
    event.pass_name = std::string(middle.substr(0, on));
    event.target = std::string(middle.substr(on + 4));
    event.status = status;
    if (event.pass_name.empty())
      continue;
    events.push_back(std::move(event));
  }
  return events;
}

struct OptRun {
  std::string log;
  int exit_code = 0;
};

/// Invokes the configured optimizer as
/// `<opt> -passes=<pipeline> -print-changed -disable-output <file>` and
/// returns the combined diagnostic stream. A nonzero exit is recorded, and
/// the log still comes back when one was produced.
inline OptRun run_opt_trace(const std::filesystem::path &module_path,
                            const std::string &pipeline_spec,
                            const ToolchainConfig &tools) {
  if (pipeline_spec.empty())
    throw Error(ErrorKind::Validation, "empty pass pipeline");
  if (tools.opt.empty() || !command_available(tools.opt))
    throw Error(ErrorKind::ToolUnavailable,
                "no optimizer configured (set IRFORGE_OPT)");
  RunResult run =
      run_command({tools.opt, "-passes=" + pipeline_spec, "-print-changed",
                   "-disable-output", module_path.string()});
  if (run.exit_code != 0 && run.output.empty())
    throw Error(ErrorKind::Tool,
                "optimizer exited " + std::to_string(run.exit_code) +
                    " with no output on " + module_path.string());
  return OptRun{run.output, run.exit_code};
}

// --- aggregation ------------------------------------------------------------

struct MutationCell {
  std::uint64_t targets_seen = 0;
  std::uint64_t targets_changed = 0;
  std::optional<double> frequency; // absent when targets_seen = 0
};

struct MutationRow {
  std::string pass_name;
  std::map<LanguageTag, MutationCell> per_language;
  double max_frequency = 0.0;
};

struct MutationTable {
  std::vector<LanguageTag> languages;
  std::vector<MutationRow> rows; // max frequency descending, name ascending
};

/// One optimizer invocation's parsed events.
using TraceRun = std::vector<PassEvent>;

/// Aggregates per-pass change frequencies per language. Ignored events never
/// enter numerator or denominator. Pooled mode keys rows by pass name; with
/// per_occurrence set, repeated runs of a pass on the same target get
/// distinct "name#k" rows.
inline MutationTable
mutation_frequency(const std::map<LanguageTag, std::vector<TraceRun>> &runs,
                   bool per_occurrence = false) {
  MutationTable table;
  std::map<std::string, MutationRow> rows;

  for (const auto &[lang, lang_runs] : runs) {
    table.languages.push_back(lang);
    for (const TraceRun &run : lang_runs) {
      std::map<std::pair<std::string, std::string>, std::uint64_t> occurrence;
      for (const PassEvent &event : run) {
        if (event.status == PassStatus::Ignored)
          continue;
        std::string key = event.pass_name;
        if (per_occurrence) {
          std::uint64_t k = ++occurrence[{event.pass_name, event.target}];
          key += "#" + std::to_string(k);
        }
        MutationRow &row = rows[key];
        row.pass_name = key;
        MutationCell &cell = row.per_language[lang];
        cell.targets_seen += 1;
        if (event.status == PassStatus::Changed)
          cell.targets_changed += 1;
      }
    }
  }

  for (auto &[key, row] : rows) {
    for (auto &[lang, cell] : row.per_language)
      if (cell.targets_seen) {
        cell.frequency = static_cast<double>(cell.targets_changed) /
                         static_cast<double>(cell.targets_seen);
        row.max_frequency = std::max(row.max_frequency, *cell.frequency);
      }
    table.rows.push_back(std::move(row));
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [](const MutationRow &a, const MutationRow &b) {
              if (a.max_frequency != b.max_frequency)
                return a.max_frequency > b.max_frequency;
              return a.pass_name < b.pass_name;
            });
  return table;
}

enum class TraceGranularity { Function, Module };

struct TraceResult {
  MutationTable table;
  std::vector<std::string> warnings; // per-target failures, excluded from counts
};

/// Runs the optimizer over every kept module (or every extracted function)
/// in the corpus and aggregates the change logs. Crashing targets are logged
/// and excluded from denominators; excluded languages are skipped entirely.
inline TraceResult
trace_corpus(const CorpusManifest &manifest,
             const std::filesystem::path &corpus_dir,
             const std::string &pipeline_spec, TraceGranularity granularity,
             const ToolchainConfig &tools,
             const std::vector<LanguageTag> &exclude_languages = {},
             bool per_occurrence = false) {
  namespace fs = std::filesystem;
  if (pipeline_spec.empty())
    throw Error(ErrorKind::Validation, "empty pass pipeline");

  auto excluded = [&](LanguageTag tag) {
    for (LanguageTag t : exclude_languages)
      if (t == tag)
        return true;
    return false;
  };

  TraceResult result;
  std::map<LanguageTag, std::vector<TraceRun>> runs;
  fs::path scratch =
      fs::temp_directory_path() / ("irforge-trace-" + std::to_string(getpid()));

  auto trace_one = [&](const fs::path &file, LanguageTag lang) {
    try {
      OptRun run = run_opt_trace(file, pipeline_spec, tools);
      if (run.exit_code != 0) {
        result.warnings.push_back("optimizer exited " +
                                  std::to_string(run.exit_code) + " on " +
                                  file.string());
        return;
      }
      runs[lang].push_back(parse_print_changed(run.log));
    } catch (const Error &e) {
      if (e.kind() == ErrorKind::ToolUnavailable)
        throw;
      result.warnings.push_back(e.what());
    }
  };

  for (const ModuleRecord &record : manifest.records) {
    if (record.dedup_status == DedupStatus::RemovedDuplicate ||
        excluded(record.language_tag))
      continue;
    fs::path text_path = record_text_path(record, corpus_dir);
    if (granularity == TraceGranularity::Module) {
      trace_one(text_path, record.language_tag);
      continue;
    }
    std::string text;
    IrModule module;
    try {
      text = read_file(text_path);
      module = parse_module(text);
    } catch (const Error &e) {
      result.warnings.push_back(e.what());
      continue;
    }
    std::size_t n = 0;
    for (const IrFunction &fn : module.functions) {
      if (!fn.is_definition)
        continue;
      try {
        std::string sliced = extract_function(text, fn.name);
        fs::path file = scratch / (std::to_string(n) + ".ll");
        write_file(file, sliced);
        trace_one(file, record.language_tag);
      } catch (const Error &e) {
        if (e.kind() == ErrorKind::ToolUnavailable)
          throw;
        result.warnings.push_back(e.what());
      }
      ++n;
    }
  }

  std::error_code ec;
  fs::remove_all(scratch, ec);
  result.table = mutation_frequency(runs, per_occurrence);
  return result;
}

inline nlohmann::json mutation_table_to_json(const MutationTable &t) {
  nlohmann::json j;
  j["languages"] = nlohmann::json::array();
  for (LanguageTag lang : t.languages)
    j["languages"].push_back(to_string(lang));
  j["rows"] = nlohmann::json::array();
  for (const MutationRow &row : t.rows) {
    nlohmann::json rj;
    rj["pass"] = row.pass_name;
    rj["per_language"] = nlohmann::json::object();
    for (const auto &[lang, cell] : row.per_language) {
      nlohmann::json cj;
      cj["targets_seen"] = cell.targets_seen;
      cj["targets_changed"] = cell.targets_changed;
      if (cell.frequency)
        cj["frequency"] = *cell.frequency;
      rj["per_language"][to_string(lang)] = cj;
    }
    j["rows"].push_back(rj);
  }
  return j;
}

/// Plain-text rendering for terminal output.
inline std::string render_mutation_table(const MutationTable &t) {
  std::string out = "pass";
  for (LanguageTag lang : t.languages)
    out += "\t" + to_string(lang);
  out += "\n";
  for (const MutationRow &row : t.rows) {
    out += row.pass_name;
    for (LanguageTag lang : t.languages) {
      auto it = row.per_language.find(lang);
      out += "\t";
      if (it == row.per_language.end() || !it->second.frequency) {
        out += "-";
      } else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f (%llu/%llu)",
                      *it->second.frequency,
                      static_cast<unsigned long long>(
                          it->second.targets_changed),
                      static_cast<unsigned long long>(it->second.targets_seen));
        out += buf;
      }
    }
    out += "\n";
  }
  return out;
}

} // namespace irforge
