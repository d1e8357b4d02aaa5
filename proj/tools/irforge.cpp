//===-- irforge.cpp - The ir-forge command-line driver ---------*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Wires the library into the corpus pipeline:
//   build -> scan -> disassemble -> dedup -> analyze -> report
//
// Exit codes: 0 success, 1 operation error, 2 usage error. Diagnostics go to
// stderr; data goes to files or stdout.
//
//===----------------------------------------------------------------------===//

#include "irforge/build.hpp"
#include "irforge/dedup.hpp"
#include "irforge/report.hpp"
#include "irforge/tokenizer.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct GlobalOpts {
  std::string out = "out";
  unsigned jobs = 1;
  std::string config;
  std::uint64_t seed = 0;
};

irforge::ToolchainConfig resolve_tools(const GlobalOpts &g) {
  if (!g.config.empty())
    return irforge::ToolchainConfig::from_config_file(g.config);
  return irforge::ToolchainConfig::from_environment();
}

irforge::CorpusManifest load_corpus(const GlobalOpts &g) {
  return irforge::load_manifest(std::filesystem::path(g.out) /
                                "manifest.json");
}

void save_corpus(const GlobalOpts &g, const irforge::CorpusManifest &m) {
  irforge::write_manifest(m, std::filesystem::path(g.out) / "manifest.json");
}

std::uint64_t non_debug_instruction_count(const irforge::IrFunction &fn) {
  std::uint64_t n = 0;
  for (const irforge::IrBlock &b : fn.blocks)
    for (const irforge::IrInstruction &inst : b.instructions)
      if (!inst.is_debug_intrinsic)
        ++n;
  return n;
}

void cmd_build(const GlobalOpts &g, const std::string &package_list) {
  irforge::ToolchainConfig tools = resolve_tools(g);
  std::vector<irforge::PackageDescriptor> packages =
      irforge::parse_package_list(irforge::read_file(package_list));
  irforge::CorpusManifest manifest =
      irforge::run_corpus_build(packages, g.out, tools, g.jobs);
  std::size_t failures = 0;
  for (const irforge::BuildNote &note : manifest.build_notes) {
    std::cerr << note.package << ": " << note.status << ": " << note.detail
              << "\n";
    if (note.status == "failed")
      ++failures;
  }
  std::cerr << "built " << packages.size() - manifest.build_notes.size()
            << "/" << packages.size() << " packages, "
            << manifest.records.size() << " modules harvested\n";
}

void cmd_scan(const std::string &tree, const std::string &strategy) {
  irforge::ExtractionStrategy s =
      strategy == "raw" ? irforge::ExtractionStrategy::RawFile
                        : irforge::ExtractionStrategy::EmbeddedSection;
  irforge::ScanResult result = irforge::scan_build_tree(tree, s);
  for (const std::string &w : result.warnings)
    std::cerr << "warning: " << w << "\n";
  for (const irforge::BitcodeArtifact &a : result.artifacts)
    std::cout << a.path << "\n";
}

void cmd_disassemble(const GlobalOpts &g) {
  irforge::ToolchainConfig tools = resolve_tools(g);
  irforge::CorpusManifest manifest = load_corpus(g);
  std::size_t done = 0;
  for (irforge::ModuleRecord &record : manifest.records) {
    try {
      irforge::disassemble_record(record, g.out, tools);
      ++done;
    } catch (const irforge::Error &e) {
      if (e.kind() == irforge::ErrorKind::ToolUnavailable)
        throw;
      std::cerr << "warning: " << record.artifact.path << ": " << e.what()
                << "\n";
    }
  }
  save_corpus(g, manifest);
  std::cerr << "disassembled " << done << "/" << manifest.records.size()
            << " modules\n";
}

void cmd_extract_fn(const std::string &module_path, const std::string &name,
                    const std::string &output) {
  std::string text = irforge::read_file(module_path);
  std::string sliced = irforge::extract_function(text, name);
  if (output.empty())
    std::cout << sliced;
  else
    irforge::write_file(output, sliced);
}

void cmd_dedup(const GlobalOpts &g, const std::string &mode_str,
               const std::string &level) {
  irforge::CorpusManifest manifest = load_corpus(g);
  std::filesystem::path dir(g.out);
  if (level == "function") {
    irforge::HashMode mode = mode_str == "coarse" ? irforge::HashMode::Coarse
                                                  : irforge::HashMode::Detailed;
    auto index = irforge::function_hash_index(manifest, dir, mode);
    irforge::DedupReport report = irforge::function_dedup_report(index);
    irforge::write_file(dir / "function_dedup_report.json",
                        irforge::dedup_report_to_json(report).dump(2) + "\n");
    std::cerr << "functions: " << report.total_modules << ", duplicates: "
              << report.removed << "\n";
    return;
  }
  irforge::HashMode mode = mode_str == "detailed" ? irforge::HashMode::Detailed
                                                  : irforge::HashMode::Coarse;
  irforge::DedupResult result = irforge::dedup_corpus(manifest, dir, mode);
  save_corpus(g, result.manifest);
  irforge::write_file(dir / "dedup_report.json",
                      irforge::dedup_report_to_json(result.report).dump(2) +
                          "\n");
  std::cerr << "modules: " << result.report.total_modules
            << ", kept: " << result.report.kept
            << ", removed: " << result.report.removed
            << ", parse failures: " << result.report.parse_failures << "\n";
}

void cmd_analyze_features(const GlobalOpts &g, std::uint64_t sample) {
  irforge::CorpusManifest manifest = load_corpus(g);
  std::filesystem::path dir(g.out);

  std::map<irforge::LanguageTag, std::vector<irforge::FeatureRow>> by_lang;
  for (const irforge::ModuleRecord &record : manifest.records) {
    if (record.dedup_status == irforge::DedupStatus::RemovedDuplicate)
      continue;
    irforge::IrModule module;
    try {
      module = irforge::parse_module(
          irforge::read_file(irforge::record_text_path(record, dir)));
    } catch (const irforge::Error &e) {
      std::cerr << "warning: " << record.artifact.path << ": " << e.what()
                << "\n";
      continue;
    }
    for (const irforge::IrFunction &fn : module.functions) {
      if (!fn.is_definition)
        continue;
      irforge::FeatureRow row;
      row.language = record.language_tag;
      row.function_name = fn.name;
      try {
        row.features = irforge::extract_features(fn);
      } catch (const irforge::Error &e) {
        std::cerr << "warning: " << fn.name << ": " << e.what() << "\n";
        continue;
      }
      by_lang[record.language_tag].push_back(std::move(row));
    }
  }

  std::vector<irforge::FeatureRow> rows;
  for (auto &[lang, lang_rows] : by_lang) {
    if (sample > 0 && sample < lang_rows.size()) {
      std::vector<std::size_t> picks = irforge::sample_indices(
          lang_rows.size(), sample, irforge::language_seed(g.seed, lang));
      std::sort(picks.begin(), picks.end());
      for (std::size_t i : picks)
        rows.push_back(lang_rows[i]);
    } else {
      for (irforge::FeatureRow &row : lang_rows)
        rows.push_back(std::move(row));
    }
  }

  std::filesystem::path out_csv = dir / "reports" / "features.csv";
  irforge::write_file(out_csv, irforge::render_feature_table(rows));
  std::cerr << "wrote " << out_csv.string() << " (" << rows.size()
            << " functions)\n";
}

void cmd_analyze_opcodes(const GlobalOpts &g, std::size_t top) {
  irforge::CorpusManifest manifest = load_corpus(g);
  irforge::OpcodeTable table =
      irforge::opcode_distribution(manifest, g.out, top);
  std::cout << irforge::opcode_table_to_json(table).dump(2) << "\n";
}

void cmd_analyze_passes(const GlobalOpts &g, const std::string &pipeline,
                        const std::string &granularity,
                        const std::vector<std::string> &exclude_langs,
                        bool per_occurrence, const std::string &log_path) {
  if (!log_path.empty()) {
    // Offline replay of a recorded log: print the event list.
    std::string log = irforge::read_file(log_path);
    for (const irforge::PassEvent &e : irforge::parse_print_changed(log)) {
      const char *status = e.status == irforge::PassStatus::Changed
                               ? "changed"
                               : e.status == irforge::PassStatus::Unchanged
                                     ? "unchanged"
                                     : "ignored";
      std::cout << e.pass_name << "\t" << e.target << "\t" << status << "\n";
    }
    return;
  }
  irforge::ToolchainConfig tools = resolve_tools(g);
  irforge::CorpusManifest manifest = load_corpus(g);
  std::vector<irforge::LanguageTag> excluded;
  for (const std::string &name : exclude_langs) {
    auto tag = irforge::parse_language_tag(name);
    if (!tag)
      throw irforge::Error(irforge::ErrorKind::Validation,
                           "unknown language: " + name);
    excluded.push_back(*tag);
  }
  irforge::TraceGranularity gran = granularity == "module"
                                       ? irforge::TraceGranularity::Module
                                       : irforge::TraceGranularity::Function;
  irforge::TraceResult result =
      irforge::trace_corpus(manifest, g.out, pipeline, gran, tools, excluded,
                            per_occurrence);
  for (const std::string &w : result.warnings)
    std::cerr << "warning: " << w << "\n";
  std::cout << irforge::render_mutation_table(result.table);
}

void cmd_analyze_heatmap(const GlobalOpts &g) {
  irforge::CorpusManifest manifest = load_corpus(g);
  auto index = irforge::function_hash_index(manifest, g.out);
  irforge::DuplicationMatrix matrix = irforge::duplication_heatmap(index);
  std::cout << irforge::duplication_matrix_to_json(matrix).dump(2) << "\n";
}

void cmd_tokenize(const GlobalOpts &g, const std::string &vocab_list,
                  std::uint64_t sample_per_lang) {
  std::vector<std::size_t> vocab_sizes;
  std::size_t pos = 0;
  while (pos < vocab_list.size()) {
    std::size_t comma = vocab_list.find(',', pos);
    std::string item = vocab_list.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    pos = comma == std::string::npos ? vocab_list.size() : comma + 1;
    if (item.empty())
      continue;
    char *end = nullptr;
    unsigned long long v = std::strtoull(item.c_str(), &end, 10);
    if (!end || *end != '\0' || v == 0)
      throw irforge::Error(irforge::ErrorKind::Validation,
                           "bad vocab size '" + item + "'");
    vocab_sizes.push_back(static_cast<std::size_t>(v));
  }
  if (vocab_sizes.empty())
    throw irforge::Error(irforge::ErrorKind::Validation,
                         "no vocabulary sizes given");

  irforge::CorpusManifest manifest = load_corpus(g);
  std::filesystem::path dir(g.out);

  // Gather module texts per language, in manifest order.
  std::map<irforge::LanguageTag, std::vector<std::string>> texts_by_lang;
  for (const irforge::ModuleRecord &record : manifest.records) {
    if (record.dedup_status == irforge::DedupStatus::RemovedDuplicate)
      continue;
    try {
      texts_by_lang[record.language_tag].push_back(
          irforge::read_file(irforge::record_text_path(record, dir)));
    } catch (const irforge::Error &e) {
      std::cerr << "warning: " << record.artifact.path << ": " << e.what()
                << "\n";
    }
  }

  std::vector<std::string> sample;
  for (auto &[lang, texts] : texts_by_lang) {
    if (sample_per_lang > 0 && sample_per_lang < texts.size()) {
      std::vector<std::size_t> picks = irforge::sample_indices(
          texts.size(), sample_per_lang,
          irforge::language_seed(g.seed, lang));
      std::sort(picks.begin(), picks.end());
      for (std::size_t i : picks)
        sample.push_back(texts[i]);
    } else {
      for (std::string &t : texts)
        sample.push_back(std::move(t));
    }
  }
  if (sample.empty())
    throw irforge::Error(irforge::ErrorKind::Validation,
                         "no module texts available; disassemble first");

  nlohmann::json out;
  out["sample_modules"] = sample.size();
  out["runs"] = nlohmann::json::array();
  for (std::size_t vocab : vocab_sizes) {
    irforge::BpeModel model = irforge::train_bpe(sample, vocab);
    std::filesystem::path model_path =
        dir / "reports" / ("bpe_" + std::to_string(vocab) + ".txt");
    irforge::write_file(model_path, irforge::serialize_bpe(model));
    std::uint64_t tokens = 0;
    for (const std::string &text : sample)
      tokens += irforge::tokenize_count(model, text);
    nlohmann::json run;
    run["vocab_size"] = vocab;
    run["merges"] = model.merges.size();
    run["total_tokens"] = tokens;
    run["model"] = model_path.string();
    out["runs"].push_back(run);
  }
  std::cout << out.dump(2) << "\n";
}

void cmd_size_report(const GlobalOpts &g) {
  irforge::CorpusManifest manifest = load_corpus(g);
  irforge::SizeReport report = irforge::corpus_size_report(manifest);
  std::cout << irforge::size_report_to_json(report).dump(2) << "\n";
}

void cmd_report(const GlobalOpts &g, const std::string &pipeline) {
  irforge::CorpusManifest manifest = load_corpus(g);
  std::filesystem::path dir(g.out);

  irforge::ReportInputs inputs;
  inputs.opcodes = irforge::opcode_distribution(manifest, dir, 10);
  inputs.heatmap =
      irforge::duplication_heatmap(irforge::function_hash_index(manifest, dir));

  // Function-size histogram over power-of-two bins.
  std::vector<double> edges;
  for (double e = 1; e <= 16384; e *= 2)
    edges.push_back(e);
  std::map<irforge::LanguageTag, std::vector<double>> sizes;
  for (const irforge::ModuleRecord &record : manifest.records) {
    if (record.dedup_status == irforge::DedupStatus::RemovedDuplicate)
      continue;
    try {
      irforge::IrModule module = irforge::parse_module(
          irforge::read_file(irforge::record_text_path(record, dir)));
      for (const irforge::IrFunction &fn : module.functions)
        if (fn.is_definition)
          sizes[record.language_tag].push_back(
              static_cast<double>(non_debug_instruction_count(fn)));
    } catch (const irforge::Error &e) {
      std::cerr << "warning: " << record.artifact.path << ": " << e.what()
                << "\n";
    }
  }
  std::vector<std::pair<irforge::LanguageTag, std::vector<double>>> values(
      sizes.begin(), sizes.end());
  if (!values.empty())
    inputs.histograms.push_back(
        irforge::histogram(values, edges, true, "total_instructions"));

  if (!pipeline.empty()) {
    irforge::ToolchainConfig tools = resolve_tools(g);
    if (tools.opt.empty() || !irforge::command_available(tools.opt)) {
      std::cerr << "notice: optimizer unavailable, pass table skipped\n";
    } else {
      irforge::TraceResult trace = irforge::trace_corpus(
          manifest, dir, pipeline, irforge::TraceGranularity::Function, tools);
      for (const std::string &w : trace.warnings)
        std::cerr << "warning: " << w << "\n";
      inputs.passes = std::move(trace.table);
    }
  }

  irforge::ReportOutput output =
      irforge::render_report(inputs, dir / "reports");
  for (const std::string &notice : output.notices)
    std::cerr << "notice: " << notice << "\n";
  for (const std::string &file : output.files)
    std::cout << file << "\n";
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"ir-forge: build, deduplicate, and analyze LLVM-IR corpora"};
  app.set_version_flag("--version", irforge::tool_version);
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--out", g.out, "Corpus/output directory")
      ->capture_default_str();
  app.add_option("--jobs", g.jobs, "Parallel build jobs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--config", g.config, "Toolchain config file (key=value)");
  app.add_option("--seed", g.seed, "Sampling seed")->capture_default_str();

  auto *build = app.add_subcommand("build", "Build packages and harvest IR");
  static std::string package_list;
  build->add_option("packages", package_list, "Package list JSON file")
      ->required();
  build->callback([&] { cmd_build(g, package_list); });

  auto *scan = app.add_subcommand("scan", "List IR-bearing files in a tree");
  static std::string scan_tree, scan_strategy = "embedded";
  scan->add_option("tree", scan_tree, "Build tree to scan")->required();
  scan->add_option("--strategy", scan_strategy, "embedded or raw")
      ->check(CLI::IsMember({"embedded", "raw"}))
      ->capture_default_str();
  scan->callback([&] { cmd_scan(scan_tree, scan_strategy); });

  auto *dis = app.add_subcommand("disassemble",
                                 "Disassemble corpus bitcode to textual IR");
  dis->callback([&] { cmd_disassemble(g); });

  auto *extract = app.add_subcommand("extract-fn",
                                     "Slice one function out of a module");
  static std::string ex_module, ex_name, ex_out;
  extract->add_option("module", ex_module, "Textual IR file")->required();
  extract->add_option("function", ex_name, "Function name (no @)")->required();
  extract->add_option("-o,--output", ex_out, "Output file (default stdout)");
  extract->callback([&] { cmd_extract_fn(ex_module, ex_name, ex_out); });

  auto *dedup = app.add_subcommand("dedup", "Mark duplicate modules");
  static std::string dd_mode = "", dd_level = "module";
  dedup->add_option("--mode", dd_mode, "coarse or detailed")
      ->check(CLI::IsMember({"coarse", "detailed"}));
  dedup->add_option("--level", dd_level, "module or function")
      ->check(CLI::IsMember({"module", "function"}))
      ->capture_default_str();
  dedup->callback([&] { cmd_dedup(g, dd_mode, dd_level); });

  auto *analyze = app.add_subcommand("analyze", "Corpus analyses");
  analyze->require_subcommand(1);

  auto *features = analyze->add_subcommand("features",
                                           "Per-function feature vectors");
  static std::uint64_t ft_sample = 0;
  features->add_option("--sample", ft_sample,
                       "Functions sampled per language (0 = all)");
  features->callback([&] { cmd_analyze_features(g, ft_sample); });

  auto *opcodes = analyze->add_subcommand("opcodes", "Opcode distribution");
  static std::size_t op_top = 10;
  opcodes->add_option("--top", op_top, "Top-k opcodes")->capture_default_str();
  opcodes->callback([&] { cmd_analyze_opcodes(g, op_top); });

  auto *passes = analyze->add_subcommand("passes",
                                         "Per-pass mutation frequencies");
  static std::string ps_pipeline = "default<O3>", ps_gran = "function",
                     ps_log;
  static std::vector<std::string> ps_exclude;
  static bool ps_per_occurrence = false;
  passes->add_option("--pipeline", ps_pipeline, "Pass pipeline spec")
      ->capture_default_str();
  passes->add_option("--granularity", ps_gran, "function or module")
      ->check(CLI::IsMember({"function", "module"}))
      ->capture_default_str();
  passes->add_option("--exclude-lang", ps_exclude,
                     "Languages to skip (repeatable)");
  passes->add_flag("--per-occurrence", ps_per_occurrence,
                   "Key rows by pass occurrence, not pooled name");
  passes->add_option("--log", ps_log,
                     "Replay a recorded change log instead of running");
  passes->callback([&] {
    cmd_analyze_passes(g, ps_pipeline, ps_gran, ps_exclude, ps_per_occurrence,
                       ps_log);
  });

  auto *heatmap = analyze->add_subcommand(
      "dup-heatmap", "Cross-language function duplication matrix");
  heatmap->callback([&] { cmd_analyze_heatmap(g); });

  auto *tokenize = app.add_subcommand("tokenize",
                                      "Train BPE models and count tokens");
  static std::string tk_vocab = "3000";
  static std::uint64_t tk_sample = 0;
  tokenize->add_option("--vocab", tk_vocab,
                       "Comma-separated vocabulary sizes")
      ->capture_default_str();
  tokenize->add_option("--sample-per-lang", tk_sample,
                       "Modules sampled per language (0 = all)");
  tokenize->callback([&] { cmd_tokenize(g, tk_vocab, tk_sample); });

  auto *size = app.add_subcommand("size-report",
                                  "Text/bitcode size totals and ratio");
  size->callback([&] { cmd_size_report(g); });

  auto *report = app.add_subcommand("report", "Write JSON + SVG reports");
  static std::string rp_pipeline;
  report->add_option("--pipeline", rp_pipeline,
                     "Also trace passes with this pipeline");
  report->callback([&] { cmd_report(g, rp_pipeline); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  } catch (const irforge::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
