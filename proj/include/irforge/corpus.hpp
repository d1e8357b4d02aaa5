//===-- corpus.hpp - Package descriptors and the corpus manifest -*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// The data layer of the pipeline: package lists, dependency scheduling,
// build-tree scanning, embedded-bitcode extraction, disassembly, textual
// function extraction, and the on-disk corpus manifest.
//
// Corpus layout: <out>/<package>/<n>.bc files plus <out>/manifest.json.
// Disassembly writes a sibling <n>.ll per record.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "irforge/elf.hpp"
#include "irforge/errors.hpp"
#include "irforge/lang.hpp"
#include "irforge/lexer.hpp"
#include "irforge/parser.hpp"
#include "irforge/process.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <unistd.h>

namespace irforge {

inline constexpr const char *tool_version = "0.1.0";

// --- package descriptors ------------------------------------------------

enum class Ecosystem {
  Cargo,
  SwiftPm,
  SpackLike,
  CMake,
  Autotools,
  RawShell,
  Prebuilt,
};

inline const char *to_string(Ecosystem e) {
  switch (e) {
  case Ecosystem::Cargo:
    return "cargo";
  case Ecosystem::SwiftPm:
    return "swiftpm";
  case Ecosystem::SpackLike:
    return "spack-like";
  case Ecosystem::CMake:
    return "cmake";
  case Ecosystem::Autotools:
    return "autotools";
  case Ecosystem::RawShell:
    return "raw-shell";
  case Ecosystem::Prebuilt:
    return "prebuilt";
  }
  return "raw-shell";
}

inline std::optional<Ecosystem> parse_ecosystem(std::string_view s) {
  if (s == "cargo")
    return Ecosystem::Cargo;
  if (s == "swiftpm")
    return Ecosystem::SwiftPm;
  if (s == "spack-like")
    return Ecosystem::SpackLike;
  if (s == "cmake")
    return Ecosystem::CMake;
  if (s == "autotools")
    return Ecosystem::Autotools;
  if (s == "raw-shell")
    return Ecosystem::RawShell;
  if (s == "prebuilt")
    return Ecosystem::Prebuilt;
  return std::nullopt;
}

enum class SourceKind { Git, Tarball, Local };

struct SourceSpec {
  SourceKind kind = SourceKind::Local;
  std::string location; // URL or path
  std::optional<std::string> ref;
  std::shared_ptr<SourceSpec> fallback; // e.g. registry tarball behind a git URL
};

struct PackageDescriptor {
  std::string name;
  Ecosystem ecosystem = Ecosystem::RawShell;
  SourceSpec source;
  std::vector<std::string> build_commands;
  std::vector<std::string> dependencies;
  std::vector<std::string> extra_flags;
  LanguageTag language_tag = LanguageTag::Other;
};

// --- artifacts and manifest ----------------------------------------------

enum class ArtifactEncoding { Bitcode, Textual };
enum class ExtractionStrategy { EmbeddedSection, RawFile };
enum class DedupStatus { Kept, RemovedDuplicate, Unprocessed };

inline const char *to_string(ArtifactEncoding e) {
  return e == ArtifactEncoding::Bitcode ? "bitcode" : "textual";
}
inline const char *to_string(ExtractionStrategy s) {
  return s == ExtractionStrategy::EmbeddedSection ? "embedded-section"
                                                  : "raw-file";
}
inline const char *to_string(DedupStatus s) {
  switch (s) {
  case DedupStatus::Kept:
    return "kept";
  case DedupStatus::RemovedDuplicate:
    return "removed-duplicate";
  case DedupStatus::Unprocessed:
    return "unprocessed";
  }
  return "unprocessed";
}

struct BitcodeArtifact {
  std::string origin_package;
  std::string path; // corpus-relative after harvesting
  ArtifactEncoding encoding = ArtifactEncoding::Bitcode;
  std::uint64_t byte_size = 0;
  ExtractionStrategy extraction_strategy = ExtractionStrategy::RawFile;
};

struct ModuleRecord {
  BitcodeArtifact artifact;
  LanguageTag language_tag = LanguageTag::Other;
  std::optional<std::uint64_t> module_hash;
  DedupStatus dedup_status = DedupStatus::Unprocessed;
  std::optional<std::uint64_t> text_size; // set once disassembled
  bool parse_failed = false;              // set by analyses that parse text
};

struct BuildNote {
  std::string package;
  std::string status; // "failed", "skipped", "partial"
  std::string detail;
};

struct CorpusManifest {
  std::vector<ModuleRecord> records;
  std::vector<BuildNote> build_notes;
  std::string created_at;
  std::string version = tool_version;
};

// --- small file helpers ---------------------------------------------------

inline std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path &path,
                       std::string_view contents) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(contents.data(),
            static_cast<std::streamsize>(contents.size()));
  if (!out)
    throw Error(ErrorKind::Io, "short write to " + path.string());
}

/// UTC timestamp for manifests; honors SOURCE_DATE_EPOCH so corpus builds can
/// be byte-reproducible.
inline std::string manifest_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char *sde = std::getenv("SOURCE_DATE_EPOCH")) {
    char *end = nullptr;
    long long v = std::strtoll(sde, &end, 10);
    if (end && *end == '\0')
      t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// --- package list parsing --------------------------------------------------

namespace detail {

inline std::size_t line_of_byte(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n')
      ++line;
  return line;
}

inline SourceSpec parse_source(const nlohmann::json &j,
                               const std::string &entry_name) {
  SourceSpec src;
  std::string kind = j.value("kind", "");
  if (kind == "git")
    src.kind = SourceKind::Git;
  else if (kind == "tarball")
    src.kind = SourceKind::Tarball;
  else if (kind == "local")
    src.kind = SourceKind::Local;
  else
    throw Error(ErrorKind::Validation,
                "package '" + entry_name + "': unknown source kind '" + kind +
                    "'");
  if (j.contains("url"))
    src.location = j.at("url").get<std::string>();
  else if (j.contains("path"))
    src.location = j.at("path").get<std::string>();
  else
    throw Error(ErrorKind::Validation,
                "package '" + entry_name + "': source needs url or path");
  if (j.contains("ref"))
    src.ref = j.at("ref").get<std::string>();
  if (j.contains("fallback"))
    src.fallback = std::make_shared<SourceSpec>(
        parse_source(j.at("fallback"), entry_name));
  return src;
}

} // namespace detail

/// Parses the JSON package list (schema: array of objects with name,
/// ecosystem, source, optional build_commands/dependencies/extra_flags, and
/// language_tag). Malformed JSON carries a line number; schema violations
/// name the offending entry.
inline std::vector<PackageDescriptor>
parse_package_list(const std::string &document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(e.what(), detail::line_of_byte(document, e.byte));
  }
  if (!doc.is_array())
    throw Error(ErrorKind::Validation, "package list must be a JSON array");

  std::vector<PackageDescriptor> packages;
  std::unordered_set<std::string> names;
  for (const auto &entry : doc) {
    PackageDescriptor pkg;
    pkg.name = entry.value("name", "");
    if (pkg.name.empty())
      throw Error(ErrorKind::Validation, "package entry without a name");
    if (!names.insert(pkg.name).second)
      throw Error(ErrorKind::Validation,
                  "duplicate package name '" + pkg.name + "'");

    std::string eco = entry.value("ecosystem", "");
    auto parsed = parse_ecosystem(eco);
    if (!parsed)
      throw Error(ErrorKind::Validation, "package '" + pkg.name +
                                             "': unknown ecosystem '" + eco +
                                             "'");
    pkg.ecosystem = *parsed;

    if (!entry.contains("source"))
      throw Error(ErrorKind::Validation,
                  "package '" + pkg.name + "': missing source");
    pkg.source = detail::parse_source(entry.at("source"), pkg.name);

    for (const auto &c : entry.value("build_commands", nlohmann::json::array()))
      pkg.build_commands.push_back(c.get<std::string>());
    for (const auto &d : entry.value("dependencies", nlohmann::json::array()))
      pkg.dependencies.push_back(d.get<std::string>());
    for (const auto &f : entry.value("extra_flags", nlohmann::json::array()))
      pkg.extra_flags.push_back(f.get<std::string>());

    std::string lang = entry.value("language_tag", "other");
    auto tag = parse_language_tag(lang);
    if (!tag)
      throw Error(ErrorKind::Validation, "package '" + pkg.name +
                                             "': unknown language_tag '" +
                                             lang + "'");
    pkg.language_tag = *tag;
    packages.push_back(std::move(pkg));
  }

  for (const PackageDescriptor &pkg : packages)
    for (const std::string &dep : pkg.dependencies)
      if (!names.count(dep))
        throw Error(ErrorKind::Validation,
                    "package '" + pkg.name + "' depends on unknown package '" +
                        dep + "'");
  return packages;
}

// --- dependency scheduling ---------------------------------------------

/// Kahn's algorithm grouped into waves: wave k holds every package whose
/// dependencies all lie in earlier waves. Wave membership is sorted by name.
/// A cycle raises an error naming one cycle.
inline std::vector<std::vector<std::string>>
topo_schedule(const std::vector<PackageDescriptor> &packages) {
  std::map<std::string, std::vector<std::string>> deps;
  for (const PackageDescriptor &pkg : packages)
    deps[pkg.name] = pkg.dependencies;

  std::vector<std::vector<std::string>> waves;
  std::set<std::string> placed;
  while (placed.size() < deps.size()) {
    std::vector<std::string> wave;
    for (const auto &[name, ds] : deps) {
      if (placed.count(name))
        continue;
      bool ready = true;
      for (const std::string &d : ds)
        if (!placed.count(d)) {
          ready = false;
          break;
        }
      if (ready)
        wave.push_back(name);
    }
    if (wave.empty()) {
      // Cycle: walk dependency links among the unplaced until a repeat.
      std::vector<std::string> trail;
      std::unordered_map<std::string, std::size_t> seen_at;
      std::string cur;
      for (const auto &[name, ds] : deps)
        if (!placed.count(name)) {
          cur = name;
          break;
        }
      for (;;) {
        auto it = seen_at.find(cur);
        if (it != seen_at.end()) {
          trail.erase(trail.begin(),
                      trail.begin() + static_cast<std::ptrdiff_t>(it->second));
          break;
        }
        seen_at.emplace(cur, trail.size());
        trail.push_back(cur);
        for (const std::string &d : deps[cur])
          if (!placed.count(d)) {
            cur = d;
            break;
          }
      }
      std::string msg = "dependency cycle:";
      for (const std::string &n : trail)
        msg += " " + n;
      throw Error(ErrorKind::Validation, msg);
    }
    for (const std::string &n : wave)
      placed.insert(n);
    waves.push_back(std::move(wave));
  }
  return waves;
}

// --- build-tree scanning ---------------------------------------------------

struct ScanResult {
  std::vector<BitcodeArtifact> artifacts; // sorted by path
  std::vector<std::string> warnings;
};

/// Walks a build tree. Embedded strategy lists ELF objects carrying a
/// bitcode section; raw strategy lists files beginning with the bitcode
/// magic. Unreadable files are warnings, never fatal.
inline ScanResult scan_build_tree(const std::filesystem::path &root,
                                  ExtractionStrategy strategy) {
  namespace fs = std::filesystem;
  ScanResult result;
  if (!fs::exists(root))
    throw Error(ErrorKind::NotFound,
                "build tree does not exist: " + root.string());

  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(
           root, fs::directory_options::skip_permission_denied);
       it != fs::recursive_directory_iterator(); ++it) {
    if (it->is_regular_file())
      files.push_back(it->path());
  }
  std::sort(files.begin(), files.end());

  for (const fs::path &file : files) {
    std::string bytes;
    try {
      bytes = read_file(file);
    } catch (const Error &e) {
      result.warnings.push_back(e.what());
      continue;
    }
    bool hit = false;
    if (strategy == ExtractionStrategy::EmbeddedSection)
      hit = is_elf(bytes) &&
            has_bitcode_section(bytes, default_bitcode_section_names());
    else
      hit = starts_with_bitcode_magic(bytes);
    if (!hit)
      continue;
    BitcodeArtifact artifact;
    artifact.path = file.string();
    artifact.encoding = ArtifactEncoding::Bitcode;
    artifact.byte_size = bytes.size();
    artifact.extraction_strategy = strategy;
    result.artifacts.push_back(std::move(artifact));
  }
  return result;
}

// --- toolchain -------------------------------------------------------------

/// External tool paths. Environment variables override config-file values;
/// empty means unconfigured.
struct ToolchainConfig {
  std::string cc;    // LLVM-based C/C++ compiler driver
  std::string dis;   // llvm-dis compatible disassembler
  std::string opt;   // opt-compatible optimizer
  std::string cargo = "cargo";

  static ToolchainConfig from_environment(ToolchainConfig base) {
    if (const char *v = std::getenv("IRFORGE_CC"))
      base.cc = v;
    if (const char *v = std::getenv("IRFORGE_DIS"))
      base.dis = v;
    if (const char *v = std::getenv("IRFORGE_OPT"))
      base.opt = v;
    return base;
  }

  static ToolchainConfig from_environment() {
    return from_environment(ToolchainConfig{});
  }

  /// Reads a UTF-8 key=value config file (keys: cc, dis, opt, cargo; '#'
  /// comments and blank lines allowed), then applies environment overrides.
  static ToolchainConfig from_config_file(const std::filesystem::path &path) {
    ToolchainConfig cfg;
    std::string text = read_file(path);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      std::string line = text.substr(
          pos, eol == std::string::npos ? std::string::npos : eol - pos);
      pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
      ++line_no;
      std::size_t first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#')
        continue;
      std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw ParseError("config " + path.string() + ": expected key=value",
                         line_no);
      auto trim = [](std::string s) {
        std::size_t b = s.find_first_not_of(" \t\r");
        std::size_t e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string()
                                      : s.substr(b, e - b + 1);
      };
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key == "cc")
        cfg.cc = value;
      else if (key == "dis")
        cfg.dis = value;
      else if (key == "opt")
        cfg.opt = value;
      else if (key == "cargo")
        cfg.cargo = value;
      // Unknown keys are tolerated so configs can carry site-local extras.
    }
    return from_environment(cfg);
  }
};

struct ToolProbe {
  bool found = false;
  std::string version; // first line of `--version` output when it runs
};

struct ToolchainReport {
  ToolProbe cc, dis, opt, cargo;
};

inline ToolProbe probe_tool(const std::string &path) {
  ToolProbe probe;
  if (path.empty() || !command_available(path))
    return probe;
  probe.found = true;
  try {
    RunResult run = run_command({path, "--version"});
    std::size_t eol = run.output.find('\n');
    probe.version = run.output.substr(
        0, eol == std::string::npos ? run.output.size() : eol);
  } catch (const Error &) {
    // Tool exists but cannot report a version; found stays true.
  }
  return probe;
}

inline ToolchainReport probe_toolchain(const ToolchainConfig &cfg) {
  ToolchainReport report;
  report.cc = probe_tool(cfg.cc);
  report.dis = probe_tool(cfg.dis);
  report.opt = probe_tool(cfg.opt);
  report.cargo = probe_tool(cfg.cargo);
  return report;
}

// --- disassembly ------------------------------------------------------------

/// Turns bitcode bytes into textual IR via the configured disassembler
/// (invoked as `<dis> <in> -o <out>`). Textual input passes through
/// unchanged.
inline std::string disassemble_bytes(const std::string &bytes,
                                     ArtifactEncoding encoding,
                                     const ToolchainConfig &tools) {
  if (encoding == ArtifactEncoding::Textual)
    return bytes;
  if (tools.dis.empty() || !command_available(tools.dis))
    throw Error(ErrorKind::ToolUnavailable,
                "no disassembler configured (set IRFORGE_DIS)");

  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() /
                 ("irforge-dis-" + std::to_string(getpid()));
  fs::create_directories(dir);
  fs::path in = dir / "in.bc";
  fs::path out = dir / "out.ll";
  write_file(in, bytes);
  RunResult run = run_command({tools.dis, in.string(), "-o", out.string()});
  std::string text;
  bool ok = run.exit_code == 0 && fs::exists(out);
  if (ok)
    text = read_file(out);
  std::error_code ec;
  fs::remove_all(dir, ec);
  if (!ok)
    throw Error(ErrorKind::Tool, "disassembler failed (exit " +
                                     std::to_string(run.exit_code) +
                                     "): " + run.output);
  return text;
}

/// Disassembles one record's artifact file under the corpus directory,
/// writes the sibling .ll, and records text_size.
inline std::string disassemble_record(ModuleRecord &record,
                                      const std::filesystem::path &corpus_dir,
                                      const ToolchainConfig &tools) {
  namespace fs = std::filesystem;
  fs::path artifact_path = corpus_dir / record.artifact.path;
  std::string bytes = read_file(artifact_path);
  std::string text =
      disassemble_bytes(bytes, record.artifact.encoding, tools);
  fs::path text_path = artifact_path;
  text_path.replace_extension(".ll");
  write_file(text_path, text);
  record.text_size = text.size();
  return text;
}

/// Path of the textual IR sibling for a record (valid after disassembly).
inline std::filesystem::path
record_text_path(const ModuleRecord &record,
                 const std::filesystem::path &corpus_dir) {
  std::filesystem::path p = corpus_dir / record.artifact.path;
  p.replace_extension(".ll");
  return p;
}

// --- manifest IO -------------------------------------------------------------

namespace detail {

inline std::string hash_to_hex(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

inline std::uint64_t hex_to_hash(const std::string &s) {
  return std::strtoull(s.c_str(), nullptr, 16);
}

} // namespace detail

inline nlohmann::json record_to_json(const ModuleRecord &r) {
  nlohmann::json j;
  j["package"] = r.artifact.origin_package;
  j["path"] = r.artifact.path;
  j["encoding"] = to_string(r.artifact.encoding);
  j["byte_size"] = r.artifact.byte_size;
  j["strategy"] = to_string(r.artifact.extraction_strategy);
  j["language"] = to_string(r.language_tag);
  j["dedup_status"] = to_string(r.dedup_status);
  if (r.module_hash)
    j["module_hash"] = detail::hash_to_hex(*r.module_hash);
  if (r.text_size)
    j["text_size"] = *r.text_size;
  if (r.parse_failed)
    j["parse_failed"] = true;
  return j;
}

inline ModuleRecord record_from_json(const nlohmann::json &j) {
  ModuleRecord r;
  r.artifact.origin_package = j.value("package", "");
  r.artifact.path = j.value("path", "");
  std::string enc = j.value("encoding", "bitcode");
  r.artifact.encoding =
      enc == "textual" ? ArtifactEncoding::Textual : ArtifactEncoding::Bitcode;
  r.artifact.byte_size = j.value("byte_size", std::uint64_t{0});
  std::string strat = j.value("strategy", "raw-file");
  r.artifact.extraction_strategy = strat == "embedded-section"
                                       ? ExtractionStrategy::EmbeddedSection
                                       : ExtractionStrategy::RawFile;
  auto lang = parse_language_tag(j.value("language", "other"));
  r.language_tag = lang ? *lang : LanguageTag::Other;
  std::string status = j.value("dedup_status", "unprocessed");
  if (status == "kept")
    r.dedup_status = DedupStatus::Kept;
  else if (status == "removed-duplicate")
    r.dedup_status = DedupStatus::RemovedDuplicate;
  else
    r.dedup_status = DedupStatus::Unprocessed;
  if (j.contains("module_hash"))
    r.module_hash = detail::hex_to_hash(j.at("module_hash").get<std::string>());
  if (j.contains("text_size"))
    r.text_size = j.at("text_size").get<std::uint64_t>();
  r.parse_failed = j.value("parse_failed", false);
  return r;
}

inline nlohmann::json manifest_to_json(const CorpusManifest &m) {
  nlohmann::json j;
  j["created_at"] = m.created_at;
  j["tool_version"] = m.version;
  j["records"] = nlohmann::json::array();
  for (const ModuleRecord &r : m.records)
    j["records"].push_back(record_to_json(r));
  j["build_notes"] = nlohmann::json::array();
  for (const BuildNote &n : m.build_notes)
    j["build_notes"].push_back(
        {{"package", n.package}, {"status", n.status}, {"detail", n.detail}});
  return j;
}

inline CorpusManifest manifest_from_json(const nlohmann::json &j) {
  CorpusManifest m;
  m.created_at = j.value("created_at", "");
  m.version = j.value("tool_version", "");
  if (j.contains("records"))
    for (const auto &rj : j.at("records"))
      m.records.push_back(record_from_json(rj));
  if (j.contains("build_notes"))
    for (const auto &nj : j.at("build_notes"))
      m.build_notes.push_back(BuildNote{nj.value("package", ""),
                                        nj.value("status", ""),
                                        nj.value("detail", "")});
  return m;
}

inline void write_manifest(const CorpusManifest &m,
                           const std::filesystem::path &path) {
  write_file(path, manifest_to_json(m).dump(2) + "\n");
}

inline CorpusManifest load_manifest(const std::filesystem::path &path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(ErrorKind::Parse, "manifest " + path.string() + ": " + e.what());
  }
  return manifest_from_json(j);
}

// --- textual function extraction -----------------------------------------

namespace detail {

// Collects @-token references (with sigil stripped, quotes removed) from a
// free-form token such as a constant expression.
inline void collect_global_refs(std::string_view text,
                                std::set<std::string> &out) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '@')
      continue;
    std::size_t j = i + 1;
    std::string name;
    if (j < text.size() && text[j] == '"') {
      ++j;
      while (j < text.size() && text[j] != '"')
        name.push_back(text[j++]);
      ++j;
    } else {
      while (j < text.size() && (lex::is_ident_char(text[j]) || text[j] == '-'))
        name.push_back(text[j++]);
    }
    if (!name.empty())
      out.insert(name);
    i = j - 1;
  }
}

// Collects %-prefixed named-type tokens (e.g. %struct.foo) from a type or
// constant token. Quoted names keep their quotes, matching IrNamedType::name.
inline void collect_type_refs(std::string_view text,
                              std::set<std::string> &out) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '%')
      continue;
    std::size_t j = i + 1;
    std::string name = "%";
    if (j < text.size() && text[j] == '"') {
      name.push_back('"');
      ++j;
      while (j < text.size() && text[j] != '"')
        name.push_back(text[j++]);
      if (j < text.size())
        name.push_back(text[j++]);
    } else {
      while (j < text.size() && lex::is_ident_char(text[j]))
        name.push_back(text[j++]);
    }
    if (name.size() > 1)
      out.insert(name);
    i = j - 1;
  }
}

} // namespace detail

/// Slices one function out of a module as standalone textual IR: the
/// function's verbatim definition plus declarations for everything it
/// references and the named types it uses. The result re-parses as a module.
inline std::string extract_function(const std::string &module_text,
                                    const std::string &function_name) {
  IrModule module = parse_module(module_text);
  const IrFunction *target = module.find_function(function_name);
  if (!target || !target->is_definition)
    throw Error(ErrorKind::NotFound,
                "function '" + function_name + "' is not defined here");

  // Index module symbols.
  std::unordered_map<std::string, const IrFunction *> fn_by_name;
  for (const IrFunction &f : module.functions)
    fn_by_name[f.name] = &f;
  std::unordered_map<std::string, const IrGlobal *> global_by_name;
  for (const IrGlobal &g : module.globals)
    global_by_name[g.name] = &g;
  std::unordered_map<std::string, const IrNamedType *> type_by_name;
  for (const IrNamedType &t : module.named_types)
    type_by_name[t.name] = &t;

  // References out of the target function.
  std::set<std::string> sym_refs;
  std::set<std::string> type_refs;
  auto scan_type_token = [&](const std::string &tok) {
    detail::collect_type_refs(tok, type_refs);
  };
  scan_type_token(target->return_type_token);
  for (const auto &p : target->params)
    scan_type_token(p.type_token);
  for (const IrBlock &b : target->blocks)
    for (const IrInstruction &inst : b.instructions) {
      scan_type_token(inst.type_token);
      if (inst.callee) {
        std::set<std::string> one;
        detail::collect_global_refs(*inst.callee, one);
        sym_refs.insert(one.begin(), one.end());
      }
      for (const OperandRef &op : inst.operands) {
        if (op.kind == OperandRef::Kind::Global ||
            op.kind == OperandRef::Kind::OtherConstant) {
          detail::collect_global_refs(op.text, sym_refs);
          detail::collect_type_refs(op.text, type_refs);
        }
      }
    }
  sym_refs.erase(function_name);

  // Close over named types referenced from other named types.
  std::vector<std::string> type_work(type_refs.begin(), type_refs.end());
  while (!type_work.empty()) {
    std::string name = type_work.back();
    type_work.pop_back();
    auto it = type_by_name.find(name);
    if (it == type_by_name.end())
      continue;
    std::set<std::string> more;
    detail::collect_type_refs(it->second->definition, more);
    for (const std::string &t : more)
      if (type_refs.insert(t).second)
        type_work.push_back(t);
  }

  std::string out;
  if (module.target_triple)
    out += "target triple = \"" + *module.target_triple + "\"\n";
  if (module.datalayout)
    out += "target datalayout = \"" + *module.datalayout + "\"\n";
  if (!out.empty())
    out += "\n";

  // Named types in module order for stable output.
  for (const IrNamedType &t : module.named_types)
    if (type_refs.count(t.name))
      out += t.name + " = type " + t.definition + "\n";

  auto quoted_if_needed = [](const std::string &name) {
    for (char ch : name)
      if (!lex::is_ident_char(ch))
        return "\"" + name + "\"";
    return name;
  };

  // External declarations for referenced globals, in module order.
  for (const IrGlobal &g : module.globals)
    if (sym_refs.count(g.name))
      out += "@" + quoted_if_needed(g.name) + " = external " +
             (g.is_constant ? std::string("constant ") : std::string("global ")) +
             g.type_token + "\n";

  // Declares for referenced functions, in module order.
  for (const IrFunction &f : module.functions) {
    if (!sym_refs.count(f.name))
      continue;
    out += "declare " + f.return_type_token + " @" + quoted_if_needed(f.name) +
           "(";
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      if (i)
        out += ", ";
      out += f.params[i].type_token;
    }
    if (f.is_vararg)
      out += f.params.empty() ? "..." : ", ...";
    out += ")\n";
  }
  if (out.size() && out.back() != '\n')
    out += "\n";
  out += "\n";

  // The verbatim definition slice.
  out.append(module_text, target->src_begin,
             target->src_end - target->src_begin);
  if (out.empty() || out.back() != '\n')
    out += '\n';
  return out;
}

// --- size report ------------------------------------------------------------

struct SizeReport {
  struct Entry {
    std::uint64_t bitcode_bytes = 0;
    std::uint64_t text_bytes = 0;
    std::optional<double> text_to_bitcode_ratio;
  };
  std::map<LanguageTag, Entry> per_language;
  Entry total;
};

inline SizeReport corpus_size_report(const CorpusManifest &manifest) {
  SizeReport report;
  auto fold = [](SizeReport::Entry &e, const ModuleRecord &r) {
    if (r.artifact.encoding == ArtifactEncoding::Bitcode)
      e.bitcode_bytes += r.artifact.byte_size;
    if (r.text_size)
      e.text_bytes += *r.text_size;
  };
  for (const ModuleRecord &r : manifest.records) {
    fold(report.per_language[r.language_tag], r);
    fold(report.total, r);
  }
  auto finish = [](SizeReport::Entry &e) {
    if (e.bitcode_bytes > 0 && e.text_bytes > 0)
      e.text_to_bitcode_ratio = static_cast<double>(e.text_bytes) /
                                static_cast<double>(e.bitcode_bytes);
  };
  for (auto &[lang, entry] : report.per_language)
    finish(entry);
  finish(report.total);
  return report;
}

inline nlohmann::json size_report_to_json(const SizeReport &r) {
  auto entry = [](const SizeReport::Entry &e) {
    nlohmann::json j;
    j["bitcode_bytes"] = e.bitcode_bytes;
    j["text_bytes"] = e.text_bytes;
    if (e.text_to_bitcode_ratio)
      j["text_to_bitcode_ratio"] = *e.text_to_bitcode_ratio;
    return j;
  };
  nlohmann::json j;
  j["total"] = entry(r.total);
  j["per_language"] = nlohmann::json::object();
  for (const auto &[lang, e] : r.per_language)
    j["per_language"][to_string(lang)] = entry(e);
  return j;
}

} // namespace irforge
