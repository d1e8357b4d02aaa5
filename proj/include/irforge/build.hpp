//===-- build.hpp - Package builds and corpus harvesting -----*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Runs package builds with bitcode-embedding flags injected, then harvests
// every produced module into the corpus layout <out>/<package>/<n>.bc and a
// deterministic manifest.json. Build failures are recorded, never fatal.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "irforge/corpus.hpp"

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace irforge {

inline constexpr const char *embed_bitcode_flags =
    "-Xclang -fembed-bitcode=all";

inline bool is_c_family(Ecosystem e) {
  switch (e) {
  case Ecosystem::CMake:
  case Ecosystem::Autotools:
  case Ecosystem::RawShell:
  case Ecosystem::SpackLike:
    return true;
  default:
    return false;
  }
}

/// Environment injected into a package's build commands, as NAME=value
/// strings. C-family builds get the embedding flags through CFLAGS/CXXFLAGS;
/// no optimization level is added, so packages keep whatever their build
/// system chooses.
inline std::vector<std::string>
build_environment(const PackageDescriptor &pkg, const ToolchainConfig &tools) {
  std::vector<std::string> env;
  if (is_c_family(pkg.ecosystem)) {
    env.push_back("CC=" + tools.cc);
    env.push_back("CXX=" + tools.cc);
    std::string flags = embed_bitcode_flags;
    for (const std::string &f : pkg.extra_flags)
      flags += " " + f;
    env.push_back("CFLAGS=" + flags);
    env.push_back("CXXFLAGS=" + flags);
  } else if (pkg.ecosystem == Ecosystem::Cargo) {
    env.push_back("CARGO=" + tools.cargo);
  }
  return env;
}

/// Build commands actually run for a package; cargo gets a bitcode-emitting
/// default when the descriptor does not override it.
inline std::vector<std::string>
effective_build_commands(const PackageDescriptor &pkg,
                         const ToolchainConfig &tools) {
  if (!pkg.build_commands.empty())
    return pkg.build_commands;
  if (pkg.ecosystem == Ecosystem::Cargo)
    return {tools.cargo + " rustc -- --emit=llvm-bc"};
  return {};
}

struct BuildOutcome {
  std::string package;
  std::string status; // "success", "skipped", "failed"
  std::string detail; // skip reason or log tail
  std::vector<ModuleRecord> records;
};

namespace detail {

inline std::string tail_of(const std::string &text, std::size_t max_bytes) {
  if (text.size() <= max_bytes)
    return text;
  return text.substr(text.size() - max_bytes);
}

inline void copy_tree(const std::filesystem::path &from,
                      const std::filesystem::path &to) {
  namespace fs = std::filesystem;
  fs::create_directories(to);
  fs::copy(from, to,
           fs::copy_options::recursive | fs::copy_options::copy_symlinks |
               fs::copy_options::overwrite_existing);
}

// Materializes a package source into dest. Git and tarball sources fall back
// to their recorded alternative when the primary cannot be fetched; the
// returned note says which route was taken.
inline std::string materialize_source(const SourceSpec &src,
                                      const std::filesystem::path &dest) {
  namespace fs = std::filesystem;
  auto with_fallback = [&](const std::string &why) -> std::string {
    if (src.fallback) {
      std::string note = materialize_source(*src.fallback, dest);
      return why + "; fell back to " + note;
    }
    throw Error(ErrorKind::Tool, why);
  };

  switch (src.kind) {
  case SourceKind::Local:
    if (!fs::exists(src.location))
      throw Error(ErrorKind::NotFound,
                  "local source missing: " + src.location);
    copy_tree(src.location, dest);
    return "local " + src.location;
  case SourceKind::Git: {
    if (!command_available("git"))
      return with_fallback("git unavailable");
    std::vector<std::string> argv = {"git", "clone", "--quiet", "--depth", "1"};
    if (src.ref) {
      argv.push_back("--branch");
      argv.push_back(*src.ref);
    }
    argv.push_back(src.location);
    argv.push_back(dest.string());
    RunResult run = run_command(argv);
    if (run.exit_code != 0)
      return with_fallback("git clone failed: " + tail_of(run.output, 400));
    return "git " + src.location;
  }
  case SourceKind::Tarball: {
    if (src.location.rfind("http", 0) == 0)
      return with_fallback("cannot fetch remote tarball " + src.location);
    if (!fs::exists(src.location))
      return with_fallback("tarball missing: " + src.location);
    fs::create_directories(dest);
    RunResult run = run_command(
        {"tar", "-xf", src.location, "-C", dest.string()});
    if (run.exit_code != 0)
      return with_fallback("tar failed: " + tail_of(run.output, 400));
    return "tarball " + src.location;
  }
  }
  throw Error(ErrorKind::Validation, "unhandled source kind");
}

// Scans for produced modules after a build. C-family builds embed bitcode in
// object files; cargo emits raw .bc files; prebuilt trees may carry raw
// bitcode, objects with a bitcode section, or textual IR.
inline std::vector<BitcodeArtifact>
scan_for_artifacts(const PackageDescriptor &pkg,
                   const std::filesystem::path &tree,
                   std::vector<std::string> &warnings) {
  namespace fs = std::filesystem;
  std::vector<BitcodeArtifact> artifacts;
  if (is_c_family(pkg.ecosystem)) {
    ScanResult scan = scan_build_tree(tree, ExtractionStrategy::EmbeddedSection);
    warnings.insert(warnings.end(), scan.warnings.begin(),
                    scan.warnings.end());
    return scan.artifacts;
  }
  if (pkg.ecosystem == Ecosystem::Cargo) {
    ScanResult scan = scan_build_tree(tree, ExtractionStrategy::RawFile);
    warnings.insert(warnings.end(), scan.warnings.begin(),
                    scan.warnings.end());
    return scan.artifacts;
  }
  // Prebuilt: classify each file on its own evidence.
  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(
           tree, fs::directory_options::skip_permission_denied);
       it != fs::recursive_directory_iterator(); ++it)
    if (it->is_regular_file())
      files.push_back(it->path());
  std::sort(files.begin(), files.end());
  for (const fs::path &file : files) {
    std::string bytes;
    try {
      bytes = read_file(file);
    } catch (const Error &e) {
      warnings.push_back(e.what());
      continue;
    }
    BitcodeArtifact a;
    a.path = file.string();
    a.byte_size = bytes.size();
    if (starts_with_bitcode_magic(bytes)) {
      a.encoding = ArtifactEncoding::Bitcode;
      a.extraction_strategy = ExtractionStrategy::RawFile;
    } else if (is_elf(bytes) &&
               has_bitcode_section(bytes, default_bitcode_section_names())) {
      a.encoding = ArtifactEncoding::Bitcode;
      a.extraction_strategy = ExtractionStrategy::EmbeddedSection;
    } else if (file.extension() == ".ll") {
      a.encoding = ArtifactEncoding::Textual;
      a.extraction_strategy = ExtractionStrategy::RawFile;
    } else {
      continue;
    }
    artifacts.push_back(std::move(a));
  }
  return artifacts;
}

} // namespace detail

/// Builds one package in its own work directory and harvests modules into
/// <corpus_dir>/<package>/<n>.bc. Every failure mode becomes a status, never
/// an exception.
inline BuildOutcome build_package(const PackageDescriptor &pkg,
                                  const std::filesystem::path &work_dir,
                                  const std::filesystem::path &corpus_dir,
                                  const ToolchainConfig &tools) {
  namespace fs = std::filesystem;
  BuildOutcome outcome;
  outcome.package = pkg.name;
  try {
    // Toolchain gate.
    if (is_c_family(pkg.ecosystem) &&
        (tools.cc.empty() || !command_available(tools.cc))) {
      outcome.status = "skipped";
      outcome.detail = "toolchain unavailable: no C compiler configured";
      return outcome;
    }
    if (pkg.ecosystem == Ecosystem::Cargo &&
        !command_available(tools.cargo)) {
      outcome.status = "skipped";
      outcome.detail = "toolchain unavailable: " + tools.cargo + " not found";
      return outcome;
    }

    fs::remove_all(work_dir);
    fs::path src_dir = work_dir / "src";
    std::string source_note = detail::materialize_source(pkg.source, src_dir);

    std::vector<std::string> commands = effective_build_commands(pkg, tools);
    if (commands.empty() && pkg.ecosystem != Ecosystem::Prebuilt) {
      outcome.status = "failed";
      outcome.detail = "no build commands";
      return outcome;
    }

    auto env = build_environment(pkg, tools);
    std::string log;
    for (const std::string &cmd : commands) {
      RunResult run =
          run_command({"/bin/sh", "-c", cmd}, src_dir.string(), env);
      log += "$ " + cmd + "\n" + run.output;
      if (run.exit_code != 0) {
        outcome.status = "failed";
        outcome.detail = "command '" + cmd + "' exited " +
                         std::to_string(run.exit_code) + "\n" +
                         detail::tail_of(log, 2000);
        return outcome;
      }
    }

    std::vector<std::string> warnings;
    std::vector<BitcodeArtifact> found =
        detail::scan_for_artifacts(pkg, src_dir, warnings);

    fs::path pkg_dir = corpus_dir / pkg.name;
    fs::create_directories(pkg_dir);
    std::size_t n = 0;
    for (BitcodeArtifact &artifact : found) {
      std::string bytes = read_file(artifact.path);
      std::string payload;
      if (artifact.extraction_strategy == ExtractionStrategy::EmbeddedSection)
        payload =
            extract_embedded_bitcode(bytes, default_bitcode_section_names());
      else
        payload = bytes;
      std::string rel = pkg.name + "/" + std::to_string(n) + ".bc";
      write_file(corpus_dir / rel, payload);
      ++n;

      ModuleRecord record;
      record.artifact = artifact;
      record.artifact.origin_package = pkg.name;
      record.artifact.path = rel;
      record.artifact.byte_size = payload.size();
      record.language_tag = pkg.language_tag;
      outcome.records.push_back(std::move(record));
    }

    outcome.status = "success";
    outcome.detail = source_note;
    for (const std::string &w : warnings)
      outcome.detail += "\nwarning: " + w;
    return outcome;
  } catch (const Error &e) {
    outcome.status = "failed";
    outcome.detail = e.what();
    outcome.records.clear();
    return outcome;
  }
}

/// Builds every package wave by wave (waves from the dependency schedule,
/// packages within a wave run on up to `jobs` threads), then writes
/// <out>/manifest.json. Records are sorted by package then path, so repeated
/// runs over the same inputs produce identical manifests when
/// SOURCE_DATE_EPOCH pins the timestamp.
inline CorpusManifest
run_corpus_build(const std::vector<PackageDescriptor> &packages,
                 const std::filesystem::path &out_dir,
                 const ToolchainConfig &tools, std::size_t jobs = 1) {
  namespace fs = std::filesystem;
  if (jobs == 0)
    jobs = 1;
  fs::create_directories(out_dir);
  fs::path work_root = out_dir / ".work";

  std::unordered_map<std::string, const PackageDescriptor *> by_name;
  for (const PackageDescriptor &pkg : packages)
    by_name[pkg.name] = &pkg;

  std::vector<std::vector<std::string>> waves = topo_schedule(packages);
  std::vector<BuildOutcome> outcomes;

  for (const std::vector<std::string> &wave : waves) {
    std::vector<BuildOutcome> wave_outcomes(wave.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= wave.size())
          return;
        const PackageDescriptor &pkg = *by_name.at(wave[i]);
        wave_outcomes[i] =
            build_package(pkg, work_root / pkg.name, out_dir, tools);
      }
    };
    std::size_t n_threads = std::min(jobs, wave.size());
    if (n_threads <= 1) {
      worker();
    } else {
      std::vector<std::thread> threads;
      for (std::size_t t = 0; t < n_threads; ++t)
        threads.emplace_back(worker);
      for (std::thread &t : threads)
        t.join();
    }
    for (BuildOutcome &o : wave_outcomes)
      outcomes.push_back(std::move(o));
  }

  CorpusManifest manifest;
  manifest.created_at = manifest_timestamp();
  for (BuildOutcome &o : outcomes) {
    if (o.status != "success")
      manifest.build_notes.push_back({o.package, o.status, o.detail});
    for (ModuleRecord &r : o.records)
      manifest.records.push_back(std::move(r));
  }
  std::sort(manifest.records.begin(), manifest.records.end(),
            [](const ModuleRecord &a, const ModuleRecord &b) {
              if (a.artifact.origin_package != b.artifact.origin_package)
                return a.artifact.origin_package < b.artifact.origin_package;
              return a.artifact.path < b.artifact.path;
            });
  std::sort(manifest.build_notes.begin(), manifest.build_notes.end(),
            [](const BuildNote &a, const BuildNote &b) {
              return a.package < b.package;
            });

  std::error_code ec;
  fs::remove_all(work_root, ec);
  write_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

} // namespace irforge
