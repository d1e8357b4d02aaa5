//===-- pipeline_fixture.hpp - shared CLI pipeline scaffolding --*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Lays out a small three-package source tree and drives the command-line
// binary with stdout and stderr captured separately. Used by the pipeline
// suite and the acceptance checks.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "irforge/corpus.hpp"
#include "irforge/process.hpp"
#include "support/stub_bitcode.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace irforge_test {

// Module texts planted by write_pipeline_sources. widen_renamed is widen
// with different local names, so structural module hashing folds the two.
inline constexpr const char *module_widen =
    "define i32 @widen(i32 %x) {\n"
    "  %r = add i32 %x, 1\n"
    "  ret i32 %r\n"
    "}\n";
inline constexpr const char *module_widen_renamed =
    "define i32 @widen(i32 %value) {\n"
    "  %sum = add i32 %value, 1\n"
    "  ret i32 %sum\n"
    "}\n";
inline constexpr const char *module_fold =
    "define i32 @fold(i32 %x) {\n"
    "  %r = mul i32 %x, 3\n"
    "  ret i32 %r\n"
    "}\n";
inline constexpr const char *module_third =
    "define i32 @third(i32 %x) {\n"
    "  %r = sub i32 %x, 2\n"
    "  ret i32 %r\n"
    "}\n";
inline constexpr const char *module_fourth =
    "define i32 @fourth(i32 %x) {\n"
    "  %a = add i32 %x, 5\n"
    "  %b = mul i32 %a, 2\n"
    "  ret i32 %b\n"
    "}\n";

// Three packages: a C shell build, a C++ shell build that re-ships a
// renamed copy of the C module, and a prebuilt Rust drop with one bitcode
// and one textual module. Returns the package list path.
inline std::filesystem::path
write_pipeline_sources(const std::filesystem::path &root) {
  namespace fs = std::filesystem;
  fs::path sources = root / "sources";

  irforge::write_file(sources / "alpha" / "a.c",
                      "int a(void) { return 1; }\n");
  irforge::write_file(sources / "alpha" / "a.ll", module_widen);

  irforge::write_file(sources / "beta" / "b1.c",
                      "int b1(void) { return 2; }\n");
  irforge::write_file(sources / "beta" / "b1.ll", module_fold);
  irforge::write_file(sources / "beta" / "b2.c",
                      "int b2(void) { return 3; }\n");
  irforge::write_file(sources / "beta" / "b2.ll", module_widen_renamed);

  irforge::write_file(sources / "gamma" / "mod.bc",
                      make_stub_bitcode(module_third));
  irforge::write_file(sources / "gamma" / "mod2.ll", module_fourth);
  irforge::write_file(sources / "gamma" / "notes.txt", "not a module\n");

  const char *compile = "\"$CC\" $CFLAGS -c %s.c -o %s.o";
  auto cc_cmd = [&](const std::string &stem) {
    std::string cmd(compile);
    for (std::size_t at = cmd.find("%s"); at != std::string::npos;
         at = cmd.find("%s"))
      cmd.replace(at, 2, stem);
    return cmd;
  };

  nlohmann::json pkgs = nlohmann::json::array();
  pkgs.push_back({{"name", "alpha"},
                  {"ecosystem", "raw-shell"},
                  {"source", {{"kind", "local"},
                              {"path", (sources / "alpha").string()}}},
                  {"build_commands", {cc_cmd("a")}},
                  {"language_tag", "c"}});
  pkgs.push_back({{"name", "beta"},
                  {"ecosystem", "raw-shell"},
                  {"source", {{"kind", "local"},
                              {"path", (sources / "beta").string()}}},
                  {"build_commands", {cc_cmd("b1"), cc_cmd("b2")}},
                  {"dependencies", {"alpha"}},
                  {"language_tag", "c++"}});
  pkgs.push_back({{"name", "gamma"},
                  {"ecosystem", "prebuilt"},
                  {"source", {{"kind", "local"},
                              {"path", (sources / "gamma").string()}}},
                  {"language_tag", "rust"}});

  std::filesystem::path list = root / "pkgs.json";
  irforge::write_file(list, pkgs.dump(2) + "\n");
  return list;
}

#ifdef STUB_DIR
// Child-process environment pointing every tool at the stubs and pinning
// the manifest timestamp.
inline std::vector<std::string> pipeline_env() {
  return {
      std::string("IRFORGE_CC=") + STUB_DIR + "/stub-cc",
      std::string("IRFORGE_DIS=") + STUB_DIR + "/stub-dis",
      std::string("IRFORGE_OPT=") + STUB_DIR + "/stub-opt",
      "SOURCE_DATE_EPOCH=1700000000",
  };
}
#endif

struct CliResult {
  std::string out;
  std::string err;
  int exit_code = -1;
};

inline std::string shell_quote(const std::string &s) {
  std::string quoted = "'";
  for (char c : s) {
    if (c == '\'')
      quoted += "'\\''";
    else
      quoted += c;
  }
  quoted += "'";
  return quoted;
}

// Runs the binary through /bin/sh so stdout and stderr land in separate
// capture files.
inline CliResult run_cli(const std::string &exe,
                         const std::vector<std::string> &args,
                         const std::vector<std::string> &extra_env = {}) {
  namespace fs = std::filesystem;
  static std::atomic<unsigned> counter{0};
  std::string tag = std::to_string(::getpid()) + "-" +
                    std::to_string(counter.fetch_add(1));
  fs::path out_file = fs::temp_directory_path() / ("irforge-cli-" + tag + ".out");
  fs::path err_file = fs::temp_directory_path() / ("irforge-cli-" + tag + ".err");

  std::string cmd = shell_quote(exe);
  for (const std::string &a : args)
    cmd += " " + shell_quote(a);
  cmd += " > " + shell_quote(out_file.string());
  cmd += " 2> " + shell_quote(err_file.string());

  irforge::RunResult raw =
      irforge::run_command({"/bin/sh", "-c", cmd}, {}, extra_env);

  auto slurp_file = [](const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  CliResult result;
  result.out = slurp_file(out_file);
  result.err = slurp_file(err_file);
  result.exit_code = raw.exit_code;
  std::error_code ec;
  fs::remove(out_file, ec);
  fs::remove(err_file, ec);
  return result;
}

} // namespace irforge_test
