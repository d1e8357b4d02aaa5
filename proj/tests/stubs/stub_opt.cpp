//===-- stub_opt.cpp - Stand-in optimizer for pipeline tests ---*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// opt-compatible surface: `stub-opt -passes=<spec> -print-changed
// -disable-output <file>`. Emits deterministic change banners per defined
// function in the input: PromotePass always changes, InstCombinePass
// changes only functions whose body contains an add, GVNPass never
// changes, DCEPass is filtered out. STUB_OPT_CRASH=<substr> makes the run
// crash on matching files so crash handling is testable.
//
//===----------------------------------------------------------------------===//

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::vector<std::string> defined_functions(const std::string &text,
                                           std::vector<bool> &has_add) {
  std::vector<std::string> names;
  std::istringstream in(text);
  std::string line;
  std::string current;
  bool adds = false;
  while (std::getline(in, line)) {
    if (line.rfind("define", 0) == 0) {
      std::size_t at = line.find('@');
      if (at == std::string::npos)
        continue;
      std::size_t end = at + 1;
      std::string name;
      if (end < line.size() && line[end] == '"') {
        ++end;
        while (end < line.size() && line[end] != '"')
          name += line[end++];
      } else {
        while (end < line.size() && line[end] != '(' && line[end] != ' ')
          name += line[end++];
      }
      current = name;
      adds = false;
      continue;
    }
    if (!current.empty() && line.rfind("}", 0) == 0) {
      names.push_back(current);
      has_add.push_back(adds);
      current.clear();
      continue;
    }
    if (!current.empty() &&
        (line.find(" add ") != std::string::npos ||
         line.find("= add ") != std::string::npos))
      adds = true;
  }
  return names;
}

} // namespace

int main(int argc, char **argv) {
  std::string passes, file;
  bool print_changed = false;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--version") {
      std::printf("stub-opt 1.0\n");
      return 0;
    }
    if (arg.rfind("-passes=", 0) == 0)
      passes = arg.substr(8);
    else if (arg == "-print-changed")
      print_changed = true;
    else if (arg == "-disable-output")
      continue;
    else if (!arg.empty() && arg[0] != '-')
      file = arg;
  }
  if (passes.empty()) {
    std::fprintf(stderr, "stub-opt: empty pass pipeline\n");
    return 1;
  }
  if (file.empty()) {
    std::fprintf(stderr, "stub-opt: no input file\n");
    return 1;
  }
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "stub-opt: cannot read %s\n", file.c_str());
    return 1;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();

  if (const char *crash = std::getenv("STUB_OPT_CRASH"))
    if (*crash && text.find(crash) != std::string::npos) {
      std::fprintf(stderr, "stub-opt: internal error on %s\n", file.c_str());
      return 9;
    }

  if (!print_changed)
    return 0;

  std::vector<bool> has_add;
  std::vector<std::string> names = defined_functions(text, has_add);
  for (std::size_t i = 0; i < names.size(); ++i) {
    const char *fn = names[i].c_str();
    std::fprintf(stderr, "*** IR Dump After PromotePass on %s ***\n", fn);
    if (has_add[i])
      std::fprintf(stderr, "*** IR Dump After InstCombinePass on %s ***\n",
                   fn);
    else
      std::fprintf(stderr,
                   "*** IR Dump After InstCombinePass on %s omitted because "
                   "no change ***\n",
                   fn);
    std::fprintf(
        stderr,
        "*** IR Dump After GVNPass on %s omitted because no change ***\n",
        fn);
    std::fprintf(stderr, "*** IR Dump After DCEPass on %s filtered out ***\n",
                 fn);
  }
  return 0;
}
