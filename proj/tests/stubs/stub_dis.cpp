//===-- stub_dis.cpp - Stand-in disassembler for pipeline tests -*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// llvm-dis-compatible surface: `stub-dis <in.bc> -o <out.ll>`. Inflates the
// stub bitcode container back to textual IR.
//
//===----------------------------------------------------------------------===//

#include "../support/stub_bitcode.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string in_path, out_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--version") {
      std::printf("stub-dis 1.0\n");
      return 0;
    }
    if (args[i] == "-o" && i + 1 < args.size())
      out_path = args[++i];
    else if (!args[i].empty() && args[i][0] != '-')
      in_path = args[i];
  }
  if (in_path.empty() || out_path.empty()) {
    std::fprintf(stderr, "stub-dis: usage: stub-dis <in.bc> -o <out.ll>\n");
    return 2;
  }
  std::ifstream in(in_path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "stub-dis: cannot read %s\n", in_path.c_str());
    return 1;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string text;
  try {
    text = irforge_test::read_stub_bitcode(ss.str());
  } catch (const std::exception &e) {
    std::fprintf(stderr, "stub-dis: %s: %s\n", in_path.c_str(), e.what());
    return 1;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    std::fprintf(stderr, "stub-dis: cannot write %s\n", out_path.c_str());
    return 1;
  }
  return 0;
}
