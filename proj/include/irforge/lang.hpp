//===-- lang.hpp - Source-language tags -------------------------*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace irforge {

enum class LanguageTag { C, Cpp, Julia, Rust, Swift, Other };

inline constexpr std::array<LanguageTag, 6> all_language_tags = {
    LanguageTag::C,     LanguageTag::Cpp,   LanguageTag::Julia,
    LanguageTag::Rust,  LanguageTag::Swift, LanguageTag::Other,
};

inline std::string to_string(LanguageTag tag) {
  switch (tag) {
  case LanguageTag::C:
    return "C";
  case LanguageTag::Cpp:
    return "C++";
  case LanguageTag::Julia:
    return "Julia";
  case LanguageTag::Rust:
    return "Rust";
  case LanguageTag::Swift:
    return "Swift";
  case LanguageTag::Other:
    return "other";
  }
  return "other";
}

inline std::optional<LanguageTag> parse_language_tag(std::string_view text) {
  std::string lower;
  lower.reserve(text.size());
  for (char c : text)
    lower.push_back(c >= 'A' && c <= 'Z' ? char(c - 'A' + 'a') : c);
  if (lower == "c")
    return LanguageTag::C;
  if (lower == "c++" || lower == "cpp" || lower == "cxx")
    return LanguageTag::Cpp;
  if (lower == "julia")
    return LanguageTag::Julia;
  if (lower == "rust")
    return LanguageTag::Rust;
  if (lower == "swift")
    return LanguageTag::Swift;
  if (lower == "other")
    return LanguageTag::Other;
  return std::nullopt;
}

} // namespace irforge
