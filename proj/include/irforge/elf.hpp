//===-- elf.hpp - Minimal ELF64 section reader -------------------*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Just enough ELF to walk the section-header table of a little-endian
// relocatable object and pull out a named section's bytes. No relocation,
// symbol, or program-header handling.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "irforge/errors.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irforge {

inline constexpr std::array<unsigned char, 4> bitcode_magic = {0x42, 0x43,
                                                               0xC0, 0xDE};

inline bool starts_with_bitcode_magic(std::string_view bytes) {
  return bytes.size() >= 4 &&
         static_cast<unsigned char>(bytes[0]) == bitcode_magic[0] &&
         static_cast<unsigned char>(bytes[1]) == bitcode_magic[1] &&
         static_cast<unsigned char>(bytes[2]) == bitcode_magic[2] &&
         static_cast<unsigned char>(bytes[3]) == bitcode_magic[3];
}

inline bool is_elf(std::string_view bytes) {
  return bytes.size() >= 4 && bytes[0] == 0x7f && bytes[1] == 'E' &&
         bytes[2] == 'L' && bytes[3] == 'F';
}

namespace detail {

inline std::uint64_t read_u64le(std::string_view b, std::size_t off) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i)
    v = (v << 8) | static_cast<unsigned char>(b[off + static_cast<std::size_t>(i)]);
  return v;
}

inline std::uint32_t read_u32le(std::string_view b, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i)
    v = (v << 8) | static_cast<unsigned char>(b[off + static_cast<std::size_t>(i)]);
  return v;
}

inline std::uint16_t read_u16le(std::string_view b, std::size_t off) {
  return static_cast<std::uint16_t>(
      static_cast<unsigned char>(b[off]) |
      (static_cast<unsigned char>(b[off + 1]) << 8));
}

} // namespace detail

struct ElfSection {
  std::string name;
  std::size_t offset = 0; // into the object bytes; 0 size for SHT_NOBITS
  std::size_t size = 0;
  bool nobits = false;
};

/// Lists the sections of a 64-bit little-endian ELF object. Throws a corrupt
/// error on anything malformed or out of bounds.
inline std::vector<ElfSection> elf_sections(std::string_view bytes) {
  using namespace detail;
  if (!is_elf(bytes) || bytes.size() < 64)
    throw Error(ErrorKind::Corrupt, "not an ELF object");
  if (static_cast<unsigned char>(bytes[4]) != 2) // ELFCLASS64
    throw Error(ErrorKind::Corrupt, "only 64-bit ELF objects are supported");
  if (static_cast<unsigned char>(bytes[5]) != 1) // ELFDATA2LSB
    throw Error(ErrorKind::Corrupt, "only little-endian ELF objects are supported");

  std::uint64_t shoff = read_u64le(bytes, 0x28);
  std::uint16_t shentsize = read_u16le(bytes, 0x3A);
  std::uint16_t shnum = read_u16le(bytes, 0x3C);
  std::uint16_t shstrndx = read_u16le(bytes, 0x3E);
  if (shentsize < 64 || shnum == 0 || shstrndx >= shnum)
    throw Error(ErrorKind::Corrupt, "malformed ELF section header table");
  if (shoff + static_cast<std::uint64_t>(shnum) * shentsize > bytes.size())
    throw Error(ErrorKind::Corrupt, "ELF section headers out of bounds");

  auto header = [&](std::size_t index) {
    return shoff + index * shentsize;
  };

  // String table holding section names.
  std::size_t strtab_off = header(shstrndx);
  std::uint64_t str_offset = read_u64le(bytes, strtab_off + 0x18);
  std::uint64_t str_size = read_u64le(bytes, strtab_off + 0x20);
  if (str_offset + str_size > bytes.size())
    throw Error(ErrorKind::Corrupt, "ELF string table out of bounds");
  std::string_view strtab = bytes.substr(str_offset, str_size);

  std::vector<ElfSection> sections;
  for (std::size_t i = 0; i < shnum; ++i) {
    std::size_t off = header(i);
    std::uint32_t name_off = read_u32le(bytes, off + 0x00);
    std::uint32_t type = read_u32le(bytes, off + 0x04);
    std::uint64_t sec_offset = read_u64le(bytes, off + 0x18);
    std::uint64_t sec_size = read_u64le(bytes, off + 0x20);

    ElfSection s;
    if (name_off < strtab.size()) {
      std::string_view rest = strtab.substr(name_off);
      std::size_t nul = rest.find('\0');
      s.name = std::string(rest.substr(0, nul == std::string_view::npos
                                              ? rest.size()
                                              : nul));
    }
    s.nobits = type == 8; // SHT_NOBITS
    s.offset = static_cast<std::size_t>(sec_offset);
    s.size = static_cast<std::size_t>(sec_size);
    if (!s.nobits && sec_offset + sec_size > bytes.size())
      throw Error(ErrorKind::Corrupt, "ELF section '" + s.name +
                                          "' out of bounds");
    sections.push_back(std::move(s));
  }
  return sections;
}

/// True when the object parses as ELF and contains any of the named sections
/// with nonempty contents. Never throws; malformed input is just "no".
inline bool has_bitcode_section(std::string_view object_bytes,
                                const std::vector<std::string> &section_names) {
  try {
    for (const ElfSection &s : elf_sections(object_bytes)) {
      if (s.nobits || s.size == 0)
        continue;
      for (const std::string &want : section_names)
        if (s.name == want)
          return true;
    }
  } catch (const Error &) {
  }
  return false;
}

/// Returns the contents of the first section whose name matches the ordered
/// name list. Not-found and corrupt payloads are distinct errors.
inline std::string
extract_embedded_bitcode(std::string_view object_bytes,
                         const std::vector<std::string> &section_names) {
  std::vector<ElfSection> sections = elf_sections(object_bytes);
  for (const std::string &want : section_names) {
    for (const ElfSection &s : sections) {
      if (s.name != want || s.nobits)
        continue;
      std::string_view payload = object_bytes.substr(s.offset, s.size);
      if (!starts_with_bitcode_magic(payload))
        throw Error(ErrorKind::Corrupt,
                    "section '" + s.name + "' does not hold bitcode");
      return std::string(payload);
    }
  }
  throw Error(ErrorKind::NotFound, "no bitcode section found");
}

/// Default section-name search order: the C/C++ compiler's name first, then
/// the Swift-style fallbacks.
inline const std::vector<std::string> &default_bitcode_section_names() {
  static const std::vector<std::string> names = {".llvmbc", "__LLVM,__bitcode",
                                                 "__bitcode"};
  return names;
}

} // namespace irforge
