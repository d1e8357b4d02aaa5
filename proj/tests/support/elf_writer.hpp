//===-- elf_writer.hpp - Minimal ELF64 object emitter for tests -*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Emits just enough of a relocatable ELF64 object to carry named sections:
// header, section payloads, .shstrtab, then the section header table. Used
// by the stub compiler and the section-extraction tests.
//
//===----------------------------------------------------------------------===//

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace irforge_test {

struct ElfSectionSpec {
  std::string name;
  std::string bytes;
};

namespace elf_detail {

inline void put_u16(std::string &out, std::size_t at, std::uint16_t v) {
  out[at] = static_cast<char>(v & 0xff);
  out[at + 1] = static_cast<char>(v >> 8);
}

inline void put_u32(std::string &out, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out[at + static_cast<std::size_t>(i)] =
        static_cast<char>((v >> (8 * i)) & 0xff);
}

inline void put_u64(std::string &out, std::size_t at, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    out[at + static_cast<std::size_t>(i)] =
        static_cast<char>((v >> (8 * i)) & 0xff);
}

} // namespace elf_detail

/// Builds a little-endian ELF64 relocatable object holding the given
/// sections as SHT_PROGBITS plus the mandatory null section and .shstrtab.
inline std::string
write_elf_object(const std::vector<ElfSectionSpec> &sections) {
  using namespace elf_detail;
  const std::size_t ehsize = 64, shentsize = 64;
  // Section table: null + payload sections + shstrtab.
  std::size_t shnum = sections.size() + 2;

  std::string shstrtab(1, '\0');
  std::vector<std::uint32_t> name_offsets;
  for (const ElfSectionSpec &s : sections) {
    name_offsets.push_back(static_cast<std::uint32_t>(shstrtab.size()));
    shstrtab += s.name;
    shstrtab += '\0';
  }
  std::uint32_t shstrtab_name = static_cast<std::uint32_t>(shstrtab.size());
  shstrtab += ".shstrtab";
  shstrtab += '\0';

  // Layout: ehdr | payloads | shstrtab | section headers.
  std::vector<std::uint64_t> offsets;
  std::uint64_t cursor = ehsize;
  for (const ElfSectionSpec &s : sections) {
    offsets.push_back(cursor);
    cursor += s.bytes.size();
  }
  std::uint64_t shstrtab_off = cursor;
  cursor += shstrtab.size();
  std::uint64_t shoff = cursor;

  std::string out(shoff + shentsize * shnum, '\0');
  out[0] = 0x7f;
  out[1] = 'E';
  out[2] = 'L';
  out[3] = 'F';
  out[4] = 2; // ELFCLASS64
  out[5] = 1; // ELFDATA2LSB
  out[6] = 1; // EV_CURRENT
  put_u16(out, 0x10, 1);    // ET_REL
  put_u16(out, 0x12, 0x3e); // EM_X86_64
  put_u32(out, 0x14, 1);
  put_u64(out, 0x28, shoff);
  put_u16(out, 0x34, ehsize);
  put_u16(out, 0x3a, shentsize);
  put_u16(out, 0x3c, static_cast<std::uint16_t>(shnum));
  put_u16(out, 0x3e, static_cast<std::uint16_t>(shnum - 1));

  for (std::size_t i = 0; i < sections.size(); ++i)
    out.replace(offsets[i], sections[i].bytes.size(), sections[i].bytes);
  out.replace(shstrtab_off, shstrtab.size(), shstrtab);

  auto header = [&](std::size_t index, std::uint32_t name,
                    std::uint32_t type, std::uint64_t off, std::uint64_t size) {
    std::size_t at = shoff + shentsize * index;
    put_u32(out, at + 0x00, name);
    put_u32(out, at + 0x04, type);
    put_u64(out, at + 0x18, off);
    put_u64(out, at + 0x20, size);
  };
  // Index 0 stays all-zero (SHT_NULL).
  for (std::size_t i = 0; i < sections.size(); ++i)
    header(i + 1, name_offsets[i], 1 /* SHT_PROGBITS */, offsets[i],
           sections[i].bytes.size());
  header(shnum - 1, shstrtab_name, 3 /* SHT_STRTAB */, shstrtab_off,
         shstrtab.size());
  return out;
}

} // namespace irforge_test
