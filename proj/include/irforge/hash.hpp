//===-- hash.hpp - Structural hashing of IR entities ------------*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// 64-bit structural hashes over canonical token streams. Local value names,
// metadata and attributes never enter a stream, so alpha-renaming and
// debug-info attachment cannot perturb a hash. Module hashes combine item
// hashes as a sorted multiset and are therefore independent of definition
// order.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "irforge/ir.hpp"

#include <algorithm>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace irforge {

enum class HashMode { Coarse, Detailed };

struct StructuralHash {
  std::uint64_t value = 0;
  HashMode mode = HashMode::Coarse;

  friend bool operator==(const StructuralHash &a, const StructuralHash &b) {
    return a.value == b.value && a.mode == b.mode;
  }
};

namespace detail {

inline constexpr std::uint64_t fnv_offset = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t fnv_prime = 0x100000001b3ull;

// FNV-1a fold. Integers are folded as 8 explicit little-endian bytes and
// strings are length-prefixed, so distinct token streams cannot collide by
// concatenation.
struct Fnv64 {
  std::uint64_t state = fnv_offset;

  void byte(std::uint8_t b) {
    state ^= b;
    state *= fnv_prime;
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
      byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void str(std::string_view s) {
    u64(s.size());
    for (char ch : s)
      byte(static_cast<std::uint8_t>(ch));
  }
};

inline void fold_operand_detailed(Fnv64 &h, const OperandRef &op) {
  h.u64(static_cast<std::uint64_t>(op.kind));
  if (op.kind == OperandRef::Kind::ConstantInt && op.int_value)
    h.u64(static_cast<std::uint64_t>(*op.int_value));
  else if (op.kind == OperandRef::Kind::ConstantFp)
    h.str(op.text); // textual token; FP bit patterns are not reconstructed
}

inline void fold_instruction(Fnv64 &h, const IrInstruction &inst,
                             HashMode mode) {
  h.u64(static_cast<std::uint64_t>(inst.opcode));
  if (mode == HashMode::Coarse)
    return;
  h.str(inst.type_token);
  for (const OperandRef &op : inst.operands) {
    if (op.kind == OperandRef::Kind::Metadata)
      continue;
    fold_operand_detailed(h, op);
  }
  if (inst.callee)
    h.str(*inst.callee);
}

} // namespace detail

/// Hash of one function body. Coarse: block count then every opcode id in
/// block order. Detailed: additionally each instruction's type token, operand
/// kinds, integer constant values and direct-call callee text.
inline StructuralHash hash_function(const IrFunction &fn, HashMode mode) {
  detail::Fnv64 h;
  h.u64(fn.blocks.size());
  for (const IrBlock &block : fn.blocks)
    for (const IrInstruction &inst : block.instructions)
      detail::fold_instruction(h, inst, mode);
  return {h.state, mode};
}

/// Hash of one global: type token, initializer tokens, constness. The name
/// never enters the stream. Both modes produce the same value.
inline StructuralHash hash_global(const IrGlobal &g, HashMode mode) {
  detail::Fnv64 h;
  h.str(g.type_token);
  h.u64(g.initializer_tokens.size());
  for (const std::string &tok : g.initializer_tokens)
    h.str(tok);
  h.byte(g.is_constant ? 1 : 0);
  return {h.state, mode};
}

/// Order-independent combination over all globals and all function
/// definitions: items are (kind tag, item hash) pairs folded in sorted order.
/// The empty module hashes to the FNV-1a offset basis.
inline StructuralHash hash_module(const IrModule &m, HashMode mode) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> items;
  items.reserve(m.globals.size() + m.functions.size());
  for (const IrGlobal &g : m.globals)
    items.emplace_back(1, hash_global(g, mode).value);
  for (const IrFunction &fn : m.functions) {
    if (!fn.is_definition)
      continue; // declarations carry no structure worth combining
    items.emplace_back(2, hash_function(fn, mode).value);
  }
  std::sort(items.begin(), items.end());

  detail::Fnv64 h;
  for (const auto &[tag, value] : items) {
    h.u64(tag);
    h.u64(value);
  }
  return {h.state, mode};
}

} // namespace irforge
