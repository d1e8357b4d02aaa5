//===-- ir.hpp - Structured model of a textual LLVM-IR subset ---*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irforge {

// Fixed instruction vocabulary. Anything outside it parses as Other with the
// raw mnemonic retained, so no input construct is ever dropped silently.
enum class Opcode : std::uint8_t {
  Add, FAdd, Sub, FSub, Mul, FMul, UDiv, SDiv, FDiv, URem, SRem, FRem, FNeg,
  Shl, LShr, AShr, And, Or, Xor,
  ICmp, FCmp,
  Load, Store, Alloca, GetElementPtr,
  Phi, Select, Call,
  Br, CondBr, Switch, Ret, Unreachable, Invoke,
  BitCast, Trunc, ZExt, SExt, FPTrunc, FPExt, FPToUI, FPToSI, UIToFP, SIToFP,
  PtrToInt, IntToPtr, AddrSpaceCast,
  ExtractValue, InsertValue, ExtractElement, InsertElement, ShuffleVector,
  Freeze, AtomicRMW, CmpXchg, Fence, LandingPad, Resume,
  Other,
};

inline std::string_view opcode_name(Opcode op) {
  switch (op) {
  case Opcode::Add: return "add";
  case Opcode::FAdd: return "fadd";
  case Opcode::Sub: return "sub";
  case Opcode::FSub: return "fsub";
  case Opcode::Mul: return "mul";
  case Opcode::FMul: return "fmul";
  case Opcode::UDiv: return "udiv";
  case Opcode::SDiv: return "sdiv";
  case Opcode::FDiv: return "fdiv";
  case Opcode::URem: return "urem";
  case Opcode::SRem: return "srem";
  case Opcode::FRem: return "frem";
  case Opcode::FNeg: return "fneg";
  case Opcode::Shl: return "shl";
  case Opcode::LShr: return "lshr";
  case Opcode::AShr: return "ashr";
  case Opcode::And: return "and";
  case Opcode::Or: return "or";
  case Opcode::Xor: return "xor";
  case Opcode::ICmp: return "icmp";
  case Opcode::FCmp: return "fcmp";
  case Opcode::Load: return "load";
  case Opcode::Store: return "store";
  case Opcode::Alloca: return "alloca";
  case Opcode::GetElementPtr: return "getelementptr";
  case Opcode::Phi: return "phi";
  case Opcode::Select: return "select";
  case Opcode::Call: return "call";
  case Opcode::Br: return "br";
  case Opcode::CondBr: return "br"; // same mnemonic, distinguished by arity
  case Opcode::Switch: return "switch";
  case Opcode::Ret: return "ret";
  case Opcode::Unreachable: return "unreachable";
  case Opcode::Invoke: return "invoke";
  case Opcode::BitCast: return "bitcast";
  case Opcode::Trunc: return "trunc";
  case Opcode::ZExt: return "zext";
  case Opcode::SExt: return "sext";
  case Opcode::FPTrunc: return "fptrunc";
  case Opcode::FPExt: return "fpext";
  case Opcode::FPToUI: return "fptoui";
  case Opcode::FPToSI: return "fptosi";
  case Opcode::UIToFP: return "uitofp";
  case Opcode::SIToFP: return "sitofp";
  case Opcode::PtrToInt: return "ptrtoint";
  case Opcode::IntToPtr: return "inttoptr";
  case Opcode::AddrSpaceCast: return "addrspacecast";
  case Opcode::ExtractValue: return "extractvalue";
  case Opcode::InsertValue: return "insertvalue";
  case Opcode::ExtractElement: return "extractelement";
  case Opcode::InsertElement: return "insertelement";
  case Opcode::ShuffleVector: return "shufflevector";
  case Opcode::Freeze: return "freeze";
  case Opcode::AtomicRMW: return "atomicrmw";
  case Opcode::CmpXchg: return "cmpxchg";
  case Opcode::Fence: return "fence";
  case Opcode::LandingPad: return "landingpad";
  case Opcode::Resume: return "resume";
  case Opcode::Other: return "other";
  }
  return "other";
}

inline bool is_terminator(Opcode op) {
  switch (op) {
  case Opcode::Br:
  case Opcode::CondBr:
  case Opcode::Switch:
  case Opcode::Ret:
  case Opcode::Unreachable:
  case Opcode::Invoke:
  case Opcode::Resume:
    return true;
  default:
    return false;
  }
}

struct OperandRef {
  enum class Kind : std::uint8_t {
    Local,         // %value
    Global,        // @symbol
    ConstantInt,   // 42, -7, true/false
    ConstantFp,    // 1.5, 0x4010...
    BlockLabel,    // label %bb
    OtherConstant, // null, undef, aggregates, constant exprs, strings
    Metadata,      // !N, !DIExpression(), metadata-typed arguments
  };

  Kind kind = Kind::OtherConstant;
  std::string text;                     // canonical source token
  std::optional<std::int64_t> int_value; // set for Kind::ConstantInt

  static OperandRef local(std::string t) {
    return {Kind::Local, std::move(t), std::nullopt};
  }
  static OperandRef global(std::string t) {
    return {Kind::Global, std::move(t), std::nullopt};
  }
  static OperandRef label(std::string t) {
    return {Kind::BlockLabel, std::move(t), std::nullopt};
  }
};

struct IrInstruction {
  Opcode opcode = Opcode::Other;
  std::string raw_opcode;    // mnemonic as written; meaningful for Other
  std::optional<std::string> result_name; // "%x" when the line defines a value
  std::string type_token;    // first type token of the instruction, "" if none
  std::vector<OperandRef> operands;
  std::optional<std::string> callee; // "@sym" for direct call/invoke only
  bool is_intrinsic_call = false;    // callee begins with "@llvm."
  bool is_debug_intrinsic = false;   // callee begins with "@llvm.dbg."
  std::size_t source_line = 0;
};

struct IrBlock {
  std::string label; // without '%' sigil; synthesized for unnamed entry
  std::vector<IrInstruction> instructions;
  std::size_t source_line = 0;
};

struct IrFunction {
  std::string name; // without '@' sigil
  std::string return_type_token;
  struct Param {
    std::string type_token;
    std::optional<std::string> name; // "%p" as written
  };
  std::vector<Param> params;
  bool is_vararg = false;
  bool is_definition = false;
  std::vector<IrBlock> blocks;
  // Raw text byte range within the module source, used for textual slicing.
  std::size_t src_begin = 0;
  std::size_t src_end = 0;

  std::size_t instruction_count() const {
    std::size_t n = 0;
    for (const auto &b : blocks)
      n += b.instructions.size();
    return n;
  }
};

struct IrGlobal {
  std::string name; // without '@' sigil
  std::string type_token;
  std::vector<std::string> initializer_tokens;
  bool is_constant = false;
  std::size_t src_begin = 0;
  std::size_t src_end = 0;
};

struct IrNamedType {
  std::string name; // "%struct.foo" as written
  std::string definition; // full "  = type {...}" right-hand side
};

struct IrModule {
  std::optional<std::string> target_triple;
  std::optional<std::string> datalayout;
  std::vector<IrGlobal> globals;
  std::vector<IrFunction> functions; // definitions and declarations
  std::vector<std::string> declarations; // names of declared-only symbols
  std::vector<IrNamedType> named_types;

  const IrFunction *find_function(std::string_view name) const {
    for (const auto &f : functions)
      if (f.name == name)
        return &f;
    return nullptr;
  }
};

} // namespace irforge
