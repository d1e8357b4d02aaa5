//===-- parser.hpp - Textual LLVM-IR subset parser --------------*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Parses a pragmatic subset of textual LLVM-IR into the IrModule model. The
// supported instruction set is the Opcode enum; anything else becomes
// Opcode::Other with its mnemonic retained. Types, constants and metadata are
// captured as opaque tokens. Metadata attachments and attribute groups are
// tokenized and set aside, never misparsed as code.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "irforge/errors.hpp"
#include "irforge/ir.hpp"
#include "irforge/lexer.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace irforge {

namespace detail {

using lex::Cursor;
using lex::LogicalLine;

inline const std::unordered_map<std::string_view, Opcode> &opcode_table() {
  static const std::unordered_map<std::string_view, Opcode> table = {
      {"add", Opcode::Add},
      {"fadd", Opcode::FAdd},
      {"sub", Opcode::Sub},
      {"fsub", Opcode::FSub},
      {"mul", Opcode::Mul},
      {"fmul", Opcode::FMul},
      {"udiv", Opcode::UDiv},
      {"sdiv", Opcode::SDiv},
      {"fdiv", Opcode::FDiv},
      {"urem", Opcode::URem},
      {"srem", Opcode::SRem},
      {"frem", Opcode::FRem},
      {"fneg", Opcode::FNeg},
      {"shl", Opcode::Shl},
      {"lshr", Opcode::LShr},
      {"ashr", Opcode::AShr},
      {"and", Opcode::And},
      {"or", Opcode::Or},
      {"xor", Opcode::Xor},
      {"icmp", Opcode::ICmp},
      {"fcmp", Opcode::FCmp},
      {"load", Opcode::Load},
      {"store", Opcode::Store},
      {"alloca", Opcode::Alloca},
      {"getelementptr", Opcode::GetElementPtr},
      {"phi", Opcode::Phi},
      {"select", Opcode::Select},
      {"call", Opcode::Call},
      {"br", Opcode::Br},
      {"switch", Opcode::Switch},
      {"ret", Opcode::Ret},
      {"unreachable", Opcode::Unreachable},
      {"invoke", Opcode::Invoke},
      {"bitcast", Opcode::BitCast},
      {"trunc", Opcode::Trunc},
      {"zext", Opcode::ZExt},
      {"sext", Opcode::SExt},
      {"fptrunc", Opcode::FPTrunc},
      {"fpext", Opcode::FPExt},
      {"fptoui", Opcode::FPToUI},
      {"fptosi", Opcode::FPToSI},
      {"uitofp", Opcode::UIToFP},
      {"sitofp", Opcode::SIToFP},
      {"ptrtoint", Opcode::PtrToInt},
      {"inttoptr", Opcode::IntToPtr},
      {"addrspacecast", Opcode::AddrSpaceCast},
      {"extractvalue", Opcode::ExtractValue},
      {"insertvalue", Opcode::InsertValue},
      {"extractelement", Opcode::ExtractElement},
      {"insertelement", Opcode::InsertElement},
      {"shufflevector", Opcode::ShuffleVector},
      {"freeze", Opcode::Freeze},
      {"atomicrmw", Opcode::AtomicRMW},
      {"cmpxchg", Opcode::CmpXchg},
      {"fence", Opcode::Fence},
      {"landingpad", Opcode::LandingPad},
      {"resume", Opcode::Resume},
  };
  return table;
}

inline bool is_binary_opcode(Opcode op) {
  switch (op) {
  case Opcode::Add:
  case Opcode::FAdd:
  case Opcode::Sub:
  case Opcode::FSub:
  case Opcode::Mul:
  case Opcode::FMul:
  case Opcode::UDiv:
  case Opcode::SDiv:
  case Opcode::FDiv:
  case Opcode::URem:
  case Opcode::SRem:
  case Opcode::FRem:
  case Opcode::Shl:
  case Opcode::LShr:
  case Opcode::AShr:
  case Opcode::And:
  case Opcode::Or:
  case Opcode::Xor:
    return true;
  default:
    return false;
  }
}

inline bool is_cast_opcode(Opcode op) {
  switch (op) {
  case Opcode::BitCast:
  case Opcode::Trunc:
  case Opcode::ZExt:
  case Opcode::SExt:
  case Opcode::FPTrunc:
  case Opcode::FPExt:
  case Opcode::FPToUI:
  case Opcode::FPToSI:
  case Opcode::UIToFP:
  case Opcode::SIToFP:
  case Opcode::PtrToInt:
  case Opcode::IntToPtr:
  case Opcode::AddrSpaceCast:
    return true;
  default:
    return false;
  }
}

inline bool is_instruction_flag_word(std::string_view w) {
  return w == "nuw" || w == "nsw" || w == "exact" || w == "inbounds" ||
         w == "inrange" || w == "nneg" || w == "disjoint" || w == "fast" ||
         w == "nnan" || w == "ninf" || w == "nsz" || w == "arcp" ||
         w == "contract" || w == "afn" || w == "reassoc" || w == "volatile" ||
         w == "atomic" || w == "weak" || w == "samesign";
}

inline bool is_ordering_word(std::string_view w) {
  return w == "unordered" || w == "monotonic" || w == "acquire" ||
         w == "release" || w == "acq_rel" || w == "seq_cst";
}

inline bool is_icmp_predicate(std::string_view w) {
  return w == "eq" || w == "ne" || w == "ugt" || w == "uge" || w == "ult" ||
         w == "ule" || w == "sgt" || w == "sge" || w == "slt" || w == "sle";
}

inline bool is_fcmp_predicate(std::string_view w) {
  return w == "oeq" || w == "ogt" || w == "oge" || w == "olt" || w == "ole" ||
         w == "one" || w == "ord" || w == "ueq" || w == "ugt" || w == "uge" ||
         w == "ult" || w == "ule" || w == "une" || w == "uno" || w == "true" ||
         w == "false";
}

// Attribute-ish words that may precede the callee / return type of a call.
inline bool is_call_qualifier(std::string_view w) {
  return w == "fast" || w == "nnan" || w == "ninf" || w == "nsz" ||
         w == "arcp" || w == "contract" || w == "afn" || w == "reassoc" ||
         w == "zeroext" || w == "signext" || w == "inreg" || w == "noalias" ||
         w == "nonnull" || w == "noundef" || w == "nocapture" ||
         w == "returned" || w == "swiftself" || w == "swifterror" ||
         w == "ccc" || w == "fastcc" || w == "coldcc" || w == "tailcc" ||
         w == "swiftcc" || w == "swifttailcc" || w == "webkit_jscc" ||
         w == "anyregcc" || w == "preserve_mostcc" || w == "preserve_allcc" ||
         w == "cxx_fast_tlscc" || w == "cfguard_checkcc" || w == "ghccc" ||
         w == "range" || w == "align" || w == "dereferenceable" ||
         w == "dereferenceable_or_null" || w == "nofpclass";
}

// The skeleton of an instruction assembled from one or more logical lines.
struct InstText {
  std::string text;
  std::size_t line_no = 0;
};

class FunctionBodyParser {
public:
  FunctionBodyParser(IrFunction &fn, std::size_t counter_start)
      : fn_(fn), unnamed_counter_(counter_start) {
    for (const auto &p : fn_.params)
      if (p.name)
        defined_.insert(*p.name);
  }

  void add_label(const std::string &label, std::size_t line_no) {
    if (!labels_.insert(label).second)
      throw ParseError("duplicate label '" + label + "' in function @" +
                           fn_.name,
                       line_no);
    start_block(label, line_no);
  }

  void add_instruction(const InstText &inst_text) {
    if (fn_.blocks.empty()) {
      // Unnamed entry block: its implicit number is the next unnamed local.
      start_block(std::to_string(unnamed_counter_), inst_text.line_no);
    }
    IrBlock &block = fn_.blocks.back();
    if (!block.instructions.empty() &&
        is_terminator(block.instructions.back().opcode))
      throw ParseError("instruction after terminator in block '" +
                           block.label + "' of @" + fn_.name,
                       inst_text.line_no);
    block.instructions.push_back(parse_instruction(inst_text));
  }

private:
  void start_block(const std::string &label, std::size_t line_no) {
    IrBlock block;
    block.label = label;
    block.source_line = line_no;
    fn_.blocks.push_back(std::move(block));
  }

  void define_result(const std::string &name, std::size_t line_no) {
    if (!defined_.insert(name).second)
      throw ParseError("local value '" + name + "' defined more than once in @" +
                           fn_.name,
                       line_no);
  }

  IrInstruction parse_instruction(const InstText &inst_text);

  // family parsers, each positioned right after the opcode word
  void parse_binary(Cursor &c, IrInstruction &inst);
  void parse_cmp(Cursor &c, IrInstruction &inst);
  void parse_load(Cursor &c, IrInstruction &inst);
  void parse_store(Cursor &c, IrInstruction &inst);
  void parse_alloca(Cursor &c, IrInstruction &inst);
  void parse_gep(Cursor &c, IrInstruction &inst);
  void parse_phi(Cursor &c, IrInstruction &inst);
  void parse_select(Cursor &c, IrInstruction &inst);
  void parse_call(Cursor &c, IrInstruction &inst, bool is_invoke);
  void parse_br(Cursor &c, IrInstruction &inst);
  void parse_switch(Cursor &c, IrInstruction &inst);
  void parse_ret(Cursor &c, IrInstruction &inst);
  void parse_cast(Cursor &c, IrInstruction &inst);
  void parse_indexed_aggregate(Cursor &c, IrInstruction &inst);
  void parse_three_typed_operands(Cursor &c, IrInstruction &inst, int count);
  void parse_atomicrmw(Cursor &c, IrInstruction &inst);
  void parse_cmpxchg(Cursor &c, IrInstruction &inst);
  void parse_landingpad(Cursor &c, IrInstruction &inst);
  void parse_simple_typed(Cursor &c, IrInstruction &inst);

  std::string expect_type(Cursor &c, std::size_t line_no,
                          std::string_view what) {
    auto ty = lex::scan_type(c);
    if (!ty)
      throw ParseError("expected type in " + std::string(what), line_no);
    return *ty;
  }

  void expect_comma(Cursor &c, std::size_t line_no, std::string_view what) {
    if (!c.consume(','))
      throw ParseError("expected ',' in " + std::string(what), line_no);
  }

  void skip_flag_words(Cursor &c) {
    for (;;) {
      c.skip_ws();
      std::size_t save = c.pos;
      std::string w = lex::scan_word(c);
      if (w.empty()) {
        c.pos = save;
        return;
      }
      if (w == "syncscope" && c.peek() == '(') {
        std::string junk;
        lex::scan_group(c, junk);
        continue;
      }
      if (is_instruction_flag_word(w))
        continue;
      c.pos = save;
      return;
    }
  }

  void skip_ordering_words(Cursor &c) {
    for (;;) {
      c.skip_ws();
      std::size_t save = c.pos;
      std::string w = lex::scan_word(c);
      if (w == "syncscope" && c.peek() == '(') {
        std::string junk;
        lex::scan_group(c, junk);
        continue;
      }
      if (is_ordering_word(w))
        continue;
      c.pos = save;
      return;
    }
  }

  // Consumes trailing ", align 8", ", !dbg !21" style groups. Metadata
  // attachments become Metadata operands; everything else is dropped.
  void consume_trailers(Cursor &c, IrInstruction &inst) {
    for (;;) {
      if (!c.consume(','))
        return;
      c.skip_ws();
      if (c.peek() == '!') {
        std::string text = lex::scan_metadata(c);
        c.skip_ws();
        if (c.peek() == '!') {
          text += ' ';
          text += lex::scan_metadata(c);
        }
        OperandRef op;
        op.kind = OperandRef::Kind::Metadata;
        op.text = std::move(text);
        inst.operands.push_back(std::move(op));
        continue;
      }
      // skip one comma-delimited segment (align 4, section "...", count
      // operands of alloca, ...), bracket-aware
      while (!c.eof() && c.peek() != ',') {
        if (c.peek() == '"') {
          lex::scan_string(c);
        } else if (c.peek() == '(' || c.peek() == '[' || c.peek() == '{' ||
                   c.peek() == '<') {
          std::string junk;
          if (!lex::scan_group(c, junk))
            return;
        } else {
          ++c.pos;
        }
      }
    }
  }

  IrFunction &fn_;
  std::size_t unnamed_counter_;
  std::unordered_set<std::string> defined_;
  std::unordered_set<std::string> labels_;
};

inline IrInstruction FunctionBodyParser::parse_instruction(
    const InstText &inst_text) {
  Cursor c{inst_text.text, 0};
  IrInstruction inst;
  inst.source_line = inst_text.line_no;

  c.skip_ws();
  if (c.peek() == '%') {
    std::size_t save = c.pos;
    std::string name = lex::scan_value_token(c);
    if (c.consume('=')) {
      define_result(name, inst_text.line_no);
      inst.result_name = name;
    } else {
      c.pos = save;
    }
  }

  std::string word = lex::scan_word(c);
  if (word == "tail" || word == "musttail" || word == "notail")
    word = lex::scan_word(c);

  auto it = opcode_table().find(word);
  Opcode op = it == opcode_table().end() ? Opcode::Other : it->second;
  inst.opcode = op;
  inst.raw_opcode = word;

  switch (op) {
  case Opcode::Other: {
    std::string_view rest = lex::trim(c.rest());
    if (!rest.empty()) {
      OperandRef raw;
      raw.kind = OperandRef::Kind::OtherConstant;
      raw.text = std::string(rest);
      inst.operands.push_back(std::move(raw));
    }
    return inst;
  }
  case Opcode::ICmp:
  case Opcode::FCmp:
    parse_cmp(c, inst);
    break;
  case Opcode::Load:
    parse_load(c, inst);
    break;
  case Opcode::Store:
    parse_store(c, inst);
    break;
  case Opcode::Alloca:
    parse_alloca(c, inst);
    break;
  case Opcode::GetElementPtr:
    parse_gep(c, inst);
    break;
  case Opcode::Phi:
    parse_phi(c, inst);
    break;
  case Opcode::Select:
    parse_select(c, inst);
    break;
  case Opcode::Call:
    parse_call(c, inst, /*is_invoke=*/false);
    break;
  case Opcode::Invoke:
    parse_call(c, inst, /*is_invoke=*/true);
    break;
  case Opcode::Br:
    parse_br(c, inst);
    break;
  case Opcode::Switch:
    parse_switch(c, inst);
    break;
  case Opcode::Ret:
    parse_ret(c, inst);
    break;
  case Opcode::Unreachable:
    break;
  case Opcode::ExtractValue:
  case Opcode::InsertValue:
    parse_indexed_aggregate(c, inst);
    break;
  case Opcode::ExtractElement:
    parse_three_typed_operands(c, inst, 2);
    break;
  case Opcode::InsertElement:
  case Opcode::ShuffleVector:
    parse_three_typed_operands(c, inst, 3);
    break;
  case Opcode::Freeze:
  case Opcode::Resume:
    parse_simple_typed(c, inst);
    break;
  case Opcode::FNeg:
    skip_flag_words(c);
    parse_simple_typed(c, inst);
    break;
  case Opcode::AtomicRMW:
    parse_atomicrmw(c, inst);
    break;
  case Opcode::CmpXchg:
    parse_cmpxchg(c, inst);
    break;
  case Opcode::Fence:
    skip_flag_words(c);
    skip_ordering_words(c);
    break;
  case Opcode::LandingPad:
    parse_landingpad(c, inst);
    break;
  default:
    if (is_binary_opcode(op))
      parse_binary(c, inst);
    else if (is_cast_opcode(op))
      parse_cast(c, inst);
    break;
  }

  consume_trailers(c, inst);
  return inst;
}

inline void FunctionBodyParser::parse_binary(Cursor &c, IrInstruction &inst) {
  skip_flag_words(c);
  inst.type_token = expect_type(c, inst.source_line, inst.raw_opcode);
  inst.operands.push_back(lex::scan_operand(c));
  expect_comma(c, inst.source_line, inst.raw_opcode);
  inst.operands.push_back(lex::scan_operand(c));
}

inline void FunctionBodyParser::parse_cmp(Cursor &c, IrInstruction &inst) {
  skip_flag_words(c);
  std::string pred = lex::scan_word(c); // predicate; not part of the model
  bool ok = inst.opcode == Opcode::ICmp ? is_icmp_predicate(pred)
                                        : is_fcmp_predicate(pred);
  if (!ok)
    throw ParseError("unknown comparison predicate '" + pred + "'",
                     inst.source_line);
  inst.type_token = expect_type(c, inst.source_line, inst.raw_opcode);
  inst.operands.push_back(lex::scan_operand(c));
  expect_comma(c, inst.source_line, inst.raw_opcode);
  inst.operands.push_back(lex::scan_operand(c));
}

inline void FunctionBodyParser::parse_load(Cursor &c, IrInstruction &inst) {
  skip_flag_words(c);
  inst.type_token = expect_type(c, inst.source_line, "load");
  expect_comma(c, inst.source_line, "load");
  expect_type(c, inst.source_line, "load pointer");
  inst.operands.push_back(lex::scan_operand(c));
  skip_ordering_words(c);
}

inline void FunctionBodyParser::parse_store(Cursor &c, IrInstruction &inst) {
  skip_flag_words(c);
  inst.type_token = expect_type(c, inst.source_line, "store");
  inst.operands.push_back(lex::scan_operand(c));
  expect_comma(c, inst.source_line, "store");
  expect_type(c, inst.source_line, "store pointer");
  inst.operands.push_back(lex::scan_operand(c));
  skip_ordering_words(c);
}

inline void FunctionBodyParser::parse_alloca(Cursor &c, IrInstruction &inst) {
  skip_flag_words(c);
  inst.type_token = expect_type(c, inst.source_line, "alloca");
  // optional ", <ty> <count>" is handled by the trailer logic
}

inline void FunctionBodyParser::parse_gep(Cursor &c, IrInstruction &inst) {
  skip_flag_words(c);
  inst.type_token = expect_type(c, inst.source_line, "getelementptr");
  expect_comma(c, inst.source_line, "getelementptr");
  expect_type(c, inst.source_line, "getelementptr pointer");
  inst.operands.push_back(lex::scan_operand(c));
  while (true) {
    std::size_t save = c.pos;
    if (!c.consume(','))
      break;
    c.skip_ws();
    if (c.peek() == '!') { // metadata trailer, hand back
      c.pos = save;
      break;
    }
    skip_flag_words(c); // inrange on struct indices
    auto ty = lex::scan_type(c);
    if (!ty) {
      c.pos = save;
      break;
    }
    inst.operands.push_back(lex::scan_operand(c));
  }
}

inline void FunctionBodyParser::parse_phi(Cursor &c, IrInstruction &inst) {
  skip_flag_words(c);
  inst.type_token = expect_type(c, inst.source_line, "phi");
  for (;;) {
    if (!c.consume('['))
      throw ParseError("expected '[' in phi", inst.source_line);
    inst.operands.push_back(lex::scan_operand(c));
    expect_comma(c, inst.source_line, "phi");
    inst.operands.push_back(lex::scan_operand(c, /*label_type=*/true));
    if (!c.consume(']'))
      throw ParseError("expected ']' in phi", inst.source_line);
    std::size_t save = c.pos;
    if (!c.consume(',')) {
      break;
    }
    c.skip_ws();
    if (c.peek() != '[') { // trailing metadata, not another incoming edge
      c.pos = save;
      break;
    }
  }
}

inline void FunctionBodyParser::parse_select(Cursor &c, IrInstruction &inst) {
  skip_flag_words(c);
  expect_type(c, inst.source_line, "select condition");
  inst.operands.push_back(lex::scan_operand(c));
  expect_comma(c, inst.source_line, "select");
  inst.type_token = expect_type(c, inst.source_line, "select");
  inst.operands.push_back(lex::scan_operand(c));
  expect_comma(c, inst.source_line, "select");
  expect_type(c, inst.source_line, "select");
  inst.operands.push_back(lex::scan_operand(c));
}

inline void FunctionBodyParser::parse_call(Cursor &c, IrInstruction &inst,
                                           bool is_invoke) {
  // qualifiers between the opcode and the return type
  for (;;) {
    c.skip_ws();
    std::size_t save = c.pos;
    std::string w = lex::scan_word(c);
    if (w.empty()) {
      c.pos = save;
      break;
    }
    if (w == "addrspace" && c.peek() == '(') {
      std::string junk;
      lex::scan_group(c, junk);
      continue;
    }
    if (is_call_qualifier(w)) {
      if (c.peek() == '(') { // dereferenceable(8), nofpclass(nan)...
        std::string junk;
        lex::scan_group(c, junk);
      } else if (w == "align") {
        lex::scan_word(c);
      }
      continue;
    }
    c.pos = save;
    break;
  }

  inst.type_token = expect_type(c, inst.source_line, inst.raw_opcode);
  c.skip_ws();

  if (c.peek() == '@') {
    std::string callee = lex::scan_value_token(c);
    inst.callee = callee;
    std::string_view name(callee);
    name.remove_prefix(1);
    if (name.rfind("llvm.", 0) == 0) {
      inst.is_intrinsic_call = true;
      if (name.rfind("llvm.dbg.", 0) == 0)
        inst.is_debug_intrinsic = true;
    }
  } else if (c.peek() == '%') {
    inst.operands.push_back(lex::scan_operand(c));
  } else {
    // inline asm or a constant-expression callee
    std::size_t save = c.pos;
    std::string w = lex::scan_word(c);
    if (w == "asm") {
      OperandRef op;
      op.kind = OperandRef::Kind::OtherConstant;
      op.text = "asm";
      for (;;) {
        c.skip_ws();
        if (c.peek() == '"') {
          op.text += ' ';
          op.text += lex::scan_string(c);
          c.skip_ws();
          if (c.peek() == ',') {
            ++c.pos;
            continue;
          }
          break;
        }
        std::string flag = lex::scan_word(c);
        if (flag.empty())
          break;
        op.text += ' ';
        op.text += flag;
      }
      inst.operands.push_back(std::move(op));
    } else {
      c.pos = save;
      inst.operands.push_back(lex::scan_operand(c));
    }
  }

  // argument list
  c.skip_ws();
  if (c.peek() == '(') {
    ++c.pos;
    c.skip_ws();
    while (!c.eof() && c.peek() != ')') {
      c.skip_ws();
      if (c.peek() == '.') { // "..." in a musttail forwarded call
        while (c.peek() == '.')
          ++c.pos;
        continue;
      }
      auto ty = lex::scan_type(c);
      if (!ty)
        throw ParseError("expected argument type in " + inst.raw_opcode,
                         inst.source_line);
      bool metadata_arg = *ty == "metadata";
      // parameter attributes between type and value
      for (;;) {
        c.skip_ws();
        std::size_t save = c.pos;
        if (c.peek() == '%' || c.peek() == '@' || c.peek() == '!' ||
            c.peek() == '"' || c.peek() == ',' || c.peek() == ')')
          break;
        std::string w = lex::scan_word(c);
        if (w.empty())
          break;
        if (w == "align") {
          lex::scan_word(c);
          continue;
        }
        if (c.peek() == '(') {
          bool constant_expr = lex::starts_constant_expr(w);
          if (constant_expr) {
            c.pos = save;
            break;
          }
          std::string junk;
          lex::scan_group(c, junk); // byval(ty), sret(ty)...
          continue;
        }
        if (lex::is_ident_char(w[0]) && !is_call_qualifier(w) &&
            !(w == "nest" || w == "byval" || w == "sret" || w == "inalloca" ||
              w == "readonly" || w == "writeonly" || w == "readnone" ||
              w == "immarg" || w == "elementtype" || w == "allocptr" ||
              w == "returned" || w == "dead_on_unwind" || w == "writable")) {
          // not an attribute: a keyword constant (null, undef, true...)
          c.pos = save;
          break;
        }
      }
      c.skip_ws();
      if (metadata_arg && c.peek() != '!') {
        // metadata-wrapped SSA value, e.g. "metadata i32* %x" in dbg calls;
        // keep it out of the semantic operand stream
        auto inner_ty = lex::scan_type(c);
        (void)inner_ty;
        OperandRef op = lex::scan_operand(c);
        op.kind = OperandRef::Kind::Metadata;
        inst.operands.push_back(std::move(op));
      } else {
        inst.operands.push_back(lex::scan_operand(c));
      }
      c.skip_ws();
      if (c.peek() == ',')
        ++c.pos;
    }
    if (!c.consume(')'))
      throw ParseError("unterminated argument list in " + inst.raw_opcode,
                       inst.source_line);
  }

  // trailing attributes / operand bundles
  for (;;) {
    c.skip_ws();
    if (c.peek() == '#') {
      ++c.pos;
      lex::scan_word(c);
      continue;
    }
    if (c.peek() == '[') {
      std::string junk;
      lex::scan_group(c, junk);
      continue;
    }
    std::size_t save = c.pos;
    std::string w = lex::scan_word(c);
    if (w.empty()) {
      c.pos = save;
      break;
    }
    if (is_invoke && w == "to") {
      c.pos = save;
      break;
    }
    if (c.peek() == '(') {
      std::string junk;
      lex::scan_group(c, junk);
    }
  }

  if (is_invoke) {
    std::string to_word = lex::scan_word(c);
    if (to_word != "to")
      throw ParseError("expected 'to label' in invoke", inst.source_line);
    std::string lab = lex::scan_word(c);
    if (lab != "label")
      throw ParseError("expected 'to label' in invoke", inst.source_line);
    inst.operands.push_back(lex::scan_operand(c, /*label_type=*/true));
    std::string unwind_word = lex::scan_word(c);
    std::string lab2 = lex::scan_word(c);
    if (unwind_word != "unwind" || lab2 != "label")
      throw ParseError("expected 'unwind label' in invoke", inst.source_line);
    inst.operands.push_back(lex::scan_operand(c, /*label_type=*/true));
  }
}

inline void FunctionBodyParser::parse_br(Cursor &c, IrInstruction &inst) {
  std::string ty = expect_type(c, inst.source_line, "br");
  if (ty == "label") {
    inst.operands.push_back(lex::scan_operand(c, /*label_type=*/true));
    return;
  }
  inst.opcode = Opcode::CondBr;
  inst.type_token = ty;
  inst.operands.push_back(lex::scan_operand(c));
  expect_comma(c, inst.source_line, "br");
  expect_type(c, inst.source_line, "br"); // "label"
  inst.operands.push_back(lex::scan_operand(c, /*label_type=*/true));
  expect_comma(c, inst.source_line, "br");
  expect_type(c, inst.source_line, "br");
  inst.operands.push_back(lex::scan_operand(c, /*label_type=*/true));
}

inline void FunctionBodyParser::parse_switch(Cursor &c, IrInstruction &inst) {
  inst.type_token = expect_type(c, inst.source_line, "switch");
  inst.operands.push_back(lex::scan_operand(c));
  expect_comma(c, inst.source_line, "switch");
  expect_type(c, inst.source_line, "switch"); // "label"
  inst.operands.push_back(lex::scan_operand(c, /*label_type=*/true));
  if (!c.consume('['))
    throw ParseError("expected '[' in switch", inst.source_line);
  for (;;) {
    c.skip_ws();
    if (c.peek() == ']') {
      ++c.pos;
      break;
    }
    if (c.eof())
      throw ParseError("unterminated switch table", inst.source_line);
    expect_type(c, inst.source_line, "switch case");
    inst.operands.push_back(lex::scan_operand(c)); // case constant
    expect_comma(c, inst.source_line, "switch case");
    expect_type(c, inst.source_line, "switch case"); // "label"
    inst.operands.push_back(lex::scan_operand(c, /*label_type=*/true));
  }
}

inline void FunctionBodyParser::parse_ret(Cursor &c, IrInstruction &inst) {
  c.skip_ws();
  if (c.eof() || c.peek() == ',')
    return;
  std::string ty = expect_type(c, inst.source_line, "ret");
  inst.type_token = ty;
  if (ty == "void")
    return;
  inst.operands.push_back(lex::scan_operand(c));
}

inline void FunctionBodyParser::parse_cast(Cursor &c, IrInstruction &inst) {
  skip_flag_words(c);
  expect_type(c, inst.source_line, inst.raw_opcode);
  inst.operands.push_back(lex::scan_operand(c));
  std::string to_word = lex::scan_word(c);
  if (to_word != "to")
    throw ParseError("expected 'to' in " + inst.raw_opcode, inst.source_line);
  inst.type_token = expect_type(c, inst.source_line, inst.raw_opcode);
}

inline void FunctionBodyParser::parse_indexed_aggregate(Cursor &c,
                                                        IrInstruction &inst) {
  inst.type_token = expect_type(c, inst.source_line, inst.raw_opcode);
  inst.operands.push_back(lex::scan_operand(c));
  while (true) {
    std::size_t save = c.pos;
    if (!c.consume(','))
      break;
    c.skip_ws();
    if (c.peek() == '!') {
      c.pos = save;
      break;
    }
    std::size_t element_save = c.pos;
    auto ty = lex::scan_type(c);
    c.skip_ws();
    if (ty && (c.peek() == '%' || c.peek() == '@' || c.peek() == '"' ||
               ((c.peek() >= '0' && c.peek() <= '9') || c.peek() == '-'))) {
      // insertvalue's "<ty> <val>" element
      inst.operands.push_back(lex::scan_operand(c));
    } else {
      // plain index list
      c.pos = element_save;
      inst.operands.push_back(lex::scan_operand(c));
    }
  }
}

inline void FunctionBodyParser::parse_three_typed_operands(Cursor &c,
                                                           IrInstruction &inst,
                                                           int count) {
  inst.type_token = expect_type(c, inst.source_line, inst.raw_opcode);
  inst.operands.push_back(lex::scan_operand(c));
  for (int i = 1; i < count; ++i) {
    expect_comma(c, inst.source_line, inst.raw_opcode);
    expect_type(c, inst.source_line, inst.raw_opcode);
    inst.operands.push_back(lex::scan_operand(c));
  }
}

inline void FunctionBodyParser::parse_atomicrmw(Cursor &c,
                                                IrInstruction &inst) {
  skip_flag_words(c);
  lex::scan_word(c); // rmw operation (add, xchg, ...)
  expect_type(c, inst.source_line, "atomicrmw pointer");
  inst.operands.push_back(lex::scan_operand(c));
  expect_comma(c, inst.source_line, "atomicrmw");
  inst.type_token = expect_type(c, inst.source_line, "atomicrmw");
  inst.operands.push_back(lex::scan_operand(c));
  skip_ordering_words(c);
}

inline void FunctionBodyParser::parse_cmpxchg(Cursor &c, IrInstruction &inst) {
  skip_flag_words(c);
  expect_type(c, inst.source_line, "cmpxchg pointer");
  inst.operands.push_back(lex::scan_operand(c));
  expect_comma(c, inst.source_line, "cmpxchg");
  inst.type_token = expect_type(c, inst.source_line, "cmpxchg");
  inst.operands.push_back(lex::scan_operand(c));
  expect_comma(c, inst.source_line, "cmpxchg");
  expect_type(c, inst.source_line, "cmpxchg");
  inst.operands.push_back(lex::scan_operand(c));
  skip_ordering_words(c);
}

inline void FunctionBodyParser::parse_landingpad(Cursor &c,
                                                 IrInstruction &inst) {
  inst.type_token = expect_type(c, inst.source_line, "landingpad");
  for (;;) {
    c.skip_ws();
    std::size_t save = c.pos;
    std::string w = lex::scan_word(c);
    if (w == "cleanup")
      continue;
    if (w == "catch" || w == "filter") {
      expect_type(c, inst.source_line, "landingpad clause");
      inst.operands.push_back(lex::scan_operand(c));
      continue;
    }
    c.pos = save;
    break;
  }
}

inline void FunctionBodyParser::parse_simple_typed(Cursor &c,
                                                   IrInstruction &inst) {
  inst.type_token = expect_type(c, inst.source_line, inst.raw_opcode);
  inst.operands.push_back(lex::scan_operand(c));
}

// --- function headers ------------------------------------------------------

struct SignatureParse {
  IrFunction fn;
  bool body_follows = false;  // define line ending in '{'
  std::size_t counter_start = 0; // next unnamed local number after params
};

// Parses "define"/"declare" headers. `c` is positioned after the keyword.
inline SignatureParse parse_signature(Cursor &c, bool is_define,
                                      std::size_t line_no) {
  SignatureParse sig;
  sig.fn.is_definition = is_define;

  // Skip linkage/visibility/cconv/return-attribute words until the last
  // type-like token before the '@' at paren depth zero.
  std::string return_type;
  for (;;) {
    c.skip_ws();
    if (c.eof())
      throw ParseError("missing function name", line_no);
    if (c.peek() == '@')
      break;
    std::size_t save = c.pos;
    auto ty = lex::scan_type(c);
    if (ty && ty->size() && !(ty->at(0) >= '0' && ty->at(0) <= '9')) {
      return_type = *ty;
      continue;
    }
    c.pos = save;
    // Skip one non-type token (qualifier word, align N, "quoted gc"...).
    if (c.peek() == '"') {
      lex::scan_string(c);
      continue;
    }
    std::string w = lex::scan_word(c);
    if (w.empty())
      ++c.pos;
    else if (c.peek() == '(') {
      std::string junk;
      lex::scan_group(c, junk);
    }
  }
  if (return_type.empty())
    throw ParseError("missing return type", line_no);
  sig.fn.return_type_token = return_type;

  std::string name_token = lex::scan_value_token(c);
  if (name_token.size() <= 1)
    throw ParseError("missing function name", line_no);
  sig.fn.name = name_token.substr(1);
  if (sig.fn.name.size() >= 2 && sig.fn.name.front() == '"' &&
      sig.fn.name.back() == '"')
    sig.fn.name = sig.fn.name.substr(1, sig.fn.name.size() - 2);

  if (!c.consume('('))
    throw ParseError("expected parameter list for @" + sig.fn.name, line_no);

  std::size_t unnamed = 0;
  c.skip_ws();
  while (!c.eof() && c.peek() != ')') {
    c.skip_ws();
    if (c.peek() == '.') {
      while (c.peek() == '.')
        ++c.pos;
      sig.fn.is_vararg = true;
      c.skip_ws();
      if (c.peek() == ',')
        ++c.pos;
      continue;
    }
    IrFunction::Param param;
    auto ty = lex::scan_type(c);
    if (!ty)
      throw ParseError("expected parameter type for @" + sig.fn.name, line_no);
    param.type_token = *ty;
    // attributes, then an optional name
    for (;;) {
      c.skip_ws();
      if (c.peek() == '%') {
        param.name = lex::scan_value_token(c);
        break;
      }
      if (c.peek() == ',' || c.peek() == ')')
        break;
      std::string w = lex::scan_word(c);
      if (w.empty()) {
        ++c.pos;
        continue;
      }
      if (w == "align") {
        lex::scan_word(c);
      } else if (c.peek() == '(') {
        std::string junk;
        lex::scan_group(c, junk);
      }
    }
    if (param.name && *param.name == "%" + std::to_string(unnamed))
      ++unnamed;
    sig.fn.params.push_back(std::move(param));
    c.skip_ws();
    if (c.peek() == ',')
      ++c.pos;
  }
  if (!c.consume(')'))
    throw ParseError("unterminated parameter list for @" + sig.fn.name,
                     line_no);
  sig.counter_start = unnamed;

  // Trailing qualifiers: attribute refs, personality, comdat, metadata, gc.
  // For a define the logical line ends with '{'.
  for (;;) {
    c.skip_ws();
    if (c.eof())
      break;
    char ch = c.peek();
    if (ch == '{') {
      ++c.pos;
      sig.body_follows = true;
      break;
    }
    if (ch == '#') {
      ++c.pos;
      lex::scan_word(c);
      continue;
    }
    if (ch == '!') {
      lex::scan_metadata(c);
      continue;
    }
    if (ch == '"') {
      lex::scan_string(c);
      continue;
    }
    std::string w = lex::scan_word(c);
    if (w.empty()) {
      ++c.pos;
      continue;
    }
    if (w == "personality" || w == "prefix" || w == "prologue") {
      lex::scan_type(c);
      lex::scan_operand(c);
      continue;
    }
    if (w == "align" || w == "addrspace") {
      if (c.peek() == '(') {
        std::string junk;
        lex::scan_group(c, junk);
      } else {
        lex::scan_word(c);
      }
      continue;
    }
    if (c.peek() == '(') {
      std::string junk;
      lex::scan_group(c, junk);
    }
  }
  return sig;
}

// The opcode word of an instruction line: skips "%res =" and tail markers.
inline std::string leading_opcode(const std::string &text) {
  Cursor c{text, 0};
  c.skip_ws();
  if (c.peek() == '%') {
    lex::scan_value_token(c);
    if (!c.consume('='))
      return {};
  }
  std::string w = lex::scan_word(c);
  if (w == "tail" || w == "musttail" || w == "notail")
    w = lex::scan_word(c);
  return w;
}

inline bool parse_label_line(const std::string &text, std::string &label_out) {
  if (text.empty() || text.back() != ':')
    return false;
  std::string_view body(text.data(), text.size() - 1);
  body = lex::trim(body);
  if (body.empty())
    return false;
  if (body.front() == '"') {
    if (body.size() < 2 || body.back() != '"')
      return false;
    label_out = std::string(body.substr(1, body.size() - 2));
    return true;
  }
  for (char ch : body)
    if (!lex::is_ident_char(ch) && ch != '-')
      return false;
  label_out = std::string(body);
  return true;
}

// Globals: @name = [qualifiers] (global|constant|alias|ifunc) <ty> [init]...
inline IrGlobal parse_global(Cursor &c, const LogicalLine &line) {
  IrGlobal g;
  g.src_begin = line.src_begin;
  g.src_end = line.src_end;
  std::string name_token = lex::scan_value_token(c);
  g.name = name_token.substr(1);
  if (g.name.size() >= 2 && g.name.front() == '"' && g.name.back() == '"')
    g.name = g.name.substr(1, g.name.size() - 2);
  if (!c.consume('='))
    throw ParseError("expected '=' in global @" + g.name, line.line_no);

  bool external = false;
  for (;;) {
    c.skip_ws();
    std::size_t save = c.pos;
    std::string w = lex::scan_word(c);
    if (w.empty())
      throw ParseError("malformed global @" + g.name, line.line_no);
    if (w == "global" || w == "constant" || w == "alias" || w == "ifunc") {
      g.is_constant = w == "constant";
      break;
    }
    if (w == "external")
      external = true;
    if (w == "thread_local" && c.peek() == '(') {
      std::string junk;
      lex::scan_group(c, junk);
    }
    if (w == "addrspace" && c.peek() == '(') {
      std::string junk;
      lex::scan_group(c, junk);
    }
    (void)save;
  }

  auto ty = lex::scan_type(c);
  if (!ty)
    throw ParseError("expected type in global @" + g.name, line.line_no);
  g.type_token = *ty;

  if (external)
    g.initializer_tokens.push_back("external");
  c.skip_ws();
  if (!c.eof() && c.peek() != ',') {
    OperandRef init = lex::scan_operand(c);
    if (!init.text.empty())
      g.initializer_tokens.push_back(init.text);
  }
  return g;
}

} // namespace detail

/// Parses UTF-8 textual IR into the structured module model. Throws
/// ParseError with a line number on structurally invalid input.
inline IrModule parse_module(std::string_view text) {
  using namespace detail;
  IrModule module;
  auto lines = lex::logical_lines(text);

  std::unordered_set<std::string> function_names;
  std::size_t i = 0;
  while (i < lines.size()) {
    const LogicalLine &line = lines[i];
    Cursor c{line.text, 0};
    c.skip_ws();
    char first = c.peek();

    if (first == '}')
      throw ParseError("unmatched '}'", line.line_no);

    if (first == '!' || first == '$' || first == '#') {
      ++i; // module metadata, comdat or attribute-group definition lines
      continue;
    }

    if (first == '%') {
      // named type: %name = type <def>
      IrNamedType nt;
      nt.name = lex::scan_value_token(c);
      if (c.consume('=')) {
        std::string kw = lex::scan_word(c);
        if (kw == "type") {
          c.skip_ws();
          nt.definition = std::string(lex::trim(c.rest()));
          module.named_types.push_back(std::move(nt));
        }
      }
      ++i;
      continue;
    }

    if (first == '@') {
      module.globals.push_back(parse_global(c, line));
      ++i;
      continue;
    }

    std::string word = lex::scan_word(c);
    if (word == "target") {
      std::string which = lex::scan_word(c);
      if (c.consume('=')) {
        c.skip_ws();
        std::string value = lex::scan_string(c);
        if (value.size() >= 2)
          value = value.substr(1, value.size() - 2);
        if (which == "triple")
          module.target_triple = value;
        else if (which == "datalayout")
          module.datalayout = value;
      }
      ++i;
      continue;
    }
    if (word == "source_filename" || word == "attributes" ||
        word == "uselistorder" || word == "module" || word == "declare" ||
        word == "define") {
      if (word == "declare") {
        SignatureParse sig = parse_signature(c, /*is_define=*/false,
                                             line.line_no);
        sig.fn.src_begin = line.src_begin;
        sig.fn.src_end = line.src_end;
        if (!function_names.insert(sig.fn.name).second)
          throw ParseError("function @" + sig.fn.name + " defined twice",
                           line.line_no);
        module.declarations.push_back(sig.fn.name);
        module.functions.push_back(std::move(sig.fn));
        ++i;
        continue;
      }
      if (word == "define") {
        SignatureParse sig = parse_signature(c, /*is_define=*/true,
                                             line.line_no);
        if (!sig.body_follows)
          throw ParseError("expected '{' after define of @" + sig.fn.name,
                           line.line_no);
        if (!function_names.insert(sig.fn.name).second)
          throw ParseError("function @" + sig.fn.name + " defined twice",
                           line.line_no);
        sig.fn.src_begin = line.src_begin;

        FunctionBodyParser body(sig.fn, sig.counter_start);
        ++i;
        bool closed = false;
        while (i < lines.size()) {
          const LogicalLine &body_line = lines[i];
          if (body_line.text == "}") {
            sig.fn.src_end = body_line.src_end;
            closed = true;
            ++i;
            break;
          }
          std::string label;
          if (parse_label_line(body_line.text, label)) {
            body.add_label(label, body_line.line_no);
            ++i;
            continue;
          }
          // Assemble one instruction, joining invoke and landingpad
          // continuation lines.
          InstText inst_text{body_line.text, body_line.line_no};
          ++i;
          std::string opcode_word = leading_opcode(inst_text.text);
          while (opcode_word == "invoke" && i < lines.size()) {
            const std::string &next = lines[i].text;
            if (next.rfind("to label ", 0) == 0 ||
                next.rfind("unwind label ", 0) == 0) {
              inst_text.text += ' ';
              inst_text.text += next;
              ++i;
            } else {
              break;
            }
          }
          while (opcode_word == "landingpad" && i < lines.size()) {
            const std::string &next = lines[i].text;
            if (next == "cleanup" || next.rfind("cleanup ", 0) == 0 ||
                next.rfind("catch ", 0) == 0 ||
                next.rfind("filter ", 0) == 0) {
              inst_text.text += ' ';
              inst_text.text += next;
              ++i;
            } else {
              break;
            }
          }
          body.add_instruction(inst_text);
        }
        if (!closed)
          throw ParseError("unterminated body of @" + sig.fn.name,
                           lines.back().line_no);
        if (sig.fn.blocks.empty())
          throw ParseError("define of @" + sig.fn.name + " has no body",
                           line.line_no);
        module.functions.push_back(std::move(sig.fn));
        continue;
      }
      ++i; // source_filename / attributes / uselistorder / module asm
      continue;
    }

    // Unknown module-level construct: tolerated, never misparsed as code.
    ++i;
  }
  return module;
}

} // namespace irforge
