//===-- tokenizer.hpp - BPE training and token counting ---------*- C++ -*-===//
//
// Part of ir-forge, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Classic byte-pair encoding over whitespace-pretokenized words: base symbols
// are the distinct characters of the training sample, merges pick the most
// frequent adjacent pair (lexicographic tiebreak) and stop once no pair
// occurs twice or the vocabulary target is reached.
//
// Every merge allocates a fresh symbol id even when two merges happen to
// spell the same string. That keeps "apply merges in training order" exactly
// equivalent to rank-priority application, which tokenize_count exploits.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "irforge/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace irforge {

struct BpeModel {
  struct Merge {
    std::string left;
    std::string right;
  };
  std::vector<Merge> merges;                       // training order
  std::unordered_map<std::string, int> vocab;      // token text -> first id
  std::size_t vocab_size_target = 0;

  // id-level tables; ids 0..N in creation order (base chars, then merges)
  std::vector<std::string> symbol_text;            // id -> token text
  std::unordered_map<char, int> char_id;           // base symbol lookup
  struct MergeRule {
    int result = -1;
    std::uint32_t rank = 0;
  };
  std::unordered_map<std::uint64_t, MergeRule> merge_table; // packed pair
};

namespace bpe_detail {

inline std::uint64_t pack(int left, int right) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(left)) << 32) |
         static_cast<std::uint32_t>(right);
}

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

template <typename Fn> inline void for_each_word(std::string_view text, Fn fn) {
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i]))
      ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i]))
      ++i;
    if (i > start)
      fn(text.substr(start, i - start));
  }
}

struct Word {
  std::vector<int> syms;
  std::int64_t count = 0;
};

// Priority entry: highest count first, then lexicographically smallest
// (left, right) pair. Entries go stale when counts change; the pop loop
// re-validates against the live count table.
struct QueueEntry {
  std::int64_t count;
  std::string left;
  std::string right;
  std::uint64_t key;
};
struct QueueCompare {
  bool operator()(const QueueEntry &a, const QueueEntry &b) const {
    if (a.count != b.count)
      return a.count < b.count; // max-heap on count
    if (a.left != b.left)
      return a.left > b.left; // then min on pair text
    return a.right > b.right;
  }
};

} // namespace bpe_detail

/// Trains a BPE model. `texts` are concatenated logically; pre-tokenization
/// splits on whitespace. Throws a validation error when vocab_size cannot
/// even hold the base alphabet.
inline BpeModel train_bpe(const std::vector<std::string> &texts,
                          std::size_t vocab_size) {
  using namespace bpe_detail;
  BpeModel model;
  model.vocab_size_target = vocab_size;

  // Collect words with counts, in first-appearance order for determinism.
  std::vector<Word> words;
  {
    std::unordered_map<std::string, std::int64_t> counts;
    std::vector<std::string> order;
    for (const std::string &text : texts)
      for_each_word(text, [&](std::string_view w) {
        auto [it, fresh] = counts.emplace(std::string(w), 0);
        if (fresh)
          order.push_back(it->first);
        ++it->second;
      });
    for (const std::string &w : order) {
      Word word;
      word.count = counts[w];
      for (char ch : w) {
        auto [it, fresh] =
            model.char_id.emplace(ch, static_cast<int>(model.symbol_text.size()));
        if (fresh) {
          model.symbol_text.push_back(std::string(1, ch));
          model.vocab.emplace(model.symbol_text.back(),
                              static_cast<int>(model.symbol_text.size()) - 1);
        }
        word.syms.push_back(it->second);
      }
      words.push_back(std::move(word));
    }
  }

  if (vocab_size < model.vocab.size())
    throw Error(ErrorKind::Validation,
                "vocabulary size " + std::to_string(vocab_size) +
                    " cannot hold the " + std::to_string(model.vocab.size()) +
                    "-symbol base alphabet");

  // Pair statistics. pair_words may hold stale/duplicate indices; the merge
  // pass re-scans each candidate word.
  std::unordered_map<std::uint64_t, std::int64_t> pair_counts;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> pair_words;
  auto count_word_pairs = [&](std::size_t wi, std::int64_t sign) {
    const Word &w = words[wi];
    for (std::size_t i = 0; i + 1 < w.syms.size(); ++i) {
      std::uint64_t key = pack(w.syms[i], w.syms[i + 1]);
      pair_counts[key] += sign * w.count;
      if (sign > 0)
        pair_words[key].push_back(static_cast<std::uint32_t>(wi));
    }
  };
  for (std::size_t wi = 0; wi < words.size(); ++wi)
    count_word_pairs(wi, +1);

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueCompare> queue;
  auto push_pair = [&](std::uint64_t key) {
    auto it = pair_counts.find(key);
    if (it == pair_counts.end() || it->second < 2)
      return;
    int left = static_cast<int>(key >> 32);
    int right = static_cast<int>(key & 0xffffffffu);
    queue.push(QueueEntry{it->second, model.symbol_text[left],
                          model.symbol_text[right], key});
  };
  for (const auto &[key, count] : pair_counts)
    push_pair(key);

  while (model.vocab.size() < vocab_size && !queue.empty()) {
    QueueEntry top = queue.top();
    queue.pop();
    auto live = pair_counts.find(top.key);
    std::int64_t live_count = live == pair_counts.end() ? 0 : live->second;
    if (live_count < 2)
      continue;
    if (live_count != top.count) {
      top.count = live_count;
      queue.push(top);
      continue;
    }

    int left = static_cast<int>(top.key >> 32);
    int right = static_cast<int>(top.key & 0xffffffffu);
    int merged = static_cast<int>(model.symbol_text.size());
    std::string merged_text = model.symbol_text[left] +
                              model.symbol_text[right];
    model.symbol_text.push_back(merged_text);
    model.vocab.emplace(merged_text, merged); // no overwrite on respelling
    model.merge_table[top.key] =
        BpeModel::MergeRule{merged,
                            static_cast<std::uint32_t>(model.merges.size())};
    model.merges.push_back(
        {model.symbol_text[left], model.symbol_text[right]});

    // Rewrite every word containing the pair; update statistics wholesale.
    std::vector<std::uint32_t> affected;
    affected.swap(pair_words[top.key]);
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()),
                   affected.end());
    std::unordered_set<std::uint64_t> touched;
    for (std::uint32_t wi : affected) {
      Word &w = words[wi];
      bool contains = false;
      for (std::size_t i = 0; i + 1 < w.syms.size(); ++i)
        if (w.syms[i] == left && w.syms[i + 1] == right) {
          contains = true;
          break;
        }
      if (!contains)
        continue; // stale index
      for (std::size_t i = 0; i + 1 < w.syms.size(); ++i)
        touched.insert(pack(w.syms[i], w.syms[i + 1]));
      count_word_pairs(wi, -1);
      std::vector<int> out;
      out.reserve(w.syms.size());
      for (std::size_t i = 0; i < w.syms.size();) {
        if (i + 1 < w.syms.size() && w.syms[i] == left &&
            w.syms[i + 1] == right) {
          out.push_back(merged);
          i += 2;
        } else {
          out.push_back(w.syms[i]);
          ++i;
        }
      }
      w.syms = std::move(out);
      count_word_pairs(wi, +1);
      for (std::size_t i = 0; i + 1 < w.syms.size(); ++i)
        touched.insert(pack(w.syms[i], w.syms[i + 1]));
    }
    pair_counts.erase(top.key);
    touched.erase(top.key);
    for (std::uint64_t key : touched)
      push_pair(key);
  }
  return model;
}

/// Tokenizes one whitespace-free word, returning its token count. Characters
/// unseen at training count as single tokens and never participate in merges.
inline std::size_t tokenize_word_count(const BpeModel &model,
                                       std::string_view word) {
  std::vector<int> syms;
  syms.reserve(word.size());
  for (char ch : word) {
    auto it = model.char_id.find(ch);
    syms.push_back(it == model.char_id.end() ? -1 : it->second);
  }
  // Repeatedly apply the lowest-rank applicable merge; equivalent to applying
  // the merge list in order (see header comment).
  while (syms.size() > 1) {
    std::uint32_t best_rank = UINT32_MAX;
    std::size_t best_pos = 0;
    int best_result = -1;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      if (syms[i] < 0 || syms[i + 1] < 0)
        continue;
      auto it = model.merge_table.find(
          bpe_detail::pack(syms[i], syms[i + 1]));
      if (it != model.merge_table.end() && it->second.rank < best_rank) {
        best_rank = it->second.rank;
        best_pos = i;
        best_result = it->second.result;
      }
    }
    if (best_result < 0)
      break;
    // apply this rank left-to-right across the word
    std::uint64_t key = bpe_detail::pack(syms[best_pos], syms[best_pos + 1]);
    std::vector<int> out;
    out.reserve(syms.size());
    int left = static_cast<int>(key >> 32);
    int right = static_cast<int>(key & 0xffffffffu);
    for (std::size_t i = 0; i < syms.size();) {
      if (i + 1 < syms.size() && syms[i] == left && syms[i + 1] == right) {
        out.push_back(best_result);
        i += 2;
      } else {
        out.push_back(syms[i]);
        ++i;
      }
    }
    syms = std::move(out);
  }
  return syms.size();
}

/// Reconstructs a word's token strings (losslessness checks); concatenating
/// them reproduces the word.
inline std::vector<std::string> tokenize_word(const BpeModel &model,
                                              std::string_view word) {
  std::vector<std::string> out;
  // Re-run the count algorithm but keep the symbols.
  std::vector<int> syms;
  for (char ch : word) {
    auto it = model.char_id.find(ch);
    syms.push_back(it == model.char_id.end() ? -1 : it->second);
  }
  std::vector<std::string> unknown; // texts of unseen chars, in order
  for (char ch : word)
    if (model.char_id.find(ch) == model.char_id.end())
      unknown.push_back(std::string(1, ch));
  while (syms.size() > 1) {
    std::uint32_t best_rank = UINT32_MAX;
    int best_result = -1;
    int left = 0, right = 0;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      if (syms[i] < 0 || syms[i + 1] < 0)
        continue;
      auto it = model.merge_table.find(
          bpe_detail::pack(syms[i], syms[i + 1]));
      if (it != model.merge_table.end() && it->second.rank < best_rank) {
        best_rank = it->second.rank;
        best_result = it->second.result;
        left = syms[i];
        right = syms[i + 1];
      }
    }
    if (best_result < 0)
      break;
    std::vector<int> next;
    for (std::size_t i = 0; i < syms.size();) {
      if (i + 1 < syms.size() && syms[i] == left && syms[i + 1] == right) {
        next.push_back(best_result);
        i += 2;
      } else {
        next.push_back(syms[i]);
        ++i;
      }
    }
    syms = std::move(next);
  }
  std::size_t unk = 0;
  for (int id : syms)
    out.push_back(id < 0 ? unknown[unk++]
                         : model.symbol_text[static_cast<std::size_t>(id)]);
  return out;
}

/// Total token count of arbitrary text under a trained model.
inline std::uint64_t tokenize_count(const BpeModel &model,
                                    std::string_view text) {
  std::uint64_t total = 0;
  std::unordered_map<std::string_view, std::size_t> cache;
  bpe_detail::for_each_word(text, [&](std::string_view w) {
    auto it = cache.find(w);
    if (it == cache.end())
      it = cache.emplace(w, tokenize_word_count(model, w)).first;
    total += it->second;
  });
  return total;
}

/// Serializes the ordered merge list, one "left right" pair per line. Tokens
/// never contain whitespace, so the format is unambiguous.
inline std::string serialize_bpe(const BpeModel &model) {
  std::string out;
  for (const BpeModel::Merge &m : model.merges) {
    out += m.left;
    out += ' ';
    out += m.right;
    out += '\n';
  }
  return out;
}

/// Rebuilds a usable model from a serialized merge list. Base symbols are the
/// distinct characters appearing in merge parts; other characters tokenize as
/// unknown singletons.
inline BpeModel deserialize_bpe(std::string_view serialized) {
  BpeModel model;
  auto intern_char = [&](char ch) {
    auto [it, fresh] =
        model.char_id.emplace(ch, static_cast<int>(model.symbol_text.size()));
    if (fresh) {
      model.symbol_text.push_back(std::string(1, ch));
      model.vocab.emplace(model.symbol_text.back(),
                          static_cast<int>(model.symbol_text.size()) - 1);
    }
    return it->second;
  };
  // First pass: the base alphabet, in first-appearance order.
  for (char ch : serialized)
    if (ch != ' ' && ch != '\n')
      intern_char(ch);

  // Second pass: replay merges. Parts longer than one character must resolve
  // to results of earlier merges.
  std::unordered_map<std::string, int> token_id = model.vocab;
  std::size_t pos = 0;
  while (pos < serialized.size()) {
    std::size_t eol = serialized.find('\n', pos);
    if (eol == std::string_view::npos)
      eol = serialized.size();
    std::string_view line = serialized.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty())
      continue;
    std::size_t space = line.find(' ');
    if (space == std::string_view::npos)
      throw Error(ErrorKind::Parse, "malformed merge line: " +
                                        std::string(line));
    std::string left(line.substr(0, space));
    std::string right(line.substr(space + 1));
    auto li = token_id.find(left);
    auto ri = token_id.find(right);
    if (li == token_id.end() || ri == token_id.end())
      throw Error(ErrorKind::Parse,
                  "merge references unknown token: " + std::string(line));
    int merged = static_cast<int>(model.symbol_text.size());
    std::string merged_text = left + right;
    model.symbol_text.push_back(merged_text);
    model.vocab.emplace(merged_text, merged);
    token_id[merged_text] = merged; // later merges see the newest spelling
    model.merge_table[bpe_detail::pack(li->second, ri->second)] =
        BpeModel::MergeRule{merged,
                            static_cast<std::uint32_t>(model.merges.size())};
    model.merges.push_back({left, right});
  }
  return model;
}

} // namespace irforge
