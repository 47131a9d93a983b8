#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gecrb/corpus.hpp"

namespace gecrb {

struct ConfusionCandidate {
  TokenSeq poor;
  std::uint64_t count = 0;

  bool operator==(const ConfusionCandidate&) const = default;
};

// Good -> Poor associative store of inconsistent aligned pieces harvested
// from annotated corpora. Keys are nonempty; no entry maps a piece to itself.
class ConfusionMapping {
 public:
  void add(const TokenSeq& good, const TokenSeq& poor, std::uint64_t count = 1);

  // Exact-key lookup, sorted (count desc, lexicographic); empty when absent.
  std::vector<ConfusionCandidate> candidates(const TokenSeq& good) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const std::map<TokenSeq, std::map<TokenSeq, std::uint64_t>>& entries() const {
    return entries_;
  }

  // JSON persistence {version, entries:[{good, cands:[{poor, count}]}]},
  // canonical ordering.
  std::string serialize() const;
  static ConfusionMapping deserialize(const std::string& text);

  bool operator==(const ConfusionMapping&) const = default;

 private:
  std::map<TokenSeq, std::map<TokenSeq, std::uint64_t>> entries_;
};

// Aligns good -> poor for every pair and harvests each maximal contiguous
// non-Keep span as a (good piece -> poor piece) entry. Spans longer than
// three tokens on either side are skipped; spans are never split inside a
// non-Keep run.
ConfusionMapping build_mapping(const std::vector<SentencePair>& pairs);

// Rule-based fallback corruptions for a single token. The first applicable
// rule class supplies the candidates:
//   article rotation {a, an, the};
//   preposition confusion {of, for, about, to, in, on, at, with, by, from};
//   verb-suffix toggles strip/add {-s, -ed, -ing} (ASCII heuristics);
//   case flip of the first character;
//   token deletion and duplication.
// Tokens without any ASCII alphanumeric character (punctuation) get none.
// Candidates are replacement pieces: deletion is the empty piece.
std::vector<TokenSeq> fallback_rules(const std::string& token);

}  // namespace gecrb
