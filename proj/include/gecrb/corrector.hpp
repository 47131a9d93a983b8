#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gecrb/corpus.hpp"
#include "gecrb/rng.hpp"

namespace gecrb {

// A decoded sentence with per-token generation probabilities.
// score == Σ log(token_probs).
struct Hypothesis {
  TokenSeq tokens;
  std::vector<double> token_probs;
  double score = 0.0;

  bool operator==(const Hypothesis&) const = default;
};

// One alternative continuation at a decode site. Every emitted token of the
// choice carries `prob`.
struct DecodeChoice {
  TokenSeq tokens;
  double prob = 1.0;
};

// A branch point in a left-to-right decode: forced tokens emitted since the
// previous site, then a best-first candidate list.
struct DecodeSite {
  TokenSeq prefix_tokens;
  std::vector<double> prefix_probs;
  std::vector<DecodeChoice> choices;  // nonempty, best-first
};

struct DecodePlan {
  std::vector<DecodeSite> sites;
  TokenSeq tail_tokens;  // forced tokens after the last site
  std::vector<double> tail_probs;
};

// The pluggable GEC-system contract. A corrector exposes its decode as a
// deterministic plan of branch sites; beam search, 1-best correction and the
// noised decoder are all derived from the plan, which keeps
// beam(x,1)[0] == correct(x) and seeded decoding consistent by construction.
// Identical inputs always yield identical outputs.
class Corrector {
 public:
  virtual ~Corrector() = default;

  // `beam_hint` bounds how many choices per site the caller can consume.
  virtual DecodePlan decode_plan(const TokenSeq& x, int beam_hint) const = 0;

  // k best hypotheses; list is sorted by score descending, ties in candidate
  // order. beam(x, 1) == [correct(x)].
  virtual std::vector<Hypothesis> beam(const TokenSeq& x, int k) const;

  virtual Hypothesis correct(const TokenSeq& x) const;
};

// Standard beam search over the generator's decode plan, except that at every
// site expansion each candidate hypothesis's running score is additionally
// penalized by r·beta_random with a fresh r ~ U[0,1) per hypothesis per step.
// The top hypothesis under the penalized ranking is returned (its score field
// still equals Σ log token_probs). beta_random == 0 reduces to beam(x,k)[0].
Hypothesis noised_beam_search(const Corrector& gen, const TokenSeq& x, int beam_width,
                              double beta_random, RngStream& rng);

// Count-table corrector: a deterministic desk-scale stand-in for a neural
// Seq2Seq model. Maps poor pieces (up to max_piece_len tokens) to good
// pieces harvested from aligned training pairs.
class TableCorrector : public Corrector {
 public:
  explicit TableCorrector(int max_piece_len = 3);

  // Harvests one pass over the pairs: maximal non-Keep alignment spans feed
  // the edit table; Keep and Substitute/Delete ops feed the per-token
  // keep/edit counters. Spans with an empty side or a poor side longer than
  // max_piece_len are skipped (the scanner could never match them).
  void absorb(const std::vector<SentencePair>& pairs);

  DecodePlan decode_plan(const TokenSeq& x, int beam_hint) const override;

  int max_piece_len() const { return max_piece_len_; }
  bool has_piece(const TokenSeq& poor) const { return edit_table_.count(poor) > 0; }

  // Candidates for a poor piece, sorted (count desc, lexicographic).
  std::vector<std::pair<TokenSeq, std::uint64_t>> piece_candidates(const TokenSeq& poor) const;

  // Probability of keeping token t: (keep+1)/(keep+edit+2); 0.5 when unseen.
  double keep_prob(const std::string& token) const;

  // JSON persistence {version, edit_table, keep_counts, edit_counts,
  // max_piece_len}; round-trip exact.
  std::string serialize() const;
  static TableCorrector deserialize(const std::string& text);

  bool operator==(const TableCorrector& other) const {
    return max_piece_len_ == other.max_piece_len_ && edit_table_ == other.edit_table_ &&
           keep_counts_ == other.keep_counts_ && edit_counts_ == other.edit_counts_;
  }

 private:
  int max_piece_len_;
  std::map<TokenSeq, std::map<TokenSeq, std::uint64_t>> edit_table_;
  std::map<std::string, std::uint64_t> keep_counts_;
  std::map<std::string, std::uint64_t> edit_counts_;
};

// Trains a fresh corrector; empty training set is a contract error.
TableCorrector train_table_corrector(const std::vector<SentencePair>& pairs,
                                     int max_piece_len = 3);

// Same harvesting with source/target swapped: learns Good -> Poor, the
// back-translation error generator.
TableCorrector train_error_generator(const std::vector<SentencePair>& pairs,
                                     int max_piece_len = 3);

// Per-token edit tag of the Seq2Edits view. APPEND carries the tokens
// inserted after the tagged token.
struct EditTag {
  enum class Kind { Keep, Delete, Substitute, Append };
  Kind kind = Kind::Keep;
  TokenSeq payload;

  bool operator==(const EditTag&) const = default;
};

std::string to_string(const EditTag& tag);
EditTag edit_tag_from_string(const std::string& text);

struct TagPrediction {
  EditTag tag;
  double prob = 1.0;
};

// Seq2Edits contract: exactly one tag per input token.
class Tagger {
 public:
  virtual ~Tagger() = default;
  virtual std::vector<TagPrediction> tag(const TokenSeq& x) const = 0;
};

// Frequency-table tagger trained from alignments.
class TableTagger : public Tagger {
 public:
  void observe(const std::string& token, const EditTag& tag);
  std::vector<TagPrediction> tag(const TokenSeq& x) const override;

  std::string serialize() const;
  static TableTagger deserialize(const std::string& text);

  bool operator==(const TableTagger& other) const { return table_ == other.table_; }

 private:
  // token -> serialized tag -> count; lexicographic keys give the
  // deterministic argmax tie-break.
  std::map<std::string, std::map<std::string, std::uint64_t>> table_;
};

TableTagger train_tagger(const std::vector<SentencePair>& pairs);

}  // namespace gecrb
