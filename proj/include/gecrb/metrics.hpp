#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "gecrb/align.hpp"
#include "gecrb/corpus.hpp"

namespace gecrb {

// P/R/F with the official 0/0 conventions: precision is 1 when there are no
// system edits, recall is 1 when there are no gold edits, and F is 0 when
// both P and R are 0.
struct Scores {
  double precision = 1.0;
  double recall = 1.0;
  double f = 0.0;
  double beta = 0.5;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  static Scores from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn,
                            double beta = 0.5);

  bool operator==(const Scores&) const = default;
};

// (1+β²)PR/(β²P+R); 0 when the denominator is 0. Scale-covariant, so percent
// and fraction inputs both work. β < 0 is a contract error.
double f_beta(double p, double r, double beta);

// Simplified M²-style scorer: system edits are the merged non-Keep spans of
// align(source, system output); matching against gold edits is exact on
// (span, replacement); per sentence the annotator maximizing sentence-level
// F_β is selected (ties: lower annotator id) and its counts accumulate.
Scores score_m2(const std::vector<TokenSeq>& system_outputs, const AnnotatedCorpus& gold,
                double beta = 0.5);

// Same matching with counts bucketed by span tier.
std::map<OpTier, Scores> op_tier_prf(const std::vector<TokenSeq>& system_outputs,
                                     const AnnotatedCorpus& gold, double beta = 0.5);

// Corpus-level GLEU with source-overlap penalty. reference_sets holds one
// corpus-length reference list per set; with several sets the per-set corpus
// GLEU values are averaged deterministically.
double gleu(const std::vector<TokenSeq>& system, const std::vector<TokenSeq>& sources,
            const std::vector<std::vector<TokenSeq>>& reference_sets, int max_n = 4);

struct RecoveryResult {
  double tr = 1.0;  // token-level recovery
  double sr = 1.0;  // sentence-level recovery
  std::uint64_t recovered_sentences = 0;
  std::uint64_t unrecovered_sentences = 0;
  std::uint64_t recovered_tokens = 0;
  std::uint64_t total_tokens = 0;
};

// Recovery Rate over an attack corpus: per attacked position s_pos,
//   pos1 = map_position(align(source, gold), s_pos)
//   pos2 = map_position(align(gold, system), pos1)
// and the position is recovered iff both exist and gold[pos1] == system[pos2].
// A sentence is recovered iff all its positions are; zero-position sentences
// count as recovered and contribute no tokens. Inputs are keyed by entry id;
// a missing id is a contract error.
RecoveryResult recovery_rate(const AttackCorpus& attack,
                             const std::map<std::uint64_t, TokenSeq>& system_outputs,
                             const std::map<std::uint64_t, TokenSeq>& gold_targets);

// #IPS = n_sentences / ((score_t - score_i) / gamma); negative when the score
// degraded. Equal scores are a domain error.
double ips(std::uint64_t n_sentences, double score_t, double score_i, double gamma = 0.1);

// Single-annotator gold derived from parallel pairs by alignment; the
// per-pair edits are the merged non-Keep spans.
AnnotatedCorpus annotated_from_pairs(const std::vector<SentencePair>& pairs);

}  // namespace gecrb
