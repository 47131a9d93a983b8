#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gecrb/confusion.hpp"
#include "gecrb/corpus.hpp"
#include "gecrb/corrector.hpp"
#include "gecrb/rng.hpp"

namespace gecrb {

struct AttackConfig {
  double zeta = 0.1;             // ζ: normalized-edit-distance budget per sentence
  int max_consecutive_over = 3;  // stop after this many consecutive over-ζ steps
  double delta_min_similarity = 0.9;  // documented similarity floor, = 1 - ζ; enforced via ζ
  int beam = 5;
  double beta_random = 6.0;  // back-translation noise scale
  AttackMethod method = AttackMethod::MappingRules;

  void validate() const;  // ConfigError on violated invariants
};

// Vulnerable-spot detection output. candidate_positions index the source
// sentence; per_token_probs are the probabilities the threshold was averaged
// over (top-hypothesis tokens for Seq2Seq, input tokens for Seq2Edits).
struct VulnerabilityReport {
  double threshold = 0.0;
  std::vector<std::size_t> candidate_positions;
  std::vector<double> per_token_probs;
};

// Decode x with beam search, average the top hypothesis's token
// probabilities into the threshold, select target tokens strictly below it,
// and map them back to source positions through the alignment (deleted
// tokens drop out).
VulnerabilityReport detect_vulnerable_seq2seq(const Corrector& model, const TokenSeq& x,
                                              const AttackConfig& cfg);

// Tag probabilities correspond one-to-one with input tokens, so no alignment
// is needed.
VulnerabilityReport detect_vulnerable_seq2edit(const Tagger& tagger, const TokenSeq& x);

// Word relation lexicon, TSV lines "word<TAB>synonym|antonym<TAB>c1,c2,...".
enum class LexiconRelation { Synonym, Antonym };

class Lexicon {
 public:
  static Lexicon parse(const std::string& text);
  static Lexicon load_file(const std::string& path);  // ConfigError if unreadable

  const std::vector<std::string>& candidates(const std::string& word,
                                             LexiconRelation relation) const;
  bool empty() const { return entries_.empty(); }

 private:
  std::map<std::string, std::array<std::vector<std::string>, 2>> entries_;
};

// Step-by-step substitution at vulnerable positions. Each step proposes one
// replacement per remaining candidate (mapping lookup over pieces of length
// 3,2,1 anchored at the candidate, else fallback rules), samples the applied
// candidate with weighted-random keys U^(1/c) where c is the clamped
// prospective edit distance, and stops after max_consecutive_over
// consecutive steps whose post-step distance exceeds ζ.
AttackedSentence perturb_mapping_rules(const TokenSeq& x, const VulnerabilityReport& report,
                                       const ConfusionMapping& mapping,
                                       const AttackConfig& cfg, RngStream& rng);

// Identical control flow with proposals drawn from the lexicon relation
// lists; no rule fallback.
AttackedSentence perturb_lexicon(const TokenSeq& x, const VulnerabilityReport& report,
                                 const Lexicon& lexicon, LexiconRelation relation,
                                 const AttackConfig& cfg, RngStream& rng);

// Corrupts clean text with the reverse generator under noised beam search;
// positions come from aligning the attacked text against the input.
AttackedSentence attack_backtranslation(const Corrector& generator, const TokenSeq& clean,
                                        const AttackConfig& cfg, RngStream& rng);

// Fixed-count ATK_n construction: per sentence rank target tokens by
// generation probability ascending (ties by lower index), substitute at the
// mapped source positions until exactly n positions are perturbed (sentences
// shorter than two tokens are skipped; positions that yield no usable
// proposal fall through to the next-ranked one).
AttackCorpus build_fixed_attack_set(const std::vector<TokenSeq>& corpus,
                                    const Corrector& model, const ConfusionMapping& mapping,
                                    int n, const AttackConfig& cfg,
                                    std::uint64_t global_seed);

// Replays a steps trace against the ζ stop rule: at most max_consecutive_over
// consecutive steps may end over ζ, and only when the last of them ends the
// trace.
bool audit_stop_rule(const AttackedSentence& entry, double zeta, int max_consecutive_over);

// Resources for generate_attack_corpus; only the fields the chosen method
// needs have to be set.
struct AttackResources {
  const Corrector* model = nullptr;  // Seq2Seq detection, or the BT generator
  const Tagger* tagger = nullptr;    // when set, Seq2Edits detection is used
  const ConfusionMapping* mapping = nullptr;
  const Lexicon* lexicon = nullptr;
};

// Drives one attack method over a corpus. Per-sentence rng streams are keyed
// by sentence index, so the output is byte-identical for a given
// (inputs, config, seed) regardless of the number of jobs.
AttackCorpus generate_attack_corpus(const std::vector<TokenSeq>& sentences,
                                    const AttackResources& resources,
                                    const AttackConfig& cfg, std::uint64_t global_seed,
                                    int jobs = 1);

}  // namespace gecrb
