#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gecrb/errors.hpp"

namespace gecrb {

// Tokens never contain whitespace and are never empty; token comparison is
// exact, case-sensitive string equality everywhere in the toolkit.
using TokenSeq = std::vector<std::string>;

// Splits on runs of whitespace. Empty input gives an empty sequence.
TokenSeq tokenize(const std::string& raw);

// Single-space join; tokenize(join(t)) == t.
std::string join(const TokenSeq& tokens);

// An (ungrammatical, grammatical) training/evaluation pair. Ids are stable
// across processing stages; cycle-training set algebra keys on them.
struct SentencePair {
  std::uint64_t id = 0;
  TokenSeq source;
  TokenSeq target;

  bool operator==(const SentencePair&) const = default;
};

// One human-annotated edit: replace source tokens [start, end) with
// `replacement`. start == end encodes a pure insertion before `start`.
struct GoldEdit {
  std::size_t start = 0;
  std::size_t end = 0;
  TokenSeq replacement;
  std::string type_label;

  bool operator==(const GoldEdit&) const = default;
};

using GoldEditSet = std::vector<GoldEdit>;  // non-overlapping, sorted by start

struct AnnotatedEntry {
  TokenSeq source;
  std::vector<GoldEditSet> annotator_edit_sets;  // ordered by annotator id

  bool operator==(const AnnotatedEntry&) const = default;
};

struct AnnotatedCorpus {
  std::vector<AnnotatedEntry> entries;

  bool operator==(const AnnotatedCorpus&) const = default;
};

// M2 format: blank-line separated blocks of
//   S <tokens...>
//   A <start> <end>|||<type>|||<replacement>|||REQUIRED|||-NONE-|||<annotator>
// "-NONE-" as replacement means deletion; type "noop" with start=end=-1 means
// the annotator asserts no edits. Malformed lines and overlapping spans raise
// ParseError with the offending line number.
AnnotatedCorpus parse_m2(const std::string& text);

// Canonical re-emission; parse_m2(emit_m2(c)) == c for any parsed corpus.
std::string emit_m2(const AnnotatedCorpus& corpus);

// UTF-8 lines "source<TAB>target". Ids are the 0-based file line index.
std::vector<SentencePair> parse_parallel_tsv(const std::string& text);

enum class AttackMethod { MappingRules, Synonym, Antonym, BackTranslation };

std::string to_string(AttackMethod method);
AttackMethod attack_method_from_string(const std::string& tag);

// One applied perturbation: source tokens [span_start, span_end) were
// replaced by `replacement`. sim_after is the normalized edit distance
// between the original source and the sentence after this step; the ζ stop
// rule is audited against this trail.
struct PerturbStep {
  std::size_t span_start = 0;
  std::size_t span_end = 0;
  TokenSeq replacement;
  bool from_mapping = false;
  double sim_after = 0.0;

  bool operator==(const PerturbStep&) const = default;
};

struct AttackedSentence {
  std::uint64_t id = 0;
  TokenSeq source;   // original poor test input
  TokenSeq attacked;
  std::vector<std::size_t> positions;  // strictly increasing, < |source|
  std::vector<PerturbStep> steps;

  bool operator==(const AttackedSentence&) const = default;
};

struct AttackCorpus {
  int version = 1;
  AttackMethod method = AttackMethod::MappingRules;
  std::uint64_t global_seed = 0;
  double zeta = 0.1;
  std::vector<AttackedSentence> entries;

  bool operator==(const AttackCorpus&) const = default;
};

// JSON document {version, method, global_seed, zeta, entries:[{id,
// source_tokens, attacked_tokens, positions, steps}]} with canonical key
// order; output is byte-stable for golden tests.
std::string serialize_attack_corpus(const AttackCorpus& corpus);

// Rejects unknown method tags and schema versions.
AttackCorpus deserialize_attack_corpus(const std::string& text);

}  // namespace gecrb
