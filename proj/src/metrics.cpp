#include "gecrb/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "gecrb/errors.hpp"

namespace gecrb {

namespace {

struct TierCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
};

struct SentenceCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::map<OpTier, TierCounts> tiers;
};

SpanEdit as_span(const GoldEdit& edit) { return SpanEdit{edit.start, edit.end, edit.replacement}; }

SentenceCounts match_edits(const std::vector<SpanEdit>& system, const GoldEditSet& gold) {
  SentenceCounts counts;
  std::vector<bool> gold_used(gold.size(), false);
  for (const SpanEdit& edit : system) {
    bool matched = false;
    for (std::size_t g = 0; g < gold.size(); ++g) {
      if (gold_used[g]) continue;
      if (as_span(gold[g]) == edit) {
        gold_used[g] = true;
        matched = true;
        break;
      }
    }
    if (matched) {
      ++counts.tp;
      ++counts.tiers[classify_span_tier(edit)].tp;
    } else {
      ++counts.fp;
      ++counts.tiers[classify_span_tier(edit)].fp;
    }
  }
  for (std::size_t g = 0; g < gold.size(); ++g) {
    if (!gold_used[g]) {
      ++counts.fn;
      ++counts.tiers[classify_span_tier(as_span(gold[g]))].fn;
    }
  }
  return counts;
}

// Per sentence: counts of the annotator maximizing sentence-level F_β.
SentenceCounts best_annotator_counts(const TokenSeq& system_output,
                                     const AnnotatedEntry& entry, double beta) {
  const std::vector<SpanEdit> system_edits =
      extract_edit_spans(align(entry.source, system_output));
  SentenceCounts best;
  double best_f = -1.0;
  for (const GoldEditSet& gold : entry.annotator_edit_sets) {
    SentenceCounts counts = match_edits(system_edits, gold);
    const Scores s = Scores::from_counts(counts.tp, counts.fp, counts.fn, beta);
    if (s.f > best_f) {
      best_f = s.f;
      best = std::move(counts);
    }
  }
  return best;
}

// n-gram multiset counts for one order.
std::map<std::vector<std::string>, std::uint64_t> ngram_counts(const TokenSeq& tokens,
                                                               std::size_t n) {
  std::map<std::vector<std::string>, std::uint64_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
  }
  return counts;
}

double single_reference_gleu(const std::vector<TokenSeq>& system,
                             const std::vector<TokenSeq>& sources,
                             const std::vector<TokenSeq>& references, int max_n) {
  double log_sum = 0.0;
  int used_orders = 0;
  for (int n = 1; n <= max_n; ++n) {
    double numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t i = 0; i < system.size(); ++i) {
      const auto h = ngram_counts(system[i], n);
      const auto r = ngram_counts(references[i], n);
      const auto s = ngram_counts(sources[i], n);
      for (const auto& [gram, h_count] : h) {
        denominator += static_cast<double>(h_count);
        const auto rit = r.find(gram);
        const auto sit = s.find(gram);
        const double hr = static_cast<double>(
            rit == r.end() ? 0 : std::min<std::uint64_t>(h_count, rit->second));
        const double hs = static_cast<double>(
            sit == s.end() ? 0 : std::min<std::uint64_t>(h_count, sit->second));
        numerator += hr - std::max(0.0, hs - hr);
      }
    }
    if (denominator == 0.0) continue;  // no n-grams of this order anywhere
    const double p = std::max(0.0, numerator) / denominator;
    if (p == 0.0) return 0.0;
    log_sum += std::log(p);
    ++used_orders;
  }
  if (used_orders == 0) return 0.0;

  double hyp_len = 0.0;
  double ref_len = 0.0;
  for (std::size_t i = 0; i < system.size(); ++i) {
    hyp_len += static_cast<double>(system[i].size());
    ref_len += static_cast<double>(references[i].size());
  }
  double brevity = 1.0;
  if (hyp_len < ref_len && hyp_len > 0.0) brevity = std::exp(1.0 - ref_len / hyp_len);
  if (hyp_len == 0.0) brevity = 0.0;
  return brevity * std::exp(log_sum / used_orders);
}

}  // namespace

Scores Scores::from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, double beta) {
  Scores s;
  s.beta = beta;
  s.tp = tp;
  s.fp = fp;
  s.fn = fn;
  s.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  s.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  s.f = f_beta(s.precision, s.recall, beta);
  return s;
}

double f_beta(double p, double r, double beta) {
  if (beta < 0.0) throw ContractError("f_beta: beta must be non-negative");
  const double b2 = beta * beta;
  const double denominator = b2 * p + r;
  if (denominator == 0.0) return 0.0;
  return (1.0 + b2) * p * r / denominator;
}

Scores score_m2(const std::vector<TokenSeq>& system_outputs, const AnnotatedCorpus& gold,
                double beta) {
  if (system_outputs.size() != gold.entries.size()) {
    throw ContractError("score_m2: system/gold size mismatch");
  }
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  for (std::size_t i = 0; i < gold.entries.size(); ++i) {
    const SentenceCounts counts =
        best_annotator_counts(system_outputs[i], gold.entries[i], beta);
    tp += counts.tp;
    fp += counts.fp;
    fn += counts.fn;
  }
  return Scores::from_counts(tp, fp, fn, beta);
}

std::map<OpTier, Scores> op_tier_prf(const std::vector<TokenSeq>& system_outputs,
                                     const AnnotatedCorpus& gold, double beta) {
  if (system_outputs.size() != gold.entries.size()) {
    throw ContractError("op_tier_prf: system/gold size mismatch");
  }
  std::map<OpTier, TierCounts> totals;
  for (OpTier tier : {OpTier::Missing, OpTier::Replacement, OpTier::Unnecessary}) {
    totals[tier] = TierCounts{};
  }
  for (std::size_t i = 0; i < gold.entries.size(); ++i) {
    const SentenceCounts counts =
        best_annotator_counts(system_outputs[i], gold.entries[i], beta);
    for (const auto& [tier, tc] : counts.tiers) {
      totals[tier].tp += tc.tp;
      totals[tier].fp += tc.fp;
      totals[tier].fn += tc.fn;
    }
  }
  std::map<OpTier, Scores> out;
  for (const auto& [tier, tc] : totals) {
    out[tier] = Scores::from_counts(tc.tp, tc.fp, tc.fn, beta);
  }
  return out;
}

double gleu(const std::vector<TokenSeq>& system, const std::vector<TokenSeq>& sources,
            const std::vector<std::vector<TokenSeq>>& reference_sets, int max_n) {
  if (system.empty()) throw ContractError("gleu: empty corpus");
  if (sources.size() != system.size()) throw ContractError("gleu: source size mismatch");
  if (reference_sets.empty()) throw ContractError("gleu: need at least one reference set");
  for (const auto& refs : reference_sets) {
    if (refs.size() != system.size()) throw ContractError("gleu: reference size mismatch");
  }
  if (max_n < 1) throw ContractError("gleu: max_n must be positive");

  // Deterministic average over reference sets (instead of the sampling
  // variant); identical to the plain corpus GLEU for a single set.
  double sum = 0.0;
  for (const auto& refs : reference_sets) {
    sum += single_reference_gleu(system, sources, refs, max_n);
  }
  return sum / static_cast<double>(reference_sets.size());
}

RecoveryResult recovery_rate(const AttackCorpus& attack,
                             const std::map<std::uint64_t, TokenSeq>& system_outputs,
                             const std::map<std::uint64_t, TokenSeq>& gold_targets) {
  RecoveryResult result;
  for (const AttackedSentence& entry : attack.entries) {
    const auto sys_it = system_outputs.find(entry.id);
    const auto gold_it = gold_targets.find(entry.id);
    if (sys_it == system_outputs.end() || gold_it == gold_targets.end()) {
      throw ContractError("recovery_rate: id " + std::to_string(entry.id) +
                          " missing from system or gold inputs");
    }
    const TokenSeq& gold = gold_it->second;
    const TokenSeq& system = sys_it->second;
    const EditSequence source_to_gold = align(entry.source, gold);
    const EditSequence gold_to_system = align(gold, system);

    bool all_recovered = true;
    for (std::size_t s_pos : entry.positions) {
      if (s_pos >= entry.source.size()) {
        throw ContractError("recovery_rate: position out of range");
      }
      ++result.total_tokens;
      bool recovered = false;
      if (const auto pos1 = map_position(source_to_gold, s_pos)) {
        if (const auto pos2 = map_position(gold_to_system, *pos1)) {
          recovered = gold[*pos1] == system[*pos2];
        }
      }
      if (recovered) {
        ++result.recovered_tokens;
      } else {
        all_recovered = false;
      }
    }
    if (all_recovered) {
      ++result.recovered_sentences;
    } else {
      ++result.unrecovered_sentences;
    }
  }
  const std::uint64_t sentences = result.recovered_sentences + result.unrecovered_sentences;
  result.sr = sentences == 0 ? 1.0
                             : static_cast<double>(result.recovered_sentences) /
                                   static_cast<double>(sentences);
  result.tr = result.total_tokens == 0
                  ? 1.0
                  : static_cast<double>(result.recovered_tokens) /
                        static_cast<double>(result.total_tokens);
  return result;
}

double ips(std::uint64_t n_sentences, double score_t, double score_i, double gamma) {
  if (gamma <= 0.0) throw ContractError("ips: gamma must be positive");
  if (score_t == score_i) {
    throw ContractError("ips: undefined for equal scores");
  }
  return static_cast<double>(n_sentences) / ((score_t - score_i) / gamma);
}

AnnotatedCorpus annotated_from_pairs(const std::vector<SentencePair>& pairs) {
  AnnotatedCorpus corpus;
  for (const SentencePair& pair : pairs) {
    AnnotatedEntry entry;
    entry.source = pair.source;
    GoldEditSet edits;
    for (const SpanEdit& span : extract_edit_spans(align(pair.source, pair.target))) {
      GoldEdit edit;
      edit.start = span.start;
      edit.end = span.end;
      edit.replacement = span.replacement;
      edit.type_label = to_string(classify_span_tier(span));
      edits.push_back(std::move(edit));
    }
    entry.annotator_edit_sets.push_back(std::move(edits));
    corpus.entries.push_back(std::move(entry));
  }
  return corpus;
}

}  // namespace gecrb
