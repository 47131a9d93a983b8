#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "gecrb/corpus.hpp"

namespace gecrb::testsupport {

// Exponential reference edit distance: plain recursion over all edit
// scripts, no DP table. Only usable for short sequences.
inline std::size_t brute_edit_distance_rec(const TokenSeq& a, const TokenSeq& b,
                                           std::size_t i, std::size_t j) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  std::size_t best = brute_edit_distance_rec(a, b, i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
  best = std::min(best, brute_edit_distance_rec(a, b, i + 1, j) + 1);
  best = std::min(best, brute_edit_distance_rec(a, b, i, j + 1) + 1);
  return best;
}

inline std::size_t brute_force_edit_distance(const TokenSeq& a, const TokenSeq& b) {
  return brute_edit_distance_rec(a, b, 0, 0);
}

inline std::map<TokenSeq, std::size_t> oracle_ngrams(const TokenSeq& tokens, std::size_t n) {
  std::map<TokenSeq, std::size_t> counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[TokenSeq(tokens.begin() + i, tokens.begin() + i + n)];
  }
  return counts;
}

// Corpus n-gram score without the source-overlap penalty: plain clipped
// precision with the brevity penalty. Used to verify that the GLEU source
// term strictly penalizes unchanged hypotheses.
inline double penalty_free_gleu(const std::vector<TokenSeq>& system,
                                const std::vector<TokenSeq>& references, int max_n) {
  double log_sum = 0.0;
  int used = 0;
  for (int n = 1; n <= max_n; ++n) {
    double matches = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < system.size(); ++i) {
      const auto h = oracle_ngrams(system[i], n);
      const auto r = oracle_ngrams(references[i], n);
      for (const auto& [gram, count] : h) {
        total += static_cast<double>(count);
        const auto it = r.find(gram);
        if (it != r.end()) matches += static_cast<double>(std::min(count, it->second));
      }
    }
    if (total == 0.0) continue;
    const double p = matches / total;
    if (p == 0.0) return 0.0;
    log_sum += std::log(p);
    ++used;
  }
  if (used == 0) return 0.0;
  double hyp_len = 0.0;
  double ref_len = 0.0;
  for (std::size_t i = 0; i < system.size(); ++i) {
    hyp_len += static_cast<double>(system[i].size());
    ref_len += static_cast<double>(references[i].size());
  }
  const double brevity =
      hyp_len < ref_len && hyp_len > 0.0 ? std::exp(1.0 - ref_len / hyp_len) : 1.0;
  return brevity * std::exp(log_sum / used);
}

}  // namespace gecrb::testsupport
