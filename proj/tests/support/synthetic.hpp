#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gecrb/corpus.hpp"

namespace gecrb::testsupport {

struct SyntheticGecData {
  std::vector<SentencePair> train;  // ids 100..499
  std::vector<SentencePair> dev;    // ids 0..99, held out
  std::vector<SentencePair> tune;   // the first 50 train pairs
  std::vector<std::pair<std::string, std::string>> patterns;  // poor -> good
};

// Deterministic synthetic GEC corpus: 500 pairs over 50 single-token error
// patterns plus a sprinkle of pure-insertion pairs (which a piece-table
// corrector can never learn, so cycle training has persistent hard pairs).
// The tune subset only exercises the first 30 patterns; a model trained on
// it alone has real headroom on the rest.
SyntheticGecData make_synthetic_gec_corpus(std::uint64_t seed);

// Evaluation pairs shaped like the dev split: one corrupted pattern slot,
// two intact pattern words and filler elsewhere, so every sentence has
// mapping hits and at least three perturbable positions.
std::vector<SentencePair> make_attack_eval_pairs(std::size_t count, std::uint64_t seed);

// Synonym/antonym lexicon covering the synthetic vocabulary.
std::string make_synthetic_lexicon_tsv();

std::string pairs_to_tsv(const std::vector<SentencePair>& pairs);

}  // namespace gecrb::testsupport
