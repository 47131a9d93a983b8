#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gecrb/corpus.hpp"
#include "gecrb/corrector.hpp"
#include "gecrb/metrics.hpp"
#include "gecrb/rng.hpp"

namespace gecrb {

enum class AugmentVariant { SelfPairs, HardPairs };

std::string to_string(AugmentVariant variant);
AugmentVariant augment_variant_from_string(const std::string& tag);

// One cycle's harvested training set. SelfPairs carries (y', y) with the
// model output as input; HardPairs carries the original (x, y).
struct AugmentingSet {
  int cycle_index = 0;
  AugmentVariant variant = AugmentVariant::SelfPairs;
  std::vector<SentencePair> pairs;  // sorted by id, ids unique

  bool operator==(const AugmentingSet&) const = default;
};

// Id-keyed intersection of consecutive augmenting sets; payloads come from
// the most recent cycle.
struct RegularizationSet {
  int cycle_index = 0;
  std::vector<SentencePair> pairs;  // sorted by id
  std::vector<int> provenance;      // contributing cycle indices

  bool operator==(const RegularizationSet&) const = default;
};

struct CsaConfig {
  int patience = 2;    // P: Stage I length and the early-stop window
  int max_cycles = 5;  // ε
  AugmentVariant variant = AugmentVariant::SelfPairs;
  double reserving_rate = 1.0;  // fraction of regularization data kept in Stage II
  double convergence_tol = 1e-4;  // dev F0.5 improvement below this is "no improvement"
  std::uint64_t seed = 0;

  void validate() const;  // ConfigError unless 1 <= patience <= max_cycles (or max_cycles == 0)
};

struct CycleState {
  int k = 0;
  int stage = 1;  // 1: train on D_Aug, 2: train on D_Reg
  std::size_t aug_size = 0;
  std::size_t reg_size = 0;
  Scores dev;
  std::string snapshot_ref;
};

// Runs the model over the training set and keeps every pair whose output
// disagrees with the gold target token-for-token.
AugmentingSet self_augment(const Corrector& model, const std::vector<SentencePair>& train,
                           AugmentVariant variant, int cycle_index);

// history must hold p >= 1 sets with consecutive cycle indices.
RegularizationSet regularization_set(const std::vector<AugmentingSet>& history);

// X_unl: pairs present in every regularization set with an identical payload
// (the model kept producing the same output). X_unc: the id-union minus
// X_unl, payload from the latest occurrence.
struct Decomposition {
  std::vector<SentencePair> x_unl;
  std::vector<SentencePair> x_unc;
};

Decomposition decompose(const std::vector<RegularizationSet>& reg_history);

// Uniform sample without replacement of round(rate * |pairs|) pairs,
// seed-deterministic and independent of input order.
RegularizationSet subsample_reg(const RegularizationSet& reg, double reserving_rate,
                                RngStream& rng);

using SnapshotSink = std::function<std::string(int cycle, const TableCorrector&)>;

struct CsaResult {
  TableCorrector model;  // best snapshot by dev F0.5
  std::vector<CycleState> history;
  std::vector<AugmentingSet> aug_sets;  // one per completed cycle
  Scores initial_dev;
};

// Two-stage cycle training. Per cycle: rebuild D_Aug; Stage I (k <= P)
// trains on it, Stage II (k > P) trains on the reserving-rate subsample of
// D_Reg over the last P augmenting sets; both stages then tune on d_tune and
// evaluate dev F0.5. Stops early after P consecutive cycles without
// improvement beyond convergence_tol, or when D_Aug comes up empty.
CsaResult run_csa(const TableCorrector& model, const std::vector<SentencePair>& train,
                  const std::vector<SentencePair>& d_tune,
                  const std::vector<TokenSeq>& dev_inputs, const AnnotatedCorpus& dev_gold,
                  const CsaConfig& cfg, const SnapshotSink& snapshot_sink = {});

}  // namespace gecrb
