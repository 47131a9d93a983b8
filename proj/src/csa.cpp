#include "gecrb/csa.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "gecrb/errors.hpp"

namespace gecrb {

namespace {

std::vector<TokenSeq> infer_all(const TableCorrector& model,
                                const std::vector<TokenSeq>& inputs) {
  std::vector<TokenSeq> out;
  out.reserve(inputs.size());
  for (const TokenSeq& x : inputs) out.push_back(model.correct(x).tokens);
  return out;
}

}  // namespace

std::string to_string(AugmentVariant variant) {
  return variant == AugmentVariant::SelfPairs ? "self" : "hard";
}

AugmentVariant augment_variant_from_string(const std::string& tag) {
  if (tag == "self") return AugmentVariant::SelfPairs;
  if (tag == "hard") return AugmentVariant::HardPairs;
  throw ParseError("unknown augment variant: " + tag);
}

void CsaConfig::validate() const {
  if (max_cycles < 0) throw ConfigError("max_cycles must be >= 0");
  if (max_cycles > 0 && (patience < 1 || patience > max_cycles)) {
    throw ConfigError("patience must satisfy 1 <= patience <= max_cycles");
  }
  if (reserving_rate < 0.0 || reserving_rate > 1.0) {
    throw ConfigError("reserving_rate must be in [0, 1]");
  }
  if (convergence_tol < 0.0) throw ConfigError("convergence_tol must be >= 0");
}

AugmentingSet self_augment(const Corrector& model, const std::vector<SentencePair>& train,
                           AugmentVariant variant, int cycle_index) {
  AugmentingSet set;
  set.cycle_index = cycle_index;
  set.variant = variant;
  for (const SentencePair& pair : train) {
    const TokenSeq output = model.correct(pair.source).tokens;
    if (output == pair.target) continue;
    SentencePair harvested;
    harvested.id = pair.id;
    harvested.source = variant == AugmentVariant::SelfPairs ? output : pair.source;
    harvested.target = pair.target;
    set.pairs.push_back(std::move(harvested));
  }
  std::sort(set.pairs.begin(), set.pairs.end(),
            [](const SentencePair& a, const SentencePair& b) { return a.id < b.id; });
  return set;
}

RegularizationSet regularization_set(const std::vector<AugmentingSet>& history) {
  if (history.empty()) throw ContractError("regularization_set: empty history");
  for (std::size_t i = 1; i < history.size(); ++i) {
    if (history[i].cycle_index != history[i - 1].cycle_index + 1) {
      throw ContractError("regularization_set: cycle indices must be consecutive");
    }
  }
  std::set<std::uint64_t> ids;
  for (const SentencePair& pair : history.front().pairs) ids.insert(pair.id);
  for (std::size_t i = 1; i < history.size(); ++i) {
    std::set<std::uint64_t> next;
    for (const SentencePair& pair : history[i].pairs) {
      if (ids.count(pair.id) > 0) next.insert(pair.id);
    }
    ids = std::move(next);
  }

  RegularizationSet reg;
  reg.cycle_index = history.back().cycle_index;
  for (const AugmentingSet& set : history) reg.provenance.push_back(set.cycle_index);
  for (const SentencePair& pair : history.back().pairs) {
    if (ids.count(pair.id) > 0) reg.pairs.push_back(pair);
  }
  return reg;
}

Decomposition decompose(const std::vector<RegularizationSet>& reg_history) {
  Decomposition result;
  if (reg_history.empty()) return result;

  // X_unl: same id and same full payload in every cycle's set.
  std::map<std::uint64_t, SentencePair> unl;
  for (const SentencePair& pair : reg_history.front().pairs) unl[pair.id] = pair;
  for (std::size_t i = 1; i < reg_history.size(); ++i) {
    std::map<std::uint64_t, SentencePair> next;
    for (const SentencePair& pair : reg_history[i].pairs) {
      const auto it = unl.find(pair.id);
      if (it != unl.end() && it->second == pair) next[pair.id] = pair;
    }
    unl = std::move(next);
  }

  // Union by id, payload from the latest occurrence.
  std::map<std::uint64_t, SentencePair> all;
  for (const RegularizationSet& reg : reg_history) {
    for (const SentencePair& pair : reg.pairs) all[pair.id] = pair;
  }

  for (const auto& [id, pair] : all) {
    if (unl.count(id) > 0) {
      result.x_unl.push_back(unl.at(id));
    } else {
      result.x_unc.push_back(pair);
    }
  }
  return result;
}

RegularizationSet subsample_reg(const RegularizationSet& reg, double reserving_rate,
                                RngStream& rng) {
  if (reserving_rate < 0.0 || reserving_rate > 1.0) {
    throw ContractError("subsample_reg: rate must be in [0, 1]");
  }
  RegularizationSet out;
  out.cycle_index = reg.cycle_index;
  out.provenance = reg.provenance;

  std::vector<SentencePair> pool = reg.pairs;
  std::sort(pool.begin(), pool.end(),
            [](const SentencePair& a, const SentencePair& b) { return a.id < b.id; });
  const std::size_t keep = static_cast<std::size_t>(
      std::llround(reserving_rate * static_cast<double>(pool.size())));
  // Partial Fisher-Yates over the id-sorted pool.
  for (std::size_t i = 0; i < keep && i + 1 < pool.size(); ++i) {
    const std::size_t j = i + rng.next_index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(keep);
  std::sort(pool.begin(), pool.end(),
            [](const SentencePair& a, const SentencePair& b) { return a.id < b.id; });
  out.pairs = std::move(pool);
  return out;
}

CsaResult run_csa(const TableCorrector& model, const std::vector<SentencePair>& train,
                  const std::vector<SentencePair>& d_tune,
                  const std::vector<TokenSeq>& dev_inputs, const AnnotatedCorpus& dev_gold,
                  const CsaConfig& cfg, const SnapshotSink& snapshot_sink) {
  cfg.validate();
  if (dev_inputs.size() != dev_gold.entries.size()) {
    throw ContractError("run_csa: dev inputs/gold size mismatch");
  }

  CsaResult result{model, {}, {}, {}};
  result.initial_dev = score_m2(infer_all(model, dev_inputs), dev_gold);
  if (cfg.max_cycles == 0) return result;

  if (d_tune.empty()) throw ConfigError("run_csa: tuning set is mandatory");
  if (train.empty()) throw ConfigError("run_csa: empty training set");

  TableCorrector current = model;
  double best_f = result.initial_dev.f;
  int cycles_without_improvement = 0;
  std::vector<AugmentingSet> aug_history;

  for (int k = 1; k <= cfg.max_cycles; ++k) {
    aug_history.push_back(self_augment(current, train, cfg.variant, k));
    result.aug_sets.push_back(aug_history.back());
    const AugmentingSet& aug = aug_history.back();

    CycleState state;
    state.k = k;
    state.aug_size = aug.pairs.size();

    if (aug.pairs.empty()) {
      // The model solved the training corpus; nothing left to cycle on.
      state.dev = score_m2(infer_all(current, dev_inputs), dev_gold);
      if (snapshot_sink) state.snapshot_ref = snapshot_sink(k, current);
      result.history.push_back(std::move(state));
      break;
    }

    if (k <= cfg.patience) {
      state.stage = 1;
      current.absorb(aug.pairs);
    } else {
      state.stage = 2;
      const std::size_t window = static_cast<std::size_t>(cfg.patience);
      std::vector<AugmentingSet> last(aug_history.end() - window, aug_history.end());
      RegularizationSet reg = regularization_set(last);
      if (cfg.reserving_rate < 1.0) {
        RngStream rng(splitmix64_mix(cfg.seed ^ static_cast<std::uint64_t>(k)));
        reg = subsample_reg(reg, cfg.reserving_rate, rng);
      }
      state.reg_size = reg.pairs.size();
      current.absorb(reg.pairs);
    }
    current.absorb(d_tune);

    state.dev = score_m2(infer_all(current, dev_inputs), dev_gold);
    if (snapshot_sink) state.snapshot_ref = snapshot_sink(k, current);

    const bool improved = state.dev.f - best_f > cfg.convergence_tol;
    if (improved) {
      best_f = state.dev.f;
      result.model = current;
      cycles_without_improvement = 0;
    } else {
      ++cycles_without_improvement;
    }
    result.history.push_back(std::move(state));
    if (cycles_without_improvement >= cfg.patience) break;
  }
  return result;
}

}  // namespace gecrb
