#include "gecrb/attack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gecrb/align.hpp"
#include "gecrb/errors.hpp"
#include "gecrb/parallel.hpp"

namespace gecrb {

namespace {

// Guards float-summation noise when comparing a probability against the mean
// of probabilities it contributed to.
constexpr double kMeanEps = 1e-12;

struct Proposal {
  std::size_t start = 0;
  std::size_t end = 0;  // > start: attacks always cover at least one token
  TokenSeq replacement;
  bool from_mapping = false;
};

// start -> (end, replacement); spans are pairwise disjoint.
using ReplacementMap = std::map<std::size_t, std::pair<std::size_t, TokenSeq>>;

TokenSeq splice(const TokenSeq& x, const ReplacementMap& replacements) {
  TokenSeq out;
  std::size_t i = 0;
  auto it = replacements.begin();
  while (i < x.size()) {
    if (it != replacements.end() && it->first == i) {
      const auto& [end, tokens] = it->second;
      out.insert(out.end(), tokens.begin(), tokens.end());
      i = end;
      ++it;
    } else {
      out.push_back(x[i]);
      ++i;
    }
  }
  return out;
}

bool span_free(const ReplacementMap& replacements, std::size_t start, std::size_t end) {
  for (const auto& [s, rest] : replacements) {
    if (start < rest.first && s < end) return false;
  }
  return true;
}

// Source indices whose aligned image in `attacked` differs or is deleted.
std::vector<std::size_t> changed_positions(const TokenSeq& source, const TokenSeq& attacked) {
  std::vector<std::size_t> positions;
  for (const EditOp& op : align(source, attacked).ops) {
    if (op.kind == EditKind::Substitute || op.kind == EditKind::Delete) {
      positions.push_back(op.src_index);
    }
  }
  return positions;
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::optional<Proposal> propose_mapping_rules(const TokenSeq& x, std::size_t pos,
                                              const ConfusionMapping& mapping,
                                              const ReplacementMap& applied) {
  // Longest piece first, anchored at the candidate index.
  for (std::size_t len = std::min<std::size_t>(3, x.size() - pos); len >= 1; --len) {
    if (!span_free(applied, pos, pos + len)) continue;
    const TokenSeq piece(x.begin() + pos, x.begin() + pos + len);
    const auto cands = mapping.candidates(piece);
    if (!cands.empty()) {
      return Proposal{pos, pos + len, cands.front().poor, true};
    }
  }
  if (!span_free(applied, pos, pos + 1)) return std::nullopt;
  const auto rules = fallback_rules(x[pos]);
  if (rules.empty()) return std::nullopt;
  return Proposal{pos, pos + 1, rules.front(), false};
}

std::optional<Proposal> propose_lexicon(const TokenSeq& x, std::size_t pos,
                                        const Lexicon& lexicon, LexiconRelation relation,
                                        const ReplacementMap& applied) {
  if (!span_free(applied, pos, pos + 1)) return std::nullopt;
  for (const std::string& cand : lexicon.candidates(x[pos], relation)) {
    if (cand != x[pos]) return Proposal{pos, pos + 1, {cand}, true};
  }
  return std::nullopt;
}

template <typename ProposeFn>
AttackedSentence perturb_loop(const TokenSeq& x, const VulnerabilityReport& report,
                              const AttackConfig& cfg, RngStream& rng, ProposeFn propose) {
  cfg.validate();
  AttackedSentence out;
  out.source = x;

  std::set<std::size_t> remaining;
  for (std::size_t pos : report.candidate_positions) {
    if (pos >= x.size()) throw ContractError("perturb: candidate position out of range");
    remaining.insert(pos);
  }

  ReplacementMap applied;
  int consecutive_over = 0;
  while (true) {
    std::vector<Proposal> proposals;
    for (std::size_t pos : remaining) {
      if (auto p = propose(pos, applied)) proposals.push_back(std::move(*p));
    }
    if (proposals.empty()) break;

    // Weighted random sampling: the largest key U^(1/c) wins, with c the
    // prospective normalized edit distance clamped below at ζ.
    double best_key = -1.0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < proposals.size(); ++i) {
      ReplacementMap trial = applied;
      trial[proposals[i].start] = {proposals[i].end, proposals[i].replacement};
      const double sim = normalized_edit_distance(x, splice(x, trial));
      const double c = sim > cfg.zeta ? sim : cfg.zeta;
      const double key = std::pow(rng.next_unit(), 1.0 / c);
      if (key > best_key) {
        best_key = key;
        best = i;
      }
    }

    const Proposal& chosen = proposals[best];
    applied[chosen.start] = {chosen.end, chosen.replacement};
    const double sim_after = normalized_edit_distance(x, splice(x, applied));
    out.steps.push_back(
        {chosen.start, chosen.end, chosen.replacement, chosen.from_mapping, sim_after});
    for (std::size_t pos = chosen.start; pos < chosen.end; ++pos) remaining.erase(pos);

    if (sim_after > cfg.zeta) {
      if (++consecutive_over >= cfg.max_consecutive_over) break;
    } else {
      consecutive_over = 0;
    }
  }

  out.attacked = splice(x, applied);
  if (!out.steps.empty()) out.positions = changed_positions(x, out.attacked);
  return out;
}

}  // namespace

void AttackConfig::validate() const {
  if (!(zeta > 0.0 && zeta < 1.0)) throw ConfigError("zeta must be in (0, 1)");
  if (max_consecutive_over < 1) throw ConfigError("max_consecutive_over must be >= 1");
  if (beam < 1) throw ConfigError("beam must be >= 1");
  if (beta_random < 0.0) throw ConfigError("beta_random must be >= 0");
}

VulnerabilityReport detect_vulnerable_seq2seq(const Corrector& model, const TokenSeq& x,
                                              const AttackConfig& cfg) {
  if (x.empty()) throw ContractError("detect_vulnerable_seq2seq: empty input");
  cfg.validate();
  const Hypothesis top = model.beam(x, cfg.beam).front();
  VulnerabilityReport report;
  report.per_token_probs = top.token_probs;
  report.threshold = mean(top.token_probs);

  const EditSequence hyp_to_src = align(top.tokens, x);
  std::set<std::size_t> positions;
  for (std::size_t t = 0; t < top.token_probs.size(); ++t) {
    if (top.token_probs[t] < report.threshold - kMeanEps) {
      if (const auto src = map_position(hyp_to_src, t)) positions.insert(*src);
    }
  }
  report.candidate_positions.assign(positions.begin(), positions.end());
  return report;
}

VulnerabilityReport detect_vulnerable_seq2edit(const Tagger& tagger, const TokenSeq& x) {
  if (x.empty()) throw ContractError("detect_vulnerable_seq2edit: empty input");
  VulnerabilityReport report;
  for (const TagPrediction& pred : tagger.tag(x)) report.per_token_probs.push_back(pred.prob);
  report.threshold = mean(report.per_token_probs);
  for (std::size_t i = 0; i < report.per_token_probs.size(); ++i) {
    if (report.per_token_probs[i] < report.threshold - kMeanEps) {
      report.candidate_positions.push_back(i);
    }
  }
  return report;
}

Lexicon Lexicon::parse(const std::string& text) {
  Lexicon lex;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (tokenize(line).empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      const std::size_t tab = line.find('\t', pos);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, tab - pos));
      pos = tab + 1;
    }
    if (fields.size() != 3) throw ParseError("expected 3 TAB-separated fields", line_no);
    LexiconRelation relation;
    if (fields[1] == "synonym") {
      relation = LexiconRelation::Synonym;
    } else if (fields[1] == "antonym") {
      relation = LexiconRelation::Antonym;
    } else {
      throw ParseError("unknown relation '" + fields[1] + "'", line_no);
    }
    std::vector<std::string>& slot =
        lex.entries_[fields[0]][relation == LexiconRelation::Synonym ? 0 : 1];
    std::string cand;
    std::istringstream cands(fields[2]);
    while (std::getline(cands, cand, ',')) {
      if (!cand.empty()) slot.push_back(cand);
    }
  }
  return lex;
}

Lexicon Lexicon::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lexicon file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

const std::vector<std::string>& Lexicon::candidates(const std::string& word,
                                                    LexiconRelation relation) const {
  static const std::vector<std::string> kEmpty;
  const auto it = entries_.find(word);
  if (it == entries_.end()) return kEmpty;
  return it->second[relation == LexiconRelation::Synonym ? 0 : 1];
}

AttackedSentence perturb_mapping_rules(const TokenSeq& x, const VulnerabilityReport& report,
                                       const ConfusionMapping& mapping,
                                       const AttackConfig& cfg, RngStream& rng) {
  return perturb_loop(x, report, cfg, rng,
                      [&](std::size_t pos, const ReplacementMap& applied) {
                        return propose_mapping_rules(x, pos, mapping, applied);
                      });
}

AttackedSentence perturb_lexicon(const TokenSeq& x, const VulnerabilityReport& report,
                                 const Lexicon& lexicon, LexiconRelation relation,
                                 const AttackConfig& cfg, RngStream& rng) {
  return perturb_loop(x, report, cfg, rng,
                      [&](std::size_t pos, const ReplacementMap& applied) {
                        return propose_lexicon(x, pos, lexicon, relation, applied);
                      });
}

AttackedSentence attack_backtranslation(const Corrector& generator, const TokenSeq& clean,
                                        const AttackConfig& cfg, RngStream& rng) {
  cfg.validate();
  AttackedSentence out;
  out.source = clean;
  out.attacked = noised_beam_search(generator, clean, cfg.beam, cfg.beta_random, rng).tokens;
  out.positions = changed_positions(clean, out.attacked);
  return out;
}

AttackCorpus build_fixed_attack_set(const std::vector<TokenSeq>& corpus,
                                    const Corrector& model, const ConfusionMapping& mapping,
                                    int n, const AttackConfig& cfg,
                                    std::uint64_t global_seed) {
  if (n < 1 || n > 3) throw ContractError("build_fixed_attack_set: n must be in {1,2,3}");
  cfg.validate();
  AttackCorpus out;
  out.method = AttackMethod::MappingRules;
  out.global_seed = global_seed;
  out.zeta = cfg.zeta;
  const std::size_t target = static_cast<std::size_t>(n);

  for (std::size_t idx = 0; idx < corpus.size(); ++idx) {
    const TokenSeq& x = corpus[idx];
    if (x.size() < 2) continue;  // test sentences shorter than two are ignored

    RngStream rng = RngStream::for_sentence(global_seed, idx);
    AttackedSentence entry;
    entry.id = idx;
    entry.source = x;

    const Hypothesis top = model.beam(x, cfg.beam).front();
    std::vector<std::size_t> ranked(top.token_probs.size());
    for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i] = i;
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
      return top.token_probs[a] < top.token_probs[b];
    });
    const EditSequence hyp_to_src = align(top.tokens, x);

    ReplacementMap applied;
    std::vector<std::size_t> positions;
    for (std::size_t t : ranked) {
      if (positions.size() >= target) break;
      const auto src = map_position(hyp_to_src, t);
      if (!src) continue;
      const std::size_t pos = *src;
      if (!span_free(applied, pos, pos + 1)) continue;

      // All mapping candidates of the longest matching piece, else all rule
      // candidates for the token.
      std::vector<Proposal> options;
      for (std::size_t len = std::min<std::size_t>(3, x.size() - pos); len >= 1; --len) {
        if (!span_free(applied, pos, pos + len)) continue;
        const TokenSeq piece(x.begin() + pos, x.begin() + pos + len);
        for (const ConfusionCandidate& cand : mapping.candidates(piece)) {
          options.push_back(Proposal{pos, pos + len, cand.poor, true});
        }
        if (!options.empty()) break;
      }
      if (options.empty()) {
        for (const TokenSeq& cand : fallback_rules(x[pos])) {
          options.push_back(Proposal{pos, pos + 1, cand, false});
        }
      }

      // A usable option must grow the recorded position set without
      // overshooting n (a multi-token piece can change several positions).
      std::vector<std::pair<Proposal, std::vector<std::size_t>>> usable;
      for (Proposal& option : options) {
        ReplacementMap trial = applied;
        trial[option.start] = {option.end, option.replacement};
        std::vector<std::size_t> trial_positions = changed_positions(x, splice(x, trial));
        if (trial_positions.size() > target) continue;
        if (trial_positions.size() <= positions.size()) continue;
        usable.emplace_back(std::move(option), std::move(trial_positions));
      }
      if (usable.empty()) continue;  // take the next-ranked position

      double best_key = -1.0;
      std::size_t best = 0;
      for (std::size_t i = 0; i < usable.size(); ++i) {
        ReplacementMap trial = applied;
        trial[usable[i].first.start] = {usable[i].first.end, usable[i].first.replacement};
        const double sim = normalized_edit_distance(x, splice(x, trial));
        const double c = sim > cfg.zeta ? sim : cfg.zeta;
        const double key = std::pow(rng.next_unit(), 1.0 / c);
        if (key > best_key) {
          best_key = key;
          best = i;
        }
      }

      const Proposal& chosen = usable[best].first;
      applied[chosen.start] = {chosen.end, chosen.replacement};
      positions = std::move(usable[best].second);
      entry.steps.push_back({chosen.start, chosen.end, chosen.replacement,
                             chosen.from_mapping,
                             normalized_edit_distance(x, splice(x, applied))});
    }

    entry.attacked = splice(x, applied);
    entry.positions = std::move(positions);
    out.entries.push_back(std::move(entry));
  }
  return out;
}

bool audit_stop_rule(const AttackedSentence& entry, double zeta, int max_consecutive_over) {
  int consecutive = 0;
  for (std::size_t s = 0; s < entry.steps.size(); ++s) {
    if (entry.steps[s].sim_after > zeta) {
      ++consecutive;
      if (consecutive > max_consecutive_over) return false;
      if (consecutive == max_consecutive_over && s + 1 != entry.steps.size()) return false;
    } else {
      consecutive = 0;
    }
  }
  return true;
}

AttackCorpus generate_attack_corpus(const std::vector<TokenSeq>& sentences,
                                    const AttackResources& resources,
                                    const AttackConfig& cfg, std::uint64_t global_seed,
                                    int jobs) {
  cfg.validate();
  switch (cfg.method) {
    case AttackMethod::MappingRules:
      if (resources.mapping == nullptr) throw ConfigError("mapping-rules attack needs a mapping");
      if (resources.model == nullptr && resources.tagger == nullptr) {
        throw ConfigError("discrete attacks need a corrector or tagger for detection");
      }
      break;
    case AttackMethod::Synonym:
    case AttackMethod::Antonym:
      if (resources.lexicon == nullptr) throw ConfigError("lexicon attack needs a lexicon");
      if (resources.model == nullptr && resources.tagger == nullptr) {
        throw ConfigError("discrete attacks need a corrector or tagger for detection");
      }
      break;
    case AttackMethod::BackTranslation:
      if (resources.model == nullptr) {
        throw ConfigError("back-translation attack needs a generator model");
      }
      break;
  }

  AttackCorpus out;
  out.method = cfg.method;
  out.global_seed = global_seed;
  out.zeta = cfg.zeta;
  out.entries.resize(sentences.size());

  parallel_for(sentences.size(), jobs, [&](std::size_t idx) {
    const TokenSeq& x = sentences[idx];
    RngStream rng = RngStream::for_sentence(global_seed, idx);
    AttackedSentence entry;
    if (cfg.method == AttackMethod::BackTranslation) {
      entry = attack_backtranslation(*resources.model, x, cfg, rng);
    } else if (x.empty()) {
      entry.source = x;
      entry.attacked = x;
    } else {
      const VulnerabilityReport report =
          resources.tagger != nullptr
              ? detect_vulnerable_seq2edit(*resources.tagger, x)
              : detect_vulnerable_seq2seq(*resources.model, x, cfg);
      if (cfg.method == AttackMethod::MappingRules) {
        entry = perturb_mapping_rules(x, report, *resources.mapping, cfg, rng);
      } else {
        entry = perturb_lexicon(x, report, *resources.lexicon,
                                cfg.method == AttackMethod::Synonym
                                    ? LexiconRelation::Synonym
                                    : LexiconRelation::Antonym,
                                cfg, rng);
      }
    }
    entry.id = idx;
    out.entries[idx] = std::move(entry);
  });
  return out;
}

}  // namespace gecrb
