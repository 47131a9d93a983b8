#include "gecrb/corrector.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "gecrb/align.hpp"
#include "gecrb/errors.hpp"

namespace gecrb {

namespace {

using ordered_json = nlohmann::ordered_json;

struct Partial {
  TokenSeq tokens;
  std::vector<double> probs;
  double score = 0.0;       // Σ log(token_probs)
  double rank_score = 0.0;  // score plus accumulated beam-noise penalties
};

void emit(Partial& p, const TokenSeq& tokens, const std::vector<double>& probs) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    p.tokens.push_back(tokens[i]);
    p.probs.push_back(probs[i]);
    const double lp = std::log(probs[i]);
    p.score += lp;
    p.rank_score += lp;
  }
}

void emit_choice(Partial& p, const DecodeChoice& choice) {
  for (const std::string& t : choice.tokens) {
    p.tokens.push_back(t);
    p.probs.push_back(choice.prob);
    const double lp = std::log(choice.prob);
    p.score += lp;
    p.rank_score += lp;
  }
}

// Beam search over a decode plan. When rng is non-null each expanded
// hypothesis is penalized by rng·beta_random at every site.
std::vector<Hypothesis> plan_beam(const DecodePlan& plan, int k, double beta_random,
                                  RngStream* rng) {
  std::vector<Partial> beam_set(1);
  for (const DecodeSite& site : plan.sites) {
    for (Partial& p : beam_set) emit(p, site.prefix_tokens, site.prefix_probs);
    std::vector<Partial> expanded;
    for (const Partial& p : beam_set) {
      const std::size_t limit =
          std::min<std::size_t>(site.choices.size(), static_cast<std::size_t>(k));
      for (std::size_t c = 0; c < limit; ++c) {
        Partial next = p;
        emit_choice(next, site.choices[c]);
        if (rng != nullptr) next.rank_score -= rng->next_unit() * beta_random;
        expanded.push_back(std::move(next));
      }
    }
    std::stable_sort(expanded.begin(), expanded.end(),
                     [](const Partial& a, const Partial& b) {
                       return a.rank_score > b.rank_score;
                     });
    if (expanded.size() > static_cast<std::size_t>(k)) expanded.resize(k);
    beam_set = std::move(expanded);
  }
  for (Partial& p : beam_set) emit(p, plan.tail_tokens, plan.tail_probs);
  std::stable_sort(beam_set.begin(), beam_set.end(),
                   [](const Partial& a, const Partial& b) {
                     return a.rank_score > b.rank_score;
                   });
  std::vector<Hypothesis> out;
  out.reserve(beam_set.size());
  for (Partial& p : beam_set) {
    out.push_back(Hypothesis{std::move(p.tokens), std::move(p.probs), p.score});
  }
  return out;
}

}  // namespace

std::vector<Hypothesis> Corrector::beam(const TokenSeq& x, int k) const {
  if (k < 1) throw ContractError("beam: k must be positive");
  return plan_beam(decode_plan(x, k), k, 0.0, nullptr);
}

Hypothesis Corrector::correct(const TokenSeq& x) const { return beam(x, 1).front(); }

Hypothesis noised_beam_search(const Corrector& gen, const TokenSeq& x, int beam_width,
                              double beta_random, RngStream& rng) {
  if (beam_width < 1) throw ContractError("noised_beam_search: beam must be positive");
  if (beta_random < 0.0) throw ContractError("noised_beam_search: beta_random must be >= 0");
  if (beta_random == 0.0) return gen.beam(x, beam_width).front();
  return plan_beam(gen.decode_plan(x, beam_width), beam_width, beta_random, &rng).front();
}

TableCorrector::TableCorrector(int max_piece_len) : max_piece_len_(max_piece_len) {
  if (max_piece_len < 1) throw ContractError("max_piece_len must be positive");
}

void TableCorrector::absorb(const std::vector<SentencePair>& pairs) {
  for (const SentencePair& pair : pairs) {
    const EditSequence edits = align(pair.source, pair.target);
    for (const EditOp& op : edits.ops) {
      if (op.kind == EditKind::Keep) {
        ++keep_counts_[pair.source[op.src_index]];
      } else if (op.kind != EditKind::Insert) {
        ++edit_counts_[pair.source[op.src_index]];
      }
    }
    for (const SpanEdit& span : extract_edit_spans(edits)) {
      if (span.start == span.end) continue;               // pure insertion: no key
      if (span.replacement.empty()) continue;             // pure deletion: nothing to emit
      if (span.end - span.start > static_cast<std::size_t>(max_piece_len_)) continue;
      const TokenSeq poor(pair.source.begin() + span.start, pair.source.begin() + span.end);
      ++edit_table_[poor][span.replacement];
    }
  }
}

std::vector<std::pair<TokenSeq, std::uint64_t>> TableCorrector::piece_candidates(
    const TokenSeq& poor) const {
  std::vector<std::pair<TokenSeq, std::uint64_t>> out;
  auto it = edit_table_.find(poor);
  if (it == edit_table_.end()) return out;
  out.assign(it->second.begin(), it->second.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return out;
}

double TableCorrector::keep_prob(const std::string& token) const {
  const auto k = keep_counts_.find(token);
  const auto e = edit_counts_.find(token);
  const double keep = k == keep_counts_.end() ? 0.0 : static_cast<double>(k->second);
  const double edit = e == edit_counts_.end() ? 0.0 : static_cast<double>(e->second);
  return (keep + 1.0) / (keep + edit + 2.0);
}

DecodePlan TableCorrector::decode_plan(const TokenSeq& x, int beam_hint) const {
  (void)beam_hint;  // the plan lists all candidates; the engine truncates
  DecodePlan plan;
  TokenSeq forced;
  std::vector<double> forced_probs;
  std::size_t i = 0;
  while (i < x.size()) {
    std::size_t match_len = 0;
    for (std::size_t len = std::min<std::size_t>(max_piece_len_, x.size() - i); len >= 1;
         --len) {
      const TokenSeq piece(x.begin() + i, x.begin() + i + len);
      if (edit_table_.count(piece) > 0) {
        match_len = len;
        break;
      }
    }
    if (match_len == 0) {
      forced.push_back(x[i]);
      forced_probs.push_back(keep_prob(x[i]));
      ++i;
      continue;
    }
    const TokenSeq piece(x.begin() + i, x.begin() + i + match_len);
    const auto cands = piece_candidates(piece);
    std::uint64_t total = 0;
    for (const auto& [tokens, count] : cands) total += count;
    DecodeSite site;
    site.prefix_tokens = std::move(forced);
    site.prefix_probs = std::move(forced_probs);
    forced.clear();
    forced_probs.clear();
    for (const auto& [tokens, count] : cands) {
      site.choices.push_back(
          DecodeChoice{tokens, static_cast<double>(count) / static_cast<double>(total)});
    }
    plan.sites.push_back(std::move(site));
    i += match_len;
  }
  plan.tail_tokens = std::move(forced);
  plan.tail_probs = std::move(forced_probs);
  return plan;
}

std::string TableCorrector::serialize() const {
  ordered_json doc;
  doc["version"] = 1;
  doc["max_piece_len"] = max_piece_len_;
  doc["edit_table"] = ordered_json::array();
  for (const auto& [poor, cands] : edit_table_) {
    ordered_json entry;
    entry["piece"] = join(poor);
    entry["cands"] = ordered_json::array();
    for (const auto& [good, count] : cands) {
      entry["cands"].push_back({{"piece", join(good)}, {"count", count}});
    }
    doc["edit_table"].push_back(std::move(entry));
  }
  doc["keep_counts"] = ordered_json::object();
  for (const auto& [token, count] : keep_counts_) doc["keep_counts"][token] = count;
  doc["edit_counts"] = ordered_json::object();
  for (const auto& [token, count] : edit_counts_) doc["edit_counts"][token] = count;
  return doc.dump(2) + "\n";
}

TableCorrector TableCorrector::deserialize(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid corrector JSON: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != 1) {
      throw ParseError("unsupported corrector schema version");
    }
    TableCorrector model(doc.at("max_piece_len").get<int>());
    for (const auto& entry : doc.at("edit_table")) {
      const TokenSeq poor = tokenize(entry.at("piece").get<std::string>());
      for (const auto& cand : entry.at("cands")) {
        model.edit_table_[poor][tokenize(cand.at("piece").get<std::string>())] =
            cand.at("count").get<std::uint64_t>();
      }
    }
    for (const auto& [token, count] : doc.at("keep_counts").items()) {
      model.keep_counts_[token] = count.get<std::uint64_t>();
    }
    for (const auto& [token, count] : doc.at("edit_counts").items()) {
      model.edit_counts_[token] = count.get<std::uint64_t>();
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed corrector document: ") + e.what());
  }
}

TableCorrector train_table_corrector(const std::vector<SentencePair>& pairs,
                                     int max_piece_len) {
  if (pairs.empty()) throw ContractError("train_table_corrector: empty training set");
  TableCorrector model(max_piece_len);
  model.absorb(pairs);
  return model;
}

TableCorrector train_error_generator(const std::vector<SentencePair>& pairs,
                                     int max_piece_len) {
  if (pairs.empty()) throw ContractError("train_error_generator: empty training set");
  std::vector<SentencePair> reversed = pairs;
  for (SentencePair& pair : reversed) std::swap(pair.source, pair.target);
  TableCorrector model(max_piece_len);
  model.absorb(reversed);
  return model;
}

std::string to_string(const EditTag& tag) {
  switch (tag.kind) {
    case EditTag::Kind::Keep: return "KEEP";
    case EditTag::Kind::Delete: return "DELETE";
    case EditTag::Kind::Substitute: return "SUB " + join(tag.payload);
    case EditTag::Kind::Append: return "APPEND " + join(tag.payload);
  }
  throw ContractError("bad EditTag");
}

EditTag edit_tag_from_string(const std::string& text) {
  if (text == "KEEP") return {EditTag::Kind::Keep, {}};
  if (text == "DELETE") return {EditTag::Kind::Delete, {}};
  if (text.rfind("SUB ", 0) == 0) return {EditTag::Kind::Substitute, tokenize(text.substr(4))};
  if (text.rfind("APPEND ", 0) == 0) return {EditTag::Kind::Append, tokenize(text.substr(7))};
  throw ParseError("unknown edit tag: " + text);
}

void TableTagger::observe(const std::string& token, const EditTag& tag) {
  ++table_[token][to_string(tag)];
}

std::vector<TagPrediction> TableTagger::tag(const TokenSeq& x) const {
  std::vector<TagPrediction> out;
  out.reserve(x.size());
  for (const std::string& token : x) {
    const auto it = table_.find(token);
    if (it == table_.end()) {
      out.push_back({EditTag{EditTag::Kind::Keep, {}}, 1.0});
      continue;
    }
    std::uint64_t total = 0;
    std::uint64_t best_count = 0;
    const std::string* best_key = nullptr;
    for (const auto& [key, count] : it->second) {
      total += count;
      if (count > best_count) {  // keys iterate in lex order; first max wins
        best_count = count;
        best_key = &key;
      }
    }
    out.push_back({edit_tag_from_string(*best_key),
                   static_cast<double>(best_count) / static_cast<double>(total)});
  }
  return out;
}

std::string TableTagger::serialize() const {
  ordered_json doc;
  doc["version"] = 1;
  doc["tags"] = ordered_json::array();
  for (const auto& [token, tags] : table_) {
    ordered_json entry;
    entry["token"] = token;
    entry["tags"] = ordered_json::array();
    for (const auto& [key, count] : tags) {
      entry["tags"].push_back({{"tag", key}, {"count", count}});
    }
    doc["tags"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

TableTagger TableTagger::deserialize(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid tagger JSON: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != 1) {
      throw ParseError("unsupported tagger schema version");
    }
    TableTagger tagger;
    for (const auto& entry : doc.at("tags")) {
      const std::string token = entry.at("token").get<std::string>();
      for (const auto& tag : entry.at("tags")) {
        tagger.table_[token][tag.at("tag").get<std::string>()] =
            tag.at("count").get<std::uint64_t>();
      }
    }
    return tagger;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed tagger document: ") + e.what());
  }
}

TableTagger train_tagger(const std::vector<SentencePair>& pairs) {
  if (pairs.empty()) throw ContractError("train_tagger: empty training set");
  TableTagger tagger;
  for (const SentencePair& pair : pairs) {
    const EditSequence edits = align(pair.source, pair.target);
    const std::size_t n = pair.source.size();
    std::vector<EditTag> primary(n);
    std::vector<TokenSeq> appended(n + 1);
    for (const EditOp& op : edits.ops) {
      switch (op.kind) {
        case EditKind::Keep: primary[op.src_index] = {EditTag::Kind::Keep, {}}; break;
        case EditKind::Delete: primary[op.src_index] = {EditTag::Kind::Delete, {}}; break;
        case EditKind::Substitute:
          primary[op.src_index] = {EditTag::Kind::Substitute, {op.payload}};
          break;
        case EditKind::Insert: appended[op.src_index].push_back(op.payload); break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      // An insertion after a kept token becomes that token's APPEND tag;
      // insertions at index 0 have no carrier token and are dropped.
      if (!appended[i + 1].empty() && primary[i].kind == EditTag::Kind::Keep) {
        tagger.observe(pair.source[i], {EditTag::Kind::Append, appended[i + 1]});
      } else {
        tagger.observe(pair.source[i], primary[i]);
      }
    }
  }
  return tagger;
}

}  // namespace gecrb
