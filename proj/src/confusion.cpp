#include "gecrb/confusion.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include <json.hpp>

#include "gecrb/align.hpp"
#include "gecrb/errors.hpp"

namespace gecrb {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kMaxPieceTokens = 3;

bool is_ascii_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool has_alnum(const std::string& token) {
  return std::any_of(token.begin(), token.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
  });
}

bool all_ascii_lower(const std::string& token) {
  return std::all_of(token.begin(), token.end(), [](char c) {
    return is_ascii_alpha(c) && std::islower(static_cast<unsigned char>(c)) != 0;
  });
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

const std::array<std::string, 3> kArticles = {"a", "an", "the"};
const std::array<std::string, 10> kPrepositions = {"of", "for", "about", "to", "in",
                                                   "on", "at", "with", "by", "from"};

}  // namespace

void ConfusionMapping::add(const TokenSeq& good, const TokenSeq& poor, std::uint64_t count) {
  if (good.empty()) throw ContractError("ConfusionMapping: empty key piece");
  if (good == poor) throw ContractError("ConfusionMapping: self-mapping entry");
  entries_[good][poor] += count;
}

std::vector<ConfusionCandidate> ConfusionMapping::candidates(const TokenSeq& good) const {
  std::vector<ConfusionCandidate> out;
  const auto it = entries_.find(good);
  if (it == entries_.end()) return out;
  for (const auto& [poor, count] : it->second) out.push_back({poor, count});
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.count != b.count ? a.count > b.count : a.poor < b.poor;
  });
  return out;
}

std::string ConfusionMapping::serialize() const {
  ordered_json doc;
  doc["version"] = 1;
  doc["entries"] = ordered_json::array();
  for (const auto& [good, cands] : entries_) {
    ordered_json entry;
    entry["good"] = good;
    entry["cands"] = ordered_json::array();
    for (const ConfusionCandidate& cand : candidates(good)) {
      entry["cands"].push_back({{"poor", cand.poor}, {"count", cand.count}});
    }
    doc["entries"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

ConfusionMapping ConfusionMapping::deserialize(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid mapping JSON: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != 1) {
      throw ParseError("unsupported mapping schema version");
    }
    ConfusionMapping mapping;
    for (const auto& entry : doc.at("entries")) {
      const TokenSeq good = entry.at("good").get<TokenSeq>();
      for (const auto& cand : entry.at("cands")) {
        mapping.add(good, cand.at("poor").get<TokenSeq>(),
                    cand.at("count").get<std::uint64_t>());
      }
    }
    return mapping;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed mapping document: ") + e.what());
  }
}

ConfusionMapping build_mapping(const std::vector<SentencePair>& pairs) {
  ConfusionMapping mapping;
  for (const SentencePair& pair : pairs) {
    // good -> poor direction: keys are clean-ish pieces.
    const EditSequence edits = align(pair.target, pair.source);
    for (const SpanEdit& span : extract_edit_spans(edits)) {
      const TokenSeq good(pair.target.begin() + span.start, pair.target.begin() + span.end);
      const TokenSeq& poor = span.replacement;
      if (good.empty()) continue;  // pure insertion has no key
      if (good.size() > kMaxPieceTokens || poor.size() > kMaxPieceTokens) continue;
      if (good == poor) continue;
      mapping.add(good, poor);
    }
  }
  return mapping;
}

std::vector<TokenSeq> fallback_rules(const std::string& token) {
  if (token.empty()) throw ContractError("fallback_rules: empty token");
  std::vector<TokenSeq> out;
  if (!has_alnum(token)) return out;  // punctuation excluded

  auto push_single = [&out, &token](const std::string& cand) {
    if (cand == token) return;
    for (const TokenSeq& existing : out) {
      if (existing.size() == 1 && existing[0] == cand) return;
    }
    out.push_back({cand});
  };

  // Article rotation.
  if (std::find(kArticles.begin(), kArticles.end(), token) != kArticles.end()) {
    for (const std::string& a : kArticles) push_single(a);
    return out;
  }
  // Preposition confusion.
  if (std::find(kPrepositions.begin(), kPrepositions.end(), token) != kPrepositions.end()) {
    for (const std::string& p : kPrepositions) push_single(p);
    return out;
  }
  // Verb-suffix toggles on lowercase ASCII words.
  if (all_ascii_lower(token)) {
    if (ends_with(token, "ed") && token.size() >= 4) {
      const std::string base = token.substr(0, token.size() - 2);
      push_single(base);
      push_single(base + "ing");
      return out;
    }
    if (ends_with(token, "ing") && token.size() >= 5) {
      const std::string base = token.substr(0, token.size() - 3);
      push_single(base);
      push_single(base + "ed");
      return out;
    }
    if (ends_with(token, "s") && !ends_with(token, "ss") && token.size() >= 3) {
      push_single(token.substr(0, token.size() - 1));
      return out;
    }
    if (token.size() >= 3) {
      push_single(token + "s");
      push_single(token + "ed");
      push_single(token + "ing");
      return out;
    }
  }
  // Case flip of the first character.
  if (is_ascii_alpha(token[0])) {
    std::string flipped = token;
    const unsigned char c = static_cast<unsigned char>(flipped[0]);
    flipped[0] = std::isupper(c) != 0 ? static_cast<char>(std::tolower(c))
                                      : static_cast<char>(std::toupper(c));
    push_single(flipped);
    return out;
  }
  // Structural corruptions: deletion, duplication.
  out.push_back({});
  out.push_back({token, token});
  return out;
}

}  // namespace gecrb
