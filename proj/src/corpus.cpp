#include "gecrb/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include <json.hpp>

namespace gecrb {

namespace {

using ordered_json = nlohmann::ordered_json;

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) lines.push_back(current);
  return lines;
}

std::vector<std::string> split_on(const std::string& s, const std::string& sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(sep, pos);
    if (next == std::string::npos) {
      parts.push_back(s.substr(pos));
      break;
    }
    parts.push_back(s.substr(pos, next - pos));
    pos = next + sep.size();
  }
  return parts;
}

}  // namespace

TokenSeq tokenize(const std::string& raw) {
  TokenSeq tokens;
  std::string current;
  for (char c : raw) {
    if (is_space(c)) {
      if (!current.empty()) {
        tokens.push_back(current);
        current.clear();
      }
    } else {
      current += c;
    }
  }
  if (!current.empty()) tokens.push_back(current);
  return tokens;
}

std::string join(const TokenSeq& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

AnnotatedCorpus parse_m2(const std::string& text) {
  AnnotatedCorpus corpus;
  const std::vector<std::string> lines = split_lines(text);

  bool in_block = false;
  TokenSeq source;
  // annotator id -> (edits, source line numbers of those edits)
  std::map<int, std::pair<GoldEditSet, std::vector<std::size_t>>> annotators;

  auto flush_block = [&]() {
    if (!in_block) return;
    AnnotatedEntry entry;
    entry.source = source;
    if (annotators.empty()) {
      entry.annotator_edit_sets.emplace_back();  // no A-lines: one empty set
    }
    for (auto& [id, edits_and_lines] : annotators) {
      auto& [edits, edit_lines] = edits_and_lines;
      std::vector<std::size_t> order(edits.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return edits[a].start != edits[b].start ? edits[a].start < edits[b].start
                                                : edits[a].end < edits[b].end;
      });
      GoldEditSet sorted;
      for (std::size_t i : order) sorted.push_back(edits[i]);
      for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].start < sorted[i - 1].end) {
          throw ParseError("overlapping edit spans for annotator " + std::to_string(id),
                           edit_lines[order[i]]);
        }
      }
      entry.annotator_edit_sets.push_back(std::move(sorted));
    }
    corpus.entries.push_back(std::move(entry));
    annotators.clear();
    source.clear();
    in_block = false;
  };

  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    const std::size_t line_no = li + 1;
    if (tokenize(line).empty()) {
      flush_block();
      continue;
    }
    if (line.rfind("S ", 0) == 0 || line == "S") {
      flush_block();
      in_block = true;
      source = tokenize(line.substr(1));
      continue;
    }
    if (line.rfind("A ", 0) == 0) {
      if (!in_block) throw ParseError("A-line before any S-line", line_no);
      const std::vector<std::string> fields = split_on(line.substr(2), "|||");
      if (fields.size() != 6) {
        throw ParseError("expected 6 '|||'-separated fields in A-line, got " +
                             std::to_string(fields.size()),
                         line_no);
      }
      const TokenSeq span_tokens = tokenize(fields[0]);
      if (span_tokens.size() != 2) throw ParseError("bad edit span", line_no);
      long start = 0;
      long end = 0;
      try {
        start = std::stol(span_tokens[0]);
        end = std::stol(span_tokens[1]);
      } catch (const std::exception&) {
        throw ParseError("non-numeric edit span", line_no);
      }
      int annotator = 0;
      try {
        annotator = std::stoi(fields[5]);
      } catch (const std::exception&) {
        throw ParseError("non-numeric annotator id", line_no);
      }
      if (annotator < 0) throw ParseError("negative annotator id", line_no);

      auto& [edits, edit_lines] = annotators[annotator];
      if (fields[1] == "noop") {
        if (start != -1 || end != -1) {
          throw ParseError("noop annotation must use span -1 -1", line_no);
        }
        continue;  // annotator registered with zero edits
      }
      if (start < 0 || end < start || static_cast<std::size_t>(end) > source.size()) {
        throw ParseError("edit span out of range", line_no);
      }
      GoldEdit edit;
      edit.start = static_cast<std::size_t>(start);
      edit.end = static_cast<std::size_t>(end);
      edit.type_label = fields[1];
      if (fields[2] != "-NONE-") edit.replacement = tokenize(fields[2]);
      edits.push_back(std::move(edit));
      edit_lines.push_back(line_no);
      continue;
    }
    throw ParseError("unrecognized M2 line", line_no);
  }
  flush_block();
  return corpus;
}

std::string emit_m2(const AnnotatedCorpus& corpus) {
  std::string out;
  for (std::size_t e = 0; e < corpus.entries.size(); ++e) {
    const AnnotatedEntry& entry = corpus.entries[e];
    if (e > 0) out += '\n';
    out += "S " + join(entry.source) + '\n';
    for (std::size_t a = 0; a < entry.annotator_edit_sets.size(); ++a) {
      const GoldEditSet& edits = entry.annotator_edit_sets[a];
      const std::string id = std::to_string(a);
      if (edits.empty()) {
        out += "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||" + id + '\n';
        continue;
      }
      for (const GoldEdit& edit : edits) {
        out += "A " + std::to_string(edit.start) + ' ' + std::to_string(edit.end) +
               "|||" + edit.type_label + "|||" +
               (edit.replacement.empty() ? std::string("-NONE-") : join(edit.replacement)) +
               "|||REQUIRED|||-NONE-|||" + id + '\n';
      }
    }
  }
  return out;
}

std::vector<SentencePair> parse_parallel_tsv(const std::string& text) {
  std::vector<SentencePair> pairs;
  const std::vector<std::string> lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    if (line.empty() || tokenize(line).empty()) continue;
    const std::vector<std::string> fields = split_on(line, "\t");
    if (fields.size() != 2) {
      throw ParseError("expected exactly one TAB, got " +
                           std::to_string(fields.size() - 1),
                       li + 1);
    }
    SentencePair pair;
    pair.id = li;
    pair.source = tokenize(fields[0]);
    pair.target = tokenize(fields[1]);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::string to_string(AttackMethod method) {
  switch (method) {
    case AttackMethod::MappingRules: return "mapping-rules";
    case AttackMethod::Synonym: return "synonym";
    case AttackMethod::Antonym: return "antonym";
    case AttackMethod::BackTranslation: return "backtranslate";
  }
  throw ContractError("bad AttackMethod");
}

AttackMethod attack_method_from_string(const std::string& tag) {
  if (tag == "mapping-rules") return AttackMethod::MappingRules;
  if (tag == "synonym") return AttackMethod::Synonym;
  if (tag == "antonym") return AttackMethod::Antonym;
  if (tag == "backtranslate") return AttackMethod::BackTranslation;
  throw ParseError("unknown attack method tag: " + tag);
}

std::string serialize_attack_corpus(const AttackCorpus& corpus) {
  ordered_json doc;
  doc["version"] = corpus.version;
  doc["method"] = to_string(corpus.method);
  doc["global_seed"] = corpus.global_seed;
  doc["zeta"] = corpus.zeta;
  doc["entries"] = ordered_json::array();
  for (const AttackedSentence& entry : corpus.entries) {
    ordered_json je;
    je["id"] = entry.id;
    je["source_tokens"] = entry.source;
    je["attacked_tokens"] = entry.attacked;
    je["positions"] = entry.positions;
    je["steps"] = ordered_json::array();
    for (const PerturbStep& step : entry.steps) {
      ordered_json js;
      js["span"] = {step.span_start, step.span_end};
      js["replacement"] = step.replacement;
      js["from_mapping"] = step.from_mapping;
      js["sim_after"] = step.sim_after;
      je["steps"].push_back(std::move(js));
    }
    doc["entries"].push_back(std::move(je));
  }
  return doc.dump(2) + "\n";
}

AttackCorpus deserialize_attack_corpus(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid attack corpus JSON: ") + e.what());
  }
  try {
    AttackCorpus corpus;
    corpus.version = doc.at("version").get<int>();
    if (corpus.version != 1) {
      throw ParseError("unsupported attack corpus schema version " +
                       std::to_string(corpus.version));
    }
    corpus.method = attack_method_from_string(doc.at("method").get<std::string>());
    corpus.global_seed = doc.at("global_seed").get<std::uint64_t>();
    corpus.zeta = doc.at("zeta").get<double>();
    for (const auto& je : doc.at("entries")) {
      AttackedSentence entry;
      entry.id = je.at("id").get<std::uint64_t>();
      entry.source = je.at("source_tokens").get<TokenSeq>();
      entry.attacked = je.at("attacked_tokens").get<TokenSeq>();
      entry.positions = je.at("positions").get<std::vector<std::size_t>>();
      for (const auto& js : je.at("steps")) {
        PerturbStep step;
        const auto span = js.at("span").get<std::vector<std::size_t>>();
        if (span.size() != 2) throw ParseError("bad step span");
        step.span_start = span[0];
        step.span_end = span[1];
        step.replacement = js.at("replacement").get<TokenSeq>();
        step.from_mapping = js.at("from_mapping").get<bool>();
        step.sim_after = js.at("sim_after").get<double>();
        entry.steps.push_back(std::move(step));
      }
      corpus.entries.push_back(std::move(entry));
    }
    return corpus;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed attack corpus document: ") + e.what());
  }
}

}  // namespace gecrb
