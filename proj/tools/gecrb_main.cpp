// gecrb: grammatical-error-correction robustness toolkit CLI.
//
// Subcommands: build-confusion, train-corrector, train-tagger,
// train-generator, correct, gen-attack, gen-atk-n, evaluate, csa,
// reg-extract, reg-decompose.
//
// Every command is a pure function of (inputs, flags, seed): reruns produce
// byte-identical outputs. Exit codes: 0 success, 1 internal error,
// 2 user/input error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gecrb/attack.hpp"
#include "gecrb/confusion.hpp"
#include "gecrb/corpus.hpp"
#include "gecrb/corrector.hpp"
#include "gecrb/csa.hpp"
#include "gecrb/errors.hpp"
#include "gecrb/io.hpp"
#include "gecrb/metrics.hpp"
#include "gecrb/parallel.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace gecrb;

namespace {

int resolve_jobs(int cli_jobs) {
  if (const char* env = std::getenv("GECRB_JOBS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return cli_jobs > 0 ? cli_jobs : 1;
}

std::string percent1(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
  return buf;
}

// Sentences to process: an attack corpus contributes its attacked sentences
// (in entry order), a parallel TSV its source column, a plain text file one
// sentence per nonempty line.
std::vector<TokenSeq> load_input_sentences(const std::string& path) {
  const std::string text = read_text_file(path);
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    std::vector<TokenSeq> sentences;
    for (const AttackedSentence& entry : deserialize_attack_corpus(text).entries) {
      sentences.push_back(entry.attacked);
    }
    return sentences;
  }
  if (text.find('\t') != std::string::npos) {
    std::vector<TokenSeq> sentences;
    for (const SentencePair& pair : parse_parallel_tsv(text)) {
      sentences.push_back(pair.source);
    }
    return sentences;
  }
  return read_token_lines(text);
}

// System/gold sentence files keep empty lines as empty sentences so corpus
// sizes stay aligned.
std::vector<TokenSeq> load_aligned_sentences(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<TokenSeq> out;
  std::string line;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find('\n', pos);
    if (next == std::string::npos) {
      if (pos < text.size()) out.push_back(tokenize(text.substr(pos)));
      break;
    }
    out.push_back(tokenize(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

// Gold targets for recovery: TSV target column or plain lines.
std::vector<TokenSeq> load_gold_targets(const std::string& path) {
  const std::string text = read_text_file(path);
  if (text.find('\t') != std::string::npos) {
    std::vector<TokenSeq> targets;
    for (const SentencePair& pair : parse_parallel_tsv(text)) {
      targets.push_back(pair.target);
    }
    return targets;
  }
  return load_aligned_sentences(path);
}

void write_manifest(const std::string& out_path, const std::string& command,
                    const ordered_json& config) {
  ordered_json manifest;
  manifest["command"] = command;
  manifest["config"] = config;
  write_text_file(out_path + ".manifest.json", manifest.dump(2) + "\n");
}

ordered_json pairs_to_json(const std::vector<SentencePair>& pairs) {
  ordered_json arr = ordered_json::array();
  for (const SentencePair& pair : pairs) {
    arr.push_back({{"id", pair.id}, {"input", join(pair.source)}, {"target", join(pair.target)}});
  }
  return arr;
}

std::vector<SentencePair> pairs_from_json(const ordered_json& arr) {
  std::vector<SentencePair> pairs;
  for (const auto& item : arr) {
    SentencePair pair;
    pair.id = item.at("id").get<std::uint64_t>();
    pair.source = tokenize(item.at("input").get<std::string>());
    pair.target = tokenize(item.at("target").get<std::string>());
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::string augset_to_json(const AugmentingSet& set) {
  ordered_json doc;
  doc["version"] = 1;
  doc["cycle_index"] = set.cycle_index;
  doc["variant"] = to_string(set.variant);
  doc["pairs"] = pairs_to_json(set.pairs);
  return doc.dump(2) + "\n";
}

AugmentingSet augset_from_file(const std::string& path) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(read_text_file(path));
    AugmentingSet set;
    set.cycle_index = doc.at("cycle_index").get<int>();
    set.variant = augment_variant_from_string(doc.at("variant").get<std::string>());
    set.pairs = pairs_from_json(doc.at("pairs"));
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": malformed augmenting-set document: " + e.what());
  }
}

std::string regset_to_json(const RegularizationSet& reg) {
  ordered_json doc;
  doc["version"] = 1;
  doc["cycle_index"] = reg.cycle_index;
  doc["provenance"] = reg.provenance;
  doc["pairs"] = pairs_to_json(reg.pairs);
  return doc.dump(2) + "\n";
}

RegularizationSet regset_from_file(const std::string& path) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(read_text_file(path));
    RegularizationSet reg;
    reg.cycle_index = doc.at("cycle_index").get<int>();
    reg.provenance = doc.at("provenance").get<std::vector<int>>();
    reg.pairs = pairs_from_json(doc.at("pairs"));
    return reg;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": malformed regularization-set document: " + e.what());
  }
}

ordered_json scores_to_json(const Scores& s) {
  return {{"precision", s.precision}, {"recall", s.recall},      {"f", s.f},
          {"beta", s.beta},           {"tp", s.tp},              {"fp", s.fp},
          {"fn", s.fn}};
}

void print_prf_table(const std::string& label, const Scores& s) {
  std::printf("%-12s  Prec.  Rec.   F_%.1f\n", "", s.beta);
  std::printf("%-12s  %5s  %5s  %5s\n", label.c_str(), percent1(s.precision).c_str(),
              percent1(s.recall).c_str(), percent1(s.f).c_str());
}

struct EvalOptions {
  std::string metric;
  std::string system_path;
  std::string gold_path;
  std::string source_path;
  std::vector<std::string> ref_paths;
  std::string attack_path;
  std::string report_path;
  double beta = 0.5;
  double gamma = 0.1;
  std::uint64_t n_sentences = 0;
  double score_t = 0.0;
  double score_i = 0.0;
};

int run_evaluate(const EvalOptions& opt) {
  ordered_json report;
  report["metric"] = opt.metric;
  ordered_json config;

  if (opt.metric == "m2" || opt.metric == "op-tier") {
    const AnnotatedCorpus gold = parse_m2(read_text_file(opt.gold_path));
    const std::vector<TokenSeq> system = load_aligned_sentences(opt.system_path);
    if (system.size() != gold.entries.size()) {
      throw ConfigError("system corpus has " + std::to_string(system.size()) +
                        " sentences, gold has " + std::to_string(gold.entries.size()));
    }
    config["beta"] = opt.beta;
    config["system"] = opt.system_path;
    config["gold"] = opt.gold_path;
    if (opt.metric == "m2") {
      const Scores s = score_m2(system, gold, opt.beta);
      print_prf_table("system", s);
      report["value"] = s.f;
      report["counts"] = scores_to_json(s);
    } else {
      const auto tiers = op_tier_prf(system, gold, opt.beta);
      std::printf("%-12s  Prec.  Rec.   F_%.1f\n", "", opt.beta);
      ordered_json counts;
      for (const auto& [tier, s] : tiers) {
        std::printf("%-12s  %5s  %5s  %5s\n", to_string(tier).c_str(),
                    percent1(s.precision).c_str(), percent1(s.recall).c_str(),
                    percent1(s.f).c_str());
        counts[to_string(tier)] = scores_to_json(s);
      }
      report["value"] = ordered_json();
      report["counts"] = counts;
    }
  } else if (opt.metric == "gleu") {
    const std::vector<TokenSeq> system = load_aligned_sentences(opt.system_path);
    const std::vector<TokenSeq> sources = load_aligned_sentences(opt.source_path);
    std::vector<std::vector<TokenSeq>> reference_sets;
    for (const std::string& path : opt.ref_paths) {
      reference_sets.push_back(load_aligned_sentences(path));
    }
    const double value = gleu(system, sources, reference_sets);
    std::printf("GLEU  %s\n", percent1(value).c_str());
    config["system"] = opt.system_path;
    config["source"] = opt.source_path;
    config["refs"] = opt.ref_paths;
    report["value"] = value;
    report["counts"] = ordered_json::object();
  } else if (opt.metric == "recovery") {
    const AttackCorpus attack = deserialize_attack_corpus(read_text_file(opt.attack_path));
    const std::vector<TokenSeq> system = load_aligned_sentences(opt.system_path);
    const std::vector<TokenSeq> gold = load_gold_targets(opt.gold_path);
    if (system.size() != attack.entries.size() || gold.size() != attack.entries.size()) {
      throw ConfigError("recovery inputs must have one line per attack entry");
    }
    std::map<std::uint64_t, TokenSeq> system_by_id;
    std::map<std::uint64_t, TokenSeq> gold_by_id;
    for (std::size_t i = 0; i < attack.entries.size(); ++i) {
      system_by_id[attack.entries[i].id] = system[i];
      gold_by_id[attack.entries[i].id] = gold[i];
    }
    const RecoveryResult r = recovery_rate(attack, system_by_id, gold_by_id);
    std::printf("%-12s  TR(%%)  SR(%%)\n", "");
    std::printf("%-12s  %5s  %5s\n", "system", percent1(r.tr).c_str(), percent1(r.sr).c_str());
    config["attack"] = opt.attack_path;
    config["system"] = opt.system_path;
    config["gold"] = opt.gold_path;
    report["value"] = {{"tr", r.tr}, {"sr", r.sr}};
    report["counts"] = {{"recovered_sentences", r.recovered_sentences},
                        {"unrecovered_sentences", r.unrecovered_sentences},
                        {"recovered_tokens", r.recovered_tokens},
                        {"total_tokens", r.total_tokens}};
  } else if (opt.metric == "ips") {
    const double value = ips(opt.n_sentences, opt.score_t, opt.score_i, opt.gamma);
    std::printf("#IPS  %.1f\n", value);
    std::printf("note: computed from the scores as given; published #IPS values were "
                "derived from two-decimal scores and may differ by rounding\n");
    config["n_sentences"] = opt.n_sentences;
    config["score_t"] = opt.score_t;
    config["score_i"] = opt.score_i;
    config["gamma"] = opt.gamma;
    report["value"] = value;
    report["counts"] = ordered_json::object();
  } else {
    throw ConfigError("unknown metric: " + opt.metric);
  }

  report["config"] = config;
  if (!opt.report_path.empty()) {
    write_text_file(opt.report_path, report.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GEC robustness toolkit: attack sets, evaluation, cycle self-augmenting"};
  app.require_subcommand(1);

  // build-confusion
  auto* cmd_confusion = app.add_subcommand(
      "build-confusion", "Harvest a Good->Poor confusion mapping from annotated corpora");
  std::vector<std::string> m2_files;
  std::vector<std::string> tsv_files;
  std::string out_path;
  cmd_confusion->add_option("--m2", m2_files, "M2-format corpus files");
  cmd_confusion->add_option("--tsv", tsv_files, "parallel TSV corpus files");
  cmd_confusion->add_option("--out", out_path, "output mapping JSON")->required();

  // train-corrector / train-generator / train-tagger
  std::string train_path;
  int max_piece_len = 3;
  auto* cmd_train = app.add_subcommand("train-corrector", "Train the table corrector");
  cmd_train->add_option("--train", train_path, "parallel TSV training file")->required();
  cmd_train->add_option("--out", out_path, "output model JSON")->required();
  cmd_train->add_option("--max-piece-len", max_piece_len, "longest poor piece, tokens");

  auto* cmd_gen = app.add_subcommand(
      "train-generator", "Train the reverse (Good->Poor) error generator");
  cmd_gen->add_option("--train", train_path, "parallel TSV training file")->required();
  cmd_gen->add_option("--out", out_path, "output model JSON")->required();
  cmd_gen->add_option("--max-piece-len", max_piece_len, "longest piece, tokens");

  auto* cmd_tagger = app.add_subcommand("train-tagger", "Train the edit tagger");
  cmd_tagger->add_option("--train", train_path, "parallel TSV training file")->required();
  cmd_tagger->add_option("--out", out_path, "output tagger JSON")->required();

  // correct
  std::string model_path;
  std::string input_path;
  int beam_width = 5;
  int jobs = 1;
  auto* cmd_correct = app.add_subcommand("correct", "Correct a corpus with a trained model");
  cmd_correct->add_option("--model", model_path, "corrector model JSON")->required();
  cmd_correct->add_option("--input", input_path, "text or TSV input")->required();
  cmd_correct->add_option("--out", out_path, "output text file")->required();
  cmd_correct->add_option("--beam", beam_width, "beam width");
  cmd_correct->add_option("--jobs", jobs, "parallel workers");

  // gen-attack
  std::string method_tag = "mapping-rules";
  std::string tagger_path;
  std::string mapping_path;
  std::string lexicon_path;
  double zeta = 0.1;
  double beta_random = 6.0;
  std::uint64_t seed = 0;
  auto* cmd_attack = app.add_subcommand("gen-attack", "Build an adversarial attack corpus");
  cmd_attack->add_option("--method", method_tag,
                         "mapping-rules | synonym | antonym | backtranslate");
  cmd_attack->add_option("--model", model_path, "corrector/generator model JSON");
  cmd_attack->add_option("--tagger", tagger_path, "tagger JSON (Seq2Edits detection)");
  cmd_attack->add_option("--mapping", mapping_path, "confusion mapping JSON");
  cmd_attack->add_option("--lexicon", lexicon_path, "synonym/antonym lexicon TSV");
  cmd_attack->add_option("--input", input_path, "text or TSV input")->required();
  cmd_attack->add_option("--out", out_path, "output attack corpus JSON")->required();
  cmd_attack->add_option("--zeta", zeta, "edit-distance budget");
  cmd_attack->add_option("--beta-random", beta_random, "back-translation noise scale");
  cmd_attack->add_option("--beam", beam_width, "beam width");
  cmd_attack->add_option("--seed", seed, "global seed");
  cmd_attack->add_option("--jobs", jobs, "parallel workers");

  // gen-atk-n
  int atk_n = 1;
  auto* cmd_atkn = app.add_subcommand(
      "gen-atk-n", "Build a fixed-count ATK_n corpus for Recovery Rate");
  cmd_atkn->add_option("--n", atk_n, "attacked positions per sentence (1..3)")->required();
  cmd_atkn->add_option("--model", model_path, "corrector model JSON")->required();
  cmd_atkn->add_option("--mapping", mapping_path, "confusion mapping JSON")->required();
  cmd_atkn->add_option("--input", input_path, "text or TSV input")->required();
  cmd_atkn->add_option("--out", out_path, "output attack corpus JSON")->required();
  cmd_atkn->add_option("--zeta", zeta, "edit-distance budget");
  cmd_atkn->add_option("--beam", beam_width, "beam width");
  cmd_atkn->add_option("--seed", seed, "global seed");

  // evaluate
  EvalOptions eval;
  auto* cmd_eval = app.add_subcommand("evaluate", "Score system output");
  cmd_eval->add_option("--metric", eval.metric, "m2 | gleu | recovery | ips | op-tier")
      ->required();
  cmd_eval->add_option("--system", eval.system_path, "system output, one sentence per line");
  cmd_eval->add_option("--gold", eval.gold_path, "gold M2 file / recovery targets");
  cmd_eval->add_option("--source", eval.source_path, "source sentences (gleu)");
  cmd_eval->add_option("--refs", eval.ref_paths, "reference files (gleu)");
  cmd_eval->add_option("--attack", eval.attack_path, "attack corpus JSON (recovery)");
  cmd_eval->add_option("--report", eval.report_path, "write the JSON report here");
  cmd_eval->add_option("--beta", eval.beta, "F-measure beta");
  cmd_eval->add_option("--gamma", eval.gamma, "#IPS zoom factor");
  cmd_eval->add_option("--n-sentences", eval.n_sentences, "#IPS sentence count");
  cmd_eval->add_option("--score-t", eval.score_t, "#IPS tuned score (percent)");
  cmd_eval->add_option("--score-i", eval.score_i, "#IPS initial score (percent)");

  // csa
  std::string tune_path;
  std::string dev_path;
  std::string out_dir;
  CsaConfig csa_cfg;
  std::string variant_tag = "self";
  auto* cmd_csa = app.add_subcommand("csa", "Run cycle self-augmenting post-training");
  cmd_csa->add_option("--model", model_path, "pre-trained corrector model JSON")->required();
  cmd_csa->add_option("--train", train_path, "parallel TSV training corpus")->required();
  cmd_csa->add_option("--tune", tune_path, "small high-quality tuning TSV")->required();
  cmd_csa->add_option("--dev", dev_path, "parallel TSV dev corpus")->required();
  cmd_csa->add_option("--out-dir", out_dir, "run directory")->required();
  cmd_csa->add_option("--patience", csa_cfg.patience, "patience P");
  cmd_csa->add_option("--max-cycles", csa_cfg.max_cycles, "max cycles");
  cmd_csa->add_option("--variant", variant_tag, "self | hard");
  cmd_csa->add_option("--reserve", csa_cfg.reserving_rate, "reserving rate in [0,1]");
  cmd_csa->add_option("--seed", csa_cfg.seed, "seed");

  // reg-extract / reg-decompose
  std::vector<std::string> aug_paths;
  std::vector<std::string> reg_paths;
  auto* cmd_regex = app.add_subcommand(
      "reg-extract", "Intersect augmenting sets into a regularization set");
  cmd_regex->add_option("--aug", aug_paths, "augmenting-set JSON files, oldest first")
      ->required();
  cmd_regex->add_option("--out", out_path, "output regularization-set JSON")->required();

  auto* cmd_regdec = app.add_subcommand(
      "reg-decompose", "Split regularization sets into X_unl and X_unc");
  cmd_regdec->add_option("--reg", reg_paths, "regularization-set JSON files, oldest first")
      ->required();
  cmd_regdec->add_option("--out", out_path, "output decomposition JSON")->required();

  try {
    app.parse(argc, argv);

    if (cmd_confusion->parsed()) {
      std::vector<SentencePair> pairs;
      std::uint64_t next_id = 0;
      for (const std::string& path : m2_files) {
        const AnnotatedCorpus corpus = parse_m2(read_text_file(path));
        for (const AnnotatedEntry& entry : corpus.entries) {
          for (const GoldEditSet& edits : entry.annotator_edit_sets) {
            // Rebuild the annotator's corrected sentence from the edits.
            TokenSeq target;
            std::size_t cursor = 0;
            for (const GoldEdit& edit : edits) {
              target.insert(target.end(), entry.source.begin() + cursor,
                            entry.source.begin() + edit.start);
              target.insert(target.end(), edit.replacement.begin(), edit.replacement.end());
              cursor = edit.end;
            }
            target.insert(target.end(), entry.source.begin() + cursor, entry.source.end());
            pairs.push_back({next_id++, entry.source, target});
          }
        }
      }
      for (const std::string& path : tsv_files) {
        for (SentencePair pair : parse_parallel_tsv(read_text_file(path))) {
          pair.id = next_id++;
          pairs.push_back(std::move(pair));
        }
      }
      const ConfusionMapping mapping = build_mapping(pairs);
      write_text_file(out_path, mapping.serialize());
      write_manifest(out_path, "build-confusion",
                     {{"m2", m2_files}, {"tsv", tsv_files}, {"pairs", pairs.size()}});
      std::printf("mapping entries: %zu\n", mapping.size());
      return 0;
    }

    if (cmd_train->parsed() || cmd_gen->parsed()) {
      const auto pairs = parse_parallel_tsv(read_text_file(train_path));
      const TableCorrector model = cmd_train->parsed()
                                       ? train_table_corrector(pairs, max_piece_len)
                                       : train_error_generator(pairs, max_piece_len);
      write_text_file(out_path, model.serialize());
      write_manifest(out_path, cmd_train->parsed() ? "train-corrector" : "train-generator",
                     {{"train", train_path},
                      {"pairs", pairs.size()},
                      {"max_piece_len", max_piece_len}});
      return 0;
    }

    if (cmd_tagger->parsed()) {
      const auto pairs = parse_parallel_tsv(read_text_file(train_path));
      const TableTagger tagger = train_tagger(pairs);
      write_text_file(out_path, tagger.serialize());
      write_manifest(out_path, "train-tagger", {{"train", train_path}, {"pairs", pairs.size()}});
      return 0;
    }

    if (cmd_correct->parsed()) {
      const TableCorrector model = TableCorrector::deserialize(read_text_file(model_path));
      const std::vector<TokenSeq> inputs = load_input_sentences(input_path);
      std::vector<TokenSeq> outputs(inputs.size());
      parallel_for(inputs.size(), resolve_jobs(jobs), [&](std::size_t i) {
        outputs[i] = model.beam(inputs[i], beam_width).front().tokens;
      });
      std::string text;
      for (const TokenSeq& tokens : outputs) text += join(tokens) + "\n";
      write_text_file(out_path, text);
      write_manifest(out_path, "correct",
                     {{"model", model_path}, {"input", input_path}, {"beam", beam_width}});
      return 0;
    }

    if (cmd_attack->parsed()) {
      AttackConfig cfg;
      cfg.method = attack_method_from_string(method_tag);
      cfg.zeta = zeta;
      cfg.delta_min_similarity = 1.0 - zeta;
      cfg.beam = beam_width;
      cfg.beta_random = beta_random;

      std::optional<TableCorrector> model;
      std::optional<TableTagger> tagger;
      std::optional<ConfusionMapping> mapping;
      std::optional<Lexicon> lexicon;
      if (!model_path.empty()) {
        model = TableCorrector::deserialize(read_text_file(model_path));
      }
      if (!tagger_path.empty()) {
        tagger = TableTagger::deserialize(read_text_file(tagger_path));
      }
      if (!mapping_path.empty()) {
        mapping = ConfusionMapping::deserialize(read_text_file(mapping_path));
      }
      if (!lexicon_path.empty()) lexicon = Lexicon::load_file(lexicon_path);

      AttackResources resources;
      if (model) resources.model = &*model;
      if (tagger) resources.tagger = &*tagger;
      if (mapping) resources.mapping = &*mapping;
      if (lexicon) resources.lexicon = &*lexicon;

      const std::vector<TokenSeq> sentences = load_input_sentences(input_path);
      const AttackCorpus corpus =
          generate_attack_corpus(sentences, resources, cfg, seed, resolve_jobs(jobs));
      write_text_file(out_path, serialize_attack_corpus(corpus));
      write_manifest(out_path, "gen-attack",
                     {{"method", method_tag},
                      {"input", input_path},
                      {"model", model_path},
                      {"tagger", tagger_path},
                      {"mapping", mapping_path},
                      {"lexicon", lexicon_path},
                      {"zeta", zeta},
                      {"beta_random", beta_random},
                      {"beam", beam_width},
                      {"seed", seed}});
      std::printf("attacked %zu sentences\n", corpus.entries.size());
      return 0;
    }

    if (cmd_atkn->parsed()) {
      AttackConfig cfg;
      cfg.zeta = zeta;
      cfg.delta_min_similarity = 1.0 - zeta;
      cfg.beam = beam_width;
      const TableCorrector model = TableCorrector::deserialize(read_text_file(model_path));
      const ConfusionMapping mapping =
          ConfusionMapping::deserialize(read_text_file(mapping_path));
      const std::vector<TokenSeq> sentences = load_input_sentences(input_path);
      const AttackCorpus corpus =
          build_fixed_attack_set(sentences, model, mapping, atk_n, cfg, seed);
      write_text_file(out_path, serialize_attack_corpus(corpus));
      write_manifest(out_path, "gen-atk-n",
                     {{"n", atk_n},
                      {"input", input_path},
                      {"model", model_path},
                      {"mapping", mapping_path},
                      {"zeta", zeta},
                      {"beam", beam_width},
                      {"seed", seed}});
      std::printf("built ATK_%d with %zu entries\n", atk_n, corpus.entries.size());
      return 0;
    }

    if (cmd_eval->parsed()) return run_evaluate(eval);

    if (cmd_csa->parsed()) {
      csa_cfg.variant = augment_variant_from_string(variant_tag);
      const TableCorrector model = TableCorrector::deserialize(read_text_file(model_path));
      const auto train = parse_parallel_tsv(read_text_file(train_path));
      const auto tune = parse_parallel_tsv(read_text_file(tune_path));
      const auto dev_pairs = parse_parallel_tsv(read_text_file(dev_path));
      std::vector<TokenSeq> dev_inputs;
      for (const SentencePair& pair : dev_pairs) dev_inputs.push_back(pair.source);
      const AnnotatedCorpus dev_gold = annotated_from_pairs(dev_pairs);

      fs::create_directories(out_dir);
      const SnapshotSink sink = [&](int k, const TableCorrector& snapshot) {
        const std::string name = "cycle_" + std::to_string(k) + ".model.json";
        write_text_file((fs::path(out_dir) / name).string(), snapshot.serialize());
        return name;
      };
      const CsaResult result =
          run_csa(model, train, tune, dev_inputs, dev_gold, csa_cfg, sink);

      for (const AugmentingSet& set : result.aug_sets) {
        const std::string name = "aug_" + std::to_string(set.cycle_index) + ".json";
        write_text_file((fs::path(out_dir) / name).string(), augset_to_json(set));
      }
      write_text_file((fs::path(out_dir) / "best.model.json").string(),
                      result.model.serialize());

      ordered_json manifest;
      manifest["config"] = {{"model", model_path},
                            {"train", train_path},
                            {"tune", tune_path},
                            {"dev", dev_path},
                            {"patience", csa_cfg.patience},
                            {"max_cycles", csa_cfg.max_cycles},
                            {"variant", variant_tag},
                            {"reserving_rate", csa_cfg.reserving_rate},
                            {"convergence_tol", csa_cfg.convergence_tol},
                            {"seed", csa_cfg.seed}};
      manifest["initial_dev"] = scores_to_json(result.initial_dev);
      manifest["cycles"] = ordered_json::array();
      double best_f = result.initial_dev.f;
      for (const CycleState& state : result.history) {
        best_f = std::max(best_f, state.dev.f);
        manifest["cycles"].push_back({{"k", state.k},
                                      {"stage", state.stage},
                                      {"aug_size", state.aug_size},
                                      {"reg_size", state.reg_size},
                                      {"dev_p", state.dev.precision},
                                      {"dev_r", state.dev.recall},
                                      {"dev_f", state.dev.f},
                                      {"snapshot", state.snapshot_ref}});
      }
      write_text_file((fs::path(out_dir) / "manifest.json").string(),
                      manifest.dump(2) + "\n");
      std::printf("best dev F0.5: %s (initial %s), %zu cycles\n", percent1(best_f).c_str(),
                  percent1(result.initial_dev.f).c_str(), result.history.size());
      return 0;
    }

    if (cmd_regex->parsed()) {
      std::vector<AugmentingSet> history;
      for (const std::string& path : aug_paths) history.push_back(augset_from_file(path));
      for (std::size_t i = 1; i < history.size(); ++i) {
        if (history[i].cycle_index != history[i - 1].cycle_index + 1) {
          throw ConfigError("augmenting sets must come from consecutive cycles");
        }
      }
      const RegularizationSet reg = regularization_set(history);
      write_text_file(out_path, regset_to_json(reg));
      write_manifest(out_path, "reg-extract", {{"aug", aug_paths}});
      std::printf("regularization pairs: %zu\n", reg.pairs.size());
      return 0;
    }

    if (cmd_regdec->parsed()) {
      std::vector<RegularizationSet> history;
      for (const std::string& path : reg_paths) history.push_back(regset_from_file(path));
      const Decomposition decomposition = decompose(history);
      ordered_json doc;
      doc["version"] = 1;
      doc["x_unl"] = pairs_to_json(decomposition.x_unl);
      doc["x_unc"] = pairs_to_json(decomposition.x_unc);
      write_text_file(out_path, doc.dump(2) + "\n");
      write_manifest(out_path, "reg-decompose", {{"reg", reg_paths}});
      std::printf("x_unl: %zu, x_unc: %zu\n", decomposition.x_unl.size(),
                  decomposition.x_unc.size());
      return 0;
    }

    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
}
