// End-to-end checks of the gecrb binary: exit codes, byte-stable outputs,
// golden attack files. Plain main, prints one line per check.
//
// argv: cli_tests <gecrb-binary> <data-dir> <golden-dir>
// Set GECRB_RECORD_GOLDEN=1 to (re)record the golden files instead of
// comparing against them.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
  std::printf("%s %s\n", ok ? "ok  " : "FAIL", what.c_str());
  if (!ok) ++g_failures;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spit(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

RunResult run(const std::string& cmd, const fs::path& capture) {
  const std::string full = cmd + " > " + capture.string() + " 2>&1";
  const int status = std::system(full.c_str());
  RunResult result;
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  result.out = slurp(capture);
  return result;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 4) {
    std::fprintf(stderr, "usage: cli_tests <gecrb> <data-dir> <golden-dir>\n");
    return 2;
  }
  const std::string gecrb = argv[1];
  const fs::path data_dir = argv[2];
  const fs::path golden_dir = argv[3];
  const bool record = std::getenv("GECRB_RECORD_GOLDEN") != nullptr;

  const fs::path work = fs::temp_directory_path() /
                        ("gecrb_cli_test_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);
  const fs::path log = work / "run.log";

  const std::string train_tsv = (data_dir / "synthetic/train.tsv").string();
  const std::string dev_tsv = (data_dir / "synthetic/dev.tsv").string();
  const std::string lexicon = (data_dir / "synthetic/lexicon.tsv").string();

  auto compare_golden = [&](const fs::path& produced, const std::string& name) {
    const fs::path golden = golden_dir / name;
    if (record) {
      fs::create_directories(golden_dir);
      spit(golden, slurp(produced));
      check(true, "recorded golden " + name);
      return;
    }
    check(fs::exists(golden), "golden file exists: " + name);
    if (fs::exists(golden)) {
      check(slurp(produced) == slurp(golden), "matches golden " + name);
    }
  };

  // --- build-confusion ------------------------------------------------
  {
    const fs::path tiny = work / "tiny.tsv";
    spit(tiny, "I thank you about my normal day\tI thank you for my normal day\n");
    const fs::path mapping = work / "tiny.mapping.json";
    RunResult r = run(gecrb + " build-confusion --tsv " + tiny.string() + " --out " +
                          mapping.string(),
                      log);
    check(r.exit_code == 0, "build-confusion exits 0");
    check(contains(slurp(mapping), "about"), "mapping contains the harvested piece");
    check(fs::exists(mapping.string() + ".manifest.json"), "manifest written");

    const fs::path empty_map = work / "empty.mapping.json";
    r = run(gecrb + " build-confusion --out " + empty_map.string(), log);
    check(r.exit_code == 0, "build-confusion with no inputs exits 0");
    check(contains(slurp(empty_map), "\"entries\": []"), "empty mapping document");

    const fs::path bad_m2 = work / "bad.m2";
    spit(bad_m2, "S a b\nA zero 1|||T|||x|||REQUIRED|||-NONE-|||0\n");
    r = run(gecrb + " build-confusion --m2 " + bad_m2.string() + " --out " +
                (work / "bad.json").string(),
            log);
    check(r.exit_code == 2, "malformed M2 exits 2");
    check(contains(r.out, "line 2"), "error message names the line");
  }

  // --- training -------------------------------------------------------
  const fs::path model = work / "model.json";
  const fs::path tune_model = work / "tune_model.json";
  const fs::path generator = work / "generator.json";
  const fs::path mapping = work / "mapping.json";
  {
    RunResult r = run(gecrb + " train-corrector --train " + train_tsv + " --out " +
                          model.string(),
                      log);
    check(r.exit_code == 0, "train-corrector exits 0");
    r = run(gecrb + " train-corrector --train " +
                (data_dir / "synthetic/tune.tsv").string() + " --out " +
                tune_model.string(),
            log);
    check(r.exit_code == 0, "train-corrector (tune) exits 0");
    r = run(gecrb + " train-generator --train " + train_tsv + " --out " +
                generator.string(),
            log);
    check(r.exit_code == 0, "train-generator exits 0");
    r = run(gecrb + " train-tagger --train " + train_tsv + " --out " +
                (work / "tagger.json").string(),
            log);
    check(r.exit_code == 0, "train-tagger exits 0");
    r = run(gecrb + " build-confusion --tsv " + train_tsv + " --out " + mapping.string(),
            log);
    check(r.exit_code == 0, "build-confusion over the corpus exits 0");
  }

  // --- correct ----------------------------------------------------------
  const fs::path corrected = work / "dev.corrected.txt";
  {
    RunResult r = run(gecrb + " correct --model " + model.string() + " --input " +
                          dev_tsv + " --out " + corrected.string(),
                      log);
    check(r.exit_code == 0, "correct exits 0");
    std::istringstream lines(slurp(corrected));
    std::size_t count = 0;
    std::string line;
    while (std::getline(lines, line)) ++count;
    check(count == 100, "one corrected line per dev sentence");
  }

  // --- gen-attack -------------------------------------------------------
  const fs::path attack_map = work / "attack.mapping-rules.json";
  {
    const std::string cmd = gecrb + " gen-attack --method mapping-rules --model " +
                            model.string() + " --mapping " + mapping.string() +
                            " --input " + dev_tsv + " --seed 7 --out ";
    RunResult r = run(cmd + attack_map.string(), log);
    check(r.exit_code == 0, "gen-attack mapping-rules exits 0");
    const fs::path again = work / "attack.rerun.json";
    run(cmd + again.string(), log);
    check(slurp(attack_map) == slurp(again), "gen-attack rerun is byte-identical");
    compare_golden(attack_map, "attack_mapping_rules_seed7.json");

    r = run(gecrb + " gen-attack --method synonym --model " + model.string() +
                " --input " + dev_tsv + " --seed 7 --out " + (work / "x.json").string(),
            log);
    check(r.exit_code == 2, "synonym without --lexicon exits 2");

    const fs::path syn = work / "attack.synonym.json";
    r = run(gecrb + " gen-attack --method synonym --model " + model.string() +
                " --lexicon " + lexicon + " --input " + dev_tsv + " --seed 9 --out " +
                syn.string(),
            log);
    check(r.exit_code == 0, "gen-attack synonym exits 0");
    compare_golden(syn, "attack_synonym_seed9.json");

    // GECRB_JOBS must not change the bytes.
    const fs::path jobs4 = work / "attack.jobs4.json";
    r = run("GECRB_JOBS=4 " + cmd + jobs4.string(), log);
    check(r.exit_code == 0, "gen-attack under GECRB_JOBS=4 exits 0");
    check(slurp(attack_map) == slurp(jobs4), "GECRB_JOBS does not change the output");

    // Seq2Edits detection path: tagger instead of corrector.
    const fs::path tagged = work / "attack.tagger.json";
    r = run(gecrb + " gen-attack --method mapping-rules --tagger " +
                (work / "tagger.json").string() + " --mapping " + mapping.string() +
                " --input " + dev_tsv + " --seed 7 --out " + tagged.string(),
            log);
    check(r.exit_code == 0, "gen-attack with --tagger exits 0");
  }

  // --- backtranslate with an identity generator and beta 0 ---------------
  {
    const fs::path identity_tsv = work / "identity.tsv";
    std::string text;
    for (int i = 0; i < 5; ++i) {
      text += "sample line number " + std::to_string(i) + "\tsample line number " +
              std::to_string(i) + "\n";
    }
    spit(identity_tsv, text);
    const fs::path idgen = work / "idgen.json";
    run(gecrb + " train-generator --train " + identity_tsv.string() + " --out " +
            idgen.string(),
        log);
    const fs::path bt = work / "attack.bt.json";
    RunResult r = run(gecrb + " gen-attack --method backtranslate --model " +
                          idgen.string() + " --beta-random 0 --input " +
                          identity_tsv.string() + " --seed 3 --out " + bt.string(),
                      log);
    check(r.exit_code == 0, "gen-attack backtranslate exits 0");
    const std::string doc = slurp(bt);
    check(contains(doc, "\"positions\": []"), "identity generator attacks nothing");
    check(!contains(doc, "\"positions\": [0"), "no position recorded anywhere");
  }

  // --- gen-atk-n ----------------------------------------------------------
  const fs::path atk2 = work / "atk2.json";
  {
    const std::string cmd = gecrb + " gen-atk-n --n 2 --model " + tune_model.string() +
                            " --mapping " + mapping.string() + " --input " + dev_tsv +
                            " --seed 5 --out ";
    RunResult r = run(cmd + atk2.string(), log);
    check(r.exit_code == 0, "gen-atk-n exits 0");
    const fs::path again = work / "atk2.rerun.json";
    run(cmd + again.string(), log);
    check(slurp(atk2) == slurp(again), "gen-atk-n rerun is byte-identical");
    compare_golden(atk2, "atk2_seed5.json");
  }

  // --- evaluate -----------------------------------------------------------
  {
    // Perfect system against its own gold: derive an M2 file via the corpus
    // itself (single annotator), system = target side.
    const fs::path gold_m2 = work / "gold.m2";
    spit(gold_m2,
         "S I thank you about my normal day\n"
         "A 3 4|||Prep|||for|||REQUIRED|||-NONE-|||0\n");
    const fs::path perfect = work / "perfect.txt";
    spit(perfect, "I thank you for my normal day\n");
    RunResult r = run(gecrb + " evaluate --metric m2 --system " + perfect.string() +
                          " --gold " + gold_m2.string() + " --report " +
                          (work / "m2.report.json").string(),
                      log);
    check(r.exit_code == 0, "evaluate m2 exits 0");
    check(contains(r.out, "100.0  100.0  100.0"), "perfect system prints 100.0 triple");

    r = run(gecrb + " evaluate --metric m2 --system " + corrected.string() + " --gold " +
                gold_m2.string(),
            log);
    check(r.exit_code == 2, "corpus size mismatch exits 2");

    // #IPS paper row.
    RunResult rr = run(gecrb + " evaluate --metric ips --n-sentences 659775 "
                               "--score-t 61.8 --score-i 50.1",
                       log);
    check(rr.exit_code == 0, "evaluate ips exits 0");
    check(contains(rr.out, "5639.1"), "ips prints 5639.1");
    check(contains(rr.out, "rounding"), "ips prints the rounding note");

    // Recovery on an ATK_1 corpus prints equal TR and SR.
    const fs::path atk1 = work / "atk1.json";
    run(gecrb + " gen-atk-n --n 1 --model " + tune_model.string() + " --mapping " +
            mapping.string() + " --input " + dev_tsv + " --seed 6 --out " + atk1.string(),
        log);
    // System = gold targets: everything recovers, TR == SR == 100.
    const fs::path dev_targets = work / "dev.targets.txt";
    {
      std::string targets;
      std::istringstream in(slurp(fs::path(dev_tsv)));
      std::string line;
      while (std::getline(in, line)) {
        const auto tab = line.find('\t');
        if (tab != std::string::npos) targets += line.substr(tab + 1) + "\n";
      }
      spit(dev_targets, targets);
    }
    r = run(gecrb + " evaluate --metric recovery --attack " + atk1.string() +
                " --system " + dev_targets.string() + " --gold " + dev_tsv + " --report " +
                (work / "recovery.report.json").string(),
            log);
    check(r.exit_code == 0, "evaluate recovery exits 0");
    check(contains(r.out, "100.0  100.0"), "ATK_1 TR and SR print equal");

    // Full Alg.-2 pipeline: correct the attacked sentences, then measure
    // recovery of the real model output.
    const fs::path atk1_sys = work / "atk1.system.txt";
    r = run(gecrb + " correct --model " + model.string() + " --input " + atk1.string() +
                " --out " + atk1_sys.string(),
            log);
    check(r.exit_code == 0, "correct over an attack corpus exits 0");
    r = run(gecrb + " evaluate --metric recovery --attack " + atk1.string() +
                " --system " + atk1_sys.string() + " --gold " + dev_tsv,
            log);
    check(r.exit_code == 0, "recovery over model output exits 0");
    check(contains(r.out, "TR(%)"), "recovery prints the TR/SR table");

    // GLEU with system == reference scores 100.0.
    r = run(gecrb + " evaluate --metric gleu --system " + dev_targets.string() +
                " --source " + corrected.string() + " --refs " + dev_targets.string(),
            log);
    check(r.exit_code == 0, "evaluate gleu exits 0");
    check(contains(r.out, "GLEU  100.0"), "gleu prints 100.0 for a perfect system");

    // Op-tier table over the single-edit gold.
    r = run(gecrb + " evaluate --metric op-tier --system " + perfect.string() +
                " --gold " + gold_m2.string(),
            log);
    check(r.exit_code == 0, "evaluate op-tier exits 0");
    check(contains(r.out, "replacement"), "op-tier prints the tier rows");
  }

  // --- csa ------------------------------------------------------------------
  {
    const fs::path run_a = work / "csa_run_a";
    const fs::path run_b = work / "csa_run_b";
    const std::string base = gecrb + " csa --model " + tune_model.string() + " --train " +
                             train_tsv + " --tune " +
                             (data_dir / "synthetic/tune.tsv").string() + " --dev " +
                             dev_tsv + " --seed 11 --out-dir ";
    RunResult r = run(base + run_a.string(), log);
    check(r.exit_code == 0, "csa exits 0");
    check(contains(r.out, "best dev F0.5"), "csa prints the summary line");
    check(fs::exists(run_a / "manifest.json"), "csa writes a manifest");
    check(fs::exists(run_a / "best.model.json"), "csa writes the best snapshot");
    run(base + run_b.string(), log);
    check(slurp(run_a / "manifest.json") == slurp(run_b / "manifest.json"),
          "csa reruns produce byte-identical manifests");

    const fs::path zero_dir = work / "csa_zero";
    r = run(base + zero_dir.string() + " --max-cycles 0", log);
    check(r.exit_code == 0, "csa --max-cycles 0 exits 0");
    check(contains(slurp(zero_dir / "manifest.json"), "\"cycles\": []"),
          "zero-cycle run records an empty history");
    check(slurp(zero_dir / "best.model.json") == slurp(tune_model),
          "zero-cycle run copies the input model");

    r = run(gecrb + " csa --model " + tune_model.string() + " --train " + train_tsv +
                " --tune " + (work / "missing.tsv").string() + " --dev " + dev_tsv +
                " --out-dir " + (work / "csa_x").string(),
            log);
    check(r.exit_code == 2, "csa without a readable tune set exits 2");

    // reg-extract / reg-decompose over the run's augmenting sets.
    if (fs::exists(run_a / "aug_2.json") && fs::exists(run_a / "aug_3.json")) {
      const fs::path reg = work / "reg.json";
      r = run(gecrb + " reg-extract --aug " + (run_a / "aug_2.json").string() +
                  " --aug " + (run_a / "aug_3.json").string() + " --out " + reg.string(),
              log);
      check(r.exit_code == 0, "reg-extract exits 0");
      r = run(gecrb + " reg-decompose --reg " + reg.string() + " --out " +
                  (work / "decomp.json").string(),
              log);
      check(r.exit_code == 0, "reg-decompose exits 0");
      check(contains(slurp(work / "decomp.json"), "x_unl"), "decomposition document");
    } else {
      check(fs::exists(run_a / "aug_1.json"), "csa persisted augmenting sets");
      const fs::path reg = work / "reg.json";
      r = run(gecrb + " reg-extract --aug " + (run_a / "aug_1.json").string() + " --out " +
                  reg.string(),
              log);
      check(r.exit_code == 0, "reg-extract (p=1) exits 0");
    }
  }

  // --- exit code sanity -------------------------------------------------
  {
    RunResult r = run(gecrb + " no-such-command", log);
    check(r.exit_code == 2, "unknown subcommand exits 2");
    r = run(gecrb + " evaluate --metric nope --system x --gold y", log);
    check(r.exit_code == 2, "unknown metric exits 2");
  }

  if (g_failures == 0) fs::remove_all(work);
  std::printf("%s (%d failures)\n", g_failures == 0 ? "ALL OK" : "FAILED", g_failures);
  return g_failures == 0 ? 0 : 1;
}
