#include "cli.h"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "framecrf/corpus.h"
#include "framecrf/error.h"
#include "framecrf/eval.h"
#include "framecrf/experiments.h"
#include "framecrf/features.h"
#include "framecrf/lexicon.h"
#include "framecrf/pipeline.h"
#include "json.hpp"
#include "synth.h"

namespace framecrf::tools {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

// Flags, seeds and input hashes of one invocation, written next to its
// outputs so a run can be repeated exactly.
struct RunConfig {
  std::string command;
  json flags = json::object();
  json inputs = json::object();

  void input(const std::string& role, const fs::path& path) {
    inputs[role] = {{"path", path.string()}, {"fnv1a", fnv1a_hex(slurp(path))}};
  }
  void input_dir(const std::string& role, const fs::path& dir) {
    input(role, dir / "registry.json");
  }
  std::string dump() const {
    return json{{"command", command}, {"flags", flags}, {"inputs", inputs}}.dump(2) + "\n";
  }
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct TrainFlags {
  double l2 = TrainOptions{}.l2;
  int max_iter = TrainOptions{}.max_iter;
  double tol = TrainOptions{}.tol;
  std::uint64_t seed = kDefaultSeed;
  std::string features = "lemma,parent_lemma,pos,lin_dist,dep_path";
  std::string window = "-1,0,1";
  int clip_distance = FeatureConfig{}.clip_distance;
  int max_path_len = FeatureConfig{}.max_path_len;
  int jobs = 1;

  void attach(CLI::App* app) {
    app->add_option("--l2", l2, "L2 regularization strength")->capture_default_str();
    app->add_option("--max-iter", max_iter, "L-BFGS iteration cap")->capture_default_str();
    app->add_option("--tol", tol, "gradient infinity-norm tolerance")->capture_default_str();
    app->add_option("--seed", seed, "random seed")->capture_default_str();
    app->add_option("--features", features, "comma-separated feature families")
        ->capture_default_str();
    app->add_option("--window", window, "comma-separated window offsets, e.g. --window=-1,0,1")
        ->capture_default_str();
    app->add_option("--clip-distance", clip_distance, "linear distance clip (0 disables)")
        ->capture_default_str();
    app->add_option("--max-path-len", max_path_len, "dependency path edges kept")
        ->capture_default_str();
    attach_jobs(app);
  }
  void attach_jobs(CLI::App* app) {
    app->add_option("--jobs", jobs, "worker threads")->capture_default_str()->check(
        CLI::PositiveNumber);
  }

  FeatureConfig feature_config() const {
    FeatureConfig config = FeatureConfig::from_family_names(split_list(features));
    config.window.clear();
    for (const auto& w : split_list(window)) {
      try {
        std::size_t used = 0;
        config.window.push_back(std::stoi(w, &used));
        if (used != w.size()) throw std::invalid_argument(w);
      } catch (const std::logic_error&) {
        throw ConfigError("bad window offset: " + w);
      }
    }
    config.clip_distance = clip_distance;
    config.max_path_len = max_path_len;
    config.check();
    return config;
  }
  TrainOptions train_options() const {
    if (!(l2 >= 0.0)) throw ConfigError("--l2 must be non-negative");
    if (max_iter < 0) throw ConfigError("--max-iter must be non-negative");
    if (!(tol > 0.0)) throw ConfigError("--tol must be positive");
    TrainOptions o;
    o.l2 = l2;
    o.max_iter = max_iter;
    o.tol = tol;
    o.seed = seed;
    return o;
  }
  ExperimentOptions experiment(Cascade cascade) const {
    return {feature_config(), train_options(), cascade, jobs};
  }
  void record(RunConfig& rc) const {
    rc.flags["l2"] = l2;
    rc.flags["max_iter"] = max_iter;
    rc.flags["tol"] = tol;
    rc.flags["seed"] = seed;
    rc.flags["feature_config"] = json::parse(feature_config_to_json(feature_config()));
    rc.flags["jobs"] = jobs;
  }
};

const std::map<std::string, Cascade> kCascades = {{"strict", Cascade::kStrict},
                                                   {"lenient", Cascade::kLenient}};

Corpus load_checked(const fs::path& corpus_path, const FrameLexicon* lexicon) {
  Corpus corpus = parse_corpus(corpus_path);
  validate_corpus(corpus);
  if (lexicon) validate_against_lexicon(corpus, *lexicon);
  return corpus;
}

FoldPlan resolve_folds(const Corpus& corpus, const std::string& folds_path, int k,
                       std::uint64_t seed, RunConfig& rc) {
  if (folds_path.empty()) return make_folds(corpus, k, seed);
  rc.input("folds", folds_path);
  FoldPlan plan = fold_plan_from_json(slurp(folds_path));
  check_fold_plan(plan, corpus);
  return plan;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frame-semantic parsing with one linear-chain CRF per lexical unit"};
  app.name(args.empty() ? "framecrf" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);

  // validate
  auto* validate = app.add_subcommand("validate", "check a corpus (and lexicon)");
  std::string v_corpus, v_lexicon;
  validate->add_option("--corpus", v_corpus, "JSON-lines corpus")->required()->check(CLI::ExistingFile);
  validate->add_option("--lexicon", v_lexicon, "lexicon JSON")->check(CLI::ExistingFile);

  // train
  auto* train = app.add_subcommand("train", "train one CRF per lexical unit");
  std::string t_corpus, t_lexicon, t_out;
  TrainFlags t_flags;
  train->add_option("--corpus", t_corpus)->required()->check(CLI::ExistingFile);
  train->add_option("--lexicon", t_lexicon)->required()->check(CLI::ExistingFile);
  train->add_option("--out-dir", t_out, "model directory")->envname(kModelDirEnv);
  t_flags.attach(train);

  // predict
  auto* predict = app.add_subcommand("predict", "label a corpus with trained models");
  std::string p_models, p_corpus, p_out;
  int p_jobs = 1;
  predict->add_option("--models", p_models, "model directory")->envname(kModelDirEnv);
  predict->add_option("--corpus", p_corpus)->required()->check(CLI::ExistingFile);
  predict->add_option("--out", p_out, "predicted corpus (JSON lines)")->required();
  predict->add_option("--jobs", p_jobs)->capture_default_str()->check(CLI::PositiveNumber);

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "score predictions against gold");
  std::string e_gold, e_pred, e_lexicon, e_questions, e_report = "text", e_cascade = "strict",
                                                      e_out;
  int e_bins = 10;
  evaluate_cmd->add_option("--gold", e_gold)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--pred", e_pred)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--lexicon", e_lexicon)->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--questions", e_questions, "frame/fe -> question TSV")
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--report", e_report)->capture_default_str()->check(
      CLI::IsMember({"json", "text"}));
  evaluate_cmd->add_option("--cascade", e_cascade)->capture_default_str()->check(
      CLI::IsMember({"strict", "lenient"}));
  evaluate_cmd->add_option("--length-bins", e_bins)->capture_default_str()->check(
      CLI::PositiveNumber);
  evaluate_cmd->add_option("--out", e_out, "write the report here instead of stdout");

  // folds
  auto* folds = app.add_subcommand("folds", "document-level k-fold plan");
  std::string f_corpus, f_out;
  int f_k = 5;
  std::uint64_t f_seed = kDefaultSeed;
  folds->add_option("--corpus", f_corpus)->required()->check(CLI::ExistingFile);
  folds->add_option("--k", f_k)->capture_default_str();
  folds->add_option("--seed", f_seed)->capture_default_str();
  folds->add_option("--out", f_out, "fold plan JSON (stdout if omitted)");

  // crossval / ablate share the fold flags
  auto add_fold_flags = [](CLI::App* cmd, std::string& corpus, std::string& lexicon,
                           std::string& plan, int& k, std::string& out_dir, std::string& cascade) {
    cmd->add_option("--corpus", corpus)->required()->check(CLI::ExistingFile);
    cmd->add_option("--lexicon", lexicon)->required()->check(CLI::ExistingFile);
    cmd->add_option("--folds", plan, "fold plan JSON (made from --k/--seed if omitted)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--k", k)->capture_default_str();
    cmd->add_option("--out-dir", out_dir, "run directory")->required();
    cmd->add_option("--cascade", cascade)->capture_default_str()->check(
        CLI::IsMember({"strict", "lenient"}));
  };

  auto* crossval = app.add_subcommand("crossval", "k-fold train/evaluate at all four levels");
  std::string c_corpus, c_lexicon, c_plan, c_out, c_cascade = "strict";
  int c_k = 5;
  TrainFlags c_flags;
  add_fold_flags(crossval, c_corpus, c_lexicon, c_plan, c_k, c_out, c_cascade);
  c_flags.attach(crossval);

  auto* ablate = app.add_subcommand("ablate", "feature-family ablation over k folds");
  std::string a_corpus, a_lexicon, a_plan, a_out, a_cascade = "strict", a_rows;
  int a_k = 5;
  TrainFlags a_flags;
  add_fold_flags(ablate, a_corpus, a_lexicon, a_plan, a_k, a_out, a_cascade);
  ablate->add_option("--rows", a_rows, "comma-separated subset of rows (default: all)");
  a_flags.attach(ablate);

  auto* compose = app.add_subcommand("compose", "training-composition experiment");
  std::string m_corpus, m_lexicon, m_spec, m_out, m_cascade = "strict";
  TrainFlags m_flags;
  compose->add_option("--corpus", m_corpus)->required()->check(CLI::ExistingFile);
  compose->add_option("--lexicon", m_lexicon)->required()->check(CLI::ExistingFile);
  compose->add_option("--spec", m_spec, "composition spec JSON")->required()->check(
      CLI::ExistingFile);
  compose->add_option("--out-dir", m_out, "run directory")->required();
  compose->add_option("--cascade", m_cascade)->capture_default_str()->check(
      CLI::IsMember({"strict", "lenient"}));
  m_flags.attach(compose);

  auto* synth = app.add_subcommand("synth", "generate the synthetic two-source corpus");
  int s_sentences = 2000;
  std::uint64_t s_seed = kDefaultSeed;
  std::string s_out;
  synth->add_option("--sentences", s_sentences)->capture_default_str();
  synth->add_option("--seed", s_seed)->capture_default_str();
  synth->add_option("--out", s_out, "output directory")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  if (args.empty()) argv.push_back("framecrf");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitUsage;
  }

  try {
    if (validate->parsed()) {
      std::optional<FrameLexicon> lexicon;
      if (!v_lexicon.empty()) lexicon = parse_lexicon(v_lexicon);
      Corpus corpus = load_checked(v_corpus, lexicon ? &*lexicon : nullptr);
      out << "ok: " << corpus.documents.size() << " documents, " << corpus.sentence_count()
          << " sentences, " << corpus.instance_count() << " frame instances\n";
      return kExitOk;
    }

    if (train->parsed()) {
      if (t_out.empty()) {
        throw ConfigError(std::string("--out-dir is required (or set ") + kModelDirEnv + ")");
      }
      RunConfig rc{"train"};
      t_flags.record(rc);
      rc.input("corpus", t_corpus);
      rc.input("lexicon", t_lexicon);
      const FrameLexicon lexicon = parse_lexicon(t_lexicon);
      const Corpus corpus = load_checked(t_corpus, &lexicon);
      TrainReport report;
      ModelRegistry registry = train_all(corpus, lexicon, t_flags.feature_config(),
                                         t_flags.train_options(), t_flags.jobs, &report);
      for (const auto& w : report.warnings) err << "warning: " << w << "\n";
      save_registry(registry, t_out);
      emit(fs::path(t_out) / "run_config.json", rc.dump());
      for (const auto& [lu, model] : registry.models) {
        if (!model.training.converged) {
          err << "warning: " << lu << " stopped after " << model.training.iterations
              << " iterations without converging\n";
        }
      }
      out << "trained " << registry.models.size() << " models into " << t_out << "\n";
      return kExitOk;
    }

    if (predict->parsed()) {
      if (p_models.empty()) {
        throw ConfigError(std::string("--models is required (or set ") + kModelDirEnv + ")");
      }
      RunConfig rc{"predict"};
      rc.flags["jobs"] = p_jobs;
      rc.input_dir("models", p_models);
      rc.input("corpus", p_corpus);
      const ModelRegistry registry = load_registry(p_models);
      const Corpus corpus = load_checked(p_corpus, nullptr);
      const auto diagnostics = predict_corpus_to_file(corpus, registry, p_out, p_jobs);
      emit(p_out + ".run.json", rc.dump());
      out << diagnostics_to_json(diagnostics) << "\n";
      return kExitOk;
    }

    if (evaluate_cmd->parsed()) {
      const Corpus gold = load_checked(e_gold, nullptr);
      const Corpus pred = load_checked(e_pred, nullptr);
      if (!e_lexicon.empty()) {
        const FrameLexicon lexicon = parse_lexicon(e_lexicon);
        validate_against_lexicon(gold, lexicon);
        validate_against_lexicon(pred, lexicon);
      }
      std::optional<QuestionMap> questions;
      if (!e_questions.empty()) questions = parse_question_map(e_questions);
      EvalReport report = evaluate(gold, pred, kCascades.at(e_cascade),
                                   questions ? &*questions : nullptr, e_bins);
      const std::string text = e_report == "json" ? report_to_json(report) : report_to_text(report);
      if (e_out.empty()) {
        out << text;
      } else {
        emit(e_out, text);
      }
      return kExitOk;
    }

    if (folds->parsed()) {
      const Corpus corpus = load_checked(f_corpus, nullptr);
      const std::string text = fold_plan_to_json(make_folds(corpus, f_k, f_seed));
      if (f_out.empty()) {
        out << text;
      } else {
        emit(f_out, text);
      }
      return kExitOk;
    }

    if (crossval->parsed()) {
      RunConfig rc{"crossval"};
      c_flags.record(rc);
      rc.flags["k"] = c_k;
      rc.flags["cascade"] = c_cascade;
      rc.input("corpus", c_corpus);
      rc.input("lexicon", c_lexicon);
      const FrameLexicon lexicon = parse_lexicon(c_lexicon);
      const Corpus corpus = load_checked(c_corpus, &lexicon);
      const FoldPlan plan = resolve_folds(corpus, c_plan, c_k, c_flags.seed, rc);
      const auto result =
          run_crossval(corpus, lexicon, plan, c_flags.experiment(kCascades.at(c_cascade)));
      const fs::path dir = c_out;
      emit(dir / "folds.json", fold_plan_to_json(plan));
      emit(dir / "results.json", crossval_to_json(result));
      emit(dir / "results.txt", crossval_to_text(result));
      emit(dir / "run_config.json", rc.dump());
      out << crossval_to_text(result);
      return kExitOk;
    }

    if (ablate->parsed()) {
      RunConfig rc{"ablate"};
      a_flags.record(rc);
      rc.flags["k"] = a_k;
      rc.flags["cascade"] = a_cascade;
      rc.flags["rows"] = split_list(a_rows);
      rc.input("corpus", a_corpus);
      rc.input("lexicon", a_lexicon);
      const FrameLexicon lexicon = parse_lexicon(a_lexicon);
      const Corpus corpus = load_checked(a_corpus, &lexicon);
      const FoldPlan plan = resolve_folds(corpus, a_plan, a_k, a_flags.seed, rc);
      const auto rows = run_ablation(corpus, lexicon, plan,
                                     a_flags.experiment(kCascades.at(a_cascade)),
                                     split_list(a_rows));
      const fs::path dir = a_out;
      emit(dir / "folds.json", fold_plan_to_json(plan));
      emit(dir / "results.json", ablation_to_json(rows));
      emit(dir / "results.txt", ablation_to_text(rows));
      emit(dir / "run_config.json", rc.dump());
      out << ablation_to_text(rows);
      return kExitOk;
    }

    if (compose->parsed()) {
      RunConfig rc{"compose"};
      m_flags.record(rc);
      rc.flags["cascade"] = m_cascade;
      rc.input("corpus", m_corpus);
      rc.input("lexicon", m_lexicon);
      rc.input("spec", m_spec);
      const FrameLexicon lexicon = parse_lexicon(m_lexicon);
      const Corpus corpus = load_checked(m_corpus, &lexicon);
      const CompositionPlan plan = composition_plan_from_json(slurp(m_spec));
      const auto rows = run_composition(corpus, lexicon, plan.specs, plan.setup,
                                        m_flags.experiment(kCascades.at(m_cascade)));
      const fs::path dir = m_out;
      emit(dir / "results.json", composition_to_json(rows));
      emit(dir / "results.txt", composition_to_text(rows));
      emit(dir / "run_config.json", rc.dump());
      out << composition_to_text(rows);
      return kExitOk;
    }

    if (synth->parsed()) {
      const auto data = generate_synthetic_corpus(s_sentences, s_seed);
      write_synthetic(data, s_out);
      out << "wrote " << data.corpus.sentence_count() << " sentences in "
          << data.corpus.documents.size() << " documents to " << s_out << "\n";
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "invalid input (" << violation_name(e.kind()) << "): " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace framecrf::tools
