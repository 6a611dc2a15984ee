#include "framecrf/experiments.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

#include "framecrf/error.h"
#include "framecrf/pipeline.h"
#include "json_util.h"
#include "parallel.h"

namespace framecrf {

using detail::json;

namespace {

// Fisher-Yates over mt19937_64 so the permutation is the same on every
// standard library.
template <typename T>
void portable_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

std::map<std::string, int> frame_counts(const Document& doc) {
  std::map<std::string, int> counts;
  for (const auto& s : doc.sentences)
    for (const auto& inst : s.frames) ++counts[inst.frame];
  return counts;
}

std::size_t instance_count(const Document& doc) {
  std::size_t n = 0;
  for (const auto& s : doc.sentences) n += s.frames.size();
  return n;
}

std::map<std::string, double> ideal_per_fold(const Corpus& corpus, int k) {
  std::map<std::string, double> ideal;
  for (const auto& doc : corpus.documents)
    for (const auto& [frame, n] : frame_counts(doc)) ideal[frame] += n;
  for (auto& [frame, total] : ideal) total /= k;
  return ideal;
}

}  // namespace

std::vector<std::string> FoldPlan::documents_in(int fold) const {
  std::vector<std::string> out;
  for (const auto& [doc, f] : assignment)
    if (f == fold) out.push_back(doc);
  return out;
}

double fold_balance(const Corpus& corpus, const std::map<std::string, int>& assignment, int k) {
  const auto ideal = ideal_per_fold(corpus, k);
  std::vector<std::map<std::string, double>> counts(k);
  for (const auto& doc : corpus.documents) {
    const int f = assignment.at(doc.doc_id);
    for (const auto& [frame, n] : frame_counts(doc)) counts[f][frame] += n;
  }
  double total = 0.0;
  for (int f = 0; f < k; ++f) {
    for (const auto& [frame, target] : ideal) {
      const double c = counts[f].count(frame) ? counts[f].at(frame) : 0.0;
      total += (c - target) * (c - target) / target;
    }
  }
  return total;
}

FoldPlan make_folds(const Corpus& corpus, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be at least 2, got " + std::to_string(k));
  const std::size_t n = corpus.documents.size();
  if (n < static_cast<std::size_t>(k)) {
    throw ConfigError("cannot split " + std::to_string(n) + " documents into " +
                      std::to_string(k) + " folds");
  }
  validate_corpus(corpus);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  portable_shuffle(order, rng);
  std::vector<std::size_t> sizes(n);
  for (std::size_t i = 0; i < n; ++i) sizes[i] = instance_count(corpus.documents[i]);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sizes[a] > sizes[b]; });

  const auto ideal = ideal_per_fold(corpus, k);
  std::vector<std::map<std::string, double>> counts(k);
  std::vector<int> docs_per_fold(k, 0);
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  for (std::size_t idx : order) {
    const Document& doc = corpus.documents[idx];
    const auto profile = frame_counts(doc);
    int best = -1;
    double best_cost = 0.0;
    for (int f = 0; f < k; ++f) {
      double cost = 0.0;
      for (const auto& [frame, d] : profile) {
        const double c = counts[f][frame];
        const double t = ideal.at(frame);
        cost += ((c + d - t) * (c + d - t) - (c - t) * (c - t)) / t;
      }
      const bool better = best < 0 || cost < best_cost ||
                          (cost == best_cost && docs_per_fold[f] < docs_per_fold[best]);
      if (better) {
        best = f;
        best_cost = cost;
      }
    }
    for (const auto& [frame, d] : profile) counts[best][frame] += d;
    ++docs_per_fold[best];
    plan.assignment[doc.doc_id] = best;
  }
  plan.balance = fold_balance(corpus, plan.assignment, k);
  return plan;
}

std::string fold_plan_to_json(const FoldPlan& plan) {
  json assignment = json::object();
  for (const auto& [doc, f] : plan.assignment) assignment[doc] = f;
  return json{{"k", plan.k}, {"seed", plan.seed}, {"balance", plan.balance},
              {"assignment", assignment}}
             .dump(2) +
         "\n";
}

FoldPlan fold_plan_from_json(std::string_view text) {
  const std::string where = "<fold plan>";
  json j = detail::parse_strict(text, where);
  FoldPlan plan;
  plan.k = static_cast<int>(detail::require_int(j, "k", where));
  const json& seed = detail::require(j, "seed", where);
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
    throw ValidationError(Violation::kMalformed, where, "field \"seed\" must be an integer");
  }
  plan.seed = seed.get<std::uint64_t>();
  const json& balance = detail::require(j, "balance", where);
  if (!balance.is_number()) {
    throw ValidationError(Violation::kMalformed, where, "field \"balance\" must be a number");
  }
  plan.balance = balance.get<double>();
  const json& assignment = detail::require(j, "assignment", where);
  if (!assignment.is_object()) {
    throw ValidationError(Violation::kMalformed, where, "field \"assignment\" must be an object");
  }
  for (const auto& [doc, f] : assignment.items()) {
    if (!f.is_number_integer() || f.get<int>() < 0 || f.get<int>() >= plan.k) {
      throw ValidationError(Violation::kOutOfRange, where, "bad fold for document " + doc);
    }
    plan.assignment[doc] = f.get<int>();
  }
  return plan;
}

void check_fold_plan(const FoldPlan& plan, const Corpus& corpus) {
  const std::string where = "fold plan";
  if (plan.k < 2) throw ValidationError(Violation::kOutOfRange, where, "k must be at least 2");
  std::set<std::string> docs;
  for (const auto& doc : corpus.documents) {
    docs.insert(doc.doc_id);
    auto it = plan.assignment.find(doc.doc_id);
    if (it == plan.assignment.end()) {
      throw ValidationError(Violation::kMalformed, where, "document " + doc.doc_id + " unassigned");
    }
    if (it->second < 0 || it->second >= plan.k) {
      throw ValidationError(Violation::kOutOfRange, where, "bad fold for document " + doc.doc_id);
    }
  }
  for (const auto& [doc, f] : plan.assignment) {
    if (!docs.count(doc)) {
      throw ValidationError(Violation::kMalformed, where, "document " + doc + " not in corpus");
    }
  }
}

FoldSplit split_fold(const Corpus& corpus, const FoldPlan& plan, int fold) {
  FoldSplit split;
  for (const auto& doc : corpus.documents) {
    (plan.assignment.at(doc.doc_id) == fold ? split.test : split.train).documents.push_back(doc);
  }
  return split;
}

namespace {

// Trains on `train`, predicts `test` and scores it. Runs single-threaded; the
// callers parallelize across independent runs.
LevelScores train_and_score(const Corpus& train, const Corpus& test, const FrameLexicon& lexicon,
                            const FeatureConfig& features, const ExperimentOptions& options) {
  ModelRegistry registry = train_all(train, lexicon, features, options.train, 1);
  Corpus predicted = predict_corpus(test, registry, 1);
  return evaluate_levels(test, predicted, options.cascade);
}

}  // namespace

CrossvalResult run_crossval(const Corpus& corpus, const FrameLexicon& lexicon,
                            const FoldPlan& plan, const ExperimentOptions& options) {
  check_fold_plan(plan, corpus);
  CrossvalResult result;
  result.per_fold.resize(plan.k);
  detail::parallel_for(plan.k, options.jobs, [&](std::size_t f) {
    auto split = split_fold(corpus, plan, static_cast<int>(f));
    result.per_fold[f] = train_and_score(split.train, split.test, lexicon, options.features, options);
  });
  result.summary = aggregate_levels(result.per_fold);
  return result;
}

std::vector<AblationConfig> ablation_configs(const FeatureConfig& base) {
  using F = FeatureFamily;
  const F no_parse[] = {F::kLemma, F::kPos, F::kLinDist};
  return {
      {"all", base},
      {"-dep_path", base.without(F::kDepPath)},
      {"-pos", base.without(F::kPos)},
      {"-lin_dist", base.without(F::kLinDist)},
      {"-lemma", base.without(F::kLemma)},
      {"-parent_lemma", base.without(F::kParentLemma)},
      {"-dependency_parse", base.only(no_parse)},
  };
}

std::vector<AblationRow> run_ablation(const Corpus& corpus, const FrameLexicon& lexicon,
                                      const FoldPlan& plan, const ExperimentOptions& options,
                                      const std::vector<std::string>& only) {
  check_fold_plan(plan, corpus);
  std::vector<AblationConfig> configs;
  const auto all = ablation_configs(options.features);
  if (only.empty()) {
    configs = all;
  } else {
    for (const auto& name : only) {
      auto it = std::find_if(all.begin(), all.end(), [&](const auto& c) { return c.name == name; });
      if (it == all.end()) throw ConfigError("unknown ablation row: " + name);
      configs.push_back(*it);
    }
  }
  for (const auto& c : configs) c.features.check();

  const std::size_t k = static_cast<std::size_t>(plan.k);
  std::vector<FoldSplit> splits;
  for (int f = 0; f < plan.k; ++f) splits.push_back(split_fold(corpus, plan, f));

  std::vector<LevelScores> scores(configs.size() * k);
  detail::parallel_for(scores.size(), options.jobs, [&](std::size_t job) {
    const auto& split = splits[job % k];
    scores[job] = train_and_score(split.train, split.test, lexicon, configs[job / k].features,
                                  options);
  });

  std::vector<AblationRow> rows;
  for (std::size_t r = 0; r < configs.size(); ++r) {
    AblationRow row{configs[r].name, configs[r].features, {}, {}};
    for (std::size_t f = 0; f < k; ++f) row.sr_per_fold.push_back(scores[r * k + f].sr);
    row.sr = aggregate_folds(row.sr_per_fold);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> shared_lus(const Corpus& corpus) {
  std::map<std::string, std::set<std::string>> sources_of;
  std::set<std::string> sources;
  for (const auto& doc : corpus.documents) {
    sources.insert(doc.source);
    for (const auto& s : doc.sentences)
      for (const auto& inst : s.frames) sources_of[inst.lu].insert(doc.source);
  }
  std::vector<std::string> out;
  for (const auto& [lu, seen] : sources_of)
    if (seen == sources) out.push_back(lu);
  return out;
}

Corpus restrict_to_lus(const Corpus& corpus, const std::vector<std::string>& lus) {
  const std::set<std::string> keep(lus.begin(), lus.end());
  Corpus out = corpus;
  for (auto& doc : out.documents) {
    for (auto& s : doc.sentences) {
      std::erase_if(s.frames, [&](const FrameInstance& inst) { return !keep.count(inst.lu); });
    }
  }
  return out;
}

FrameLexicon restrict_lexicon(const FrameLexicon& lexicon, const std::vector<std::string>& lus) {
  FrameLexicon out;
  for (const auto& [frame, fes] : lexicon.frame_to_fes()) {
    if (frame != kOtherFrame) out.add_frame(frame, fes);
  }
  for (const auto& lu : lus) {
    if (lexicon.has_lu(lu)) out.add_lu(lu, lexicon.frames_of(lu));
  }
  return out;
}

namespace {

std::mt19937_64 keyed_rng(std::uint64_t seed, int fold, const std::string& source) {
  const std::string key = std::to_string(fold) + '\x1f' + source;
  const std::uint64_t h = std::stoull(fnv1a_hex(key), nullptr, 16);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

std::vector<CompositionRow> run_composition(const Corpus& corpus, const FrameLexicon& lexicon,
                                            const std::vector<CompositionSpec>& specs,
                                            const CompositionSetup& setup,
                                            const ExperimentOptions& options) {
  std::map<std::string, std::vector<std::size_t>> docs_of_source;
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    docs_of_source[corpus.documents[i].source].push_back(i);
  }
  if (!docs_of_source.count(setup.test_source)) {
    throw ConfigError("test source " + setup.test_source + " has no documents");
  }
  for (const auto& spec : specs) {
    if (spec.parts.empty()) throw ConfigError("composition row " + spec.name + " is empty");
    std::set<std::string> seen;
    for (const auto& part : spec.parts) {
      if (!docs_of_source.count(part.source)) {
        throw ConfigError("composition row " + spec.name + ": unknown source " + part.source);
      }
      if (!(part.fraction > 0.0 && part.fraction <= 1.0)) {
        throw ConfigError("composition row " + spec.name + ": fraction must be in (0, 1]");
      }
      if (!seen.insert(part.source).second) {
        throw ConfigError("composition row " + spec.name + ": source " + part.source +
                          " listed twice");
      }
    }
  }

  Corpus data = corpus;
  FrameLexicon lex = lexicon;
  if (setup.lu_filter) {
    const auto lus = shared_lus(corpus);
    if (lus.empty()) throw ConfigError("no LU occurs in every source");
    data = restrict_to_lus(corpus, lus);
    lex = restrict_lexicon(lexicon, lus);
  }

  Corpus test_source;
  for (std::size_t i : docs_of_source[setup.test_source]) {
    test_source.documents.push_back(data.documents[i]);
  }
  const FoldPlan plan = make_folds(test_source, setup.k, setup.seed);
  const std::size_t k = static_cast<std::size_t>(setup.k);

  // Training documents per (row, fold).
  std::vector<std::vector<std::size_t>> selections(specs.size() * k);
  for (std::size_t r = 0; r < specs.size(); ++r) {
    for (std::size_t f = 0; f < k; ++f) {
      auto& chosen = selections[r * k + f];
      for (const auto& part : specs[r].parts) {
        std::vector<std::size_t> pool;
        for (std::size_t i : docs_of_source[part.source]) {
          const bool held_out = part.source == setup.test_source &&
                                plan.assignment.at(data.documents[i].doc_id) == static_cast<int>(f);
          if (!held_out) pool.push_back(i);
        }
        const std::size_t total = docs_of_source[part.source].size();
        std::size_t want = static_cast<std::size_t>(std::llround(part.fraction * total));
        want = std::clamp<std::size_t>(want, 1, pool.size());
        auto rng = keyed_rng(setup.seed, static_cast<int>(f), part.source);
        portable_shuffle(pool, rng);
        chosen.insert(chosen.end(), pool.begin(), pool.begin() + static_cast<long>(want));
      }
      std::sort(chosen.begin(), chosen.end());
      if (chosen.empty()) throw ConfigError("composition row " + specs[r].name + " selects nothing");
    }
  }

  std::vector<LevelScores> scores(selections.size());
  std::vector<std::size_t> sizes(selections.size());
  detail::parallel_for(selections.size(), options.jobs, [&](std::size_t job) {
    Corpus train;
    for (std::size_t i : selections[job]) train.documents.push_back(data.documents[i]);
    sizes[job] = train.instance_count();
    auto split = split_fold(test_source, plan, static_cast<int>(job % k));
    scores[job] = train_and_score(train, split.test, lex, options.features, options);
  });

  std::vector<CompositionRow> rows;
  for (std::size_t r = 0; r < specs.size(); ++r) {
    CompositionRow row;
    row.name = specs[r].name;
    for (std::size_t f = 0; f < k; ++f) {
      row.train_sizes.push_back(sizes[r * k + f]);
      row.sr_per_fold.push_back(scores[r * k + f].sr);
    }
    row.mean_train_size =
        static_cast<double>(std::accumulate(row.train_sizes.begin(), row.train_sizes.end(),
                                            std::size_t{0})) /
        static_cast<double>(k);
    row.sr = aggregate_folds(row.sr_per_fold);
    rows.push_back(std::move(row));
  }
  return rows;
}

CompositionPlan composition_plan_from_json(std::string_view text) {
  const std::string where = "<composition spec>";
  json j = detail::parse_strict(text, where);
  CompositionPlan plan;
  plan.setup.test_source = detail::require_string(j, "test_source", where);
  if (j.contains("lu_filter")) {
    if (!j["lu_filter"].is_boolean()) {
      throw ValidationError(Violation::kMalformed, where, "field \"lu_filter\" must be a boolean");
    }
    plan.setup.lu_filter = j["lu_filter"].get<bool>();
  }
  if (j.contains("k")) plan.setup.k = static_cast<int>(detail::require_int(j, "k", where));
  if (j.contains("seed")) plan.setup.seed = static_cast<std::uint64_t>(detail::require_int(j, "seed", where));
  for (const auto& row : detail::require_array(j, "rows", where)) {
    CompositionSpec spec;
    spec.name = detail::require_string(row, "name", where);
    for (const auto& part : detail::require_array(row, "parts", where)) {
      const json& fraction = detail::require(part, "fraction", where);
      if (!fraction.is_number()) {
        throw ValidationError(Violation::kMalformed, where, "field \"fraction\" must be a number");
      }
      spec.parts.push_back({detail::require_string(part, "source", where), fraction.get<double>()});
    }
    plan.specs.push_back(std::move(spec));
  }
  return plan;
}

namespace {

json prf_json(const Prf& p) {
  return {{"precision", p.precision()}, {"recall", p.recall()}, {"fmeasure", p.fmeasure()},
          {"tp", p.tp},                 {"fp", p.fp},           {"fn", p.fn}};
}

json summary_json(const PrfSummary& s) {
  auto ms = [](const MeanStd& m) { return json{{"mean", m.mean}, {"std", m.std}}; };
  return {{"precision", ms(s.precision)}, {"recall", ms(s.recall)}, {"fmeasure", ms(s.fmeasure)}};
}

std::string pm(const MeanStd& m) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%6.2f ± %5.2f", 100.0 * m.mean, 100.0 * m.std);
  return buf;
}

std::string summary_row(const std::string& name, const PrfSummary& s, int width) {
  char head[96];
  std::snprintf(head, sizeof head, "%-*s", width, name.c_str());
  return std::string(head) + "  " + pm(s.precision) + "  " + pm(s.recall) + "  " +
         pm(s.fmeasure) + "\n";
}

std::string summary_header(const std::string& first, int width) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-*s  %-15s  %-15s  %-15s\n", width, first.c_str(), "Precision",
                "Recall", "F-measure");
  return buf;
}

}  // namespace

std::string crossval_to_json(const CrossvalResult& result) {
  json folds = json::array();
  for (const auto& l : result.per_fold) {
    folds.push_back({{"DC", prf_json(l.dc)}, {"SC", prf_json(l.sc)}, {"DR", prf_json(l.dr)},
                     {"SR", prf_json(l.sr)}});
  }
  json summary = {{"DC", summary_json(result.summary.dc)},
                  {"SC", summary_json(result.summary.sc)},
                  {"DR", summary_json(result.summary.dr)},
                  {"SR", summary_json(result.summary.sr)}};
  return json{{"folds", folds}, {"summary", summary}}.dump(2) + "\n";
}

std::string crossval_to_text(const CrossvalResult& result) {
  std::string out = summary_header("Level", 6);
  out += summary_row("DC", result.summary.dc, 6);
  out += summary_row("SC", result.summary.sc, 6);
  out += summary_row("DR", result.summary.dr, 6);
  out += summary_row("SR", result.summary.sr, 6);
  return out;
}

std::string ablation_to_json(const std::vector<AblationRow>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    json folds = json::array();
    for (const auto& p : row.sr_per_fold) folds.push_back(prf_json(p));
    out.push_back({{"name", row.name},
                   {"features", json::parse(feature_config_to_json(row.features))},
                   {"sr_folds", folds},
                   {"sr", summary_json(row.sr)}});
  }
  return out.dump(2) + "\n";
}

std::string ablation_to_text(const std::vector<AblationRow>& rows) {
  std::string out = summary_header("Features", 18);
  for (const auto& row : rows) out += summary_row(row.name, row.sr, 18);
  return out;
}

std::string composition_to_json(const std::vector<CompositionRow>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    json folds = json::array();
    for (const auto& p : row.sr_per_fold) folds.push_back(prf_json(p));
    out.push_back({{"name", row.name},
                   {"train_sizes", row.train_sizes},
                   {"mean_train_size", row.mean_train_size},
                   {"sr_folds", folds},
                   {"sr", summary_json(row.sr)}});
  }
  return out.dump(2) + "\n";
}

std::string composition_to_text(const std::vector<CompositionRow>& rows) {
  std::size_t width = 8;
  for (const auto& row : rows) width = std::max(width, row.name.size());
  std::string out = summary_header("Training", static_cast<int>(width));
  out.insert(out.size() - 1, "  Train size");
  for (const auto& row : rows) {
    std::string line = summary_row(row.name, row.sr, static_cast<int>(width));
    char size[32];
    std::snprintf(size, sizeof size, "  %10.1f", row.mean_train_size);
    line.insert(line.size() - 1, size);
    out += line;
  }
  return out;
}

}  // namespace framecrf
