#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "framecrf/corpus.h"
#include "framecrf/crf.h"
#include "framecrf/eval.h"
#include "framecrf/features.h"
#include "framecrf/lexicon.h"

namespace framecrf {

inline constexpr std::uint64_t kDefaultSeed = 20170626;

// Document-level partition of a corpus into k evaluation folds.
struct FoldPlan {
  int k = 0;
  std::uint64_t seed = kDefaultSeed;
  std::map<std::string, int> assignment;  // doc_id -> fold
  // Sum over folds and frames of (count - ideal)^2 / ideal. Lower is better.
  double balance = 0.0;

  std::vector<std::string> documents_in(int fold) const;
  bool operator==(const FoldPlan&) const = default;
};

// Greedy balancing: documents by instance count (descending, equal counts
// shuffled by `seed`), each placed in the fold whose per-frame imbalance
// grows least. Throws ConfigError when k < 2 or there are fewer than k
// documents.
FoldPlan make_folds(const Corpus& corpus, int k = 5, std::uint64_t seed = kDefaultSeed);

// Imbalance of an arbitrary assignment, measured like FoldPlan::balance.
double fold_balance(const Corpus& corpus, const std::map<std::string, int>& assignment, int k);

std::string fold_plan_to_json(const FoldPlan& plan);
FoldPlan fold_plan_from_json(std::string_view text);

// Throws ValidationError if the plan does not cover exactly the corpus
// documents or uses a fold index outside [0, k).
void check_fold_plan(const FoldPlan& plan, const Corpus& corpus);

struct FoldSplit {
  Corpus train;
  Corpus test;
};

FoldSplit split_fold(const Corpus& corpus, const FoldPlan& plan, int fold);

struct ExperimentOptions {
  FeatureConfig features;
  TrainOptions train;
  Cascade cascade = Cascade::kStrict;
  int jobs = 1;
};

struct CrossvalResult {
  std::vector<LevelScores> per_fold;
  LevelSummary summary;
};

// Trains on k-1 folds and evaluates on the held-out one, for every fold.
CrossvalResult run_crossval(const Corpus& corpus, const FrameLexicon& lexicon,
                            const FoldPlan& plan, const ExperimentOptions& options);

struct AblationConfig {
  std::string name;
  FeatureConfig features;
};

// The seven ablation rows in display order, derived from `base`.
std::vector<AblationConfig> ablation_configs(const FeatureConfig& base);

struct AblationRow {
  std::string name;
  FeatureConfig features;
  std::vector<Prf> sr_per_fold;
  PrfSummary sr;
};

// SR scores for each ablation row. `only` restricts the rows by name (empty
// runs all seven); unknown names throw ConfigError.
std::vector<AblationRow> run_ablation(const Corpus& corpus, const FrameLexicon& lexicon,
                                      const FoldPlan& plan, const ExperimentOptions& options,
                                      const std::vector<std::string>& only = {});

struct CompositionPart {
  std::string source;
  double fraction = 1.0;  // of that source's documents, in (0, 1]
};

struct CompositionSpec {
  std::string name;
  std::vector<CompositionPart> parts;
};

struct CompositionSetup {
  std::string test_source;
  // Keep only LUs that have instances in every source.
  bool lu_filter = true;
  int k = 5;
  std::uint64_t seed = kDefaultSeed;
};

struct CompositionRow {
  std::string name;
  std::vector<std::size_t> train_sizes;  // frame instances per fold
  double mean_train_size = 0.0;
  std::vector<Prf> sr_per_fold;
  PrfSummary sr;
};

// LUs with at least one instance in every source of the corpus.
std::vector<std::string> shared_lus(const Corpus& corpus);

// Keeps only instances of `lus`; the lexicon keeps every frame.
Corpus restrict_to_lus(const Corpus& corpus, const std::vector<std::string>& lus);
FrameLexicon restrict_lexicon(const FrameLexicon& lexicon, const std::vector<std::string>& lus);

// Test-source documents are split into k folds. For fold f each part draws
// round(fraction * total documents of the source) documents (at least 1,
// at most the pool) from a shuffle keyed by (seed, f, source); the test
// source's pool excludes fold f. Throws ConfigError on unknown sources,
// fractions outside (0, 1] or an empty spec.
std::vector<CompositionRow> run_composition(const Corpus& corpus, const FrameLexicon& lexicon,
                                            const std::vector<CompositionSpec>& specs,
                                            const CompositionSetup& setup,
                                            const ExperimentOptions& options);

// Declarative experiment file:
// {"test_source", "lu_filter", "k", "seed", "rows": [{"name", "parts": [{"source", "fraction"}]}]}
struct CompositionPlan {
  CompositionSetup setup;
  std::vector<CompositionSpec> specs;
};

CompositionPlan composition_plan_from_json(std::string_view text);

std::string crossval_to_json(const CrossvalResult& result);
std::string crossval_to_text(const CrossvalResult& result);
std::string ablation_to_json(const std::vector<AblationRow>& rows);
std::string ablation_to_text(const std::vector<AblationRow>& rows);
std::string composition_to_json(const std::vector<CompositionRow>& rows);
std::string composition_to_text(const std::vector<CompositionRow>& rows);

}  // namespace framecrf
