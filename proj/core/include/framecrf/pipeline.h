#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "framecrf/corpus.h"
#include "framecrf/crf.h"
#include "framecrf/features.h"
#include "framecrf/lexicon.h"

namespace framecrf {

// One CRF per lexical unit, all sharing a lexicon and a feature config.
struct ModelRegistry {
  FrameLexicon lexicon;
  FeatureConfig config;
  std::map<std::string, CrfModel> models;

  const CrfModel* find(const std::string& lu) const;
};

struct TrainReport {
  std::vector<std::string> warnings;
  std::map<std::string, int> instances_per_lu;
};

// Gold instances of `lu` encoded as training sequences, in corpus order.
std::vector<TrainInstance> collect_training_instances(const Corpus& corpus,
                                                      const std::string& lu,
                                                      const LabelSet& labels,
                                                      const FeatureConfig& config,
                                                      FeatureDictionary& dict);

// Trains a model for every lexicon LU with at least one gold instance.
// Per-LU jobs run on up to `jobs` threads; the result does not depend on it.
ModelRegistry train_all(const Corpus& corpus, const FrameLexicon& lexicon,
                        const FeatureConfig& config, const TrainOptions& options,
                        int jobs = 1, TrainReport* report = nullptr);

struct PredictionDiagnostics {
  std::size_t sentences = 0;
  std::size_t occurrences = 0;
  std::size_t predicted_instances = 0;
  std::size_t dropped_roles = 0;
  std::size_t repaired_orphans = 0;
  std::size_t skipped_occurrences = 0;
  std::map<std::string, std::size_t> skipped_lus;

  PredictionDiagnostics& operator+=(const PredictionDiagnostics& other);
  bool operator==(const PredictionDiagnostics&) const = default;
};

// Candidate targets come from lexicon matching; each one with a registered
// model is decoded, then filtered against the predicted frame's inventory.
std::vector<FrameInstance> predict_sentence(const Sentence& sentence,
                                            const ModelRegistry& registry,
                                            PredictionDiagnostics* diagnostics = nullptr);

// Copy of `corpus` with every sentence's frames replaced by predictions.
Corpus predict_corpus(const Corpus& corpus, const ModelRegistry& registry, int jobs = 1,
                      PredictionDiagnostics* diagnostics = nullptr);

PredictionDiagnostics predict_corpus_to_file(const Corpus& corpus,
                                             const ModelRegistry& registry,
                                             const std::filesystem::path& out_path,
                                             int jobs = 1);

std::string diagnostics_to_json(const PredictionDiagnostics& diagnostics);

// <dir>/<lu>.model.json per model plus <dir>/registry.json.
void save_registry(const ModelRegistry& registry, const std::filesystem::path& dir);
ModelRegistry load_registry(const std::filesystem::path& dir);
std::string model_file_name(const std::string& lu);

}  // namespace framecrf
