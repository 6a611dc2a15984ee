#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "framecrf/features.h"
#include "framecrf/tagging.h"

namespace framecrf {

// Dense parameters of a first-order linear-chain CRF: one observation weight
// per (feature, label) and one transition weight per (label, label), stored
// contiguously so the optimizer can treat them as a single vector.
class CrfWeights {
 public:
  CrfWeights() = default;
  CrfWeights(int num_features, int num_labels);

  int num_features() const { return num_features_; }
  int num_labels() const { return num_labels_; }

  double obs(FeatureId f, LabelId y) const { return params_[index_obs(f, y)]; }
  double& obs(FeatureId f, LabelId y) { return params_[index_obs(f, y)]; }
  double trans(LabelId from, LabelId to) const { return params_[index_trans(from, to)]; }
  double& trans(LabelId from, LabelId to) { return params_[index_trans(from, to)]; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::span<const double> obs_row(FeatureId f) const {
    return std::span<const double>(params_).subspan(index_obs(f, 0), num_labels_);
  }

  std::size_t index_obs(FeatureId f, LabelId y) const {
    return static_cast<std::size_t>(f) * num_labels_ + y;
  }
  std::size_t index_trans(LabelId from, LabelId to) const {
    return static_cast<std::size_t>(num_features_) * num_labels_ +
           static_cast<std::size_t>(from) * num_labels_ + to;
  }

  bool operator==(const CrfWeights&) const = default;

 private:
  int num_features_ = 0;
  int num_labels_ = 0;
  std::vector<double> params_;
};

struct TrainInstance {
  FeatureVector x;
  LabelSequence y;
};

// Σ_t Σ_{f∈x_t} obs[f, y_t] + Σ_{t≥1} trans[y_{t-1}, y_t]. Throws
// EncodingError on length mismatch or out-of-range ids.
double sequence_score(const CrfWeights& w, const FeatureVector& x,
                      std::span<const LabelId> y);

struct Posteriors {
  double log_z = 0.0;
  int length = 0;
  int num_labels = 0;
  std::vector<double> unigram;  // length x labels
  std::vector<double> bigram;   // (length-1) x labels x labels; slot t is (t, t+1)

  double node(int t, LabelId y) const { return unigram[t * num_labels + y]; }
  double edge(int t, LabelId from, LabelId to) const {
    return bigram[(static_cast<std::size_t>(t) * num_labels + from) * num_labels + to];
  }
};

// Forward-backward in log space. Requires x.length() >= 1.
Posteriors log_partition_and_marginals(const CrfWeights& w, const FeatureVector& x);

struct ObjectiveAndGradient {
  double objective = 0.0;
  CrfWeights gradient;
};

// Regularized negative log-likelihood Σ_i [log Z(x_i) - score(x_i, y_i)]
// + (l2/2)·||w||² and its gradient. Instances are reduced in order.
ObjectiveAndGradient nll_and_gradient(const CrfWeights& w,
                                      std::span<const TrainInstance> batch, double l2);

struct Decoded {
  LabelSequence labels;
  double score = 0.0;
};

// Highest-scoring label sequence; ties go to the lowest label index at each
// backtracking step. Requires x.length() >= 1.
Decoded viterbi_decode(const CrfWeights& w, const FeatureVector& x);

struct TrainOptions {
  double l2 = 1.0;
  int max_iter = 200;
  double tol = 1e-4;
  std::uint64_t seed = 20170626;

  bool operator==(const TrainOptions&) const = default;
};

struct TrainingInfo {
  TrainOptions options;
  int num_instances = 0;
  int iterations = 0;
  double final_objective = 0.0;
  double gradient_norm = 0.0;
  bool converged = false;
  // Not serialized.
  std::vector<double> objective_trace;
};

struct CrfModel {
  LabelSet labels;
  FeatureDictionary dict;
  CrfWeights weights;
  FeatureConfig config;
  TrainingInfo training;

  Decoded decode(const FeatureVector& x) const { return viterbi_decode(weights, x); }
};

// Minimizes the regularized NLL from all-zero weights. `dict` is frozen by
// the call; every instance must use ids below dict.size().
CrfModel train_crf(std::vector<TrainInstance> instances, LabelSet labels,
                   FeatureDictionary dict, FeatureConfig config,
                   const TrainOptions& options);

inline constexpr int kModelFormatVersion = 1;

std::string serialize_model(const CrfModel& model);
CrfModel deserialize_model(std::string_view text);

}  // namespace framecrf
