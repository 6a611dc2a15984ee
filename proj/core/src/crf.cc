#include "framecrf/crf.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "framecrf/error.h"
#include "framecrf/optimizer.h"
#include "json_util.h"

namespace framecrf {

using detail::json;

CrfWeights::CrfWeights(int num_features, int num_labels)
    : num_features_(num_features),
      num_labels_(num_labels),
      params_(static_cast<std::size_t>(num_features) * num_labels +
                  static_cast<std::size_t>(num_labels) * num_labels,
              0.0) {}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Below this a factored sum has lost too much range; recompute exactly.
constexpr double kTinySum = 1e-280;
constexpr double kMaxLogScale = 600.0;

double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

void check_instance_shape(const CrfWeights& w, const FeatureVector& x) {
  for (const auto& ids : x.positions) {
    for (FeatureId f : ids) {
      if (f < 0 || f >= w.num_features()) {
        throw EncodingError("feature id " + std::to_string(f) + " outside model of " +
                            std::to_string(w.num_features()) + " features");
      }
    }
  }
}

// exp(trans) shifted by column / row maxima, shared by every sequence scored
// with the same weights.
struct TransitionCache {
  int labels = 0;
  std::vector<double> col_max;
  std::vector<double> exp_by_col;  // exp(trans[a][b] - col_max[b]) at a*L+b
  std::vector<double> row_max;
  std::vector<double> exp_by_row;  // exp(trans[a][b] - row_max[a]) at a*L+b

  explicit TransitionCache(const CrfWeights& w) : labels(w.num_labels()) {
    const int L = labels;
    col_max.assign(L, kNegInf);
    row_max.assign(L, kNegInf);
    for (int a = 0; a < L; ++a) {
      for (int b = 0; b < L; ++b) {
        const double t = w.trans(a, b);
        col_max[b] = std::max(col_max[b], t);
        row_max[a] = std::max(row_max[a], t);
      }
    }
    exp_by_col.resize(static_cast<std::size_t>(L) * L);
    exp_by_row.resize(static_cast<std::size_t>(L) * L);
    for (int a = 0; a < L; ++a) {
      for (int b = 0; b < L; ++b) {
        exp_by_col[a * L + b] = std::exp(w.trans(a, b) - col_max[b]);
        exp_by_row[a * L + b] = std::exp(w.trans(a, b) - row_max[a]);
      }
    }
  }
};

struct Lattice {
  int length = 0;
  int labels = 0;
  std::vector<double> emit;   // length x labels
  std::vector<double> alpha;  // log forward
  std::vector<double> beta;   // log backward
  double log_z = 0.0;
};

void compute_emissions(const CrfWeights& w, const FeatureVector& x, Lattice& lat) {
  const int L = w.num_labels();
  lat.length = x.length();
  lat.labels = L;
  lat.emit.assign(static_cast<std::size_t>(lat.length) * L, 0.0);
  for (int t = 0; t < lat.length; ++t) {
    double* row = &lat.emit[static_cast<std::size_t>(t) * L];
    for (FeatureId f : x.positions[t]) {
      auto weights = w.obs_row(f);
      for (int y = 0; y < L; ++y) row[y] += weights[y];
    }
  }
}

void forward_backward(const CrfWeights& w, const TransitionCache& tc, Lattice& lat) {
  const int T = lat.length;
  const int L = lat.labels;
  lat.alpha.assign(static_cast<std::size_t>(T) * L, 0.0);
  lat.beta.assign(static_cast<std::size_t>(T) * L, 0.0);
  std::vector<double> scaled(L);
  std::vector<double> sums(L);
  std::vector<double> exact(L);

  std::copy_n(lat.emit.begin(), L, lat.alpha.begin());
  for (int t = 1; t < T; ++t) {
    const double* prev = &lat.alpha[static_cast<std::size_t>(t - 1) * L];
    double* cur = &lat.alpha[static_cast<std::size_t>(t) * L];
    const double m = *std::max_element(prev, prev + L);
    for (int a = 0; a < L; ++a) scaled[a] = std::exp(prev[a] - m);
    std::fill(sums.begin(), sums.end(), 0.0);
    for (int a = 0; a < L; ++a) {
      const double ea = scaled[a];
      const double* row = &tc.exp_by_col[static_cast<std::size_t>(a) * L];
      for (int b = 0; b < L; ++b) sums[b] += ea * row[b];
    }
    for (int b = 0; b < L; ++b) {
      double lse;
      if (sums[b] > kTinySum) {
        lse = m + tc.col_max[b] + std::log(sums[b]);
      } else {
        for (int a = 0; a < L; ++a) exact[a] = prev[a] + w.trans(a, b);
        lse = log_sum_exp(exact);
      }
      cur[b] = lat.emit[static_cast<std::size_t>(t) * L + b] + lse;
    }
  }

  for (int t = T - 2; t >= 0; --t) {
    const double* next = &lat.beta[static_cast<std::size_t>(t + 1) * L];
    const double* emit_next = &lat.emit[static_cast<std::size_t>(t + 1) * L];
    double* cur = &lat.beta[static_cast<std::size_t>(t) * L];
    double n = kNegInf;
    for (int b = 0; b < L; ++b) n = std::max(n, emit_next[b] + next[b]);
    for (int b = 0; b < L; ++b) scaled[b] = std::exp(emit_next[b] + next[b] - n);
    for (int a = 0; a < L; ++a) {
      const double* row = &tc.exp_by_row[static_cast<std::size_t>(a) * L];
      double s = 0.0;
      for (int b = 0; b < L; ++b) s += row[b] * scaled[b];
      if (s > kTinySum) {
        cur[a] = tc.row_max[a] + n + std::log(s);
      } else {
        for (int b = 0; b < L; ++b) exact[b] = w.trans(a, b) + emit_next[b] + next[b];
        cur[a] = log_sum_exp(exact);
      }
    }
  }

  lat.log_z = log_sum_exp(std::span<const double>(
      &lat.alpha[static_cast<std::size_t>(T - 1) * L], static_cast<std::size_t>(L)));
}

// Calls visit(t, a, b, p) for every edge (t, t+1) with its posterior p.
template <typename Visit>
void visit_edges(const CrfWeights& w, const TransitionCache& tc, const Lattice& lat,
                 Visit&& visit) {
  const int T = lat.length;
  const int L = lat.labels;
  std::vector<double> left(L);
  std::vector<double> right(L);
  for (int t = 0; t + 1 < T; ++t) {
    const double* a_row = &lat.alpha[static_cast<std::size_t>(t) * L];
    const double* emit_next = &lat.emit[static_cast<std::size_t>(t + 1) * L];
    const double* beta_next = &lat.beta[static_cast<std::size_t>(t + 1) * L];
    const double m = *std::max_element(a_row, a_row + L);
    double k = kNegInf;
    for (int b = 0; b < L; ++b) k = std::max(k, emit_next[b] + beta_next[b] + tc.col_max[b]);
    const double log_scale = m + k - lat.log_z;
    if (log_scale < kMaxLogScale) {
      const double scale = std::exp(log_scale);
      for (int a = 0; a < L; ++a) left[a] = std::exp(a_row[a] - m) * scale;
      for (int b = 0; b < L; ++b) {
        right[b] = std::exp(emit_next[b] + beta_next[b] + tc.col_max[b] - k);
      }
      for (int a = 0; a < L; ++a) {
        const double* row = &tc.exp_by_col[static_cast<std::size_t>(a) * L];
        for (int b = 0; b < L; ++b) visit(t, a, b, left[a] * row[b] * right[b]);
      }
    } else {
      for (int a = 0; a < L; ++a) {
        for (int b = 0; b < L; ++b) {
          visit(t, a, b,
                std::exp(a_row[a] + w.trans(a, b) + emit_next[b] + beta_next[b] -
                         lat.log_z));
        }
      }
    }
  }
}

}  // namespace

double sequence_score(const CrfWeights& w, const FeatureVector& x,
                      std::span<const LabelId> y) {
  if (static_cast<int>(y.size()) != x.length()) {
    throw EncodingError("label sequence length " + std::to_string(y.size()) +
                        " does not match " + std::to_string(x.length()) + " positions");
  }
  check_instance_shape(w, x);
  double score = 0.0;
  for (int t = 0; t < x.length(); ++t) {
    if (y[t] < 0 || y[t] >= w.num_labels()) {
      throw EncodingError("label id " + std::to_string(y[t]) + " out of range");
    }
    for (FeatureId f : x.positions[t]) score += w.obs(f, y[t]);
    if (t > 0) score += w.trans(y[t - 1], y[t]);
  }
  return score;
}

Posteriors log_partition_and_marginals(const CrfWeights& w, const FeatureVector& x) {
  if (x.length() < 1) throw EncodingError("cannot run inference on an empty sequence");
  check_instance_shape(w, x);
  const TransitionCache tc(w);
  Lattice lat;
  compute_emissions(w, x, lat);
  forward_backward(w, tc, lat);

  const int T = lat.length;
  const int L = lat.labels;
  Posteriors post;
  post.log_z = lat.log_z;
  post.length = T;
  post.num_labels = L;
  post.unigram.resize(static_cast<std::size_t>(T) * L);
  for (std::size_t i = 0; i < post.unigram.size(); ++i) {
    post.unigram[i] = std::exp(lat.alpha[i] + lat.beta[i] - lat.log_z);
  }
  post.bigram.assign(static_cast<std::size_t>(std::max(T - 1, 0)) * L * L, 0.0);
  visit_edges(w, tc, lat, [&](int t, int a, int b, double p) {
    post.bigram[(static_cast<std::size_t>(t) * L + a) * L + b] = p;
  });
  return post;
}

ObjectiveAndGradient nll_and_gradient(const CrfWeights& w,
                                      std::span<const TrainInstance> batch, double l2) {
  if (batch.empty()) throw EncodingError("empty training batch");
  const int L = w.num_labels();
  const TransitionCache tc(w);
  ObjectiveAndGradient out;
  out.gradient = CrfWeights(w.num_features(), L);
  auto grad = out.gradient.params();
  const std::size_t trans_base = out.gradient.index_trans(0, 0);

  Lattice lat;
  std::vector<double> node(L);
  for (const auto& inst : batch) {
    if (inst.x.length() == 0) continue;
    out.objective -= sequence_score(w, inst.x, inst.y);
    compute_emissions(w, inst.x, lat);
    forward_backward(w, tc, lat);
    out.objective += lat.log_z;

    for (int t = 0; t < lat.length; ++t) {
      const double* a_row = &lat.alpha[static_cast<std::size_t>(t) * L];
      const double* b_row = &lat.beta[static_cast<std::size_t>(t) * L];
      for (int y = 0; y < L; ++y) node[y] = std::exp(a_row[y] + b_row[y] - lat.log_z);
      for (FeatureId f : inst.x.positions[t]) {
        double* g = &grad[out.gradient.index_obs(f, 0)];
        for (int y = 0; y < L; ++y) g[y] += node[y];
        g[inst.y[t]] -= 1.0;
      }
      if (t > 0) grad[out.gradient.index_trans(inst.y[t - 1], inst.y[t])] -= 1.0;
    }
    visit_edges(w, tc, lat, [&](int, int a, int b, double p) {
      grad[trans_base + static_cast<std::size_t>(a) * L + b] += p;
    });
  }

  if (l2 > 0.0) {
    auto params = w.params();
    double sq = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      sq += params[i] * params[i];
      grad[i] += l2 * params[i];
    }
    out.objective += 0.5 * l2 * sq;
  }
  return out;
}

Decoded viterbi_decode(const CrfWeights& w, const FeatureVector& x) {
  if (x.length() < 1) throw EncodingError("cannot decode an empty sequence");
  check_instance_shape(w, x);
  Lattice lat;
  compute_emissions(w, x, lat);
  const int T = lat.length;
  const int L = lat.labels;
  std::vector<double> delta(lat.emit.begin(), lat.emit.begin() + L);
  std::vector<double> next(L);
  std::vector<LabelId> back(static_cast<std::size_t>(T) * L, 0);
  for (int t = 1; t < T; ++t) {
    for (int b = 0; b < L; ++b) {
      double best = delta[0] + w.trans(0, b);
      LabelId arg = 0;
      for (int a = 1; a < L; ++a) {
        const double s = delta[a] + w.trans(a, b);
        if (s > best) {
          best = s;
          arg = a;
        }
      }
      next[b] = best + lat.emit[static_cast<std::size_t>(t) * L + b];
      back[static_cast<std::size_t>(t) * L + b] = arg;
    }
    std::swap(delta, next);
  }
  Decoded out;
  out.labels.resize(T);
  LabelId last = 0;
  for (int y = 1; y < L; ++y) {
    if (delta[y] > delta[last]) last = y;
  }
  out.score = delta[last];
  out.labels[T - 1] = last;
  for (int t = T - 1; t > 0; --t) {
    out.labels[t - 1] = back[static_cast<std::size_t>(t) * L + out.labels[t]];
  }
  return out;
}

CrfModel train_crf(std::vector<TrainInstance> instances, LabelSet labels,
                   FeatureDictionary dict, FeatureConfig config,
                   const TrainOptions& options) {
  if (instances.empty()) throw EncodingError("train_crf needs at least one instance");
  if (options.l2 < 0.0) throw ConfigError("l2 must be >= 0");
  dict.freeze();
  const int F = static_cast<int>(dict.size());
  const int L = labels.size();
  for (const auto& inst : instances) {
    if (inst.x.length() != static_cast<int>(inst.y.size())) {
      throw EncodingError("training instance with mismatched x/y lengths");
    }
    for (LabelId y : inst.y) {
      if (y < 0 || y >= L) throw EncodingError("training label id out of range");
    }
  }

  CrfModel model;
  model.labels = std::move(labels);
  model.dict = std::move(dict);
  model.config = std::move(config);
  model.weights = CrfWeights(F, L);

  CrfWeights work(F, L);
  auto objective = [&](std::span<const double> x, std::span<double> gradient) {
    std::copy(x.begin(), x.end(), work.params().begin());
    auto r = nll_and_gradient(work, instances, options.l2);
    auto g = r.gradient.params();
    std::copy(g.begin(), g.end(), gradient.begin());
    return r.objective;
  };

  LbfgsOptions lbfgs;
  lbfgs.max_iter = options.max_iter;
  lbfgs.gradient_tolerance = options.tol;
  auto params = model.weights.params();
  auto result = minimize_lbfgs(objective, std::vector<double>(params.begin(), params.end()),
                               lbfgs);
  std::copy(result.x.begin(), result.x.end(), params.begin());

  model.training.options = options;
  model.training.num_instances = static_cast<int>(instances.size());
  model.training.iterations = result.iterations;
  model.training.final_objective = result.value;
  model.training.gradient_norm = result.gradient_norm;
  model.training.converged = result.converged;
  model.training.objective_trace = std::move(result.trace);
  return model;
}

std::string serialize_model(const CrfModel& model) {
  const auto& w = model.weights;
  json w_obs = json::array();
  for (int f = 0; f < w.num_features(); ++f) {
    auto row = w.obs_row(f);
    w_obs.push_back(std::vector<double>(row.begin(), row.end()));
  }
  json w_trans = json::array();
  for (int a = 0; a < w.num_labels(); ++a) {
    std::vector<double> row(w.num_labels());
    for (int b = 0; b < w.num_labels(); ++b) row[b] = w.trans(a, b);
    w_trans.push_back(std::move(row));
  }
  const auto& t = model.training;
  json training = {{"l2", t.options.l2},
                   {"max_iter", t.options.max_iter},
                   {"tol", t.options.tol},
                   {"seed", t.options.seed},
                   {"num_instances", t.num_instances},
                   {"iterations", t.iterations},
                   {"final_objective", t.final_objective},
                   {"gradient_norm", t.gradient_norm},
                   {"converged", t.converged}};
  json j = {{"version", kModelFormatVersion},
            {"lu", model.labels.lu()},
            {"labels", model.labels.labels()},
            {"features", model.dict.names()},
            {"w_obs", std::move(w_obs)},
            {"w_trans", std::move(w_trans)},
            {"feature_config", json::parse(feature_config_to_json(model.config))},
            {"training", std::move(training)}};
  return j.dump() + "\n";
}

CrfModel deserialize_model(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(Violation::kMalformed, "model", e.what());
  }
  try {
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw ValidationError(Violation::kMalformed, "model",
                            "unsupported model version " + j.at("version").dump());
    }
    CrfModel model;
    model.labels = LabelSet::from_labels(j.at("lu").get<std::string>(),
                                         j.at("labels").get<std::vector<std::string>>());
    model.dict = FeatureDictionary::from_names(j.at("features").get<std::vector<std::string>>());
    model.config = feature_config_from_json(j.at("feature_config").dump());
    const int F = static_cast<int>(model.dict.size());
    const int L = model.labels.size();
    model.weights = CrfWeights(F, L);
    const auto& w_obs = j.at("w_obs");
    const auto& w_trans = j.at("w_trans");
    if (w_obs.size() != static_cast<std::size_t>(F) ||
        w_trans.size() != static_cast<std::size_t>(L)) {
      throw ValidationError(Violation::kMalformed, "model " + model.labels.lu(),
                            "weight shapes do not match features x labels");
    }
    auto fill_row = [&](const json& row, auto&& set) {
      if (!row.is_array() || row.size() != static_cast<std::size_t>(L)) {
        throw ValidationError(Violation::kMalformed, "model " + model.labels.lu(),
                              "weight row has the wrong width");
      }
      for (int y = 0; y < L; ++y) {
        const double v = row[y].get<double>();
        if (!std::isfinite(v)) {
          throw ValidationError(Violation::kMalformed, "model " + model.labels.lu(),
                                "non-finite weight");
        }
        set(y, v);
      }
    };
    for (int f = 0; f < F; ++f) {
      fill_row(w_obs[f], [&](int y, double v) { model.weights.obs(f, y) = v; });
    }
    for (int a = 0; a < L; ++a) {
      fill_row(w_trans[a], [&](int b, double v) { model.weights.trans(a, b) = v; });
    }
    const auto& t = j.at("training");
    model.training.options.l2 = t.at("l2").get<double>();
    model.training.options.max_iter = t.at("max_iter").get<int>();
    model.training.options.tol = t.at("tol").get<double>();
    model.training.options.seed = t.at("seed").get<std::uint64_t>();
    model.training.num_instances = t.at("num_instances").get<int>();
    model.training.iterations = t.at("iterations").get<int>();
    model.training.final_objective = t.at("final_objective").get<double>();
    model.training.gradient_norm = t.at("gradient_norm").get<double>();
    model.training.converged = t.at("converged").get<bool>();
    return model;
  } catch (const json::exception& e) {
    throw ValidationError(Violation::kMalformed, "model", e.what());
  }
}

}  // namespace framecrf
