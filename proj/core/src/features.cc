#include "framecrf/features.h"

#include <algorithm>
#include <cstdlib>

#include "framecrf/error.h"
#include "json_util.h"

namespace framecrf {

using detail::json;

std::string_view family_name(FeatureFamily family) {
  switch (family) {
    case FeatureFamily::kLemma: return "lemma";
    case FeatureFamily::kParentLemma: return "parent_lemma";
    case FeatureFamily::kPos: return "pos";
    case FeatureFamily::kLinDist: return "lin_dist";
    case FeatureFamily::kDepPath: return "dep_path";
  }
  return "";
}

std::optional<FeatureFamily> family_from_name(std::string_view name) {
  for (auto f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

bool FeatureConfig::enabled(FeatureFamily family) const {
  return std::find(families.begin(), families.end(), family) != families.end();
}

FeatureConfig FeatureConfig::without(FeatureFamily family) const {
  FeatureConfig out = *this;
  std::erase(out.families, family);
  return out;
}

FeatureConfig FeatureConfig::only(std::span<const FeatureFamily> keep) const {
  FeatureConfig out = *this;
  std::erase_if(out.families, [&](FeatureFamily f) {
    return std::find(keep.begin(), keep.end(), f) == keep.end();
  });
  return out;
}

FeatureConfig FeatureConfig::from_family_names(std::span<const std::string> names) {
  FeatureConfig config;
  config.families.clear();
  for (const auto& n : names) {
    auto f = family_from_name(n);
    if (!f) throw ConfigError("unknown feature family \"" + n + "\"");
    if (!config.enabled(*f)) config.families.push_back(*f);
  }
  // Canonical order keeps feature strings independent of flag order.
  std::sort(config.families.begin(), config.families.end());
  return config;
}

void FeatureConfig::check() const {
  if (families.empty()) throw ConfigError("at least one feature family is required");
  if (window.empty()) throw ConfigError("feature window must not be empty");
  if (max_path_len < 1) throw ConfigError("max_path_len must be >= 1");
  if (clip_distance < 0) throw ConfigError("clip_distance must be >= 0");
}

std::string feature_config_to_json(const FeatureConfig& config) {
  json families = json::array();
  for (auto f : config.families) families.push_back(std::string(family_name(f)));
  return json{{"families", families},
              {"window", config.window},
              {"clip_distance", config.clip_distance},
              {"max_path_len", config.max_path_len}}
      .dump();
}

FeatureConfig feature_config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad feature config: ") + e.what());
  }
  try {
    auto names = j.at("families").get<std::vector<std::string>>();
    FeatureConfig config = FeatureConfig::from_family_names(names);
    config.window = j.at("window").get<std::vector<int>>();
    config.clip_distance = j.at("clip_distance").get<int>();
    config.max_path_len = j.at("max_path_len").get<int>();
    config.check();
    return config;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad feature config: ") + e.what());
  }
}

int linear_distance(int token, std::span<const int> target) {
  int best = 0;
  bool first = true;
  for (int t : target) {
    int d = token - t;
    if (d == 0) return 0;
    if (first || std::abs(d) < std::abs(best)) best = d;
    first = false;
  }
  return best;
}

std::vector<std::string> raw_dependency_path(const Sentence& sentence, int token,
                                             int target) {
  auto ancestors = [&](int from) {
    std::vector<int> chain{from};
    while (sentence.tokens[chain.back()].head != kRootHead) {
      chain.push_back(sentence.tokens[chain.back()].head);
    }
    return chain;
  };
  const auto up = ancestors(token);
  const auto down = ancestors(target);

  // Lowest common ancestor: first node of `up` that also lies on `down`.
  std::size_t up_len = 0;
  std::size_t down_len = 0;
  for (; up_len < up.size(); ++up_len) {
    auto it = std::find(down.begin(), down.end(), up[up_len]);
    if (it != down.end()) {
      down_len = static_cast<std::size_t>(it - down.begin());
      break;
    }
  }

  std::vector<std::string> path;
  path.reserve(up_len + down_len);
  for (std::size_t i = 0; i < up_len; ++i) {
    path.push_back("↑" + sentence.tokens[up[i]].deprel);
  }
  for (std::size_t i = down_len; i-- > 0;) {
    path.push_back("↓" + sentence.tokens[down[i]].deprel);
  }
  return path;
}

std::string simplify_path(std::span<const std::string> path, int max_len) {
  std::string out;
  std::size_t first = 0;
  if (path.size() > static_cast<std::size_t>(max_len)) {
    out = "…";
    first = path.size() - static_cast<std::size_t>(max_len);
  }
  for (std::size_t i = first; i < path.size(); ++i) {
    if (!out.empty()) out += '|';
    out += path[i];
  }
  return out;
}

std::string distance_value(int distance, int clip_distance) {
  if (clip_distance > 0 && distance < -clip_distance) {
    return "<-" + std::to_string(clip_distance);
  }
  if (clip_distance > 0 && distance > clip_distance) {
    return ">+" + std::to_string(clip_distance);
  }
  return distance > 0 ? "+" + std::to_string(distance) : std::to_string(distance);
}

TokenFeatures token_features(const Sentence& sentence, int token,
                             std::span<const int> target, int max_path_len) {
  const Token& tok = sentence.tokens[token];
  TokenFeatures f;
  f.lemma = tok.lemma;
  f.parent_lemma =
      tok.is_root() ? std::string(kRootLemma) : sentence.tokens[tok.head].lemma;
  f.pos = tok.pos;
  f.lin_dist = linear_distance(token, target);
  if (f.lin_dist != 0) {
    const int head = target_head(sentence, target);
    f.dep_path = simplify_path(raw_dependency_path(sentence, token, head), max_path_len);
  }
  return f;
}

FeatureDictionary::FeatureDictionary() {
  names_.emplace_back(kUnknownName);
  ids_.emplace(kUnknownName, kUnknown);
}

FeatureDictionary FeatureDictionary::from_names(std::vector<std::string> names) {
  if (names.empty() || names.front() != kUnknownName) {
    throw ConfigError("feature table must start with " + std::string(kUnknownName));
  }
  FeatureDictionary dict;
  dict.names_.clear();
  dict.ids_.clear();
  for (auto& n : names) {
    auto id = static_cast<FeatureId>(dict.names_.size());
    if (!dict.ids_.emplace(n, id).second) {
      throw ConfigError("feature table repeats \"" + n + "\"");
    }
    dict.names_.push_back(std::move(n));
  }
  dict.frozen_ = true;
  return dict;
}

FeatureId FeatureDictionary::intern(const std::string& feature) {
  if (frozen_) return lookup(feature);
  auto [it, inserted] = ids_.emplace(feature, static_cast<FeatureId>(names_.size()));
  if (inserted) names_.push_back(feature);
  return it->second;
}

FeatureId FeatureDictionary::lookup(const std::string& feature) const {
  auto it = ids_.find(feature);
  return it == ids_.end() ? kUnknown : it->second;
}

std::vector<std::vector<std::string>> feature_strings(const Sentence& sentence,
                                                      std::span<const int> target,
                                                      const FeatureConfig& config) {
  config.check();
  const int n = sentence.size();
  std::vector<TokenFeatures> per_token;
  per_token.reserve(n);
  for (int i = 0; i < n; ++i) {
    per_token.push_back(token_features(sentence, i, target, config.max_path_len));
  }

  auto value = [&](FeatureFamily family, const TokenFeatures& tf) -> std::string {
    switch (family) {
      case FeatureFamily::kLemma: return tf.lemma;
      case FeatureFamily::kParentLemma: return tf.parent_lemma;
      case FeatureFamily::kPos: return tf.pos;
      case FeatureFamily::kLinDist: return distance_value(tf.lin_dist, config.clip_distance);
      case FeatureFamily::kDepPath: return tf.dep_path;
    }
    return {};
  };

  std::vector<std::vector<std::string>> out(n);
  for (int i = 0; i < n; ++i) {
    auto& feats = out[i];
    feats.reserve(config.families.size() * config.window.size());
    for (auto family : config.families) {
      for (int offset : config.window) {
        const int p = i + offset;
        std::string v;
        if (p < 0) {
          v = kBeforeSentence;
        } else if (p >= n) {
          v = kAfterSentence;
        } else {
          v = value(family, per_token[p]);
        }
        std::string s(family_name(family));
        s += '[';
        s += std::to_string(offset);
        s += "]=";
        s += v;
        feats.push_back(std::move(s));
      }
    }
  }
  return out;
}

namespace {

template <typename Resolve>
FeatureVector to_ids(std::vector<std::vector<std::string>> strings, Resolve resolve) {
  FeatureVector fv;
  fv.positions.resize(strings.size());
  for (std::size_t i = 0; i < strings.size(); ++i) {
    auto& ids = fv.positions[i];
    ids.reserve(strings[i].size());
    for (const auto& s : strings[i]) ids.push_back(resolve(s));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
  return fv;
}

}  // namespace

FeatureVector extract_sequence_features(const Sentence& sentence,
                                        std::span<const int> target,
                                        const FeatureConfig& config,
                                        FeatureDictionary& dict) {
  return to_ids(feature_strings(sentence, target, config),
                [&](const std::string& s) { return dict.intern(s); });
}

FeatureVector extract_sequence_features(const Sentence& sentence,
                                        std::span<const int> target,
                                        const FeatureConfig& config,
                                        const FeatureDictionary& dict) {
  return to_ids(feature_strings(sentence, target, config),
                [&](const std::string& s) { return dict.lookup(s); });
}

}  // namespace framecrf
