#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "framecrf/corpus.h"

namespace framecrf {

using FeatureId = std::int32_t;

enum class FeatureFamily { kLemma, kParentLemma, kPos, kLinDist, kDepPath };

inline constexpr std::array<FeatureFamily, 5> kAllFamilies = {
    FeatureFamily::kLemma, FeatureFamily::kParentLemma, FeatureFamily::kPos,
    FeatureFamily::kLinDist, FeatureFamily::kDepPath};

// "lemma", "parent_lemma", "pos", "lin_dist", "dep_path".
std::string_view family_name(FeatureFamily family);
std::optional<FeatureFamily> family_from_name(std::string_view name);

// Parent lemma emitted for the root token.
inline constexpr std::string_view kRootLemma = "ROOT";
// Values emitted for window offsets that fall outside the sentence.
inline constexpr std::string_view kBeforeSentence = "<s>";
inline constexpr std::string_view kAfterSentence = "</s>";

struct FeatureConfig {
  std::vector<FeatureFamily> families{kAllFamilies.begin(), kAllFamilies.end()};
  std::vector<int> window{-1, 0, 1};
  // Distances beyond +/-clip_distance collapse into "<-N" / ">+N"; 0 disables.
  int clip_distance = 10;
  int max_path_len = 2;

  bool enabled(FeatureFamily family) const;
  FeatureConfig without(FeatureFamily family) const;
  FeatureConfig only(std::span<const FeatureFamily> keep) const;

  // Throws ConfigError on an unknown family name or invalid window/lengths.
  static FeatureConfig from_family_names(std::span<const std::string> names);
  void check() const;

  bool operator==(const FeatureConfig&) const = default;
};

std::string feature_config_to_json(const FeatureConfig& config);
FeatureConfig feature_config_from_json(std::string_view text);

// Signed offset from `token` to the nearest target token: negative before the
// target, positive after it, 0 inside it.
int linear_distance(int token, std::span<const int> target);

// Tree path from `token` to `target` through their lowest common ancestor,
// written from the token end: "↑rel" for each child->parent step and "↓rel"
// for each parent->child step (rel is the deprel of the child).
std::vector<std::string> raw_dependency_path(const Sentence& sentence, int token,
                                             int target);

// Keeps the `max_len` edges nearest the target. Longer paths are prefixed
// with "…". Empty path gives "".
std::string simplify_path(std::span<const std::string> path, int max_len = 2);

// "-3", "0", "+2"; "<-10" / ">+10" when clipped.
std::string distance_value(int distance, int clip_distance);

struct TokenFeatures {
  std::string lemma;
  std::string parent_lemma;
  std::string pos;
  int lin_dist = 0;
  std::string dep_path;
};

TokenFeatures token_features(const Sentence& sentence, int token,
                             std::span<const int> target, int max_path_len = 2);

// Interns feature strings. Id 0 is reserved for unknown features; once the
// dictionary is frozen, unseen strings resolve to it instead of growing it.
class FeatureDictionary {
 public:
  static constexpr FeatureId kUnknown = 0;
  static constexpr std::string_view kUnknownName = "<UNK>";

  FeatureDictionary();
  // Rebuilds a frozen dictionary from a saved name table (id order).
  static FeatureDictionary from_names(std::vector<std::string> names);

  FeatureId intern(const std::string& feature);
  FeatureId lookup(const std::string& feature) const;

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  std::size_t size() const { return names_.size(); }
  const std::string& name(FeatureId id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, FeatureId> ids_;
  bool frozen_ = false;
};

// Sorted, de-duplicated feature ids per sentence position.
struct FeatureVector {
  std::vector<std::vector<FeatureId>> positions;

  int length() const { return static_cast<int>(positions.size()); }
  bool operator==(const FeatureVector&) const = default;
};

// "family[offset]=value" strings per position, in family-then-window order.
std::vector<std::vector<std::string>> feature_strings(const Sentence& sentence,
                                                      std::span<const int> target,
                                                      const FeatureConfig& config);

// Interns through `dict` (growing it unless frozen).
FeatureVector extract_sequence_features(const Sentence& sentence,
                                        std::span<const int> target,
                                        const FeatureConfig& config,
                                        FeatureDictionary& dict);
// Read-only lookup, safe for concurrent use on a frozen dictionary.
FeatureVector extract_sequence_features(const Sentence& sentence,
                                        std::span<const int> target,
                                        const FeatureConfig& config,
                                        const FeatureDictionary& dict);

}  // namespace framecrf
