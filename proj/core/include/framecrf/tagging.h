#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "framecrf/corpus.h"
#include "framecrf/lexicon.h"

namespace framecrf {

using LabelId = std::int32_t;
using LabelSequence = std::vector<LabelId>;

// Joint output space of one LU's chain:
//   O            outside
//   T:<frame>    first target token, carrying the frame (OTHER included)
//   TI:<frame>   further target tokens
//   B-<fe>/I-<fe> role spans
enum class LabelKind { kOutside, kTarget, kTargetInside, kBegin, kInside };

struct LabelInfo {
  LabelKind kind = LabelKind::kOutside;
  std::string name;  // frame for T/TI, frame element for B/I
};

std::string make_label(LabelKind kind, std::string_view name);
LabelInfo parse_label(std::string_view label);

class LabelSet {
 public:
  static constexpr LabelId kOutside = 0;

  LabelSet() = default;
  // O first, then the remaining labels sorted.
  static LabelSet build(const std::string& lu, const FrameLexicon& lexicon);
  // Restores a saved label list; throws EncodingError unless "O" is first.
  static LabelSet from_labels(std::string lu, std::vector<std::string> labels);

  const std::string& lu() const { return lu_; }
  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(LabelId id) const { return labels_.at(id); }
  const LabelInfo& info(LabelId id) const { return info_.at(id); }
  // -1 if absent.
  LabelId find(std::string_view label) const;

  bool operator==(const LabelSet& other) const {
    return lu_ == other.lu_ && labels_ == other.labels_;
  }

 private:
  void index();

  std::string lu_;
  std::vector<std::string> labels_;
  std::vector<LabelInfo> info_;
  std::unordered_map<std::string, LabelId> ids_;
};

// Throws EncodingError on overlapping spans, out-of-range indices or
// labels missing from the set.
LabelSequence encode_labels(const Sentence& sentence, const FrameInstance& instance,
                            const LabelSet& labels);

struct DecodeStats {
  int repaired_orphans = 0;
};

// The frame comes from the label on the first target token (OTHER with no
// roles when that label is not T/TI). Maximal B/I runs become role spans;
// an I-e that does not continue an e span opens a new one.
FrameInstance decode_labels(std::span<const LabelId> sequence,
                            std::span<const int> target, const LabelSet& labels,
                            DecodeStats* stats = nullptr);

// BIO well-formedness: I-e only after B-e/I-e, TI:f only after T:f/TI:f.
bool is_well_formed(std::span<const LabelId> sequence, const LabelSet& labels);

struct FilterResult {
  FrameInstance instance;
  std::vector<RoleSpan> dropped;
};

// Drops every role whose frame element is outside the predicted frame's
// inventory (all roles for OTHER). Throws ValidationError for frames the
// lexicon does not know.
FilterResult filter_incompatible_roles(FrameInstance instance,
                                       const FrameLexicon& lexicon);

}  // namespace framecrf
