#include "framecrf/tagging.h"

#include <algorithm>
#include <set>

#include "framecrf/error.h"

namespace framecrf {

std::string make_label(LabelKind kind, std::string_view name) {
  switch (kind) {
    case LabelKind::kOutside: return "O";
    case LabelKind::kTarget: return "T:" + std::string(name);
    case LabelKind::kTargetInside: return "TI:" + std::string(name);
    case LabelKind::kBegin: return "B-" + std::string(name);
    case LabelKind::kInside: return "I-" + std::string(name);
  }
  return "O";
}

LabelInfo parse_label(std::string_view label) {
  if (label == "O") return {LabelKind::kOutside, ""};
  if (label.starts_with("T:")) return {LabelKind::kTarget, std::string(label.substr(2))};
  if (label.starts_with("TI:")) {
    return {LabelKind::kTargetInside, std::string(label.substr(3))};
  }
  if (label.starts_with("B-")) return {LabelKind::kBegin, std::string(label.substr(2))};
  if (label.starts_with("I-")) return {LabelKind::kInside, std::string(label.substr(2))};
  throw EncodingError("unrecognized label \"" + std::string(label) + "\"");
}

LabelSet LabelSet::build(const std::string& lu, const FrameLexicon& lexicon) {
  std::set<std::string> frames = lexicon.frames_of(lu);
  frames.emplace(kOtherFrame);
  std::set<std::string> rest;
  for (const auto& f : frames) {
    rest.insert(make_label(LabelKind::kTarget, f));
    rest.insert(make_label(LabelKind::kTargetInside, f));
    for (const auto& fe : lexicon.fes_of(f)) {
      rest.insert(make_label(LabelKind::kBegin, fe));
      rest.insert(make_label(LabelKind::kInside, fe));
    }
  }
  LabelSet set;
  set.lu_ = lu;
  set.labels_.push_back("O");
  set.labels_.insert(set.labels_.end(), rest.begin(), rest.end());
  set.index();
  return set;
}

LabelSet LabelSet::from_labels(std::string lu, std::vector<std::string> labels) {
  if (labels.empty() || labels.front() != "O") {
    throw EncodingError("label list for " + lu + " must start with O");
  }
  LabelSet set;
  set.lu_ = std::move(lu);
  set.labels_ = std::move(labels);
  set.index();
  if (set.ids_.size() != set.labels_.size()) {
    throw EncodingError("label list for " + set.lu_ + " repeats a label");
  }
  return set;
}

void LabelSet::index() {
  info_.clear();
  ids_.clear();
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    info_.push_back(parse_label(labels_[i]));
    ids_.emplace(labels_[i], static_cast<LabelId>(i));
  }
}

LabelId LabelSet::find(std::string_view label) const {
  auto it = ids_.find(std::string(label));
  return it == ids_.end() ? -1 : it->second;
}

namespace {

LabelId require(const LabelSet& labels, const std::string& label) {
  LabelId id = labels.find(label);
  if (id < 0) {
    throw EncodingError("label " + label + " is not in the label set of " + labels.lu());
  }
  return id;
}

}  // namespace

LabelSequence encode_labels(const Sentence& sentence, const FrameInstance& instance,
                            const LabelSet& labels) {
  if (instance.lu != labels.lu()) {
    throw EncodingError("instance of " + instance.lu + " encoded with label set of " +
                        labels.lu());
  }
  const int n = sentence.size();
  LabelSequence seq(n, LabelSet::kOutside);
  std::vector<bool> used(n, false);
  auto claim = [&](int i, const std::string& what) {
    if (i < 0 || i >= n) {
      throw EncodingError(what + " index " + std::to_string(i) + " outside sentence");
    }
    if (used[i]) throw EncodingError(what + " overlaps another span at token " +
                                     std::to_string(i));
    used[i] = true;
  };

  if (instance.target.empty()) throw EncodingError("empty target");
  const LabelId t_first = require(labels, make_label(LabelKind::kTarget, instance.frame));
  const LabelId t_rest =
      require(labels, make_label(LabelKind::kTargetInside, instance.frame));
  for (std::size_t k = 0; k < instance.target.size(); ++k) {
    int i = instance.target[k];
    claim(i, "target");
    seq[i] = k == 0 ? t_first : t_rest;
  }
  for (const auto& role : instance.roles) {
    if (role.start > role.end) throw EncodingError("role " + role.fe + " has start > end");
    const LabelId b = require(labels, make_label(LabelKind::kBegin, role.fe));
    const LabelId in = require(labels, make_label(LabelKind::kInside, role.fe));
    for (int i = role.start; i <= role.end; ++i) {
      claim(i, "role " + role.fe);
      seq[i] = i == role.start ? b : in;
    }
  }
  return seq;
}

FrameInstance decode_labels(std::span<const LabelId> sequence, std::span<const int> target,
                            const LabelSet& labels, DecodeStats* stats) {
  FrameInstance out;
  out.lu = labels.lu();
  out.target.assign(target.begin(), target.end());
  out.frame = std::string(kOtherFrame);

  const int n = static_cast<int>(sequence.size());
  if (target.empty() || target.front() < 0 || target.front() >= n) return out;
  const LabelInfo& head = labels.info(sequence[target.front()]);
  if (head.kind != LabelKind::kTarget && head.kind != LabelKind::kTargetInside) {
    return out;
  }
  out.frame = head.name;

  RoleSpan* open = nullptr;
  for (int i = 0; i < n; ++i) {
    const LabelInfo& info = labels.info(sequence[i]);
    const bool is_target = std::find(target.begin(), target.end(), i) != target.end();
    if (is_target) {
      open = nullptr;
      continue;
    }
    switch (info.kind) {
      case LabelKind::kBegin:
        out.roles.push_back({info.name, i, i});
        open = &out.roles.back();
        break;
      case LabelKind::kInside:
        if (open != nullptr && open->fe == info.name && open->end == i - 1) {
          open->end = i;
        } else {
          if (stats) ++stats->repaired_orphans;
          out.roles.push_back({info.name, i, i});
          open = &out.roles.back();
        }
        break;
      default:
        open = nullptr;
        break;
    }
  }
  return out;
}

bool is_well_formed(std::span<const LabelId> sequence, const LabelSet& labels) {
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const LabelInfo& cur = labels.info(sequence[i]);
    if (cur.kind != LabelKind::kInside && cur.kind != LabelKind::kTargetInside) continue;
    if (i == 0) return false;
    const LabelInfo& prev = labels.info(sequence[i - 1]);
    if (prev.name != cur.name) return false;
    if (cur.kind == LabelKind::kInside && prev.kind != LabelKind::kBegin &&
        prev.kind != LabelKind::kInside) {
      return false;
    }
    if (cur.kind == LabelKind::kTargetInside && prev.kind != LabelKind::kTarget &&
        prev.kind != LabelKind::kTargetInside) {
      return false;
    }
  }
  return true;
}

FilterResult filter_incompatible_roles(FrameInstance instance, const FrameLexicon& lexicon) {
  const auto& inventory = lexicon.fes_of(instance.frame);
  FilterResult result;
  std::vector<RoleSpan> kept;
  for (auto& r : instance.roles) {
    if (inventory.contains(r.fe)) {
      kept.push_back(std::move(r));
    } else {
      result.dropped.push_back(std::move(r));
    }
  }
  instance.roles = std::move(kept);
  result.instance = std::move(instance);
  return result;
}

}  // namespace framecrf
