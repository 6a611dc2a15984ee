#include "framecrf/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <tuple>

#include "framecrf/error.h"
#include "json_util.h"

namespace framecrf {

using detail::json;

double Prf::precision() const {
  return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double Prf::recall() const {
  return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double Prf::fmeasure() const {
  const double p = precision();
  const double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

Prf& Prf::operator+=(const Prf& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  return *this;
}

SpanMatching match_spans_partial(std::span<const RoleSpan> gold,
                                 std::span<const RoleSpan> pred, bool require_label) {
  struct Candidate {
    int overlap;
    std::size_t g;
    std::size_t p;
  };
  // Full content key so the outcome ignores input order.
  auto key = [&](const Candidate& c) {
    const auto& gs = gold[c.g];
    const auto& ps = pred[c.p];
    return std::make_tuple(-c.overlap, gs.start, gs.end, std::cref(gs.fe), ps.start, ps.end,
                           std::cref(ps.fe));
  };
  std::vector<Candidate> same_label;
  std::vector<Candidate> cross_label;
  for (std::size_t g = 0; g < gold.size(); ++g) {
    for (std::size_t p = 0; p < pred.size(); ++p) {
      const int ov = gold[g].overlap(pred[p]);
      if (ov == 0) continue;
      (gold[g].fe == pred[p].fe ? same_label : cross_label).push_back({ov, g, p});
    }
  }
  auto by_rank = [&](const Candidate& a, const Candidate& b) { return key(a) < key(b); };
  std::sort(same_label.begin(), same_label.end(), by_rank);
  std::sort(cross_label.begin(), cross_label.end(), by_rank);

  SpanMatching m;
  std::vector<bool> gold_used(gold.size(), false);
  std::vector<bool> pred_used(pred.size(), false);
  auto take = [&](const std::vector<Candidate>& cands) {
    for (const auto& c : cands) {
      if (gold_used[c.g] || pred_used[c.p]) continue;
      gold_used[c.g] = pred_used[c.p] = true;
      m.pairs.emplace_back(c.g, c.p);
    }
  };
  take(same_label);
  if (!require_label) take(cross_label);
  for (std::size_t g = 0; g < gold.size(); ++g)
    if (!gold_used[g]) m.unmatched_gold.push_back(g);
  for (std::size_t p = 0; p < pred.size(); ++p)
    if (!pred_used[p]) m.unmatched_pred.push_back(p);
  return m;
}

namespace {

bool positive(const FrameInstance* inst) { return inst != nullptr && !inst->is_other(); }

struct AlignedPair {
  const Sentence* sentence = nullptr;  // gold sentence
  std::size_t sentence_rank = 0;       // position of the sentence in the gold corpus
  const FrameInstance* gold = nullptr;
  const FrameInstance* pred = nullptr;
};

std::vector<AlignedPair> align(const Corpus& gold, const Corpus& pred,
                               std::size_t* unaligned_positive) {
  using SentKey = std::pair<std::string, std::string>;
  std::map<SentKey, const Sentence*> pred_sentences;
  for (const auto& doc : pred.documents)
    for (const auto& s : doc.sentences) pred_sentences.emplace(SentKey{doc.doc_id, s.sent_id}, &s);

  std::vector<AlignedPair> out;
  std::size_t rank = 0;
  std::size_t matched_sentences = 0;
  for (const auto& doc : gold.documents) {
    for (const auto& s : doc.sentences) {
      const Sentence* ps = nullptr;
      if (auto it = pred_sentences.find({doc.doc_id, s.sent_id}); it != pred_sentences.end()) {
        ps = it->second;
        ++matched_sentences;
      }
      using InstKey = std::pair<std::string, std::vector<int>>;
      std::map<InstKey, const FrameInstance*> pred_by_key;
      if (ps != nullptr) {
        for (const auto& inst : ps->frames) pred_by_key.emplace(InstKey{inst.lu, inst.target}, &inst);
      }
      for (const auto& g : s.frames) {
        AlignedPair pair{&s, rank, &g, nullptr};
        if (auto it = pred_by_key.find({g.lu, g.target}); it != pred_by_key.end()) {
          pair.pred = it->second;
          pred_by_key.erase(it);
        }
        out.push_back(pair);
      }
      for (const auto& [key, p] : pred_by_key) {
        out.push_back({&s, rank, nullptr, p});
        if (unaligned_positive && positive(p)) ++*unaligned_positive;
      }
      ++rank;
    }
  }
  if (matched_sentences != pred_sentences.size()) {
    throw Error("prediction file contains sentences that are not in the gold corpus");
  }
  return out;
}

enum class Outcome { kTp, kFp, kFn };

// Role-level outcomes of one aligned pair. The anchor instance (gold if
// present) locates the event for breakdowns; frame/fe come from the side
// that owns the span.
struct RoleEvent {
  Outcome outcome;
  const AlignedPair* pair;
  const std::string* frame;
  const std::string* fe;
};

template <typename Sink>
void role_events(const AlignedPair& pair, Cascade cascade, bool require_label, Sink&& sink) {
  static const std::vector<RoleSpan> kNone;
  const auto& gold_roles = positive(pair.gold) ? pair.gold->roles : kNone;
  const auto& pred_roles = positive(pair.pred) ? pair.pred->roles : kNone;
  const bool matchable = positive(pair.gold) && positive(pair.pred) &&
                         (cascade == Cascade::kLenient || pair.gold->frame == pair.pred->frame);
  if (!matchable) {
    for (const auto& r : gold_roles) sink(RoleEvent{Outcome::kFn, &pair, &pair.gold->frame, &r.fe});
    for (const auto& r : pred_roles) sink(RoleEvent{Outcome::kFp, &pair, &pair.pred->frame, &r.fe});
    return;
  }
  auto m = match_spans_partial(gold_roles, pred_roles, require_label);
  for (const auto& [g, p] : m.pairs) {
    sink(RoleEvent{Outcome::kTp, &pair, &pair.gold->frame, &gold_roles[g].fe});
  }
  for (auto g : m.unmatched_gold) {
    sink(RoleEvent{Outcome::kFn, &pair, &pair.gold->frame, &gold_roles[g].fe});
  }
  for (auto p : m.unmatched_pred) {
    sink(RoleEvent{Outcome::kFp, &pair, &pair.pred->frame, &pred_roles[p].fe});
  }
}

void count(Prf& prf, Outcome o) {
  switch (o) {
    case Outcome::kTp: ++prf.tp; break;
    case Outcome::kFp: ++prf.fp; break;
    case Outcome::kFn: ++prf.fn; break;
  }
}

template <typename Bucket>
std::map<std::string, Prf> bucket_sr(const std::vector<AlignedPair>& pairs, Cascade cascade,
                                     Bucket&& bucket) {
  std::map<std::string, Prf> out;
  for (const auto& pair : pairs) {
    role_events(pair, cascade, true, [&](const RoleEvent& e) { count(out[bucket(e)], e.outcome); });
  }
  return out;
}

}  // namespace

LevelScores evaluate_levels(const Corpus& gold, const Corpus& pred, Cascade cascade,
                            std::size_t* unaligned) {
  std::size_t unaligned_positive = 0;
  const auto pairs = align(gold, pred, &unaligned_positive);
  if (unaligned) *unaligned = unaligned_positive;

  LevelScores s;
  for (const auto& pair : pairs) {
    const bool gp = positive(pair.gold);
    const bool pp = positive(pair.pred);
    if (gp && pp) {
      ++s.dc.tp;
    } else if (pp) {
      ++s.dc.fp;
    } else if (gp) {
      ++s.dc.fn;
    }
    const bool frame_ok = gp && pp && pair.gold->frame == pair.pred->frame;
    if (frame_ok) {
      ++s.sc.tp;
    } else {
      if (pp) ++s.sc.fp;
      if (gp) ++s.sc.fn;
    }
    role_events(pair, cascade, false, [&](const RoleEvent& e) { count(s.dr, e.outcome); });
    role_events(pair, cascade, true, [&](const RoleEvent& e) { count(s.sr, e.outcome); });
  }
  return s;
}

std::string_view target_type_name(TargetType type) {
  switch (type) {
    case TargetType::kVerbRoot: return "VerbRoot";
    case TargetType::kVerbNonRoot: return "VerbNonRoot";
    case TargetType::kNounRoot: return "NounRoot";
    case TargetType::kNounNonRoot: return "NounNonRoot";
    case TargetType::kOther: return "Other";
  }
  return "Other";
}

TargetType classify_target(const Sentence& sentence, std::span<const int> target) {
  const Token& head = sentence.tokens[target_head(sentence, target)];
  const std::string& pos = head.pos;
  const bool verb = pos == "VERB" || pos == "AUX" || (!pos.empty() && pos[0] == 'V');
  const bool noun = pos == "NOUN" || pos == "PROPN" || pos == "N" || pos == "NC" || pos == "NPP";
  if (verb) return head.is_root() ? TargetType::kVerbRoot : TargetType::kVerbNonRoot;
  if (noun) return head.is_root() ? TargetType::kNounRoot : TargetType::kNounNonRoot;
  return TargetType::kOther;
}

std::map<std::string, Prf> breakdown_by_target_type(const Corpus& gold, const Corpus& pred,
                                                    Cascade cascade) {
  const auto pairs = align(gold, pred, nullptr);
  return bucket_sr(pairs, cascade, [](const RoleEvent& e) {
    const FrameInstance* anchor = e.pair->gold ? e.pair->gold : e.pair->pred;
    return std::string(target_type_name(classify_target(*e.pair->sentence, anchor->target)));
  });
}

std::vector<LengthBin> breakdown_by_sentence_length(const Corpus& gold, const Corpus& pred,
                                                    int n_bins, Cascade cascade) {
  std::vector<const Sentence*> sentences;
  for (const auto& doc : gold.documents)
    for (const auto& s : doc.sentences) sentences.push_back(&s);
  const std::size_t n = sentences.size();
  if (n_bins < 1 || n < static_cast<std::size_t>(n_bins)) {
    throw ConfigError("length breakdown needs at least " + std::to_string(n_bins) +
                      " sentences, corpus has " + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sentences[a]->size() < sentences[b]->size();
  });
  std::vector<int> bin_of(n);
  std::vector<LengthBin> bins(n_bins);
  for (std::size_t r = 0; r < n; ++r) {
    const int b = static_cast<int>(r * static_cast<std::size_t>(n_bins) / n);
    bin_of[order[r]] = b;
    bins[b].sentences++;
    bins[b].mean_length += sentences[order[r]]->size();
  }
  for (int b = 0; b < n_bins; ++b) {
    bins[b].index = b;
    bins[b].mean_length /= static_cast<double>(bins[b].sentences);
  }
  const auto pairs = align(gold, pred, nullptr);
  for (const auto& pair : pairs) {
    role_events(pair, cascade, true, [&](const RoleEvent& e) {
      count(bins[bin_of[e.pair->sentence_rank]].sr, e.outcome);
    });
  }
  return bins;
}

void QuestionMap::add(const std::string& frame, const std::string& fe,
                      const std::string& question) {
  if (!map_.emplace(std::make_pair(frame, fe), question).second) {
    throw ValidationError(Violation::kDuplicate, "question map",
                          "(" + frame + ", " + fe + ") mapped twice");
  }
}

const std::string& QuestionMap::question_of(std::string_view frame, std::string_view fe) const {
  static const std::string kOther(kUnmappedQuestion);
  auto it = map_.find(std::make_pair(std::string(frame), std::string(fe)));
  return it == map_.end() ? kOther : it->second;
}

std::string QuestionMap::to_tsv() const {
  std::string out;
  for (const auto& [key, q] : map_) out += key.first + '\t' + key.second + '\t' + q + '\n';
  return out;
}

QuestionMap parse_question_map_string(std::string_view text, std::string_view origin) {
  QuestionMap map;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    for (std::size_t tab; (tab = line.find('\t', start)) != std::string::npos; start = tab + 1) {
      cols.push_back(line.substr(start, tab - start));
    }
    cols.push_back(line.substr(start));
    if (cols.size() != 3 || cols[0].empty() || cols[1].empty() || cols[2].empty()) {
      throw ValidationError(Violation::kMalformed,
                            std::string(origin) + ":" + std::to_string(lineno),
                            "expected frame<TAB>fe<TAB>question");
    }
    map.add(cols[0], cols[1], cols[2]);
  }
  return map;
}

QuestionMap parse_question_map(const std::filesystem::path& path) {
  return parse_question_map_string(detail::read_file(path), path.string());
}

std::map<std::string, Prf> group_by_question(const Corpus& gold, const Corpus& pred,
                                             const QuestionMap& questions, Cascade cascade) {
  const auto pairs = align(gold, pred, nullptr);
  return bucket_sr(pairs, cascade, [&](const RoleEvent& e) {
    return questions.question_of(*e.frame, *e.fe);
  });
}

EvalReport evaluate(const Corpus& gold, const Corpus& pred, Cascade cascade,
                    const QuestionMap* questions, int length_bins) {
  EvalReport report;
  report.levels = evaluate_levels(gold, pred, cascade, &report.unaligned_predictions);
  report.by_target_type = breakdown_by_target_type(gold, pred, cascade);
  if (gold.sentence_count() >= static_cast<std::size_t>(length_bins)) {
    report.by_length = breakdown_by_sentence_length(gold, pred, length_bins, cascade);
  }
  if (questions) report.by_question = group_by_question(gold, pred, *questions, cascade);
  return report;
}

MeanStd mean_and_std(std::span<const double> values) {
  if (values.size() < 2) {
    throw ConfigError("standard deviation needs at least two folds, got " +
                      std::to_string(values.size()));
  }
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

PrfSummary aggregate_folds(std::span<const Prf> per_fold) {
  std::vector<double> p, r, f;
  for (const auto& prf : per_fold) {
    p.push_back(prf.precision());
    r.push_back(prf.recall());
    f.push_back(prf.fmeasure());
  }
  return {mean_and_std(p), mean_and_std(r), mean_and_std(f)};
}

LevelSummary aggregate_levels(std::span<const LevelScores> per_fold) {
  std::vector<Prf> dc, sc, dr, sr;
  for (const auto& l : per_fold) {
    dc.push_back(l.dc);
    sc.push_back(l.sc);
    dr.push_back(l.dr);
    sr.push_back(l.sr);
  }
  return {aggregate_folds(dc), aggregate_folds(sc), aggregate_folds(dr), aggregate_folds(sr)};
}

namespace {

json prf_json(const Prf& p) {
  return {{"precision", p.precision()}, {"recall", p.recall()}, {"fmeasure", p.fmeasure()},
          {"tp", p.tp},                 {"fp", p.fp},           {"fn", p.fn}};
}

std::string prf_row(const std::string& name, const Prf& p, int width) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-*s %9.2f %9.2f %9.2f %7lld %7lld %7lld\n", width,
                name.c_str(), 100.0 * p.precision(), 100.0 * p.recall(), 100.0 * p.fmeasure(),
                p.tp, p.fp, p.fn);
  return buf;
}

std::string prf_header(const std::string& first, int width) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-*s %9s %9s %9s %7s %7s %7s\n", width, first.c_str(),
                "Precision", "Recall", "F-measure", "tp", "fp", "fn");
  return buf;
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  json levels = {{"DC", prf_json(report.levels.dc)},
                 {"SC", prf_json(report.levels.sc)},
                 {"DR", prf_json(report.levels.dr)},
                 {"SR", prf_json(report.levels.sr)}};
  json j = {{"levels", levels}, {"unaligned_predictions", report.unaligned_predictions}};
  json types = json::object();
  for (const auto& [k, v] : report.by_target_type) types[k] = prf_json(v);
  j["by_target_type"] = types;
  json lengths = json::array();
  for (const auto& b : report.by_length) {
    json row = prf_json(b.sr);
    row["bin"] = b.index;
    row["sentences"] = b.sentences;
    row["mean_length"] = b.mean_length;
    lengths.push_back(row);
  }
  j["by_sentence_length"] = lengths;
  json questions = json::object();
  for (const auto& [k, v] : report.by_question) questions[k] = prf_json(v);
  j["by_question"] = questions;
  return j.dump(2) + "\n";
}

std::string report_to_text(const EvalReport& report) {
  std::string out = prf_header("Level", 12);
  out += prf_row("DC", report.levels.dc, 12);
  out += prf_row("SC", report.levels.sc, 12);
  out += prf_row("DR", report.levels.dr, 12);
  out += prf_row("SR", report.levels.sr, 12);
  if (report.unaligned_predictions > 0) {
    out += "unaligned positive predictions: " + std::to_string(report.unaligned_predictions) + "\n";
  }
  if (!report.by_target_type.empty()) {
    out += "\nSR by target type\n" + prf_header("Target", 12);
    for (const auto& [k, v] : report.by_target_type) out += prf_row(k, v, 12);
  }
  if (!report.by_length.empty()) {
    out += "\nSR by sentence-length decile\n" + prf_header("Bin (len)", 12);
    for (const auto& b : report.by_length) {
      char name[48];
      std::snprintf(name, sizeof name, "%d (%.1f)", b.index + 1, b.mean_length);
      out += prf_row(name, b.sr, 12);
    }
  }
  if (!report.by_question.empty()) {
    out += "\nSR by generic question\n" + prf_header("Question", 12);
    for (const auto& [k, v] : report.by_question) out += prf_row(k, v, 12);
  }
  return out;
}

}  // namespace framecrf
