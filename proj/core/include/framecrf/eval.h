#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "framecrf/corpus.h"

namespace framecrf {

struct Prf {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;

  // 1 when nothing was predicted / nothing was expected.
  double precision() const;
  double recall() const;
  // Harmonic mean; 0 when precision + recall is 0.
  double fmeasure() const;

  Prf& operator+=(const Prf& other);
  bool operator==(const Prf&) const = default;
};

// Indices into the gold and predicted span lists.
struct SpanMatching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> unmatched_gold;
  std::vector<std::size_t> unmatched_pred;
};

// Greedy one-to-one matching of overlapping spans. Candidate pairs share at
// least one token; they are taken by overlap size (largest first), then by
// gold start. Same-label pairs are always taken first, so the label-blind
// matching contains the label-required one.
SpanMatching match_spans_partial(std::span<const RoleSpan> gold,
                                 std::span<const RoleSpan> pred, bool require_label);

// kStrict scores roles only under a correctly selected frame; kLenient
// scores them whenever both sides detect the target.
enum class Cascade { kStrict, kLenient };

struct LevelScores {
  Prf dc;  // target detection (frame != OTHER)
  Prf sc;  // frame selection
  Prf dr;  // role segments, label-blind
  Prf sr;  // role segments with their frame element
};

// Predicted instances align to gold ones by (sentence, lu, target). An
// unaligned positive prediction is a DC false positive; their number is
// reported through `unaligned`.
LevelScores evaluate_levels(const Corpus& gold, const Corpus& pred,
                            Cascade cascade = Cascade::kStrict,
                            std::size_t* unaligned = nullptr);

enum class TargetType { kVerbRoot, kVerbNonRoot, kNounRoot, kNounNonRoot, kOther };

std::string_view target_type_name(TargetType type);
TargetType classify_target(const Sentence& sentence, std::span<const int> target);

// SR counts per target type; the buckets partition the overall SR counts.
std::map<std::string, Prf> breakdown_by_target_type(const Corpus& gold, const Corpus& pred,
                                                    Cascade cascade = Cascade::kStrict);

struct LengthBin {
  int index = 0;
  std::size_t sentences = 0;
  double mean_length = 0.0;
  Prf sr;
};

// Gold sentences ranked by token count and cut at rank quantiles. Throws
// ConfigError if there are fewer sentences than bins.
std::vector<LengthBin> breakdown_by_sentence_length(const Corpus& gold, const Corpus& pred,
                                                    int n_bins = 10,
                                                    Cascade cascade = Cascade::kStrict);

inline constexpr std::string_view kUnmappedQuestion = "other";

// (frame, fe) -> generic question tag such as who-agent, what, when.
class QuestionMap {
 public:
  void add(const std::string& frame, const std::string& fe, const std::string& question);
  // "other" for pairs the map does not cover.
  const std::string& question_of(std::string_view frame, std::string_view fe) const;
  std::size_t size() const { return map_.size(); }
  // frame<TAB>fe<TAB>question lines, sorted.
  std::string to_tsv() const;

 private:
  std::map<std::pair<std::string, std::string>, std::string, std::less<>> map_;
};

QuestionMap parse_question_map(const std::filesystem::path& path);
QuestionMap parse_question_map_string(std::string_view text,
                                      std::string_view origin = "<questions>");

std::map<std::string, Prf> group_by_question(const Corpus& gold, const Corpus& pred,
                                             const QuestionMap& questions,
                                             Cascade cascade = Cascade::kStrict);

struct EvalReport {
  LevelScores levels;
  std::size_t unaligned_predictions = 0;
  std::map<std::string, Prf> by_target_type;
  std::vector<LengthBin> by_length;          // empty when too few sentences
  std::map<std::string, Prf> by_question;    // empty without a question map
};

EvalReport evaluate(const Corpus& gold, const Corpus& pred, Cascade cascade = Cascade::kStrict,
                    const QuestionMap* questions = nullptr, int length_bins = 10);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
};

// Throws ConfigError for fewer than two values.
MeanStd mean_and_std(std::span<const double> values);

struct PrfSummary {
  MeanStd precision;
  MeanStd recall;
  MeanStd fmeasure;
};

PrfSummary aggregate_folds(std::span<const Prf> per_fold);

struct LevelSummary {
  PrfSummary dc, sc, dr, sr;
};

LevelSummary aggregate_levels(std::span<const LevelScores> per_fold);

std::string report_to_json(const EvalReport& report);
std::string report_to_text(const EvalReport& report);

}  // namespace framecrf
