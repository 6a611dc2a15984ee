#pragma once

#include <cstdint>
#include <filesystem>

#include "framecrf/corpus.h"
#include "framecrf/eval.h"
#include "framecrf/lexicon.h"

namespace framecrf::tools {

inline constexpr const char* kSourceA = "WGM";
inline constexpr const char* kSourceB = "CTGM";

struct SyntheticData {
  Corpus corpus;
  FrameLexicon lexicon;
  QuestionMap questions;
};

// Template sentences over five LUs (one ambiguous verb, one noun, one
// multi-word), with OTHER readings signalled by a neighbouring cue and
// coordinated clauses whose roles only the tree separates. Documents
// alternate between two sources that share function words and LUs but not
// content words or Time/Place prepositions. Same seed, same bytes.
SyntheticData generate_synthetic_corpus(int n_sentences, std::uint64_t seed);

FrameLexicon synthetic_lexicon();
QuestionMap synthetic_questions();

// corpus.jsonl, lexicon.json and questions.tsv under `dir`.
void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir);

}  // namespace framecrf::tools
