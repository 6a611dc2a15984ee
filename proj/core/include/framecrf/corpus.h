#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "framecrf/lexicon.h"

namespace framecrf {

inline constexpr int kRootHead = -1;

struct Token {
  int index = 0;
  std::string form;
  std::string lemma;
  std::string pos;
  int head = kRootHead;
  std::string deprel;

  bool is_root() const { return head == kRootHead; }
  bool operator==(const Token&) const = default;
};

// Inclusive token range labeled with one frame element.
struct RoleSpan {
  std::string fe;
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  bool contains(int token) const { return token >= start && token <= end; }
  int overlap(const RoleSpan& other) const;
  bool operator==(const RoleSpan&) const = default;
};

struct FrameInstance {
  std::string lu;
  std::string frame;
  std::vector<int> target;
  std::vector<RoleSpan> roles;

  bool is_other() const { return frame == kOtherFrame; }
  bool operator==(const FrameInstance&) const = default;
};

struct Sentence {
  std::string doc_id;
  std::string sent_id;
  std::vector<Token> tokens;
  std::vector<FrameInstance> frames;

  int size() const { return static_cast<int>(tokens.size()); }
  bool operator==(const Sentence&) const = default;
};

struct Document {
  std::string doc_id;
  std::string source;
  std::vector<Sentence> sentences;

  bool operator==(const Document&) const = default;
};

struct Corpus {
  std::vector<Document> documents;

  std::size_t sentence_count() const;
  std::size_t instance_count() const;
  bool operator==(const Corpus&) const = default;
};

// Reads the JSON-lines corpus format and checks every structural invariant
// (tree, ranges, overlaps, duplicates). Lexicon membership is checked
// separately by validate_against_lexicon.
Corpus parse_corpus(const std::filesystem::path& path);
Corpus parse_corpus_stream(std::istream& in, std::string_view origin);
Corpus parse_corpus_string(std::string_view text,
                           std::string_view origin = "<corpus>");

std::string serialize_document(const Document& doc);
void write_corpus(const Corpus& corpus, std::ostream& out);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

void validate_sentence(const Sentence& sentence);
void validate_corpus(const Corpus& corpus);
void validate_against_lexicon(const Corpus& corpus,
                              const FrameLexicon& lexicon);

// Index of the target token whose head lies outside the target span;
// the first target token if there is none.
int target_head(const Sentence& sentence, std::span<const int> target);

struct LuOccurrence {
  std::string lu;
  std::vector<int> target;

  bool operator==(const LuOccurrence&) const = default;
};

// Every match of an LU's lemma sequence (the LU name split on spaces)
// against the sentence lemmas, ordered by start index then LU name.
std::vector<LuOccurrence> iter_lu_occurrences(const Sentence& sentence,
                                              const FrameLexicon& lexicon);

}  // namespace framecrf
