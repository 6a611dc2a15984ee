#include "framecrf/corpus.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "framecrf/error.h"
#include "json_util.h"

namespace framecrf {

using detail::json;

int RoleSpan::overlap(const RoleSpan& other) const {
  int lo = std::max(start, other.start);
  int hi = std::min(end, other.end);
  return hi >= lo ? hi - lo + 1 : 0;
}

std::size_t Corpus::sentence_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.sentences.size();
  return n;
}

std::size_t Corpus::instance_count() const {
  std::size_t n = 0;
  for (const auto& d : documents)
    for (const auto& s : d.sentences) n += s.frames.size();
  return n;
}

namespace {

std::string locate(const Sentence& s) {
  return "doc " + s.doc_id + " sent " + s.sent_id;
}

void check_tree(const Sentence& s) {
  const int n = s.size();
  int roots = 0;
  for (const auto& t : s.tokens) {
    if (t.head == kRootHead) {
      ++roots;
    } else if (t.head < 0 || t.head >= n) {
      throw ValidationError(Violation::kOutOfRange, locate(s),
                            "token " + std::to_string(t.index) + " has head " +
                                std::to_string(t.head) + " outside the sentence");
    } else if (t.head == t.index) {
      throw ValidationError(Violation::kNotATree, locate(s),
                            "token " + std::to_string(t.index) + " heads itself");
    }
  }
  if (n > 0 && roots != 1) {
    throw ValidationError(Violation::kNotATree, locate(s),
                          "expected exactly one root, found " + std::to_string(roots));
  }
  // Walk up from every token; a path longer than n means a cycle.
  for (const auto& t : s.tokens) {
    int cur = t.index;
    int steps = 0;
    while (s.tokens[cur].head != kRootHead) {
      cur = s.tokens[cur].head;
      if (++steps > n) {
        throw ValidationError(Violation::kNotATree, locate(s),
                              "dependency cycle through token " +
                                  std::to_string(t.index));
      }
    }
  }
}

void check_instance(const Sentence& s, const FrameInstance& inst) {
  const int n = s.size();
  const std::string where = locate(s) + " lu " + inst.lu;
  if (inst.lu.empty()) {
    throw ValidationError(Violation::kMalformed, where, "empty lu");
  }
  if (inst.frame.empty()) {
    throw ValidationError(Violation::kMalformed, where, "empty frame");
  }
  if (inst.target.empty()) {
    throw ValidationError(Violation::kMalformed, where, "empty target");
  }
  for (std::size_t i = 0; i < inst.target.size(); ++i) {
    int t = inst.target[i];
    if (t < 0 || t >= n) {
      throw ValidationError(Violation::kOutOfRange, where,
                            "target index " + std::to_string(t) + " outside sentence of length " +
                                std::to_string(n));
    }
    if (i > 0 && t != inst.target[i - 1] + 1) {
      throw ValidationError(Violation::kMalformed, where,
                            "target indices must be ascending and contiguous");
    }
  }
  const RoleSpan target_span{"", inst.target.front(), inst.target.back()};
  for (std::size_t i = 0; i < inst.roles.size(); ++i) {
    const auto& r = inst.roles[i];
    if (r.fe.empty()) {
      throw ValidationError(Violation::kMalformed, where, "role with empty fe");
    }
    if (r.start > r.end) {
      throw ValidationError(Violation::kMalformed, where,
                            "role " + r.fe + " has start > end");
    }
    if (r.start < 0 || r.end >= n) {
      throw ValidationError(Violation::kOutOfRange, where,
                            "role " + r.fe + " [" + std::to_string(r.start) + "," +
                                std::to_string(r.end) + "] outside sentence of length " +
                                std::to_string(n));
    }
    if (r.overlap(target_span) > 0) {
      throw ValidationError(Violation::kOverlap, where,
                            "role " + r.fe + " overlaps the target");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (r.overlap(inst.roles[j]) > 0) {
        throw ValidationError(Violation::kOverlap, where,
                              "roles " + inst.roles[j].fe + " and " + r.fe + " overlap");
      }
    }
  }
}

Sentence parse_sentence(const json& js, const std::string& doc_id,
                        const std::string& where_doc) {
  Sentence s;
  s.doc_id = doc_id;
  s.sent_id = detail::require_string(js, "sent_id", where_doc);
  const std::string where = "doc " + doc_id + " sent " + s.sent_id;
  const auto& tokens = detail::require_array(js, "tokens", where);
  s.tokens.reserve(tokens.size());
  for (const auto& jt : tokens) {
    Token t;
    t.index = static_cast<int>(s.tokens.size());
    t.form = detail::require_string(jt, "form", where);
    t.lemma = detail::require_string(jt, "lemma", where);
    t.pos = detail::require_string(jt, "pos", where);
    t.head = static_cast<int>(detail::require_int(jt, "head", where));
    t.deprel = detail::require_string(jt, "deprel", where);
    s.tokens.push_back(std::move(t));
  }
  if (auto it = js.find("frames"); it != js.end()) {
    if (!it->is_array()) {
      throw ValidationError(Violation::kMalformed, where, "\"frames\" must be an array");
    }
    for (const auto& jf : *it) {
      FrameInstance inst;
      inst.lu = detail::require_string(jf, "lu", where);
      inst.frame = detail::require_string(jf, "frame", where);
      for (const auto& v : detail::require_array(jf, "target", where)) {
        if (!v.is_number_integer()) {
          throw ValidationError(Violation::kMalformed, where, "target indices must be integers");
        }
        inst.target.push_back(v.get<int>());
      }
      if (auto rit = jf.find("roles"); rit != jf.end()) {
        if (!rit->is_array()) {
          throw ValidationError(Violation::kMalformed, where, "\"roles\" must be an array");
        }
        for (const auto& jr : *rit) {
          RoleSpan r;
          r.fe = detail::require_string(jr, "fe", where);
          r.start = static_cast<int>(detail::require_int(jr, "start", where));
          r.end = static_cast<int>(detail::require_int(jr, "end", where));
          inst.roles.push_back(std::move(r));
        }
      }
      s.frames.push_back(std::move(inst));
    }
  }
  validate_sentence(s);
  return s;
}

json to_json(const Sentence& s) {
  json tokens = json::array();
  for (const auto& t : s.tokens) {
    tokens.push_back({{"form", t.form},
                      {"lemma", t.lemma},
                      {"pos", t.pos},
                      {"head", t.head},
                      {"deprel", t.deprel}});
  }
  json frames = json::array();
  for (const auto& f : s.frames) {
    json roles = json::array();
    for (const auto& r : f.roles) {
      roles.push_back({{"fe", r.fe}, {"start", r.start}, {"end", r.end}});
    }
    frames.push_back(
        {{"lu", f.lu}, {"frame", f.frame}, {"target", f.target}, {"roles", roles}});
  }
  return {{"sent_id", s.sent_id}, {"tokens", tokens}, {"frames", frames}};
}

}  // namespace

void validate_sentence(const Sentence& s) {
  check_tree(s);
  std::set<std::pair<std::string, std::vector<int>>> keys;
  for (const auto& inst : s.frames) {
    check_instance(s, inst);
    if (!keys.emplace(inst.lu, inst.target).second) {
      throw ValidationError(Violation::kDuplicate, locate(s),
                            "two instances of lu " + inst.lu + " on the same target");
    }
  }
}

void validate_corpus(const Corpus& corpus) {
  std::set<std::string> doc_ids;
  for (const auto& d : corpus.documents) {
    if (!doc_ids.insert(d.doc_id).second) {
      throw ValidationError(Violation::kDuplicate, "doc " + d.doc_id,
                            "doc_id repeated in corpus");
    }
    std::set<std::string> sent_ids;
    for (const auto& s : d.sentences) {
      if (!sent_ids.insert(s.sent_id).second) {
        throw ValidationError(Violation::kDuplicate, locate(s),
                              "sent_id repeated in document");
      }
      validate_sentence(s);
    }
  }
}

void validate_against_lexicon(const Corpus& corpus, const FrameLexicon& lexicon) {
  for (const auto& d : corpus.documents) {
    for (const auto& s : d.sentences) {
      for (const auto& inst : s.frames) {
        const std::string where = locate(s) + " lu " + inst.lu;
        if (!lexicon.has_lu(inst.lu)) {
          throw ValidationError(Violation::kUnknownLu, where, "LU not in lexicon");
        }
        if (!lexicon.lu_evokes(inst.lu, inst.frame)) {
          throw ValidationError(Violation::kUnknownFrame, where,
                                "frame " + inst.frame + " not a candidate of the LU");
        }
        for (const auto& r : inst.roles) {
          if (!lexicon.allows(inst.frame, r.fe)) {
            throw ValidationError(Violation::kUnknownFe, where,
                                  "fe " + r.fe + " not in the inventory of " + inst.frame);
          }
        }
      }
    }
  }
}

Corpus parse_corpus_stream(std::istream& in, std::string_view origin) {
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = std::string(origin) + ":" + std::to_string(lineno);
    json jd = detail::parse_strict(line, where);
    Document doc;
    doc.doc_id = detail::require_string(jd, "doc_id", where);
    doc.source = detail::require_string(jd, "source", where);
    const std::string where_doc = "doc " + doc.doc_id;
    for (const auto& js : detail::require_array(jd, "sentences", where_doc)) {
      doc.sentences.push_back(parse_sentence(js, doc.doc_id, where_doc));
    }
    corpus.documents.push_back(std::move(doc));
  }
  validate_corpus(corpus);
  return corpus;
}

Corpus parse_corpus_string(std::string_view text, std::string_view origin) {
  std::istringstream in{std::string(text)};
  return parse_corpus_stream(in, origin);
}

Corpus parse_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_corpus_stream(in, path.string());
}

std::string serialize_document(const Document& doc) {
  json sentences = json::array();
  for (const auto& s : doc.sentences) sentences.push_back(to_json(s));
  json jd = {{"doc_id", doc.doc_id}, {"source", doc.source}, {"sentences", sentences}};
  return jd.dump();
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& d : corpus.documents) out << serialize_document(d) << '\n';
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ostringstream buf;
  write_corpus(corpus, buf);
  detail::write_file(path, buf.str());
}

int target_head(const Sentence& sentence, std::span<const int> target) {
  for (int t : target) {
    int h = sentence.tokens[t].head;
    if (std::find(target.begin(), target.end(), h) == target.end()) return t;
  }
  return target.front();
}

std::vector<LuOccurrence> iter_lu_occurrences(const Sentence& sentence,
                                              const FrameLexicon& lexicon) {
  std::vector<LuOccurrence> out;
  const int n = sentence.size();
  for (const auto& [lu, frames] : lexicon.lu_to_frames()) {
    std::vector<std::string> pattern;
    std::istringstream words(lu);
    for (std::string w; words >> w;) pattern.push_back(w);
    if (pattern.empty()) continue;
    const int m = static_cast<int>(pattern.size());
    for (int start = 0; start + m <= n; ++start) {
      bool match = true;
      for (int k = 0; k < m && match; ++k) {
        match = sentence.tokens[start + k].lemma == pattern[k];
      }
      if (!match) continue;
      LuOccurrence occ{lu, {}};
      for (int k = 0; k < m; ++k) occ.target.push_back(start + k);
      out.push_back(std::move(occ));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.target.front() != b.target.front()) return a.target.front() < b.target.front();
    return a.lu < b.lu;
  });
  return out;
}

}  // namespace framecrf
