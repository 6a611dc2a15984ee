#include "synth.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "framecrf/error.h"

namespace framecrf::tools {
namespace {

struct Rng {
  std::mt19937_64 engine;

  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(engine() % n); }
  bool chance(double p) { return static_cast<double>(engine() >> 11) * 0x1.0p-53 < p; }
  template <typename T>
  const T& one(const std::vector<T>& v) { return v[pick(v.size())]; }
};

struct Noun {
  std::string lemma;
  std::string det;
};

struct Vocab {
  std::vector<Noun> persons;
  std::vector<Noun> things;
  std::vector<std::string> adjectives;
  std::vector<std::string> infinitives;
  std::vector<std::string> plurals;  // after "parmi les"
  std::vector<Noun> reasons;
  std::vector<Noun> opponents;
  std::vector<Noun> issues;
  std::vector<Noun> forces;
  std::vector<Noun> targets;
  // Time: "<year_prep> <year>" or "<period_prep> <det> <period>".
  std::string year_prep;
  std::vector<std::string> years;
  std::string period_prep;
  std::vector<Noun> periods;
  // Place: "<site_prep> <det> <site>" or "<city_prep> <city>".
  std::string site_prep;
  std::vector<Noun> sites;
  std::string city_prep;
  std::vector<std::string> cities;
};

const Vocab& vocab_a() {
  static const Vocab v{
      {{"soldat", "le"}, {"caporal", "le"}, {"lieutenant", "le"}, {"sergent", "le"},
       {"infirmière", "la"}, {"colonel", "le"}},
      {{"lettre", "la"}, {"message", "le"}, {"colis", "le"}, {"carte", "la"},
       {"télégramme", "le"}, {"fusil", "le"}},
      {"blessé", "jeune", "épuisé", "boueux"},
      {"partir", "reculer", "tenir", "creuser"},
      {"tranchées", "secteurs", "ordres"},
      {{"prudence", "la"}, {"patrie", "la"}, {"honneur", "le"}},
      {{"ennemi", "le"}, {"régiment", "le"}, {"bataillon", "le"}},
      {{"ration", "la"}, {"permission", "la"}, {"relève", "la"}},
      {{"escadron", "le"}, {"artillerie", "la"}, {"infanterie", "la"}},
      {{"fort", "le"}, {"pont", "le"}, {"village", "le"}},
      "en",
      {"1914", "1915", "1916", "1917", "1918"},
      "pendant",
      {{"hiver", "le"}, {"guerre", "la"}, {"offensive", "la"}},
      "dans",
      {{"tranchée", "la"}, {"abri", "le"}, {"boyau", "le"}},
      "à",
      {"Verdun", "Reims", "Ypres", "Arras"},
  };
  return v;
}

const Vocab& vocab_b() {
  static const Vocab v{
      {{"paysan", "le"}, {"notaire", "le"}, {"curé", "le"}, {"meunier", "le"},
       {"fermière", "la"}, {"maire", "le"}},
      {{"registre", "le"}, {"testament", "le"}, {"contrat", "le"}, {"récolte", "la"},
       {"facture", "la"}, {"cadastre", "le"}},
      {"honnête", "pauvre", "riche", "ancien"},
      {"vendre", "signer", "semer", "rester"},
      {"offres", "terrains", "héritiers"},
      {{"profit", "le"}, {"famille", "la"}, {"dot", "la"}},
      {{"voisin", "le"}, {"fermier", "le"}, {"percepteur", "le"}},
      {{"prix", "le"}, {"loyer", "le"}, {"partage", "le"}},
      {{"bande", "la"}, {"meute", "la"}, {"troupe", "la"}},
      {{"ferme", "la"}, {"moulin", "le"}, {"diligence", "la"}},
      "vers",
      {"1870", "1871", "1872", "1873", "1874"},
      "durant",
      {{"nuit", "la"}, {"été", "le"}, {"moisson", "la"}},
      "sous",
      {{"préau", "le"}, {"halle", "la"}, {"tonnelle", "la"}},
      "devant",
      {"Dijon", "Beaune", "Auxerre", "Sens"},
  };
  return v;
}

struct Span {
  int start = 0;
  int end = 0;
  int head = 0;
};

class Builder {
 public:
  int add(const std::string& form, const std::string& lemma, const std::string& pos,
          int head = kRootHead, const std::string& deprel = "root") {
    Token t;
    t.index = static_cast<int>(tokens_.size());
    t.form = form;
    t.lemma = lemma;
    t.pos = pos;
    t.head = head;
    t.deprel = deprel;
    tokens_.push_back(std::move(t));
    return tokens_.back().index;
  }
  int add(const std::string& word, const std::string& pos) { return add(word, word, pos); }
  void attach(int token, int head, const std::string& deprel) {
    tokens_[token].head = head;
    tokens_[token].deprel = deprel;
  }
  int next() const { return static_cast<int>(tokens_.size()); }
  std::vector<Token> take() { return std::move(tokens_); }

 private:
  std::vector<Token> tokens_;
};

void add_role(FrameInstance& inst, const std::string& fe, const Span& span) {
  inst.roles.push_back({fe, span.start, span.end});
}

Span noun_phrase(Builder& b, const Noun& n, Rng& rng, const Vocab& v, double adj_p = 0.35) {
  const int det = b.add(n.det, "DET");
  const int noun = b.add(n.lemma, "NC");
  b.attach(det, noun, "det");
  Span s{det, noun, noun};
  if (rng.chance(adj_p)) {
    s.end = b.add(rng.one(v.adjectives), "ADJ");
    b.attach(s.end, noun, "mod");
  }
  return s;
}

// Preposition heading `np`, which is built right after it.
template <typename MakeNp>
Span prep_phrase(Builder& b, const std::string& prep, MakeNp&& make_np) {
  const int p = b.add(prep, "P");
  Span np = make_np();
  b.attach(np.head, p, "obj");
  return {p, np.end, p};
}

Span subject(Builder& b, Rng& rng, const Vocab& v, double pronoun_p) {
  if (rng.chance(pronoun_p)) {
    const int il = b.add(rng.chance(0.5) ? "il" : "elle", "CLS");
    return {il, il, il};
  }
  return noun_phrase(b, rng.one(v.persons), rng, v);
}

Span time_phrase(Builder& b, Rng& rng, const Vocab& v) {
  if (rng.chance(0.5)) {
    return prep_phrase(b, v.year_prep, [&] {
      const int y = b.add(rng.one(v.years), "NC");
      return Span{y, y, y};
    });
  }
  return prep_phrase(b, v.period_prep, [&] { return noun_phrase(b, rng.one(v.periods), rng, v, 0.0); });
}

Span place_phrase(Builder& b, Rng& rng, const Vocab& v) {
  if (rng.chance(0.5)) {
    return prep_phrase(b, v.city_prep, [&] {
      const int c = b.add(rng.one(v.cities), "NPP");
      return Span{c, c, c};
    });
  }
  return prep_phrase(b, v.site_prep, [&] { return noun_phrase(b, rng.one(v.sites), rng, v, 0.2); });
}

// Optional trailing Time/Place modifiers of `head`, in random order.
void circumstances(Builder& b, Rng& rng, const Vocab& v, FrameInstance& inst, int head,
                   double time_p, double place_p) {
  const bool time_first = rng.chance(0.5);
  for (int k = 0; k < 2; ++k) {
    const bool is_time = (k == 0) == time_first;
    if (!rng.chance(is_time ? time_p : place_p)) continue;
    Span s = is_time ? time_phrase(b, rng, v) : place_phrase(b, rng, v);
    b.attach(s.head, head, "mod");
    add_role(inst, is_time ? "Time" : "Place", s);
  }
}

enum class Clause { kDiscover, kDiscoverOther, kAware, kDecide, kCombat };

struct ClauseOut {
  FrameInstance instance;
  int verb = 0;
};

// One finite clause around a verbal LU. The verb is left unattached.
ClauseOut verb_clause(Builder& b, Clause kind, Rng& rng, const Vocab& v, bool allow_fronting,
                      double pronoun_p, bool trailing = true) {
  ClauseOut out;
  FrameInstance& inst = out.instance;

  Span front{};
  bool fronted = false;
  int comma = -1;
  if (allow_fronting && kind != Clause::kDiscoverOther && rng.chance(0.15)) {
    front = time_phrase(b, rng, v);
    comma = b.add(",", "PONCT");
    fronted = true;
  }
  const Span subj = subject(b, rng, v, pronoun_p);
  auto finish_front = [&](int verb) {
    b.attach(subj.head, verb, "suj");
    if (fronted) {
      b.attach(front.head, verb, "mod");
      b.attach(comma, verb, "ponct");
    }
  };

  switch (kind) {
    case Clause::kDiscoverOther: {
      inst.lu = "découvrir";
      inst.frame = std::string(kOtherFrame);
      const int se = b.add("se", "se", "CLR");
      const int verb = b.add("découvrit", "découvrir", "V");
      b.attach(se, verb, "aff");
      finish_front(verb);
      inst.target = {verb};
      out.verb = verb;
      FrameInstance scratch;
      if (trailing) circumstances(b, rng, v, scratch, verb, 0.4, 0.3);
      return out;
    }
    case Clause::kDiscover: {
      inst.lu = "découvrir";
      inst.frame = "Becoming_aware";
      const int verb = b.add("découvrit", "découvrir", "V");
      finish_front(verb);
      const Span obj = noun_phrase(b, rng.one(v.things), rng, v);
      b.attach(obj.head, verb, "obj");
      inst.target = {verb};
      add_role(inst, "Cognizer", subj);
      add_role(inst, "Phenomenon", obj);
      out.verb = verb;
      break;
    }
    case Clause::kAware: {
      inst.lu = "prendre conscience";
      inst.frame = "Becoming_aware";
      const int verb = b.add("prit", "prendre", "V");
      const int noun = b.add("conscience", "NC");
      b.attach(noun, verb, "obj");
      finish_front(verb);
      const Span pp = prep_phrase(b, "de", [&] { return noun_phrase(b, rng.one(v.things), rng, v); });
      b.attach(pp.head, noun, "dep");
      inst.target = {verb, noun};
      add_role(inst, "Cognizer", subj);
      add_role(inst, "Phenomenon", pp);
      out.verb = verb;
      break;
    }
    case Clause::kDecide: {
      inst.lu = "décider";
      inst.frame = "Deciding";
      const int verb = b.add("décida", "décider", "V");
      finish_front(verb);
      inst.target = {verb};
      add_role(inst, "Cognizer", subj);
      const Span decision = prep_phrase(b, "de", [&] {
        const int inf = b.add(rng.one(v.infinitives), "VINF");
        return Span{inf, inf, inf};
      });
      b.attach(decision.head, verb, "de_obj");
      add_role(inst, "Decision", decision);
      if (rng.chance(0.4)) {
        const Span among = prep_phrase(b, "parmi", [&] {
          const int det = b.add("les", "le", "DET");
          const int n = b.add(rng.one(v.plurals), "NC");
          b.attach(det, n, "det");
          return Span{det, n, n};
        });
        b.attach(among.head, verb, "mod");
        add_role(inst, "Possibilities", among);
      }
      if (rng.chance(0.4)) {
        const Span why = prep_phrase(b, "pour", [&] { return noun_phrase(b, rng.one(v.reasons), rng, v, 0.0); });
        b.attach(why.head, verb, "mod");
        add_role(inst, "Explanation", why);
      }
      out.verb = verb;
      break;
    }
    case Clause::kCombat: {
      inst.lu = "combattre";
      const bool hostile = rng.chance(0.5);
      inst.frame = hostile ? "Hostile_encounter" : "Quarreling";
      const int verb = b.add("combattit", "combattre", "V");
      finish_front(verb);
      const int cue = b.add(hostile ? "militairement" : "verbalement", "ADV");
      b.attach(cue, verb, "mod");
      inst.target = {verb};
      add_role(inst, hostile ? "Side_1" : "Arguers", subj);
      if (rng.chance(0.75)) {
        const Span other = prep_phrase(b, hostile ? "contre" : "sur", [&] {
          return noun_phrase(b, rng.one(hostile ? v.opponents : v.issues), rng, v);
        });
        b.attach(other.head, verb, "mod");
        add_role(inst, hostile ? "Side_2" : "Issue", other);
      }
      out.verb = verb;
      break;
    }
  }
  if (fronted) add_role(inst, "Time", front);
  if (trailing) circumstances(b, rng, v, inst, out.verb, 0.55, 0.5);
  return out;
}

void sort_roles(FrameInstance& inst) {
  std::sort(inst.roles.begin(), inst.roles.end(),
            [](const RoleSpan& a, const RoleSpan& c) { return a.start < c.start; });
}

void close_sentence(Builder& b, int root) {
  const int dot = b.add(".", "PONCT");
  b.attach(dot, root, "ponct");
}

Sentence simple_verb_sentence(Rng& rng, const Vocab& v, Clause kind) {
  Builder b;
  ClauseOut c = verb_clause(b, kind, rng, v, true, 0.15);
  sort_roles(c.instance);
  close_sentence(b, c.verb);
  Sentence s;
  s.tokens = b.take();
  s.frames.push_back(std::move(c.instance));
  return s;
}

// Two clauses on the same LU joined by "et"; the second verb hangs off the
// conjunction. Sentence-final Time/Place phrases attach to either verb at
// random and are roles of that verb only, so nothing but the tree path tells
// the two readings apart.
Sentence coordination_sentence(Rng& rng, const Vocab& v) {
  Clause first;
  Clause second;
  switch (rng.pick(3)) {
    case 0:
      first = rng.chance(0.8) ? Clause::kDiscover : Clause::kDiscoverOther;
      second = rng.chance(0.8) ? Clause::kDiscover : Clause::kDiscoverOther;
      break;
    case 1:
      first = second = Clause::kDecide;
      break;
    default:
      first = second = Clause::kCombat;
      break;
  }
  Builder b;
  ClauseOut c1 = verb_clause(b, first, rng, v, true, 0.15);
  const int et = b.add("et", "CC");
  b.attach(et, c1.verb, "coord");
  ClauseOut c2 = verb_clause(b, second, rng, v, false, 0.45, false);
  b.attach(c2.verb, et, "dep_coord");
  const bool time_first = rng.chance(0.5);
  for (int k = 0; k < 2; ++k) {
    const bool is_time = (k == 0) == time_first;
    if (!rng.chance(is_time ? 0.6 : 0.55)) continue;
    Span s = is_time ? time_phrase(b, rng, v) : place_phrase(b, rng, v);
    ClauseOut& owner = rng.chance(0.5) ? c1 : c2;
    b.attach(s.head, owner.verb, "mod");
    if (!owner.instance.is_other()) add_role(owner.instance, is_time ? "Time" : "Place", s);
  }
  sort_roles(c1.instance);
  sort_roles(c2.instance);
  close_sentence(b, c1.verb);
  Sentence s;
  s.tokens = b.take();
  s.frames.push_back(std::move(c1.instance));
  s.frames.push_back(std::move(c2.instance));
  return s;
}

// "l' attaque [de X] [contre Y] ..." with the noun as root, or as subject of
// "eut lieu" carrying the Time/Place modifiers.
Sentence attack_sentence(Rng& rng, const Vocab& v, bool as_root) {
  Builder b;
  FrameInstance inst;
  inst.lu = "attaque";
  inst.frame = "Attack";
  const int det = b.add("l'", "le", "DET");
  const int noun = b.add("attaque", "NC");
  b.attach(det, noun, "det");
  inst.target = {noun};
  if (rng.chance(0.8)) {
    const Span by = prep_phrase(b, "de", [&] { return noun_phrase(b, rng.one(v.forces), rng, v); });
    b.attach(by.head, noun, "dep");
    add_role(inst, "Assailant", by);
  }
  if (rng.chance(0.7)) {
    const Span against = prep_phrase(b, "contre", [&] { return noun_phrase(b, rng.one(v.targets), rng, v); });
    b.attach(against.head, noun, "dep");
    add_role(inst, "Victim", against);
  }
  int root = noun;
  if (as_root) {
    circumstances(b, rng, v, inst, noun, 0.5, 0.5);
  } else {
    const int verb = b.add("eut", "avoir", "V");
    const int lieu = b.add("lieu", "NC");
    b.attach(noun, verb, "suj");
    b.attach(lieu, verb, "obj");
    root = verb;
    const Span when = time_phrase(b, rng, v);
    b.attach(when.head, verb, "mod");
    add_role(inst, "Time", when);
    circumstances(b, rng, v, inst, verb, 0.0, 0.5);
  }
  b.attach(root, kRootHead, "root");
  close_sentence(b, root);
  Sentence s;
  s.tokens = b.take();
  s.frames.push_back(std::move(inst));
  return s;
}

// "X eut une attaque cardiaque": the medical sense, outside the lexicon.
Sentence attack_other_sentence(Rng& rng, const Vocab& v) {
  Builder b;
  const Span subj = subject(b, rng, v, 0.2);
  const int verb = b.add("eut", "avoir", "V");
  b.attach(subj.head, verb, "suj");
  const int det = b.add("une", "un", "DET");
  const int noun = b.add("attaque", "NC");
  const int adj = b.add("cardiaque", "ADJ");
  b.attach(det, noun, "det");
  b.attach(noun, verb, "obj");
  b.attach(adj, noun, "mod");
  FrameInstance scratch;
  circumstances(b, rng, v, scratch, verb, 0.5, 0.3);
  close_sentence(b, verb);
  Sentence s;
  s.tokens = b.take();
  s.frames.push_back({"attaque", std::string(kOtherFrame), {noun}, {}});
  return s;
}

Sentence random_sentence(Rng& rng, const Vocab& v) {
  const double r = static_cast<double>(rng.engine() >> 11) * 0x1.0p-53;
  if (r < 0.12) return simple_verb_sentence(rng, v, Clause::kDiscover);
  if (r < 0.17) return simple_verb_sentence(rng, v, Clause::kDiscoverOther);
  if (r < 0.23) return simple_verb_sentence(rng, v, Clause::kAware);
  if (r < 0.35) return simple_verb_sentence(rng, v, Clause::kDecide);
  if (r < 0.47) return simple_verb_sentence(rng, v, Clause::kCombat);
  if (r < 0.55) return attack_sentence(rng, v, true);
  if (r < 0.63) return attack_sentence(rng, v, false);
  if (r < 0.68) return attack_other_sentence(rng, v);
  return coordination_sentence(rng, v);
}

std::string padded(std::size_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, value);
  return buf;
}

}  // namespace

FrameLexicon synthetic_lexicon() {
  FrameLexicon lex;
  lex.add_frame("Becoming_aware", {"Cognizer", "Phenomenon", "Time", "Place"});
  lex.add_frame("Deciding",
                {"Cognizer", "Decision", "Possibilities", "Explanation", "Time", "Place"});
  lex.add_frame("Hostile_encounter", {"Side_1", "Side_2", "Time", "Place"});
  lex.add_frame("Quarreling", {"Arguers", "Issue", "Time", "Place"});
  lex.add_frame("Attack", {"Assailant", "Victim", "Time", "Place"});
  lex.add_lu("découvrir", {"Becoming_aware"});
  lex.add_lu("prendre conscience", {"Becoming_aware"});
  lex.add_lu("décider", {"Deciding"});
  lex.add_lu("combattre", {"Hostile_encounter", "Quarreling"});
  lex.add_lu("attaque", {"Attack"});
  return lex;
}

QuestionMap synthetic_questions() {
  QuestionMap q;
  q.add("Becoming_aware", "Cognizer", "who-agent");
  q.add("Deciding", "Cognizer", "who-agent");
  q.add("Attack", "Assailant", "who-agent");
  q.add("Hostile_encounter", "Side_1", "who-agent");
  q.add("Quarreling", "Arguers", "who-agent");
  q.add("Becoming_aware", "Phenomenon", "what");
  q.add("Deciding", "Decision", "what");
  q.add("Attack", "Victim", "what");
  q.add("Hostile_encounter", "Side_2", "what");
  q.add("Quarreling", "Issue", "what");
  q.add("Deciding", "Possibilities", "among-what");
  q.add("Deciding", "Explanation", "why");
  for (const char* frame :
       {"Becoming_aware", "Deciding", "Hostile_encounter", "Quarreling", "Attack"}) {
    q.add(frame, "Time", "when");
    q.add(frame, "Place", "where");
  }
  return q;
}

SyntheticData generate_synthetic_corpus(int n_sentences, std::uint64_t seed) {
  if (n_sentences < 10) {
    throw ConfigError("synthetic corpus needs at least 10 sentences, got " +
                      std::to_string(n_sentences));
  }
  Rng rng{std::mt19937_64(seed)};
  const std::size_t n = static_cast<std::size_t>(n_sentences);
  const std::size_t doc_size = std::clamp<std::size_t>(n / 20, 5, 10);

  SyntheticData data;
  data.lexicon = synthetic_lexicon();
  data.questions = synthetic_questions();
  std::size_t made = 0;
  for (std::size_t d = 0; made < n; ++d) {
    const bool source_a = d % 2 == 0;
    const Vocab& v = source_a ? vocab_a() : vocab_b();
    Document doc;
    doc.source = source_a ? kSourceA : kSourceB;
    doc.doc_id = doc.source + "-" + padded(d / 2 + 1, 4);
    for (std::size_t i = 0; i < doc_size && made < n; ++i, ++made) {
      Sentence s = random_sentence(rng, v);
      s.doc_id = doc.doc_id;
      s.sent_id = "s" + padded(i + 1, 2);
      doc.sentences.push_back(std::move(s));
    }
    data.corpus.documents.push_back(std::move(doc));
  }
  return data;
}

void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_corpus(data.corpus, dir / "corpus.jsonl");
  write_lexicon(data.lexicon, dir / "lexicon.json");
  std::ofstream q(dir / "questions.tsv", std::ios::binary);
  q << "# frame\tfe\tquestion\n" << data.questions.to_tsv();
  if (!q) throw IoError("cannot write " + (dir / "questions.tsv").string());
}

}  // namespace framecrf::tools
