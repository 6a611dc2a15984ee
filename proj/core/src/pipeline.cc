#include "framecrf/pipeline.h"

#include <cstdio>
#include <sstream>

#include "framecrf/error.h"
#include "json_util.h"
#include "parallel.h"

namespace framecrf {

using detail::json;

const CrfModel* ModelRegistry::find(const std::string& lu) const {
  auto it = models.find(lu);
  return it == models.end() ? nullptr : &it->second;
}

std::vector<TrainInstance> collect_training_instances(const Corpus& corpus,
                                                      const std::string& lu,
                                                      const LabelSet& labels,
                                                      const FeatureConfig& config,
                                                      FeatureDictionary& dict) {
  std::vector<TrainInstance> out;
  for (const auto& doc : corpus.documents) {
    for (const auto& sentence : doc.sentences) {
      for (const auto& inst : sentence.frames) {
        if (inst.lu != lu) continue;
        TrainInstance ti;
        ti.x = extract_sequence_features(sentence, inst.target, config, dict);
        ti.y = encode_labels(sentence, inst, labels);
        out.push_back(std::move(ti));
      }
    }
  }
  return out;
}

ModelRegistry train_all(const Corpus& corpus, const FrameLexicon& lexicon,
                        const FeatureConfig& config, const TrainOptions& options, int jobs,
                        TrainReport* report) {
  config.check();
  validate_against_lexicon(corpus, lexicon);

  std::map<std::string, int> counts;
  for (const auto& doc : corpus.documents)
    for (const auto& s : doc.sentences)
      for (const auto& inst : s.frames) ++counts[inst.lu];

  std::vector<std::string> lus;
  for (const auto& [lu, frames] : lexicon.lu_to_frames()) {
    if (counts[lu] > 0) {
      lus.push_back(lu);
    } else if (report) {
      report->warnings.push_back("lu " + lu + " has no training instances; skipped");
    }
  }

  std::vector<CrfModel> trained(lus.size());
  detail::parallel_for(lus.size(), jobs, [&](std::size_t i) {
    LabelSet labels = LabelSet::build(lus[i], lexicon);
    FeatureDictionary dict;
    auto instances = collect_training_instances(corpus, lus[i], labels, config, dict);
    trained[i] = train_crf(std::move(instances), std::move(labels), std::move(dict), config,
                           options);
  });

  ModelRegistry registry;
  registry.lexicon = lexicon;
  registry.config = config;
  for (std::size_t i = 0; i < lus.size(); ++i) {
    if (report) report->instances_per_lu[lus[i]] = counts[lus[i]];
    registry.models.emplace(lus[i], std::move(trained[i]));
  }
  return registry;
}

PredictionDiagnostics& PredictionDiagnostics::operator+=(const PredictionDiagnostics& o) {
  sentences += o.sentences;
  occurrences += o.occurrences;
  predicted_instances += o.predicted_instances;
  dropped_roles += o.dropped_roles;
  repaired_orphans += o.repaired_orphans;
  skipped_occurrences += o.skipped_occurrences;
  for (const auto& [lu, n] : o.skipped_lus) skipped_lus[lu] += n;
  return *this;
}

std::vector<FrameInstance> predict_sentence(const Sentence& sentence,
                                            const ModelRegistry& registry,
                                            PredictionDiagnostics* diagnostics) {
  PredictionDiagnostics local;
  local.sentences = 1;
  std::vector<FrameInstance> out;
  for (const auto& occ : iter_lu_occurrences(sentence, registry.lexicon)) {
    ++local.occurrences;
    const CrfModel* model = registry.find(occ.lu);
    if (model == nullptr) {
      ++local.skipped_occurrences;
      ++local.skipped_lus[occ.lu];
      continue;
    }
    auto x = extract_sequence_features(sentence, occ.target, model->config,
                                       static_cast<const FeatureDictionary&>(model->dict));
    auto decoded = model->decode(x);
    DecodeStats stats;
    auto instance = decode_labels(decoded.labels, occ.target, model->labels, &stats);
    local.repaired_orphans += static_cast<std::size_t>(stats.repaired_orphans);
    auto filtered = filter_incompatible_roles(std::move(instance), registry.lexicon);
    local.dropped_roles += filtered.dropped.size();
    out.push_back(std::move(filtered.instance));
    ++local.predicted_instances;
  }
  if (diagnostics) *diagnostics += local;
  return out;
}

Corpus predict_corpus(const Corpus& corpus, const ModelRegistry& registry, int jobs,
                      PredictionDiagnostics* diagnostics) {
  Corpus out = corpus;
  std::vector<Sentence*> sentences;
  for (auto& doc : out.documents)
    for (auto& s : doc.sentences) sentences.push_back(&s);

  std::vector<PredictionDiagnostics> per_sentence(sentences.size());
  detail::parallel_for(sentences.size(), jobs, [&](std::size_t i) {
    sentences[i]->frames = predict_sentence(*sentences[i], registry, &per_sentence[i]);
  });
  if (diagnostics) {
    for (const auto& d : per_sentence) *diagnostics += d;
  }
  return out;
}

PredictionDiagnostics predict_corpus_to_file(const Corpus& corpus,
                                             const ModelRegistry& registry,
                                             const std::filesystem::path& out_path,
                                             int jobs) {
  PredictionDiagnostics diagnostics;
  Corpus predicted = predict_corpus(corpus, registry, jobs, &diagnostics);
  write_corpus(predicted, out_path);
  return diagnostics;
}

std::string diagnostics_to_json(const PredictionDiagnostics& d) {
  json skipped = json::object();
  for (const auto& [lu, n] : d.skipped_lus) skipped[lu] = n;
  return json{{"sentences", d.sentences},
              {"occurrences", d.occurrences},
              {"predicted_instances", d.predicted_instances},
              {"dropped_roles", d.dropped_roles},
              {"repaired_orphans", d.repaired_orphans},
              {"skipped_occurrences", d.skipped_occurrences},
              {"skipped_lus", skipped}}
      .dump(2);
}

std::string model_file_name(const std::string& lu) {
  std::string out;
  for (unsigned char c : lu) {
    if (c == '/' || c == '\\' || c == '%' || c < 0x20) {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out += buf;
    } else {
      out += static_cast<char>(c);
    }
  }
  return out + ".model.json";
}

void save_registry(const ModelRegistry& registry, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json lus = json::array();
  for (const auto& [lu, model] : registry.models) {
    detail::write_file(dir / model_file_name(lu), serialize_model(model));
    lus.push_back(lu);
  }
  json index = {{"version", kModelFormatVersion},
                {"lexicon_hash", registry.lexicon.fingerprint()},
                {"lexicon", json::parse(registry.lexicon.to_json())},
                {"feature_config", json::parse(feature_config_to_json(registry.config))},
                {"lus", lus}};
  detail::write_file(dir / "registry.json", index.dump(2) + "\n");
}

ModelRegistry load_registry(const std::filesystem::path& dir) {
  const auto index_path = dir / "registry.json";
  json index = detail::parse_strict(detail::read_file(index_path), index_path.string());
  ModelRegistry registry;
  try {
    registry.lexicon = parse_lexicon_string(index.at("lexicon").dump(), index_path.string());
    if (registry.lexicon.fingerprint() != index.at("lexicon_hash").get<std::string>()) {
      throw ValidationError(Violation::kMalformed, index_path.string(),
                            "lexicon hash does not match the stored lexicon");
    }
    registry.config = feature_config_from_json(index.at("feature_config").dump());
    for (const auto& lu_json : index.at("lus")) {
      const auto lu = lu_json.get<std::string>();
      auto model = deserialize_model(detail::read_file(dir / model_file_name(lu)));
      if (model.labels.lu() != lu) {
        throw ValidationError(Violation::kMalformed, (dir / model_file_name(lu)).string(),
                              "model file holds lu " + model.labels.lu());
      }
      if (!(model.config == registry.config)) {
        throw ValidationError(Violation::kMalformed, (dir / model_file_name(lu)).string(),
                              "feature config differs from registry.json");
      }
      registry.models.emplace(lu, std::move(model));
    }
  } catch (const json::exception& e) {
    throw ValidationError(Violation::kMalformed, index_path.string(), e.what());
  }
  return registry;
}

}  // namespace framecrf
