#include "framecrf/lexicon.h"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "framecrf/error.h"
#include "json_util.h"

namespace framecrf {

const char* violation_name(Violation v) {
  switch (v) {
    case Violation::kMalformed: return "malformed";
    case Violation::kOutOfRange: return "out-of-range";
    case Violation::kOverlap: return "overlap";
    case Violation::kNotATree: return "not-a-tree";
    case Violation::kDuplicate: return "duplicate";
    case Violation::kUnknownLu: return "unknown-lu";
    case Violation::kUnknownFrame: return "unknown-frame";
    case Violation::kUnknownFe: return "unknown-fe";
  }
  return "unknown";
}

namespace detail {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

json parse_strict(std::string_view text, const std::string& where) {
  std::vector<std::vector<std::string>> seen;
  std::string duplicate;
  json::parser_callback_t cb = [&](int /*depth*/, json::parse_event_t event,
                                   json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
        seen.emplace_back();
        break;
      case json::parse_event_t::object_end:
        if (!seen.empty()) seen.pop_back();
        break;
      case json::parse_event_t::key: {
        auto key = parsed.get<std::string>();
        auto& keys = seen.back();
        for (const auto& k : keys) {
          if (k == key && duplicate.empty()) duplicate = key;
        }
        keys.push_back(std::move(key));
        break;
      }
      default:
        break;
    }
    return true;
  };
  json value;
  try {
    value = json::parse(text.begin(), text.end(), cb);
  } catch (const json::parse_error& e) {
    throw ValidationError(Violation::kMalformed, where, e.what());
  }
  if (!duplicate.empty()) {
    throw ValidationError(Violation::kDuplicate, where,
                          "duplicate key \"" + duplicate + "\"");
  }
  return value;
}

}  // namespace detail

FrameLexicon::FrameLexicon() {
  frame_to_fes_.emplace(std::string(kOtherFrame), FrameSet{});
}

void FrameLexicon::add_frame(const std::string& frame, FrameSet fes) {
  if (frame == kOtherFrame) {
    if (!fes.empty()) {
      throw ValidationError(Violation::kUnknownFe, "frame OTHER",
                            "OTHER must have an empty inventory");
    }
    return;
  }
  auto [it, inserted] = frame_to_fes_.emplace(frame, std::move(fes));
  if (!inserted) {
    throw ValidationError(Violation::kDuplicate, "frame " + frame,
                          "frame declared twice");
  }
}

void FrameLexicon::add_lu(const std::string& lu, FrameSet frames) {
  if (lu.empty()) {
    throw ValidationError(Violation::kMalformed, "lexicon", "empty LU name");
  }
  if (lu_to_frames_.contains(lu)) {
    throw ValidationError(Violation::kDuplicate, "lu " + lu,
                          "LU declared twice");
  }
  for (const auto& f : frames) {
    if (!frame_to_fes_.contains(f)) {
      throw ValidationError(Violation::kUnknownFrame, "lu " + lu,
                            "references undeclared frame " + f);
    }
  }
  frames.erase(std::string(kOtherFrame));
  lu_to_frames_.emplace(lu, std::move(frames));
}

bool FrameLexicon::has_lu(std::string_view lu) const {
  return lu_to_frames_.find(lu) != lu_to_frames_.end();
}

bool FrameLexicon::has_frame(std::string_view frame) const {
  return frame_to_fes_.find(frame) != frame_to_fes_.end();
}

const FrameLexicon::FrameSet& FrameLexicon::frames_of(std::string_view lu) const {
  static const FrameSet kEmpty;
  auto it = lu_to_frames_.find(lu);
  return it == lu_to_frames_.end() ? kEmpty : it->second;
}

const FrameLexicon::FrameSet& FrameLexicon::fes_of(std::string_view frame) const {
  auto it = frame_to_fes_.find(frame);
  if (it == frame_to_fes_.end()) {
    throw ValidationError(Violation::kUnknownFrame, "lexicon",
                          "unknown frame " + std::string(frame));
  }
  return it->second;
}

bool FrameLexicon::allows(std::string_view frame, std::string_view fe) const {
  auto it = frame_to_fes_.find(frame);
  return it != frame_to_fes_.end() && it->second.contains(std::string(fe));
}

bool FrameLexicon::lu_evokes(std::string_view lu, std::string_view frame) const {
  if (frame == kOtherFrame) return true;
  return frames_of(lu).contains(std::string(frame));
}

std::string FrameLexicon::to_json() const {
  detail::json lus = detail::json::object();
  for (const auto& [lu, frames] : lu_to_frames_) {
    lus[lu] = detail::json(std::vector<std::string>(frames.begin(), frames.end()));
  }
  detail::json frames = detail::json::object();
  for (const auto& [frame, fes] : frame_to_fes_) {
    if (frame == kOtherFrame) continue;
    frames[frame] = detail::json(std::vector<std::string>(fes.begin(), fes.end()));
  }
  return detail::json{{"lus", lus}, {"frames", frames}}.dump();
}

std::string FrameLexicon::fingerprint() const { return fnv1a_hex(to_json()); }

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

FrameLexicon parse_lexicon_string(std::string_view text, std::string_view origin) {
  const std::string where(origin);
  FrameLexicon lexicon;
  // An empty file is an empty lexicon.
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return lexicon;

  auto root = detail::parse_strict(text, where);
  if (!root.is_object()) {
    throw ValidationError(Violation::kMalformed, where, "lexicon must be a JSON object");
  }
  auto string_set = [&](const detail::json& arr, const std::string& ctx) {
    if (!arr.is_array()) {
      throw ValidationError(Violation::kMalformed, where, ctx + " must be an array");
    }
    FrameLexicon::FrameSet out;
    for (const auto& v : arr) {
      if (!v.is_string()) {
        throw ValidationError(Violation::kMalformed, where, ctx + " must hold strings");
      }
      if (!out.insert(v.get<std::string>()).second) {
        throw ValidationError(Violation::kDuplicate, where,
                              ctx + " repeats " + v.get<std::string>());
      }
    }
    return out;
  };

  if (auto it = root.find("frames"); it != root.end()) {
    if (!it->is_object()) {
      throw ValidationError(Violation::kMalformed, where, "\"frames\" must be an object");
    }
    for (const auto& [frame, fes] : it->items()) {
      lexicon.add_frame(frame, string_set(fes, "frames." + frame));
    }
  }
  if (auto it = root.find("lus"); it != root.end()) {
    if (!it->is_object()) {
      throw ValidationError(Violation::kMalformed, where, "\"lus\" must be an object");
    }
    for (const auto& [lu, frames] : it->items()) {
      lexicon.add_lu(lu, string_set(frames, "lus." + lu));
    }
  }
  return lexicon;
}

FrameLexicon parse_lexicon(const std::filesystem::path& path) {
  return parse_lexicon_string(detail::read_file(path), path.string());
}

void write_lexicon(const FrameLexicon& lexicon, const std::filesystem::path& path) {
  auto j = detail::json::parse(lexicon.to_json());
  detail::write_file(path, j.dump(2) + "\n");
}

}  // namespace framecrf
