#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>

namespace framecrf {

inline constexpr std::string_view kOtherFrame = "OTHER";

// LU -> candidate frames and frame -> frame-element inventory. The OTHER
// frame is always present with an empty inventory.
class FrameLexicon {
 public:
  using FrameSet = std::set<std::string>;

  FrameLexicon();

  // Throws ValidationError(kDuplicate) if the frame is already declared.
  void add_frame(const std::string& frame, FrameSet fes);
  // Throws ValidationError on a duplicate LU or an undeclared frame.
  void add_lu(const std::string& lu, FrameSet frames);

  bool has_lu(std::string_view lu) const;
  bool has_frame(std::string_view frame) const;
  // Empty set for unknown LUs.
  const FrameSet& frames_of(std::string_view lu) const;
  // Throws ValidationError(kUnknownFrame) for undeclared frames.
  const FrameSet& fes_of(std::string_view frame) const;
  bool allows(std::string_view frame, std::string_view fe) const;
  // True if `frame` is OTHER or one of the LU's candidate frames.
  bool lu_evokes(std::string_view lu, std::string_view frame) const;

  const std::map<std::string, FrameSet, std::less<>>& lu_to_frames() const {
    return lu_to_frames_;
  }
  const std::map<std::string, FrameSet, std::less<>>& frame_to_fes() const {
    return frame_to_fes_;
  }

  // Canonical JSON in the lexicon file format (OTHER omitted).
  std::string to_json() const;
  // 16 hex digits identifying the canonical JSON.
  std::string fingerprint() const;

  bool operator==(const FrameLexicon&) const = default;

 private:
  std::map<std::string, FrameSet, std::less<>> lu_to_frames_;
  std::map<std::string, FrameSet, std::less<>> frame_to_fes_;
};

FrameLexicon parse_lexicon(const std::filesystem::path& path);
FrameLexicon parse_lexicon_string(std::string_view text,
                                  std::string_view origin = "<lexicon>");
void write_lexicon(const FrameLexicon& lexicon,
                   const std::filesystem::path& path);

// FNV-1a 64-bit, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace framecrf
