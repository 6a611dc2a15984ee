#pragma once

#include <stdexcept>
#include <string>

namespace framecrf {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// What a rejected corpus or lexicon record got wrong.
enum class Violation {
  kMalformed,     // not valid JSON, or a field is missing / has the wrong type
  kOutOfRange,    // token index outside the sentence
  kOverlap,       // role spans overlap each other or the target
  kNotATree,      // dependency heads do not form a single rooted tree
  kDuplicate,     // repeated doc_id, LU entry or (lu, target) instance
  kUnknownLu,     // LU missing from the lexicon
  kUnknownFrame,  // frame not declared / not allowed for the LU
  kUnknownFe,     // frame element outside the frame's inventory
};

const char* violation_name(Violation v);

class ValidationError : public Error {
 public:
  ValidationError(Violation kind, std::string where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what),
        kind_(kind),
        where_(std::move(where)) {}

  Violation kind() const { return kind_; }
  // "doc <id> sent <id>" or the file name, whichever locates the record.
  const std::string& where() const { return where_; }

 private:
  Violation kind_;
  std::string where_;
};

// Bad feature configuration, bad experiment spec, bad flag value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An annotation cannot be expressed in a label set.
class EncodingError : public Error {
 public:
  using Error::Error;
};

// Non-finite objective or other numerical breakdown during training.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace framecrf
