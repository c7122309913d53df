#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace twinepr {

/// Base of every error thrown by the library. `kind()` is the stable
/// machine-readable tag used in the CLI's error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error("ValidationError", field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("DomainError", what) {}
};

class DegenerateFrame : public Error {
 public:
  explicit DegenerateFrame(const std::string& what) : Error("DegenerateFrame", what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error("DimensionMismatch", what) {}
};

class PlaneMismatch : public Error {
 public:
  explicit PlaneMismatch(const std::string& what) : Error("PlaneMismatch", what) {}
};

class InsufficientSamples : public Error {
 public:
  explicit InsufficientSamples(const std::string& what) : Error("InsufficientSamples", what) {}
};

class EmptySupport : public Error {
 public:
  explicit EmptySupport(const std::string& what) : Error("EmptySupport", what) {}
};

class StaleConfig : public Error {
 public:
  explicit StaleConfig(const std::string& what) : Error("StaleConfig", what) {}
};

class IoError : public Error {
 public:
  IoError(std::string path, const std::string& what)
      : Error("IoError", path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class MissingFrames : public Error {
 public:
  explicit MissingFrames(const std::string& what) : Error("MissingFrames", what) {}
};

}  // namespace twinepr
