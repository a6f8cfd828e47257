#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gdivide {

/// Coarse error category; the CLI maps each to a process exit code.
enum class ErrorKind {
  kUsage,        // bad flags or configuration
  kMissingInput, // missing file, month, or observation
  kInvariant,    // input violates a data contract
  kNumerical,    // estimator or metric failed
  kTransport,    // acquisition failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string tag, const std::string& message)
      : std::runtime_error(message), kind_(kind), tag_(std::move(tag)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Short machine-readable name, e.g. "parse_error".
  const std::string& tag() const noexcept { return tag_; }

 private:
  ErrorKind kind_;
  std::string tag_;
};

#define GDIVIDE_DEFINE_ERROR(Name, kind, tag)                                   \
  class Name : public Error {                                                \
   public:                                                                   \
    explicit Name(const std::string& message) : Error(kind, tag, message) {} \
  };

GDIVIDE_DEFINE_ERROR(ConfigError, ErrorKind::kUsage, "config_error")
GDIVIDE_DEFINE_ERROR(FileError, ErrorKind::kMissingInput, "file_error")
GDIVIDE_DEFINE_ERROR(MissingDataError, ErrorKind::kMissingInput, "missing_data")
GDIVIDE_DEFINE_ERROR(IntegrityError, ErrorKind::kInvariant, "integrity_error")
GDIVIDE_DEFINE_ERROR(RangeError, ErrorKind::kInvariant, "range_error")
GDIVIDE_DEFINE_ERROR(DataQualityError, ErrorKind::kInvariant, "data_quality_error")
GDIVIDE_DEFINE_ERROR(SampleSizeError, ErrorKind::kInvariant, "sample_size_error")
GDIVIDE_DEFINE_ERROR(UndefinedMetricError, ErrorKind::kNumerical, "undefined_metric")
GDIVIDE_DEFINE_ERROR(DomainError, ErrorKind::kNumerical, "domain_error")
GDIVIDE_DEFINE_ERROR(SingularityError, ErrorKind::kNumerical, "singularity_error")
GDIVIDE_DEFINE_ERROR(DegenerateError, ErrorKind::kNumerical, "degenerate_error")
GDIVIDE_DEFINE_ERROR(ConvergenceError, ErrorKind::kNumerical, "convergence_error")
GDIVIDE_DEFINE_ERROR(SamplerError, ErrorKind::kNumerical, "sampler_error")
GDIVIDE_DEFINE_ERROR(ComparisonError, ErrorKind::kInvariant, "comparison_error")
GDIVIDE_DEFINE_ERROR(TransportError, ErrorKind::kTransport, "transport_error")
GDIVIDE_DEFINE_ERROR(UnavailableCountryError, ErrorKind::kTransport, "unavailable_country")

#undef GDIVIDE_DEFINE_ERROR

/// Malformed input row. Carries the 1-based line number and offending field.
class ParseError : public Error {
 public:
  ParseError(std::string path, std::size_t line, std::string field, const std::string& detail);

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

}  // namespace gdivide
