#include "gdivide/error.hpp"

namespace gdivide {

ParseError::ParseError(std::string path, std::size_t line, std::string field,
                       const std::string& detail)
    : Error(ErrorKind::kInvariant, "parse_error",
            path + ":" + std::to_string(line) + ": field '" + field + "': " + detail),
      line_(line),
      field_(std::move(field)) {}

}  // namespace gdivide
