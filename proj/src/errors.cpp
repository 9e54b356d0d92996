#include "imbal/errors.hpp"

#include <sstream>

namespace imbal {

namespace {

std::string volume_message(int minute, const std::string& ladder, double requested, double available) {
    std::ostringstream os;
    os << "ladder " << ladder << " cannot deliver " << requested << " MW (capacity " << available
       << " MW)";
    if (minute >= 0) os << " at minute " << minute;
    return os.str();
}

}  // namespace

VolumeExceedsLadder::VolumeExceedsLadder(int minute, std::string ladder, double requested,
                                         double available)
    : Error("VolumeExceedsLadder", ErrorCategory::Infeasible,
            volume_message(minute, ladder, requested, available)),
      minute_(minute),
      ladder_(std::move(ladder)),
      requested_(requested),
      available_(available) {}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : Error("ParseError", ErrorCategory::Validation,
            "parse error at line " + std::to_string(line) + ", column " + std::to_string(column) +
                ": " + what),
      line_(line),
      column_(column) {}

SchemaError::SchemaError(std::string field, const std::string& reason)
    : Error("SchemaError", ErrorCategory::Validation, "field '" + field + "': " + reason),
      field_(std::move(field)) {}

ValidationError::ValidationError(std::string invariant, const std::string& detail)
    : Error("ValidationError", ErrorCategory::Validation,
            "invariant '" + invariant + "' violated: " + detail),
      invariant_(std::move(invariant)) {}

}  // namespace imbal
