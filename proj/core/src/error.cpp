#include "fatigue/error.hpp"

#include <utility>

#include "text_util.hpp"

namespace fatigue {

namespace {

std::string at(SourceLocation where) {
  return std::to_string(where.line) + ":" + std::to_string(where.column);
}

}  // namespace

MonotonicityError::MonotonicityError(std::size_t row)
    : Error("timestamps not strictly increasing at row " + std::to_string(row)), row_(row) {}

RangeError::RangeError(std::string channel, std::size_t row, const std::string& detail)
    : Error("channel '" + channel + "' out of range at row " + std::to_string(row) + ": " + detail),
      channel_(std::move(channel)),
      row_(row) {}

MissingChannel::MissingChannel(std::string channel)
    : Error("missing channel '" + channel + "'"), channel_(std::move(channel)) {}

SchemeError::SchemeError(std::string feature, const std::string& detail)
    : Error("scheme error for '" + feature + "': " + detail), feature_(std::move(feature)) {}

UnboundFeature::UnboundFeature(std::string feature)
    : Error("feature '" + feature + "' has no band set"), feature_(std::move(feature)) {}

UnknownClass::UnknownClass(std::string class_label)
    : Error("unknown class '" + class_label + "'"), class_label_(std::move(class_label)) {}

UnknownClass::UnknownClass(std::string class_label, std::string rule, SourceLocation where)
    : Error(at(where) + ": unknown class '" + class_label + "' in rule '" + rule + "'"),
      class_label_(std::move(class_label)),
      rule_(std::move(rule)),
      where_(where) {}

SyntaxError::SyntaxError(SourceLocation where, std::string expected, const std::string& found)
    : Error(at(where) + ": expected " + expected + ", found " + found),
      where_(where),
      expected_(std::move(expected)) {}

DuplicateRuleName::DuplicateRuleName(std::string rule, SourceLocation where)
    : Error(at(where) + ": duplicate rule name '" + rule + "'"), rule_(std::move(rule)), where_(where) {}

WindowError::WindowError(std::size_t index, double start, double end, const std::string& detail)
    : Error("window " + std::to_string(index) + " [" + text_util::format_double(start) + ", " + text_util::format_double(end) +
            "): " + detail),
      index_(index) {}

}  // namespace fatigue
