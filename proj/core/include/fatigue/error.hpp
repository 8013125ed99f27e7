#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fatigue {

/// Base of every error raised by the library. The CLI maps these to exit
/// code 1 (input error); anything else escaping is treated as internal.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Trace timestamps not strictly increasing. `row` is 1-based over data rows.
class MonotonicityError : public Error {
 public:
  explicit MonotonicityError(std::size_t row);
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// A channel value violates its domain (e.g. eye_closure outside [0,1]).
class RangeError : public Error {
 public:
  RangeError(std::string channel, std::size_t row, const std::string& detail);
  const std::string& channel() const noexcept { return channel_; }
  std::size_t row() const noexcept { return row_; }

 private:
  std::string channel_;
  std::size_t row_;
};

class MissingChannel : public Error {
 public:
  explicit MissingChannel(std::string channel);
  const std::string& channel() const noexcept { return channel_; }

 private:
  std::string channel_;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class OrderingError : public Error {
 public:
  using Error::Error;
};

class SchemeError : public Error {
 public:
  SchemeError(std::string feature, const std::string& detail);
  const std::string& feature() const noexcept { return feature_; }

 private:
  std::string feature_;
};

class UnboundFeature : public Error {
 public:
  explicit UnboundFeature(std::string feature);
  const std::string& feature() const noexcept { return feature_; }

 private:
  std::string feature_;
};

/// 1-based line/column into rule source text.
struct SourceLocation {
  std::size_t line = 0;
  std::size_t column = 0;
  friend bool operator==(const SourceLocation&, const SourceLocation&) = default;
};

class UnknownClass : public Error {
 public:
  explicit UnknownClass(std::string class_label);
  UnknownClass(std::string class_label, std::string rule, SourceLocation where);
  const std::string& class_label() const noexcept { return class_label_; }
  const std::string& rule() const noexcept { return rule_; }
  const SourceLocation& where() const noexcept { return where_; }

 private:
  std::string class_label_;
  std::string rule_;
  SourceLocation where_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(SourceLocation where, std::string expected, const std::string& found);
  const SourceLocation& where() const noexcept { return where_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  SourceLocation where_;
  std::string expected_;
};

class DuplicateRuleName : public Error {
 public:
  DuplicateRuleName(std::string rule, SourceLocation where);
  const std::string& rule() const noexcept { return rule_; }
  const SourceLocation& where() const noexcept { return where_; }

 private:
  std::string rule_;
  SourceLocation where_;
};

class AmbiguityError : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

/// A module error raised while reasoning over one window of a run.
class WindowError : public Error {
 public:
  WindowError(std::size_t index, double start, double end, const std::string& detail);
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace fatigue
