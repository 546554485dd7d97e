#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgre {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input record. `line` is 1-based; 0 when the input is not
// line-oriented (e.g. a whole-file JSON array, where it holds the record index
// instead).
class ParseError : public Error {
 public:
  ParseError(std::string path, std::size_t line, std::string field,
             const std::string& what)
      : Error(path + ":" + std::to_string(line) +
              (field.empty() ? "" : " [" + field + "]") + ": " + what),
        path_(std::move(path)),
        line_(line),
        field_(std::move(field)) {}

  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::string path_;
  std::size_t line_;
  std::string field_;
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Network failure that survived all retries.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Peer answered, but the answer violates the wire protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace kgre
