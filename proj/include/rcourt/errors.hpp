#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rcourt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Agent output that does not have a usable Verb[payload] shape.
class MalformedAction : public Error {
 public:
  using Error::Error;
};

// Network or HTTP failure after the retry budget was spent.
class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

// The scripted backend holds no response for the requested (task, label, step).
class ScriptExhausted : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class CorpusUnavailable : public Error {
 public:
  using Error::Error;
};

class MissingContext : public Error {
 public:
  using Error::Error;
};

class InsufficientItems : public Error {
 public:
  using Error::Error;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration; always raised before any side effect.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A record log line that cannot be decoded.
class RecordError : public Error {
 public:
  RecordError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rcourt
