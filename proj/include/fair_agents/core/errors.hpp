#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fair_agents {

// Root of every error raised by the library. Callers that only need to know
// "something in fair_agents failed" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// --- core-model ---

class EmptyAfterGrounding : public Error {
 public:
  explicit EmptyAfterGrounding(std::size_t violations)
      : Error("ballot is empty after grounding (" + std::to_string(violations) +
              " violations)"),
        violations_(violations) {}
  std::size_t violations() const { return violations_; }

 private:
  std::size_t violations_;
};

class PoolMismatch : public Error {
 public:
  using Error::Error;
};

class NoCandidates : public Error {
 public:
  NoCandidates() : Error("no candidates: every ballot is empty") {}
};

class DuplicateItemId : public Error {
 public:
  explicit DuplicateItemId(const std::string& id)
      : Error("duplicate item id '" + id + "'"), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// --- aggregation ---

class InvalidProfile : public Error {
 public:
  using Error::Error;
};

// --- agents / adapter ---

class AdapterError : public Error {
 public:
  using Error::Error;
};

class AdapterTimeout : public AdapterError {
 public:
  using AdapterError::AdapterError;
};

class AdapterMalformed : public AdapterError {
 public:
  using AdapterError::AdapterError;
};

class AdapterUnavailable : public AdapterError {
 public:
  using AdapterError::AdapterError;
};

// --- orchestrator ---

class NoActiveAgents : public Error {
 public:
  using Error::Error;
};

// --- evaluation ---

class ZeroMass : public Error {
 public:
  ZeroMass() : Error("exposure vector has zero total mass") {}
};

class NotNormalized : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class UndefinedBaseline : public Error {
 public:
  using Error::Error;
};

class UnknownMetricDirection : public Error {
 public:
  using Error::Error;
};

// --- data-io ---

class MalformedRecord : public Error {
 public:
  MalformedRecord(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class MissingRequiredField : public Error {
 public:
  MissingRequiredField(std::size_t line, const std::string& field)
      : Error("line " + std::to_string(line) + ": missing required field '" +
              field + "'"),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class UnknownMetricId : public SchemaError {
 public:
  UnknownMetricId(const std::string& path, const std::string& name)
      : SchemaError(path, "unknown metric id '" + name + "'") {}
};

class UnknownRule : public SchemaError {
 public:
  UnknownRule(const std::string& path, const std::string& name)
      : SchemaError(path, "unknown rule '" + name + "'") {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fair_agents
