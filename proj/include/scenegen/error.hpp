#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scenegen {

/// Broad failure classes. The CLI maps each one to a stable exit code.
enum class ErrorKind {
  Usage,          // bad input documents, syntax, validation
  Sampling,       // evaluation failures, unsatisfiable scenarios
  Io,             // filesystem, network, archives
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Rejected descriptor; key_path looks like "models[2].type".
class DescriptorError : public Error {
 public:
  DescriptorError(std::string key_path, const std::string& msg)
      : Error(ErrorKind::Usage, key_path.empty() ? msg : key_path + ": " + msg),
        key_path_(std::move(key_path)) {}
  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& msg)
      : Error(ErrorKind::Usage,
              std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line), column_(column), message_(msg) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

class UnsupportedGeometry : public Error {
 public:
  explicit UnsupportedGeometry(std::string shape)
      : Error(ErrorKind::Usage, "unsupported collision geometry: " + shape),
        shape_(std::move(shape)) {}
  const std::string& shape() const noexcept { return shape_; }

 private:
  std::string shape_;
};

class GeometryError : public Error {
 public:
  explicit GeometryError(const std::string& msg) : Error(ErrorKind::Usage, msg) {}
};

class MeshError : public Error {
 public:
  explicit MeshError(const std::string& msg) : Error(ErrorKind::Io, msg) {}
};

class NetworkError : public Error {
 public:
  explicit NetworkError(const std::string& msg) : Error(ErrorKind::Io, msg) {}
};

class ArchiveError : public Error {
 public:
  explicit ArchiveError(const std::string& msg) : Error(ErrorKind::Io, msg) {}
};

class ModelNotFound : public Error {
 public:
  explicit ModelNotFound(const std::string& msg) : Error(ErrorKind::Io, msg) {}
};

class RegistryError : public Error {
 public:
  explicit RegistryError(const std::string& msg) : Error(ErrorKind::Io, msg) {}
};

/// The registry on disk no longer matches the model files it was built from.
class StaleRegistryError : public RegistryError {
 public:
  explicit StaleRegistryError(const std::string& msg) : RegistryError(msg) {}
};

class EvalError : public Error {
 public:
  explicit EvalError(const std::string& msg) : Error(ErrorKind::Sampling, msg) {}
};

class UnsatisfiableError : public Error {
 public:
  explicit UnsatisfiableError(const std::string& msg) : Error(ErrorKind::Sampling, msg) {}
};

class EmitError : public Error {
 public:
  explicit EmitError(const std::string& msg) : Error(ErrorKind::Io, msg) {}
};

class ScaleError : public Error {
 public:
  explicit ScaleError(const std::string& msg) : Error(ErrorKind::Sampling, msg) {}
};

}  // namespace scenegen
