#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace composekit {

enum class ErrorKind {
  // config-lang
  SyntaxError,
  DuplicateDeclaration,
  // tree-scanner
  MissingSimulationUnit,
  ClassificationError,
  NonApiFileAtRoot,
  NotADirectory,
  // resolver
  UnknownSimulation,
  MissingRequireTarget,
  ExcludedRequireTarget,
  InvalidDefault,
  ImplementationConflict,
  UnknownOverrideTarget,
  InvalidRequest,
  // arbitrator
  AmbiguousImplementation,
  MissingStub,
  AmbiguousParameter,
  TypeMismatch,
  UnknownParameter,
  ConflictingTypes,
  // emitter / harness / cli
  UnknownName,
  MalformedManifest,
  MissingFixture,
  BaselineAbsent,
  MalformedSuite,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `path` is tree-relative when the
/// failure concerns a file in the source tree; `line` is 1-based, 0 when the
/// failure is not tied to a line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string path, int line, std::string message);
  Error(ErrorKind kind, std::string path, std::string message)
      : Error(kind, std::move(path), 0, std::move(message)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string &path() const noexcept { return path_; }
  int line() const noexcept { return line_; }
  const std::string &message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string path_;
  int line_;
  std::string message_;
};

}  // namespace composekit
