#include "composekit/error.hpp"

namespace composekit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::DuplicateDeclaration: return "DuplicateDeclaration";
    case ErrorKind::MissingSimulationUnit: return "MissingSimulationUnit";
    case ErrorKind::ClassificationError: return "ClassificationError";
    case ErrorKind::NonApiFileAtRoot: return "NonApiFileAtRoot";
    case ErrorKind::NotADirectory: return "NotADirectory";
    case ErrorKind::UnknownSimulation: return "UnknownSimulation";
    case ErrorKind::MissingRequireTarget: return "MissingRequireTarget";
    case ErrorKind::ExcludedRequireTarget: return "ExcludedRequireTarget";
    case ErrorKind::InvalidDefault: return "InvalidDefault";
    case ErrorKind::ImplementationConflict: return "ImplementationConflict";
    case ErrorKind::UnknownOverrideTarget: return "UnknownOverrideTarget";
    case ErrorKind::InvalidRequest: return "InvalidRequest";
    case ErrorKind::AmbiguousImplementation: return "AmbiguousImplementation";
    case ErrorKind::MissingStub: return "MissingStub";
    case ErrorKind::AmbiguousParameter: return "AmbiguousParameter";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::UnknownParameter: return "UnknownParameter";
    case ErrorKind::ConflictingTypes: return "ConflictingTypes";
    case ErrorKind::UnknownName: return "UnknownName";
    case ErrorKind::MalformedManifest: return "MalformedManifest";
    case ErrorKind::MissingFixture: return "MissingFixture";
    case ErrorKind::BaselineAbsent: return "BaselineAbsent";
    case ErrorKind::MalformedSuite: return "MalformedSuite";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string format_what(ErrorKind kind, const std::string &path, int line,
                        const std::string &message) {
  std::string out(to_string(kind));
  if (!path.empty()) {
    out += ' ';
    out += path;
    if (line > 0) out += ':' + std::to_string(line);
  }
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, std::string path, int line, std::string message)
    : std::runtime_error(format_what(kind, path, line, message)),
      kind_(kind),
      path_(std::move(path)),
      line_(line),
      message_(std::move(message)) {}

}  // namespace composekit
