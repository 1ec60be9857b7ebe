#pragma once

#include <stdexcept>
#include <string>

namespace shle {

// Every failure the library reports carries one of these codes so callers
// (and the CLI exit-code mapping) can react without string matching.
enum class ErrorCode {
  configuration,      // bad rig/manifest/config: wrong dims, missing fields
  domain,             // argument outside an operation's domain
  format,             // malformed bytes in a file
  validation,         // well-formed file with out-of-range values
  usage,              // bad request (unknown perturbation kind, bad flag)
  degenerate_spec,    // synthetic scene that never shows the target
  tracker_unavailable,// tracker needs data the sequence does not carry
  empty_extraction,   // no valid-depth pixel inside the box
  empty_after_filter, // depth filter removed every point
  no_sample,          // frame contributed no height sample
  no_device,          // no anchor detection anywhere in the scene
  no_scene_estimate   // scene finished with zero estimated frames
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

class ConfigurationError : public Error {
public:
  explicit ConfigurationError(const std::string& what)
      : Error(ErrorCode::configuration, what) {}
};

class DomainError : public Error {
public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCode::domain, what) {}
};

class FormatError : public Error {
public:
  explicit FormatError(const std::string& what)
      : Error(ErrorCode::format, what) {}
};

class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorCode::validation, what) {}
};

}  // namespace shle
