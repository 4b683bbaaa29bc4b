#pragma once

#include <stdexcept>
#include <string>

namespace oasis {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text; `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(std::string const& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a domain constraint.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// File system failures. The message always names the path.
class IoError : public Error {
 public:
  IoError(std::string const& what, std::string path);
  std::string const& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Projective or camera geometry that cannot be evaluated (w ~ 0,
/// bearings near 90 degrees, singular homographies).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A timestamp that cannot be bracketed by the GPS track.
class OutOfTrackError : public Error {
 public:
  using Error::Error;
};

/// Too few valid depth samples to average.
class InsufficientDepthError : public Error {
 public:
  using Error::Error;
};

}  // namespace oasis
