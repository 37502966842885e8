#pragma once

#include <stdexcept>
#include <string>

namespace netqa {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class GeometryError : public Error {
public:
  using Error::Error;
};

/// Malformed input file. The message carries the file name and, when the
/// underlying parser reports one, the byte offset.
class ParseError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

/// Degenerate statistical input (too few observations, zero variance).
class StatsError : public Error {
public:
  using Error::Error;
};

} // namespace netqa
