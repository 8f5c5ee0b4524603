#pragma once

#include <stdexcept>
#include <string>

namespace pulse {

// Error taxonomy: user-facing errors derive from Error so the CLI can map
// them to exit code 1, everything else is an internal error (exit code 2).
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class FormatError : public Error {
public:
  explicit FormatError(const std::string& msg) : Error("format error: " + msg) {}
};

class UnsupportedLayoutError : public Error {
public:
  explicit UnsupportedLayoutError(const std::string& msg)
      : Error("unsupported layout: " + msg) {}
};

class DimensionError : public Error {
public:
  explicit DimensionError(const std::string& msg) : Error("dimension error: " + msg) {}
};

class ParameterError : public Error {
public:
  explicit ParameterError(const std::string& msg) : Error("parameter error: " + msg) {}
};

class InsufficientDataError : public Error {
public:
  explicit InsufficientDataError(const std::string& msg)
      : Error("insufficient data: " + msg) {}
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& msg) : Error("config error: " + msg) {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string& msg) : Error("io error: " + msg) {}
};

}  // namespace pulse
