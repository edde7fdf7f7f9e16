#pragma once

#include <stdexcept>
#include <string>

namespace spmap {

/// Base of every error raised for bad input data (graphs, platforms, files).
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class GraphError : public Error {
  public:
    using Error::Error;
};

class PlatformError : public Error {
  public:
    using Error::Error;
};

class FormatError : public Error {
  public:
    using Error::Error;
};

class InfeasibleMapping : public Error {
  public:
    using Error::Error;
};

} // namespace spmap
