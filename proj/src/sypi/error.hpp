#pragma once

#include <stdexcept>
#include <string>

namespace sypi {

// Maps one-to-one onto the C API status codes and CLI exit codes.
enum class ErrorKind {
  Usage = 1,     // invalid argument or configuration
  Data = 2,      // bad or insufficient input data
  Internal = 3,  // broken internal invariant
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_usage(const std::string& what) { throw Error(ErrorKind::Usage, what); }
[[noreturn]] inline void throw_data(const std::string& what) { throw Error(ErrorKind::Data, what); }
[[noreturn]] inline void throw_internal(const std::string& what) {
  throw Error(ErrorKind::Internal, what);
}

}  // namespace sypi
