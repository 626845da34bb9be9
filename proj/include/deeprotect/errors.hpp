#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace deeprotect {

// All library failures are one of two kinds. ValidationError covers bad
// arguments, malformed inputs and violated preconditions; RuntimeError covers
// IO, parse-independent math failures and anything that can only be detected
// while running. The CLI maps them to exit codes 2 and 1 respectively and
// prints them as "ERROR <code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(int exit_code, std::string code, const std::string& detail)
      : std::runtime_error("ERROR " + code + ": " + detail),
        exit_code_(exit_code),
        code_(std::move(code)) {}

  int exit_code() const { return exit_code_; }
  const std::string& code() const { return code_; }

 private:
  int exit_code_;
  std::string code_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string code, const std::string& detail)
      : Error(2, std::move(code), detail) {}
};

class RuntimeError : public Error {
 public:
  RuntimeError(std::string code, const std::string& detail)
      : Error(1, std::move(code), detail) {}
};

}  // namespace deeprotect
