#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace causalflow {

enum class ErrorKind {
  Config,      // bad configuration or unknown names
  Data,        // malformed or insufficient input data
  Estimation,  // estimator preconditions violated
  Index,       // selector/index out of range
  Numeric,     // factorization or numerical failure
  Capacity,    // table/size bound exceeded
  Parameter,   // invalid operation parameter
  Io,          // file read/write failure
  Fit,         // optimizer could not produce a fit
};

const char* to_string(ErrorKind kind);

// All library failures carry the module, operation, and offending parameter so
// the CLI can emit a structured diagnostic before exiting nonzero.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, std::string op, std::string param,
        const std::string& message)
      : std::runtime_error(message),
        kind_(kind),
        module_(std::move(module)),
        op_(std::move(op)),
        param_(std::move(param)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& module_name() const { return module_; }
  const std::string& operation() const { return op_; }
  const std::string& parameter() const { return param_; }

  // "[numeric] gaussian-measures/cbi_rate (selector): message"
  std::string diagnostic() const;

 private:
  ErrorKind kind_;
  std::string module_;
  std::string op_;
  std::string param_;
};

}  // namespace causalflow
