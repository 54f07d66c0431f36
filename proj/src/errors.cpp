#include "causalflow/errors.hpp"

namespace causalflow {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Data: return "data";
    case ErrorKind::Estimation: return "estimation";
    case ErrorKind::Index: return "index";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Io: return "io";
    case ErrorKind::Fit: return "fit";
  }
  return "unknown";
}

std::string Error::diagnostic() const {
  std::string out = "[";
  out += to_string(kind_);
  out += "] ";
  out += module_;
  out += "/";
  out += op_;
  if (!param_.empty()) {
    out += " (";
    out += param_;
    out += ")";
  }
  out += ": ";
  out += what();
  return out;
}

}  // namespace causalflow
