#pragma once

#include <stdexcept>
#include <string>

namespace gabm {

// Base for all domain errors so callers can catch gabm failures wholesale.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A response that could not be turned into a valid structured result.
// Parse failures are recoverable: the caller re-prompts against the
// remaining retry budget.
class ParseError : public Error {
 public:
  enum class Kind {
    missing_field,
    out_of_range,
    not_integral,
    bad_amount,
    empty_response,
  };

  ParseError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Provider-side failure. Retryable errors (timeouts, rate limits, 5xx)
// are retried with exponential backoff; others surface immediately.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, bool retryable, int status = 0)
      : Error(what), retryable_(retryable), status_(status) {}
  bool retryable() const { return retryable_; }
  int status() const { return status_; }

 private:
  bool retryable_;
  int status_;
};

// Missing or rejected credentials. Never retried.
class CredentialError : public Error {
 public:
  using Error::Error;
};

// A record or file violating a declared invariant.
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed or incomplete input file (vignette library, config, dataset).
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Design matrix is rank deficient.
class CollinearityError : public Error {
 public:
  using Error::Error;
};

}  // namespace gabm
