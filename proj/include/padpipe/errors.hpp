#pragma once

#include <stdexcept>
#include <string>

namespace pad {

// Base of every error raised by the pipeline. Callers that only need a
// message can catch this; the CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ManifestError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NoUsableFrames : public Error {
 public:
  using Error::Error;
};

class InsufficientFrames : public Error {
 public:
  using Error::Error;
};

class EmptyRidgeSet : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class MetricsUndefined : public Error {
 public:
  using Error::Error;
};

class LayoutMismatch : public Error {
 public:
  using Error::Error;
};

class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

class DataQualityError : public Error {
 public:
  using Error::Error;
};

}  // namespace pad
