#pragma once

#include <stdexcept>
#include <string>

namespace glmsim {

// Value outside the domain of a link or the support of a family.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Non-finite argument where a finite one is required.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A density or sampler produced a non-finite intermediate.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible or invalid configuration (family/link pairing, shape preset, grid).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Data that cannot be fitted, e.g. a rank-deficient design.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SamplerStuckError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace glmsim
