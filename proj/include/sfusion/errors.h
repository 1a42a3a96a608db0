#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sfusion {

// Base for every error raised by the library. The CLI maps subclasses onto
// exit codes, so keep the hierarchy flat.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidSampleError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class BehindCameraError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class PredictorFaultError : public Error {
 public:
  using Error::Error;
};

class AllocationRefusedError : public Error {
 public:
  AllocationRefusedError(std::size_t required_bytes, std::size_t budget_bytes)
      : Error("volume allocation refused: requires " +
              std::to_string(required_bytes) + " bytes, budget is " +
              std::to_string(budget_bytes) + " bytes"),
        required_bytes_(required_bytes),
        budget_bytes_(budget_bytes) {}

  std::size_t required_bytes() const { return required_bytes_; }
  std::size_t budget_bytes() const { return budget_bytes_; }

 private:
  std::size_t required_bytes_;
  std::size_t budget_bytes_;
};

}  // namespace sfusion
