// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polyscene {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A rejection-sampling loop hit its attempt cap.
class SamplingExhausted : public Error {
 public:
  using Error::Error;
};

/// look_at was asked for a frame whose forward axis is parallel to `up`.
class DegenerateLookAt : public Error {
 public:
  using Error::Error;
};

/// More than half of the non-parallel plane triples are singular.
class DegenerateArrangement : public Error {
 public:
  using Error::Error;
};

class NotBounded : public Error {
 public:
  using Error::Error;
};

/// User parameters that cannot be turned into generator parameters.
class Unsatisfiable : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// generate_scene ran out of attempts. `closest_count` is the object count
/// of the attempt that came nearest to the requested count.
class GenerationExhausted : public Error {
 public:
  GenerationExhausted(const std::string& what, int attempts, int closest_count)
      : Error(what), attempts_(attempts), closest_count_(closest_count) {}

  int attempts() const { return attempts_; }
  int closest_count() const { return closest_count_; }

 private:
  int attempts_;
  int closest_count_;
};

/// Malformed OBJ input. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(reason) {}

  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

/// Imported geometry outside the allowed scene cube.
class BoundsError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class RenderTimeout : public Error {
 public:
  using Error::Error;
};

}  // namespace polyscene
