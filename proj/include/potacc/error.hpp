//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace potacc {

enum class ErrorCode {
  InvalidInput,
  ZeroNotRepresentable,
  ZeroWeightNotRepresentable,
  NotPoTWeight,
  AccumulatorOverflow,
  LengthMismatch,
  ShapeMismatch,
  MethodMismatch,
  UnsupportedLayer,
  MalformedModel,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace potacc
