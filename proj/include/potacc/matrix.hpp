//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace potacc {

/// Row-major dense matrix; row-major matches the on-disk tensor layout.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixI8 = Matrix<std::int8_t>;
using MatrixI32 = Matrix<std::int32_t>;
using MatrixI64 = Matrix<std::int64_t>;

/// Raw 4-bit weight codes, one per element; the PoT method is carried alongside.
using CodeMatrix = Matrix<std::uint8_t>;

}  // namespace potacc
