//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

// Reference implementations shared by the tests. They are written from the method term
// tables and textbook definitions and deliberately avoid the library's own helpers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "potacc/pot_codec.hpp"

namespace oracle {

/// Level of a raw 4-bit code, read straight off the term table.
inline double level(potacc::Method m, std::uint8_t raw) {
  const bool neg = raw & 0x8;
  double v = 0;
  if (m == potacc::Method::QKeras) {
    v = std::ldexp(1.0, raw & 0x7);
  } else {
    static const double msq_first[] = {0, 0.5, 0.25, 0.125};
    static const double apot_first[] = {0, 0.5, 0.25, 0.0625};
    const int e1 = (raw >> 1) & 0x3;
    const int e2 = raw & 0x1;
    if (m == potacc::Method::Msq) {
      v = msq_first[e1] + (e2 ? 0.5 : 0.0);
    } else {
      v = apot_first[e1] + (e2 ? 0.125 : 0.0);
    }
  }
  return neg ? -v : v;
}

inline int fraction_bits(potacc::Method m) {
  return m == potacc::Method::Msq ? 3 : m == potacc::Method::Apot ? 4 : 0;
}

/// level * 2^F as an integer (exact: every level is a multiple of 2^-F).
inline std::int64_t scaled_level(potacc::Method m, std::uint8_t raw) {
  return static_cast<std::int64_t>(std::ldexp(level(m, raw), fraction_bits(m)));
}

/// Row-major dense GEMM in 64-bit: C[i][j] = sum_p A[i][p] * W[p][j].
inline std::vector<std::int64_t> gemm(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& w,
                                      int m, int k, int n) {
  std::vector<std::int64_t> c(static_cast<std::size_t>(m) * n, 0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      std::int64_t s = 0;
      for (int p = 0; p < k; ++p) s += a[i * k + p] * w[p * n + j];
      c[i * n + j] = s;
    }
  return c;
}

}  // namespace oracle

namespace oracle {

/// Direct convolution over an HWC int8 image. `w(o, ky, kx, ci)` returns the integer weight
/// (already scaled by 2^F). SAME padding puts the smaller half of the padding first.
template <typename Input, typename Weight>
std::vector<std::int64_t> direct_conv(const Input& in, int h, int w_, int c, int out_c, int kh, int kw, int stride,
                                      bool same, bool depthwise, Weight weight, int& oh, int& ow) {
  int pt = 0, pl = 0;
  if (same) {
    oh = (h + stride - 1) / stride;
    ow = (w_ + stride - 1) / stride;
    pt = std::max((oh - 1) * stride + kh - h, 0) / 2;
    pl = std::max((ow - 1) * stride + kw - w_, 0) / 2;
  } else {
    oh = (h - kh) / stride + 1;
    ow = (w_ - kw) / stride + 1;
  }
  std::vector<std::int64_t> out(static_cast<std::size_t>(oh) * ow * out_c, 0);
  for (int oy = 0; oy < oh; ++oy)
    for (int ox = 0; ox < ow; ++ox)
      for (int o = 0; o < out_c; ++o) {
        std::int64_t s = 0;
        for (int ky = 0; ky < kh; ++ky)
          for (int kx = 0; kx < kw; ++kx) {
            const int y = oy * stride + ky - pt;
            const int x = ox * stride + kx - pl;
            if (y < 0 || y >= h || x < 0 || x >= w_) continue;
            if (depthwise) {
              s += std::int64_t{in(y, x, o)} * weight(o, ky, kx, o);
            } else {
              for (int ci = 0; ci < c; ++ci) s += std::int64_t{in(y, x, ci)} * weight(o, ky, kx, ci);
            }
          }
        out[(static_cast<std::size_t>(oy) * ow + ox) * out_c + o] = s;
      }
  return out;
}

}  // namespace oracle
