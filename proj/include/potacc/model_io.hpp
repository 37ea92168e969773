//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <string_view>

#include "potacc/accel_sim.hpp"

namespace potacc {

/// Model description:
///   {"name": str, "input": [h, w, c], "layers": [layer, ...]}
/// Layer record:
///   {"name": str, "kind": "conv2d"|"depthwise_conv2d"|"dense"|"other",
///    "in": [h, w, c], "out_channels": n, "kernel": k | [kh, kw], "stride": s,
///    "padding": "same"|"valid", "op_count": n (other only), "output_shift": n,
///    "weights": path, "weights_format": "potq"|"int8", "scale_exp": e}
/// Weight paths are relative to `base_dir`. "scale_exp", when given for POTQ weights, must match the file.
Model model_from_json(std::string_view text, const std::filesystem::path& base_dir);
Model load_model(const std::filesystem::path& path);

}  // namespace potacc
