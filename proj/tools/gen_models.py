#!/usr/bin/env python3
#
# Copyright 2026 The potacc Authors
# SPDX-License-Identifier: Apache-2.0
#
"""Writes the timing-only model fixtures (224x224 ImageNet variants) to data/models."""

import argparse
import json
import math
import pathlib


class Builder:
    def __init__(self, name, h, w, c):
        self.name = name
        self.input = [h, w, c]
        self.shape = [h, w, c]
        self.layers = []

    def conv(self, name, out_c, k, stride=1, padding="same", shape=None, kind="conv2d"):
        h, w, c = shape or self.shape
        rec = {"name": name, "kind": kind, "in": [h, w, c]}
        if kind != "depthwise_conv2d":
            rec["out_channels"] = out_c
        else:
            out_c = c
        rec.update({"kernel": k, "stride": stride, "padding": padding})
        self.layers.append(rec)
        if padding == "same":
            oh, ow = math.ceil(h / stride), math.ceil(w / stride)
        else:
            oh, ow = (h - k) // stride + 1, (w - k) // stride + 1
        out = [oh, ow, out_c]
        if shape is None:
            self.shape = out
        return out

    def depthwise(self, name, k, stride=1):
        return self.conv(name, None, k, stride, kind="depthwise_conv2d")

    def other(self, name, ops, shape=None):
        self.layers.append({"name": name, "kind": "other", "op_count": int(ops)})
        if shape is not None:
            self.shape = shape

    def pool(self, name, k, stride):
        h, w, c = self.shape
        oh, ow = math.ceil(h / stride), math.ceil(w / stride)
        self.other(name, oh * ow * c * k * k, [oh, ow, c])

    def global_pool(self, name):
        h, w, c = self.shape
        self.other(name, h * w * c, [1, 1, c])

    def dense(self, name, out_c):
        h, w, c = self.shape
        self.layers.append({"name": name, "kind": "dense", "in": [h, w, c], "out_channels": out_c})
        self.shape = [1, 1, out_c]

    def to_json(self):
        return {"name": self.name, "input": self.input, "layers": self.layers}


def elems(shape):
    return shape[0] * shape[1] * shape[2]


def resnet18():
    b = Builder("ResNet18", 224, 224, 3)
    b.conv("conv1", 64, 7, 2)
    b.pool("maxpool", 3, 2)
    for stage, (c, stride) in enumerate([(64, 1), (128, 2), (256, 2), (512, 2)], start=1):
        for block in range(2):
            s = stride if block == 0 else 1
            x = list(b.shape)
            p = f"layer{stage}.{block}"
            b.conv(p + ".conv1", c, 3, s)
            b.conv(p + ".conv2", c, 3)
            if s != 1 or x[2] != c:
                b.conv(p + ".downsample", c, 1, s, shape=x)
            b.other(p + ".add_relu", 2 * elems(b.shape))
    b.global_pool("avgpool")
    b.dense("fc", 1000)
    b.other("softmax", 3 * 1000)
    return b


def mobilenetv2():
    b = Builder("MobileNetV2", 224, 224, 3)
    b.conv("conv_stem", 32, 3, 2)
    blocks = [(1, 16, 1, 1), (6, 24, 2, 2), (6, 32, 3, 2), (6, 64, 4, 2), (6, 96, 3, 1), (6, 160, 3, 2),
              (6, 320, 1, 1)]
    idx = 0
    for t, c, n, s in blocks:
        for i in range(n):
            stride = s if i == 0 else 1
            x = list(b.shape)
            p = f"block{idx}"
            if t != 1:
                b.conv(p + ".expand", x[2] * t, 1)
            b.depthwise(p + ".depthwise", 3, stride)
            b.conv(p + ".project", c, 1)
            if stride == 1 and x[2] == c:
                b.other(p + ".add", elems(b.shape))
            idx += 1
    b.conv("conv_head", 1280, 1)
    b.global_pool("avgpool")
    b.dense("fc", 1000)
    b.other("softmax", 3 * 1000)
    return b


def inceptionv1():
    b = Builder("InceptionV1", 224, 224, 3)
    b.conv("conv1", 64, 7, 2)
    b.pool("maxpool1", 3, 2)
    b.conv("conv2_reduce", 64, 1)
    b.conv("conv2", 192, 3)
    b.pool("maxpool2", 3, 2)

    def inception(p, c1, c3r, c3, c5r, c5, cp):
        x = list(b.shape)
        b.conv(p + ".1x1", c1, 1, shape=x)
        r3 = b.conv(p + ".3x3_reduce", c3r, 1, shape=x)
        b.conv(p + ".3x3", c3, 3, shape=r3)
        r5 = b.conv(p + ".5x5_reduce", c5r, 1, shape=x)
        b.conv(p + ".5x5", c5, 5, shape=r5)
        b.other(p + ".pool", elems(x) * 9)
        b.conv(p + ".pool_proj", cp, 1, shape=x)
        out = [x[0], x[1], c1 + c3 + c5 + cp]
        b.other(p + ".concat", elems(out), out)

    inception("3a", 64, 96, 128, 16, 32, 32)
    inception("3b", 128, 128, 192, 32, 96, 64)
    b.pool("maxpool3", 3, 2)
    inception("4a", 192, 96, 208, 16, 48, 64)
    inception("4b", 160, 112, 224, 24, 64, 64)
    inception("4c", 128, 128, 256, 24, 64, 64)
    inception("4d", 112, 144, 288, 32, 64, 64)
    inception("4e", 256, 160, 320, 32, 128, 128)
    b.pool("maxpool4", 3, 2)
    inception("5a", 256, 160, 320, 32, 128, 128)
    inception("5b", 384, 192, 384, 48, 128, 128)
    b.global_pool("avgpool")
    b.dense("fc", 1000)
    b.other("softmax", 3 * 1000)
    return b


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=pathlib.Path(__file__).resolve().parent.parent / "data" / "models",
                        type=pathlib.Path)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, build in [("resnet18", resnet18), ("mobilenetv2", mobilenetv2), ("inceptionv1", inceptionv1)]:
        path = args.out / f"{name}.json"
        path.write_text(json.dumps(build().to_json(), indent=1) + "\n")
        print(path)


if __name__ == "__main__":
    main()
