//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
