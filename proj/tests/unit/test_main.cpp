// Copyright (C) 2026 The streamtext authors
// SPDX-License-Identifier: Apache-2.0
//
#define CATCH_CONFIG_MAIN
#include <catch2/catch.hpp>
