// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace twdist {

// Execution policy for the data-parallel kernels. Every kernel taking an
// Exec has a serial reference path that produces bit-identical results;
// tools/bench.cpp compares the two.
enum class Exec { Serial, Parallel };

int max_threads(Exec exec);

}  // namespace twdist
