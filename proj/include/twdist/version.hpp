// Copyright (c) 2026 twdist contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace twdist {

inline constexpr const char* kCodeVersion = "0.1.0";

}  // namespace twdist
