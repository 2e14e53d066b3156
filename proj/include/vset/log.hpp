// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#pragma once

#include <string_view>

namespace vset::log {

// Logs go to stderr; data goes to files/stdout. When JSON mode is on each
// line is a {"level":...,"msg":...} object for machine consumption.
void set_json(bool enabled);
void info(std::string_view msg);
void warn(std::string_view msg);
void error(std::string_view msg);

}  // namespace vset::log
