// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

namespace microforge {

/// Shortest decimal text that parses back to exactly `value` ("80", "4.13").
std::string format_shortest(double value);

/// Fixed-point with at most `max_decimals` digits, trailing zeros removed
/// ("227.5", "140.6625", "10").
std::string format_trimmed(double value, int max_decimals = 4);

}  // namespace microforge
