// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "microforge/common/errors.hpp"
#include "microforge/policy/ast.hpp"

namespace microforge::policy {

class ExtractError : public Error {
 public:
  using Error::Error;
};

struct Extracted {
  PolicySource source;
  std::optional<std::string> strategy;
};

/// Pulls the policy text out of a model response. A fenced block inside a
/// `<code>` tag wins; otherwise the first fenced block is used.
Extracted extract_code_block(std::string_view response, std::string id = "response",
                             Origin origin = Origin::llm);

}  // namespace microforge::policy
