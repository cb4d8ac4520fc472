// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "microforge/common/errors.hpp"

namespace microforge::pcc {

class PlanParseError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kMaxTactics = 3;

struct Tactic {
  std::string name;
  std::string condition;
  std::string skeleton;
};

struct Strategy {
  std::vector<Tactic> tactics;
  std::vector<std::string> names() const;
};

/// Reads "### Tactic k: name" sections, keeping at most kMaxTactics.
/// Throws PlanParseError when there is no usable section.
Strategy parse_strategy(std::string_view response);

/// JSON array of {tactic_name, tactic_description} objects.
nlohmann::json tactics_json(const Strategy& strategy);

enum class Decision { change_tactic, improve_tactic };
std::string to_string(Decision decision);

struct Critique {
  Decision decision = Decision::improve_tactic;
  std::string analysis;
  std::string promotion;
  std::optional<std::string> warning;
};

/// The last bracketed decision token wins. Without one the decision defaults
/// to improve_tactic and `warning` is set.
Critique parse_critique(std::string_view response);

}  // namespace microforge::pcc
