// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace microforge::pcc {

/// One tactic in the history tree with its running score r and usage count.
struct SkillNode {
  std::string name;
  double score = 0.0;
  int uses = 0;
  std::vector<SkillNode> children;
};

/// r := (r * uses + g) / (uses + 1); uses := uses + 1.
/// Throws ContractViolation unless 0 <= g <= 1.
void update_skill_score(SkillNode& node, double g);

class SkillTree {
 public:
  SkillTree();

  /// Follows (creating as needed) root -> names[0] -> ... -> names[n-1] and
  /// updates every node on that path with `g`.
  void record(const std::vector<std::string>& path, double g);

  const SkillNode& root() const { return root_; }
  bool empty() const { return root_.children.empty(); }

  /// Depth-first "name: r (uses)" lines, two spaces of indent per level;
  /// "none" for an empty tree.
  std::string serialize() const;
  nlohmann::json to_json() const;

 private:
  SkillNode root_;
};

}  // namespace microforge::pcc
