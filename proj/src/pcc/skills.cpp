// SPDX-License-Identifier: Apache-2.0
#include "microforge/pcc/skills.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "microforge/common/errors.hpp"
#include "microforge/common/numfmt.hpp"

namespace microforge::pcc {

void update_skill_score(SkillNode& node, double g) {
  if (!std::isfinite(g) || g < 0.0 || g > 1.0) {
    throw ContractViolation("skill score update outside [0,1]: " + format_shortest(g));
  }
  node.score = (node.score * node.uses + g) / (node.uses + 1);
  node.uses += 1;
}

SkillTree::SkillTree() { root_.name = "root"; }

void SkillTree::record(const std::vector<std::string>& path, double g) {
  if (!std::isfinite(g) || g < 0.0 || g > 1.0) {
    throw ContractViolation("skill score update outside [0,1]: " + format_shortest(g));
  }
  SkillNode* node = &root_;
  for (const auto& name : path) {
    auto it = std::find_if(node->children.begin(), node->children.end(),
                           [&](const SkillNode& child) { return child.name == name; });
    if (it == node->children.end()) {
      node->children.push_back(SkillNode{name, 0.0, 0, {}});
      it = std::prev(node->children.end());
    }
    node = &*it;
    update_skill_score(*node, g);
  }
}

namespace {

void write_lines(const SkillNode& node, int depth, std::ostringstream& out) {
  out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << node.name << ": "
      << format_trimmed(node.score) << " (" << node.uses << ")\n";
  for (const auto& child : node.children) write_lines(child, depth + 1, out);
}

nlohmann::json node_json(const SkillNode& node) {
  nlohmann::json children = nlohmann::json::array();
  for (const auto& child : node.children) children.push_back(node_json(child));
  return {{"name", node.name}, {"score", node.score}, {"uses", node.uses}, {"children", children}};
}

}  // namespace

std::string SkillTree::serialize() const {
  if (empty()) return "none";
  std::ostringstream out;
  for (const auto& child : root_.children) write_lines(child, 0, out);
  std::string text = out.str();
  text.pop_back();
  return text;
}

nlohmann::json SkillTree::to_json() const { return node_json(root_)["children"]; }

}  // namespace microforge::pcc
