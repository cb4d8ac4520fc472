// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "microforge/arena/rollout.hpp"
#include "microforge/arena/scenario.hpp"
#include "microforge/policy/ast.hpp"
#include "microforge/policy/compile.hpp"
#include "microforge/policy/parser.hpp"

namespace mf_test {

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(MICROFORGE_DATA_DIR) / rel;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline microforge::arena::ScenarioSpec scenario(const std::string& name) {
  return microforge::arena::load_scenario_file(data_path("scenarios/" + name + ".json"));
}

inline std::shared_ptr<const microforge::arena::ScenarioSpec> scenario_ptr(const std::string& name) {
  return std::make_shared<const microforge::arena::ScenarioSpec>(scenario(name));
}

inline microforge::policy::CompiledPolicy policy_file(const std::string& name) {
  return microforge::policy::compile(microforge::policy::parse(read_file(data_path("policies/" + name + ".pol"))));
}

inline microforge::policy::CompiledPolicy policy_text(const std::string& text) {
  return microforge::policy::compile(microforge::policy::parse(text));
}

/// Random well-typed policies for property tests. Only draws from the grammar,
/// so every output parses and compiles.
class PolicyGen {
 public:
  explicit PolicyGen(std::uint64_t seed) : rng_(seed) {}

  std::string policy(const std::string& unit_type) {
    consts_.clear();
    vars_.clear();
    std::string out = "policy \"g" + std::to_string(pick(1000)) + "\" {\n";
    int nc = pick(3);
    for (int i = 0; i < nc; ++i) {
      consts_.push_back("K" + std::to_string(i) + "_" + std::to_string(pick(100)));
      out += "  const " + consts_.back() + " = " + number() + "\n";
    }
    out += "  unit " + unit_type + " {\n";
    int nv = pick(3);
    for (int i = 0; i < nv; ++i) {
      vars_.push_back("v" + std::to_string(i) + "_" + std::to_string(pick(100)));
      out += "    var " + vars_.back() + " = " + number() + "\n";
    }
    out += body(2, 3);
    out += "  }\n}\n";
    return out;
  }

 private:
  int pick(int n) { return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(rng_)); }

  std::string number() {
    static const char* values[] = {"0", "1", "2", "0.5", "0.2", "3.25", "5", "10", "0.125", "7"};
    return values[pick(10)];
  }

  std::string atom() {
    int k = pick(4);
    if (k == 0 || (consts_.empty() && vars_.empty() && k < 3)) return number();
    if (k == 1 && !consts_.empty()) return consts_[static_cast<std::size_t>(pick(static_cast<int>(consts_.size())))];
    if (k == 2 && !vars_.empty()) return vars_[static_cast<std::size_t>(pick(static_cast<int>(vars_.size())))];
    static const char* obs[] = {"health_frac", "shield_frac", "weapon_cooldown", "dist_to_closest_enemy",
                                "dist_to_closest_ally", "num_allies", "num_enemies", "my_x",
                                "my_y", "enemy_centroid_x", "enemy_centroid_y", "time"};
    return obs[pick(12)];
  }

  // Division only by positive literals so generated policies never fault.
  std::string num_expr(int depth) {
    if (depth <= 0) return atom();
    switch (pick(6)) {
      case 0: return num_expr(depth - 1) + " + " + num_expr(depth - 1);
      case 1: return num_expr(depth - 1) + " - " + num_expr(depth - 1);
      case 2: return "(" + num_expr(depth - 1) + ") * " + atom();
      case 3: return "(" + num_expr(depth - 1) + ") / " + std::string(pick(2) ? "2" : "4");
      case 4: return "-" + atom();
      default: return atom();
    }
  }

  std::string bool_expr(int depth) {
    static const char* cmp[] = {"<", "<=", ">", ">=", "==", "!="};
    if (depth <= 0) return num_expr(1) + " " + cmp[pick(6)] + " " + num_expr(1);
    switch (pick(4)) {
      case 0: return bool_expr(depth - 1) + " and " + bool_expr(depth - 1);
      case 1: return bool_expr(depth - 1) + " or " + bool_expr(depth - 1);
      case 2: return "not (" + bool_expr(depth - 1) + ")";
      default: return bool_expr(0);
    }
  }

  std::string action() {
    switch (pick(6)) {
      case 0: return "attack_weakest_enemy()";
      case 1: return "attack_closest_enemy()";
      case 2: return "attack_focus()";
      case 3: return "move_to(" + num_expr(1) + ", " + num_expr(1) + ")";
      case 4: return "retreat_from_closest_enemy(" + number() + ")";
      default: return "hold()";
    }
  }

  std::string indent(int depth) { return std::string(static_cast<std::size_t>(2 * (depth + 1)), ' '); }

  // A body holds at most one action on every path: sets first, then either an
  // action, a branch, or nothing.
  std::string body(int depth, int level) {
    std::string out;
    if (!vars_.empty() && pick(2)) {
      out += indent(level) + "set " + vars_[static_cast<std::size_t>(pick(static_cast<int>(vars_.size())))] +
             " = " + num_expr(2) + "\n";
    }
    int k = depth <= 0 ? pick(2) : pick(3);
    if (k == 0) {
      out += indent(level) + action() + "\n";
    } else if (k == 2) {
      out += indent(level) + "if " + bool_expr(1) + " {\n" + body(depth - 1, level + 1);
      int elifs = pick(2);
      for (int i = 0; i < elifs; ++i) out += indent(level) + "} elif " + bool_expr(1) + " {\n" + body(depth - 1, level + 1);
      if (pick(2)) out += indent(level) + "} else {\n" + body(depth - 1, level + 1);
      out += indent(level) + "}\n";
    }
    return out;
  }

  std::mt19937_64 rng_;
  std::vector<std::string> consts_;
  std::vector<std::string> vars_;
};

}  // namespace mf_test
