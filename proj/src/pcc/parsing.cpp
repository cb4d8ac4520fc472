// SPDX-License-Identifier: Apache-2.0
#include "microforge/pcc/parsing.hpp"

#include <regex>

namespace microforge::pcc {

namespace {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::string strip_markup(std::string text) {
  text = trim(text);
  while (text.size() >= 2 && text.starts_with("**") && text.ends_with("**")) {
    text = trim(std::string_view(text).substr(2, text.size() - 4));
  }
  return text;
}

// Text following `label` up to `stop` (or the end), with a leading colon removed.
std::string labelled(const std::string& body, const std::regex& label, const std::regex* stop) {
  std::smatch m;
  if (!std::regex_search(body, m, label)) return {};
  std::string rest = m.suffix().str();
  if (stop != nullptr) {
    std::smatch s;
    if (std::regex_search(rest, s, *stop)) rest = rest.substr(0, static_cast<std::size_t>(s.position(0)));
  }
  std::string value = trim(rest);
  if (value.starts_with(":")) value = trim(std::string_view(value).substr(1));
  return value;
}

}  // namespace

std::vector<std::string> Strategy::names() const {
  std::vector<std::string> out;
  for (const auto& t : tactics) out.push_back(t.name);
  return out;
}

Strategy parse_strategy(std::string_view response) {
  static const std::regex header(R"((^|\n)[ \t]*#{2,4}[ \t]*\**[ \t]*Tactic[ \t]+\d+[ \t]*:[ \t]*([^\n]*))",
                                 std::regex::icase);
  static const std::regex condition(R"(\**[ \t]*Condition to use[ \t]*:?[ \t]*\**)", std::regex::icase);
  static const std::regex skeleton(R"(\**[ \t]*Tactic Skeleton[ \t]*:?[ \t]*\**)", std::regex::icase);

  const std::string text(response);
  std::vector<std::pair<std::size_t, std::size_t>> bounds;  // header start, body start
  std::vector<std::string> names;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), header); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    bounds.emplace_back(static_cast<std::size_t>(m.position(0)),
                        static_cast<std::size_t>(m.position(0) + m.length(0)));
    names.push_back(strip_markup(m[2].str()));
  }

  Strategy strategy;
  for (std::size_t i = 0; i < bounds.size() && strategy.tactics.size() < kMaxTactics; ++i) {
    if (names[i].empty()) continue;
    const std::size_t end = i + 1 < bounds.size() ? bounds[i + 1].first : text.size();
    const std::string body = text.substr(bounds[i].second, end - bounds[i].second);
    Tactic tactic{names[i], labelled(body, condition, &skeleton), labelled(body, skeleton, &condition)};
    if (tactic.condition.empty() && tactic.skeleton.empty()) tactic.skeleton = trim(body);
    strategy.tactics.push_back(std::move(tactic));
  }
  if (strategy.tactics.empty()) throw PlanParseError("planner response has no \"### Tactic k:\" section");
  return strategy;
}

nlohmann::json tactics_json(const Strategy& strategy) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : strategy.tactics) {
    std::string description;
    if (!t.condition.empty()) description += "Condition to use: " + t.condition;
    if (!t.skeleton.empty()) {
      if (!description.empty()) description += "\n";
      description += "Tactic Skeleton: " + t.skeleton;
    }
    out.push_back({{"tactic_name", t.name}, {"tactic_description", description}});
  }
  return out;
}

std::string to_string(Decision decision) {
  return decision == Decision::change_tactic ? "[Change Tactic]" : "[Improve Tactic]";
}

Critique parse_critique(std::string_view response) {
  Critique critique;
  critique.analysis = trim(response);
  critique.promotion = critique.analysis;
  const auto change = response.rfind("[Change Tactic]");
  const auto improve = response.rfind("[Improve Tactic]");
  if (change == std::string_view::npos && improve == std::string_view::npos) {
    critique.warning = "critic response has no decision token; defaulting to [Improve Tactic]";
    return critique;
  }
  if (improve == std::string_view::npos || (change != std::string_view::npos && change > improve)) {
    critique.decision = Decision::change_tactic;
  }
  return critique;
}

}  // namespace microforge::pcc
