// SPDX-License-Identifier: Apache-2.0
#include "microforge/forge/dataset.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "microforge/common/errors.hpp"
#include "microforge/common/numfmt.hpp"
#include "microforge/policy/compile.hpp"
#include "microforge/policy/extract.hpp"
#include "microforge/policy/parser.hpp"

namespace microforge::forge {

std::string to_string(TriageClass cls) {
  switch (cls) {
    case TriageClass::good:
      return "Good";
    case TriageClass::bad:
      return "Bad";
    case TriageClass::bug:
      return "Bug";
    case TriageClass::invalid:
      return "Invalid";
  }
  return "Invalid";
}

namespace {

TriageClass class_from_string(const std::string& text) {
  for (auto cls : {TriageClass::good, TriageClass::bad, TriageClass::bug, TriageClass::invalid}) {
    if (to_string(cls) == text) return cls;
  }
  throw LoadError("unknown triage class \"" + text + "\"");
}

}  // namespace

std::string grpo_prompt(const llm::TemplateSet& templates, const arena::ScenarioSpec& scenario) {
  const auto messages = llm::render_prompt(templates, "grpo", {{"TASK INFORMATION", scenario.task_text}});
  std::string out;
  for (const auto& m : messages) {
    if (!out.empty()) out += "\n\n";
    out += m.content;
  }
  return out;
}

void evaluate_record(TrainingRecord& record, const arena::ScenarioSpec& scenario, int episodes,
                     std::uint64_t base_seed, int jobs) {
  record.source.reset();
  record.extract_error.reset();
  record.report.reset();
  record.episode_error.reset();
  try {
    record.source = policy::extract_code_block(record.response, record.id).source;
  } catch (const policy::ExtractError& e) {
    record.extract_error = e.what();
    return;
  }
  try {
    const auto compiled = policy::compile(policy::parse(*record.source));
    record.report = arena::run_rollouts(scenario, compiled, episodes, base_seed, jobs);
  } catch (const Error& e) {
    record.episode_error = e.what();
  }
}

TriageClass triage(const TrainingRecord& record) {
  if (record.extract_error) return TriageClass::invalid;
  if (record.episode_error) return TriageClass::bug;
  if (!record.report) throw ContractViolation("record " + record.id + " has not been evaluated");
  return record.report->win_rate > kGoodWinRate ? TriageClass::good : TriageClass::bad;
}

double grpo_reward(const TrainingRecord& record) {
  switch (triage(record)) {
    case TriageClass::invalid:
      return kInvalidReward;
    case TriageClass::bug:
      return kBugReward;
    default:
      return record.report->win_rate;
  }
}

nlohmann::json to_json(const TrainingRecord& record) {
  const auto cls = triage(record);
  nlohmann::json error = nullptr;
  if (record.extract_error) error = *record.extract_error;
  if (record.episode_error) error = *record.episode_error;
  return {{"id", record.id},
          {"scenario", record.scenario},
          {"prompt", record.prompt},
          {"response", record.response},
          {"class", to_string(cls)},
          {"reward", grpo_reward(record)},
          {"win_rate", record.report ? nlohmann::json(record.report->win_rate) : nlohmann::json(nullptr)},
          {"error", error}};
}

TriagedRow triaged_row(const nlohmann::json& row) {
  try {
    return TriagedRow{row.at("id").get<std::string>(),
                      row.value("scenario", std::string{}),
                      row.at("prompt").get<std::string>(),
                      row.at("response").get<std::string>(),
                      class_from_string(row.at("class").get<std::string>()),
                      row.at("reward").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("malformed triaged record: ") + e.what());
  }
}

DatasetResult build_sft(std::vector<TriagedRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  DatasetResult out;
  for (const auto& r : rows) {
    if (r.cls == TriageClass::good) out.rows.push_back({{"prompt", r.prompt}, {"response", r.response}});
  }
  if (out.rows.empty()) out.warnings.push_back("no Good records; SFT dataset is empty");
  return out;
}

DatasetResult build_dpo_pairs(std::vector<TriagedRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::map<std::string, std::pair<std::vector<const TriagedRow*>, std::vector<const TriagedRow*>>> by_prompt;
  for (const auto& r : rows) {
    if (r.cls == TriageClass::good) by_prompt[r.prompt].first.push_back(&r);
    if (r.cls == TriageClass::bad || r.cls == TriageClass::bug) by_prompt[r.prompt].second.push_back(&r);
  }
  struct Pair {
    const TriagedRow* chosen;
    const TriagedRow* rejected;
  };
  std::vector<Pair> pairs;
  for (const auto& [prompt, lists] : by_prompt) {
    const auto& [good, bad] = lists;
    if (good.empty() || bad.empty()) continue;
    const std::size_t n = std::max(good.size(), bad.size());
    for (std::size_t i = 0; i < n; ++i) pairs.push_back({good[i % good.size()], bad[i % bad.size()]});
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(a.chosen->id, a.rejected->id) < std::tie(b.chosen->id, b.rejected->id);
  });
  DatasetResult out;
  for (const auto& p : pairs) {
    out.rows.push_back({{"prompt", p.chosen->prompt}, {"chosen", p.chosen->response}, {"rejected", p.rejected->response}});
  }
  if (std::none_of(rows.begin(), rows.end(), [](const auto& r) { return r.cls == TriageClass::good; })) {
    out.warnings.push_back("no Good records; DPO dataset is empty");
  }
  return out;
}

AugmentResult augment(const std::vector<policy::PolicySource>& sources, llm::ChatBackend& backend,
                      const llm::TemplateSet& templates, const arena::ScenarioSpec& scenario, int k,
                      const std::string& model) {
  AugmentResult out;
  for (const auto& source : sources) {
    const llm::Bindings bindings{{"TASK INFORMATION", scenario.task_text},
                                 {"CODE", "```python\n" + source.text + "\n```"}};
    auto messages = llm::render_prompt(templates, "coder.system", bindings);
    const auto user = llm::render_prompt(templates, "augment.user", bindings);
    messages.insert(messages.end(), user.begin(), user.end());
    for (int i = 0; i < k; ++i) {
      const std::string id = source.id + "-a" + std::to_string(i);
      std::string response;
      try {
        response = backend.complete(llm::ChatRequest{model, messages, llm::kAugmentTemperature});
      } catch (const llm::BackendError& e) {
        out.warnings.push_back("skipped " + id + ": " + e.what());
        continue;
      }
      policy::PolicySource rewritten{id, response, policy::Origin::augmented};
      try {
        rewritten.text = policy::extract_code_block(response, id, policy::Origin::augmented).source.text;
      } catch (const policy::ExtractError&) {
      }
      out.sources.push_back(std::move(rewritten));
    }
  }
  return out;
}

std::vector<StatLine> reward_stats(const std::map<std::string, std::vector<double>>& rewards) {
  std::vector<StatLine> out;
  for (const auto& [scenario, values] : rewards) out.push_back(stat_line(scenario, values));
  return out;
}

std::string stats_csv(const std::vector<StatLine>& lines) {
  std::ostringstream out;
  out << "scenario,count,mean,std,min,max,median\n";
  for (const auto& l : lines) {
    out << l.scenario << ',' << l.count << ',' << format_shortest(l.mean) << ',' << format_shortest(l.std) << ','
        << format_shortest(l.min) << ',' << format_shortest(l.max) << ',' << format_shortest(l.median) << '\n';
  }
  return out.str();
}

std::string curve_csv(const std::vector<double>& rewards, std::size_t window) {
  std::ostringstream out;
  out << "step,mean_reward\n";
  const auto avg = moving_average(rewards, window);
  for (std::size_t i = 0; i < avg.size(); ++i) out << i << ',' << format_shortest(avg[i]) << '\n';
  return out.str();
}

}  // namespace microforge::forge
