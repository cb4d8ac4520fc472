// SPDX-License-Identifier: Apache-2.0
#include "microforge/pcc/pipeline.hpp"

#include "microforge/policy/compile.hpp"
#include "microforge/policy/extract.hpp"
#include "microforge/policy/parser.hpp"

namespace microforge::pcc {

namespace {

constexpr const char* kNoResultYet = "There is no combat result yet.";
constexpr const char* kPlanReask =
    "The answer above does not follow the required format. List at most 3 tactics, each under a "
    "\"### Tactic k: name\" header with **Condition to use:** and **Tactic Skeleton** entries.";

struct Aborted {
  std::string message;
};

class Runner {
 public:
  Runner(const arena::ScenarioSpec& scenario, llm::ChatBackend& backend, const llm::TemplateSet& templates,
         const PipelineConfig& config)
      : scenario_(scenario), backend_(backend), templates_(templates), config_(config) {
    trace_.scenario = scenario.name;
  }

  PipelineTrace run() {
    try {
      loop();
    } catch (const Aborted&) {
      trace_.status = Status::aborted;
    }
    return std::move(trace_);
  }

 private:
  void loop() {
    trace_.status = Status::exhausted;
    if (config_.max_rounds <= 0) return;
    std::string result_text = kNoResultYet;
    bool need_plan = true;
    std::string promotion;
    Strategy strategy;
    while (trace_.code_rounds < config_.max_rounds) {
      if (need_plan) {
        strategy = plan(result_text);
        promotion.clear();
        need_plan = false;
      }
      ++trace_.code_rounds;
      const auto coded = code(strategy, promotion);
      const auto evaluated = evaluate(coded);
      trace_.history.record(strategy.names(), evaluated.g);
      if (evaluated.report && evaluated.report->win_rate >= config_.target_win_rate) {
        trace_.status = Status::success;
        return;
      }
      result_text = evaluated.result_text;
      if (trace_.code_rounds >= config_.max_rounds) return;
      const auto critique = criticize(coded.code_text, result_text);
      if (critique.decision == Decision::change_tactic) {
        need_plan = true;
      } else {
        promotion = critique.promotion;
      }
    }
  }

  std::string call(TraceEntry& entry, const std::vector<llm::ChatMessage>& messages, double temperature) {
    entry.prompt_digests.push_back(llm::request_digest(messages));
    try {
      return backend_.complete(llm::ChatRequest{config_.model, messages, temperature});
    } catch (const llm::BackendError& e) {
      entry.error = std::string("backend error: ") + e.what();
      trace_.rounds.push_back(std::move(entry));
      throw Aborted{e.what()};
    }
  }

  llm::Bindings base_bindings() const { return {{"TASK INFORMATION", scenario_.task_text}}; }

  Strategy plan(const std::string& result_text) {
    auto bindings = base_bindings();
    bindings["RESULT"] = result_text;
    bindings["HISTORY"] = trace_.history.serialize();
    auto messages = llm::render_prompt(templates_, "planner", bindings);

    TraceEntry entry;
    entry.phase = Phase::plan;
    for (int attempt = 0;; ++attempt) {
      const std::string response = call(entry, messages, llm::kPlannerTemperature);
      entry.response = response;
      try {
        Strategy strategy = parse_strategy(response);
        entry.detail = strategy.names();
        trace_.rounds.push_back(std::move(entry));
        return strategy;
      } catch (const PlanParseError& e) {
        if (attempt >= config_.plan_reasks) {
          entry.error = e.what();
          trace_.rounds.push_back(std::move(entry));
          throw Aborted{e.what()};
        }
      }
      messages.push_back({"assistant", response});
      messages.push_back({"user", kPlanReask});
    }
  }

  struct Coded {
    std::optional<policy::CompiledPolicy> compiled;
    std::string code_text;
    std::string failure;
  };

  Coded code(const Strategy& strategy, const std::string& promotion) {
    auto bindings = base_bindings();
    bindings["TACTICS"] = tactics_json(strategy).dump(2);
    bindings["PROMOTION"] = promotion;

    TraceEntry entry;
    entry.phase = Phase::code;
    Coded coded;
    nlohmann::json diagnostics = nlohmann::json::array();
    for (int attempt = 0; attempt <= config_.repair_limit; ++attempt) {
      const auto messages = llm::render_prompt(templates_, "coder", bindings);
      const std::string response = call(entry, messages, llm::kCoderTemperature);
      entry.response = response;
      coded.code_text = response;
      std::string diagnostic;
      try {
        auto extracted = policy::extract_code_block(response, "round-" + std::to_string(trace_.code_rounds));
        coded.code_text = extracted.source.text;
        coded.compiled = policy::compile(policy::parse(extracted.source));
        entry.detail = {{"attempts", attempt + 1}, {"diagnostics", diagnostics}, {"policy", coded.code_text}};
        trace_.rounds.push_back(std::move(entry));
        return coded;
      } catch (const Error& e) {
        diagnostic = e.what();
      }
      diagnostics.push_back(diagnostic);
      bindings["PROMOTION"] = "The previous code could not be used: " + diagnostic +
                              ". Please fix it and return the whole policy in a code block.";
    }
    coded.failure = "code repair limit exceeded: " + diagnostics.back().get<std::string>();
    entry.error = coded.failure;
    entry.detail = {{"attempts", config_.repair_limit + 1}, {"diagnostics", diagnostics}};
    trace_.rounds.push_back(std::move(entry));
    return coded;
  }

  struct Evaluated {
    std::optional<arena::BattleReport> report;
    std::string result_text;
    double g = 0.0;
  };

  Evaluated evaluate(const Coded& coded) {
    TraceEntry entry;
    entry.phase = Phase::evaluate;
    Evaluated out;
    if (!coded.compiled) {
      entry.error = coded.failure;
    } else {
      try {
        out.report = arena::run_rollouts(scenario_, *coded.compiled, config_.episodes, config_.base_seed,
                                         config_.jobs);
        out.g = out.report->win_rate;
        out.result_text = arena::render_report_text(*out.report);
        entry.report = out.report;
      } catch (const EpisodeError& e) {
        entry.error = e.what();
      }
    }
    if (entry.error) out.result_text = "The code failed with the error: " + *entry.error;
    trace_.rounds.push_back(std::move(entry));
    return out;
  }

  Critique criticize(const std::string& code_text, const std::string& result_text) {
    auto bindings = base_bindings();
    bindings["CODE"] = code_text;
    bindings["RESULT"] = result_text;
    TraceEntry entry;
    entry.phase = Phase::critique;
    const auto messages = llm::render_prompt(templates_, "critic", bindings);
    const std::string response = call(entry, messages, llm::kCriticTemperature);
    entry.response = response;
    Critique critique = parse_critique(response);
    entry.warning = critique.warning;
    entry.detail = to_string(critique.decision);
    trace_.rounds.push_back(std::move(entry));
    return critique;
  }

  const arena::ScenarioSpec& scenario_;
  llm::ChatBackend& backend_;
  const llm::TemplateSet& templates_;
  const PipelineConfig& config_;
  PipelineTrace trace_;
};

template <typename T>
nlohmann::json opt(const std::optional<T>& value) {
  return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

}  // namespace

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::plan:
      return "plan";
    case Phase::code:
      return "code";
    case Phase::evaluate:
      return "evaluate";
    case Phase::critique:
      return "critique";
  }
  return "plan";
}

std::string to_string(Status status) {
  switch (status) {
    case Status::success:
      return "success";
    case Status::exhausted:
      return "exhausted";
    case Status::aborted:
      return "aborted";
  }
  return "aborted";
}

const arena::BattleReport* PipelineTrace::final_report() const {
  for (auto it = rounds.rbegin(); it != rounds.rend(); ++it) {
    if (it->phase == Phase::evaluate) return it->report ? &*it->report : nullptr;
  }
  return nullptr;
}

nlohmann::json to_json(const PipelineTrace& trace) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : trace.rounds) {
    rounds.push_back({{"phase", to_string(r.phase)},
                      {"prompt_digests", r.prompt_digests},
                      {"response", opt(r.response)},
                      {"report", r.report ? arena::to_json(*r.report) : nlohmann::json(nullptr)},
                      {"error", opt(r.error)},
                      {"warning", opt(r.warning)},
                      {"detail", r.detail}});
  }
  const auto* last = trace.final_report();
  return {{"scenario", trace.scenario},
          {"status", to_string(trace.status)},
          {"code_rounds", trace.code_rounds},
          {"final_win_rate", last ? nlohmann::json(last->win_rate) : nlohmann::json(nullptr)},
          {"rounds", rounds},
          {"skills", trace.history.to_json()}};
}

std::string serialize(const PipelineTrace& trace) { return to_json(trace).dump(2) + "\n"; }

PipelineTrace run_pipeline(const arena::ScenarioSpec& scenario, llm::ChatBackend& backend,
                           const llm::TemplateSet& templates, const PipelineConfig& config) {
  return Runner(scenario, backend, templates, config).run();
}

}  // namespace microforge::pcc
