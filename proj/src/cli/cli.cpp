// SPDX-License-Identifier: Apache-2.0
#include "microforge/cli/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "microforge/arena/rollout.hpp"
#include "microforge/arena/scenario.hpp"
#include "microforge/common/errors.hpp"
#include "microforge/common/numfmt.hpp"
#include "microforge/forge/dataset.hpp"
#include "microforge/forge/math.hpp"
#include "microforge/llm/backend.hpp"
#include "microforge/llm/templates.hpp"
#include "microforge/pcc/pipeline.hpp"
#include "microforge/policy/clone.hpp"
#include "microforge/policy/compile.hpp"
#include "microforge/policy/parser.hpp"

#ifndef MICROFORGE_TEMPLATE_DIR
#define MICROFORGE_TEMPLATE_DIR "templates"
#endif

namespace microforge::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<json> read_jsonl(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::vector<json> rows;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw LoadError(path.string() + ": " + e.what(), number);
    }
  }
  return rows;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw LoadError("cannot write " + path);
  file << text;
}

std::string jsonl(const std::vector<json>& rows) {
  std::string text;
  for (const auto& r : rows) text += r.dump() + "\n";
  return text;
}

policy::PolicySource load_policy(const fs::path& path) {
  return {path.stem().string(), read_text(path), policy::Origin::handwritten};
}

struct TemplateOptions {
  std::string dir;
  std::string overrides;
  bool verbatim = false;

  void add(CLI::App& app) {
    app.add_option("--templates", dir, "Prompt template directory");
    app.add_option("--template-overrides", overrides, "Directory whose templates replace the defaults");
    app.add_flag("--verbatim-templates", verbatim, "Do not apply the DSL override templates");
  }

  llm::TemplateSet load() const {
    fs::path base = dir;
    if (base.empty()) {
      const char* env = std::getenv("MICROFORGE_TEMPLATES");
      base = env != nullptr ? fs::path(env) : fs::path(MICROFORGE_TEMPLATE_DIR);
    }
    fs::path extra = overrides;
    if (extra.empty() && !verbatim && fs::is_directory(base / "dsl")) extra = base / "dsl";
    return llm::TemplateSet::load(base, extra);
  }
};

std::string backend_help() { return "http | replay:PATH | replay-warn:PATH | record:PATH"; }

const CLI::Validator kBackendSelector(
    [](std::string& value) -> std::string {
      if (value == "http") return {};
      for (const char* prefix : {"replay:", "replay-warn:", "record:"}) {
        if (value.starts_with(prefix) && value.size() > std::string_view(prefix).size()) return {};
      }
      return "unknown backend selector '" + value + "' (expected " + backend_help() + ")";
    },
    "BACKEND");

llm::HttpConfig http_config(const std::string& model) {
  auto config = llm::HttpConfig::from_env();
  if (!model.empty()) config.model = model;
  return config;
}

fs::path resolve_scenario(const fs::path& dir, const std::string& name) {
  if (fs::exists(name)) return name;
  if (fs::exists(dir / name)) return dir / name;
  if (fs::exists(dir / (name + ".json"))) return dir / (name + ".json");
  throw LoadError("scenario not found: " + name);
}

std::vector<policy::PolicySource> collect_policies(const std::vector<std::string>& paths) {
  std::vector<policy::PolicySource> sources;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pol") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) sources.push_back(load_policy(f));
    } else {
      sources.push_back(load_policy(p));
    }
  }
  return sources;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"microforge: combat policy simulator, LLM refinement loop and dataset tools", "microforge"};
  app.require_subcommand(1);
  std::function<void()> action = [] {};

  // sim run
  auto* sim = app.add_subcommand("sim", "Simulate battles")->require_subcommand(1);
  auto* sim_run = sim->add_subcommand("run", "Roll out a policy on a scenario");
  std::string scenario_path, policy_path, report_format = "text";
  int episodes = 10, jobs = 1;
  std::uint64_t seed = 0;
  sim_run->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  sim_run->add_option("--policy", policy_path, "Policy file")->required()->check(CLI::ExistingFile);
  sim_run->add_option("--episodes", episodes, "Episode count")->check(CLI::PositiveNumber);
  sim_run->add_option("--seed", seed, "Base seed");
  sim_run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sim_run->add_option("--report", report_format, "text | json")->check(CLI::IsMember({"text", "json"}));
  sim_run->callback([&] {
    action = [&] {
      const auto scenario = arena::load_scenario_file(scenario_path);
      const auto compiled = policy::compile(policy::parse(load_policy(policy_path)));
      const auto report = arena::run_rollouts(scenario, compiled, episodes, seed, jobs);
      out << (report_format == "json" ? arena::serialize(report) : arena::render_report_text(report) + "\n");
    };
  });

  // policy check / dedup
  auto* pol = app.add_subcommand("policy", "Inspect policies")->require_subcommand(1);
  auto* check = pol->add_subcommand("check", "Parse and type-check policy files");
  std::vector<std::string> check_paths;
  std::string check_scenario;
  check->add_option("files", check_paths, "Policy files")->required()->check(CLI::ExistingFile);
  check->add_option("--scenario", check_scenario, "Also check the policy binds to this scenario")
      ->check(CLI::ExistingFile);
  check->callback([&] {
    action = [&] {
      std::optional<arena::ScenarioSpec> scenario;
      if (!check_scenario.empty()) scenario = arena::load_scenario_file(check_scenario);
      bool failed = false;
      for (const auto& path : check_paths) {
        try {
          const auto compiled = policy::compile(policy::parse(load_policy(path)));
          if (scenario) compiled.bind(*scenario);
          out << "ok " << path << "\n";
        } catch (const Error& e) {
          err << path << ":" << e.what() << "\n";
          failed = true;
        }
      }
      if (failed) throw Error("policy check failed");
    };
  });
  auto* dedup = pol->add_subcommand("dedup", "Drop near-duplicate policies");
  std::vector<std::string> dedup_paths;
  double threshold = policy::kDefaultDedupThreshold;
  dedup->add_option("paths", dedup_paths, "Policy files or directories")->required()->check(CLI::ExistingPath);
  dedup->add_option("--threshold", threshold, "Similarity percentage")->check(CLI::Range(0.0, 100.0));
  dedup->callback([&] {
    action = [&] {
      const auto sources = collect_policies(dedup_paths);
      out << policy::to_json(policy::dedup(sources, threshold)).dump(2) << "\n";
    };
  });

  // pipeline run
  auto* pipe = app.add_subcommand("pipeline", "Planner, coder and critic loop")->require_subcommand(1);
  auto* pipe_run = pipe->add_subcommand("run", "Run the refinement loop on one scenario");
  std::string backend_sel, trace_out, model;
  pcc::PipelineConfig pconfig;
  TemplateOptions templates;
  pipe_run->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  pipe_run->add_option("--backend", backend_sel, backend_help())->required()->check(kBackendSelector);
  pipe_run->add_option("--max-rounds", pconfig.max_rounds, "Code-round budget")->check(CLI::NonNegativeNumber);
  pipe_run->add_option("--target-winrate", pconfig.target_win_rate, "Success threshold")->check(CLI::Range(0.0, 1.0));
  pipe_run->add_option("--episodes", pconfig.episodes, "Rollouts per evaluation")->check(CLI::PositiveNumber);
  pipe_run->add_option("--seed", pconfig.base_seed, "Base seed");
  pipe_run->add_option("--jobs", pconfig.jobs, "Worker threads")->check(CLI::PositiveNumber);
  pipe_run->add_option("--model", model, "Model name sent to the backend");
  pipe_run->add_option("--out", trace_out, "Trace JSON (default stdout)");
  templates.add(*pipe_run);
  pipe_run->callback([&] {
    action = [&] {
      const auto scenario = arena::load_scenario_file(scenario_path);
      const auto set = templates.load();
      const auto config = http_config(model);
      pconfig.model = config.model;
      auto backend = llm::make_backend(backend_sel, config);
      const auto trace = pcc::run_pipeline(scenario, *backend, set, pconfig);
      write_output(trace_out, pcc::serialize(trace), out);
      err << "pipeline " << pcc::to_string(trace.status) << " after " << trace.code_rounds << " code rounds\n";
      if (trace.status == pcc::Status::aborted) throw Error("pipeline aborted");
    };
  });

  // forge
  auto* forge_cmd = app.add_subcommand("forge", "Dataset construction")->require_subcommand(1);
  std::string input, output, scenario_dir = "data/scenarios";
  auto* aug = forge_cmd->add_subcommand("augment", "Rewrite policies through the coder model");
  std::vector<std::string> aug_paths;
  int k = 3;
  aug->add_option("paths", aug_paths, "Policy files or directories")->required()->check(CLI::ExistingPath);
  aug->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  aug->add_option("--backend", backend_sel, backend_help())->required()->check(kBackendSelector);
  aug->add_option("-k", k, "Rewrites per source")->check(CLI::NonNegativeNumber);
  aug->add_option("--model", model, "Model name sent to the backend");
  aug->add_option("--out", output, "JSONL output (default stdout)");
  templates.add(*aug);
  aug->callback([&] {
    action = [&] {
      const auto scenario = arena::load_scenario_file(scenario_path);
      const auto set = templates.load();
      const auto config = http_config(model);
      auto backend = llm::make_backend(backend_sel, config);
      const auto result = forge::augment(collect_policies(aug_paths), *backend, set, scenario, k, config.model);
      for (const auto& w : result.warnings) err << "warning: " << w << "\n";
      std::vector<json> rows;
      for (const auto& s : result.sources) {
        bool parses = true;
        try {
          policy::parse(s);
        } catch (const Error&) {
          parses = false;
        }
        rows.push_back({{"id", s.id}, {"origin", policy::to_string(s.origin)}, {"text", s.text}, {"parses", parses}});
      }
      write_output(output, jsonl(rows), out);
    };
  });

  auto* tri = forge_cmd->add_subcommand("triage", "Evaluate responses and classify them");
  tri->add_option("--input", input, "JSONL rows {id, scenario, response}")->required()->check(CLI::ExistingFile);
  tri->add_option("--scenario-dir", scenario_dir, "Where scenario names are resolved");
  tri->add_option("--episodes", episodes, "Rollouts per record")->check(CLI::PositiveNumber);
  tri->add_option("--seed", seed, "Base seed");
  tri->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  tri->add_option("--out", output, "JSONL output (default stdout)");
  templates.add(*tri);
  tri->callback([&] {
    action = [&] {
      const auto set = templates.load();
      std::map<std::string, arena::ScenarioSpec> scenarios;
      std::vector<json> rows;
      for (const auto& row : read_jsonl(input)) {
        forge::TrainingRecord record;
        try {
          record.id = row.at("id").get<std::string>();
          record.scenario = row.at("scenario").get<std::string>();
          record.response = row.at("response").get<std::string>();
        } catch (const json::exception& e) {
          throw LoadError(std::string("malformed response record: ") + e.what());
        }
        auto it = scenarios.find(record.scenario);
        if (it == scenarios.end()) {
          it = scenarios.emplace(record.scenario, arena::load_scenario_file(resolve_scenario(scenario_dir, record.scenario)))
                   .first;
        }
        record.prompt = row.contains("prompt") ? row["prompt"].get<std::string>() : forge::grpo_prompt(set, it->second);
        forge::evaluate_record(record, it->second, episodes, seed, jobs);
        rows.push_back(forge::to_json(record));
      }
      std::sort(rows.begin(), rows.end(), [](const json& a, const json& b) { return a["id"] < b["id"]; });
      write_output(output, jsonl(rows), out);
    };
  });

  auto add_dataset = [&](const char* name, const char* help, bool dpo) {
    auto* cmd = forge_cmd->add_subcommand(name, help);
    cmd->add_option("--input", input, "Triaged JSONL")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", output, "JSONL output (default stdout)");
    cmd->callback([&, dpo] {
      action = [&, dpo] {
        std::vector<forge::TriagedRow> rows;
        for (const auto& r : read_jsonl(input)) rows.push_back(forge::triaged_row(r));
        const auto result = dpo ? forge::build_dpo_pairs(std::move(rows)) : forge::build_sft(std::move(rows));
        for (const auto& w : result.warnings) err << "warning: " << w << "\n";
        write_output(output, jsonl(result.rows), out);
      };
    });
  };
  add_dataset("sft", "Build the SFT dataset from Good records", false);
  add_dataset("dpo", "Build DPO preference pairs", true);

  auto* grpo = forge_cmd->add_subcommand("grpo-score", "Group-normalized advantages for scored samples");
  double epsilon = 0.2, beta = 0.04;
  grpo->add_option("--input", input, "JSONL rows {question_id, response, reward}")->required()->check(CLI::ExistingFile);
  grpo->add_option("--epsilon", epsilon, "Clip range")->check(CLI::Range(0.0, 1.0));
  grpo->add_option("--beta", beta, "KL weight")->check(CLI::NonNegativeNumber);
  grpo->add_option("--out", output, "JSONL output (default stdout)");
  grpo->callback([&] {
    action = [&] {
      std::map<std::string, forge::GrpoGroup> groups;
      for (const auto& r : read_jsonl(input)) {
        forge::GrpoSample s;
        std::string q;
        try {
          q = r.contains("question_id") ? r.at("question_id").get<std::string>() : r.at("scenario").get<std::string>();
          s.response = r.at("response").get<std::string>();
          s.reward = r.at("reward").get<double>();
          if (r.contains("ratio")) s.ratio = r["ratio"].get<double>();
          if (r.contains("log_policy")) s.log_policy = r["log_policy"].get<double>();
          if (r.contains("log_ref")) s.log_ref = r["log_ref"].get<double>();
        } catch (const json::exception& e) {
          throw LoadError(std::string("malformed score record: ") + e.what());
        }
        auto& g = groups[q];
        g.question_id = q;
        g.epsilon = epsilon;
        g.beta = beta;
        g.samples.push_back(std::move(s));
      }
      std::vector<json> rows;
      json summary = json::array();
      for (const auto& [q, g] : groups) {
        std::vector<double> rewards;
        for (const auto& s : g.samples) rewards.push_back(s.reward);
        const auto adv = forge::group_advantages(rewards);
        for (std::size_t i = 0; i < g.samples.size(); ++i) {
          rows.push_back({{"question_id", q}, {"response", g.samples[i].response}, {"reward", rewards[i]},
                          {"advantage", adv[i]}});
        }
        const bool complete = std::all_of(g.samples.begin(), g.samples.end(),
                                          [](const auto& s) { return s.ratio && s.log_policy && s.log_ref; });
        summary.push_back({{"question_id", q}, {"size", g.samples.size()},
                           {"objective", complete ? json(forge::grpo_objective(g)) : json(nullptr)}});
      }
      write_output(output, jsonl(rows), out);
      err << summary.dump() << "\n";
    };
  });

  // report
  auto* rep = app.add_subcommand("report", "Reward statistics")->require_subcommand(1);
  std::string report_input;
  std::size_t window = 50;
  auto rewards_of = [&](const std::vector<json>& rows) {
    std::vector<double> out_rewards;
    for (const auto& r : rows) out_rewards.push_back(r.at("reward").get<double>());
    return out_rewards;
  };
  auto* stats = rep->add_subcommand("stats", "Per-scenario mean, std, min, max and median");
  stats->add_option("input", report_input, "JSONL rows {scenario, reward}")->required()->check(CLI::ExistingFile);
  stats->add_option("--out", output, "CSV output (default stdout)");
  stats->callback([&] {
    action = [&] {
      std::map<std::string, std::vector<double>> by_scenario;
      for (const auto& r : read_jsonl(report_input)) {
        by_scenario[r.value("scenario", std::string("all"))].push_back(r.at("reward").get<double>());
      }
      write_output(output, forge::stats_csv(forge::reward_stats(by_scenario)), out);
    };
  });
  auto* curve = rep->add_subcommand("curve", "Moving-average learning curve");
  curve->add_option("input", report_input, "JSONL rows {reward} in training order")->required()->check(CLI::ExistingFile);
  curve->add_option("--window", window, "Moving-average window")->check(CLI::PositiveNumber);
  curve->add_option("--out", output, "CSV output (default stdout)");
  curve->callback([&] {
    action = [&] { write_output(output, forge::curve_csv(rewards_of(read_jsonl(report_input)), window), out); };
  });
  auto* lencorr = rep->add_subcommand("len-corr", "Pearson correlation of response length and reward");
  lencorr->add_option("input", report_input, "JSONL rows {response, reward}")->required()->check(CLI::ExistingFile);
  lencorr->callback([&] {
    action = [&] {
      const auto rows = read_jsonl(report_input);
      std::vector<double> lengths;
      for (const auto& r : rows) {
        lengths.push_back(static_cast<double>(forge::char_length(r.at("response").get<std::string>())));
      }
      const auto r = forge::pearson(lengths, rewards_of(rows));
      out << (r ? format_shortest(*r) : std::string("null")) << "\n";
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* failing = &app;
    for (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front(); sub != nullptr;
         sub = sub->get_subcommands().empty() ? nullptr : sub->get_subcommands().front()) {
      failing = sub;
    }
    err << failing->help();
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }
  try {
    action();
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << "\n";
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitDomainError;
}

}  // namespace microforge::cli
