// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "microforge/arena/rollout.hpp"
#include "microforge/arena/scenario.hpp"
#include "microforge/cli/cli.hpp"
#include "microforge/forge/dataset.hpp"
#include "microforge/forge/math.hpp"
#include "microforge/llm/backend.hpp"
#include "microforge/pcc/parsing.hpp"
#include "microforge/pcc/pipeline.hpp"
#include "microforge/pcc/skills.hpp"
#include "microforge/policy/clone.hpp"
#include "microforge/policy/compile.hpp"
#include "microforge/policy/parser.hpp"
#include "microforge/policy/printer.hpp"

namespace py = pybind11;
namespace mf = microforge;
namespace fs = std::filesystem;

namespace {

mf::policy::CompiledPolicy compile_text(const std::string& text) {
  return mf::policy::compile(mf::policy::parse(text));
}

std::vector<mf::policy::PolicySource> sources(const std::vector<std::pair<std::string, std::string>>& items) {
  std::vector<mf::policy::PolicySource> out;
  for (const auto& [id, text] : items) out.push_back({id, text, mf::policy::Origin::handwritten});
  return out;
}

}  // namespace

PYBIND11_MODULE(_microforge, m) {
  m.doc() = "Combat simulator, policy DSL, refinement loop and dataset math.";

  py::register_exception<mf::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<mf::ContractViolation>(m, "ContractViolation", PyExc_ValueError);

  m.def("load_scenario", [](const fs::path& path) { return mf::arena::load_scenario_file(path).name; },
        "Validates a scenario file and returns its name.");
  m.def("task_text", [](const fs::path& path) { return mf::arena::load_scenario_file(path).task_text; });

  m.def("check_policy", [](const std::string& text) { return compile_text(text).name(); },
        "Parses and type-checks; returns the policy name.");
  m.def("pretty_print", [](const std::string& text) { return mf::policy::pretty_print(mf::policy::parse(text)); });

  m.def(
      "run_rollouts",
      [](const fs::path& scenario, const std::string& policy, int episodes, std::uint64_t seed, int jobs) {
        const auto spec = mf::arena::load_scenario_file(scenario);
        const auto compiled = compile_text(policy);
        py::gil_scoped_release release;
        return mf::arena::serialize(mf::arena::run_rollouts(spec, compiled, episodes, seed, jobs));
      },
      py::arg("scenario"), py::arg("policy"), py::arg("episodes") = 10, py::arg("seed") = 0, py::arg("jobs") = 1,
      "Battle report as JSON text.");
  m.def(
      "report_text",
      [](const fs::path& scenario, const std::string& policy, int episodes, std::uint64_t seed) {
        const auto spec = mf::arena::load_scenario_file(scenario);
        return mf::arena::render_report_text(mf::arena::run_rollouts(spec, compile_text(policy), episodes, seed));
      },
      py::arg("scenario"), py::arg("policy"), py::arg("episodes") = 10, py::arg("seed") = 0);

  m.def("similarity", [](const std::string& a, const std::string& b) {
    return mf::policy::similarity(mf::policy::normalize(mf::policy::parse(a)),
                                  mf::policy::normalize(mf::policy::parse(b)));
  });
  m.def(
      "dedup",
      [](const std::vector<std::pair<std::string, std::string>>& corpus, double threshold) {
        return mf::policy::to_json(mf::policy::dedup(sources(corpus), threshold)).dump();
      },
      py::arg("corpus"), py::arg("threshold") = mf::policy::kDefaultDedupThreshold,
      "Corpus of (id, text) pairs; returns the dedup report as JSON text.");

  m.def("update_skill_score", [](double score, int uses, double g) {
    mf::pcc::SkillNode node{"s", score, uses, {}};
    mf::pcc::update_skill_score(node, g);
    return std::make_pair(node.score, node.uses);
  });
  m.def("parse_strategy", [](const std::string& text) { return mf::pcc::parse_strategy(text).names(); });
  m.def("parse_critique", [](const std::string& text) { return mf::pcc::to_string(mf::pcc::parse_critique(text).decision); });
  m.def(
      "replay_pipeline",
      [](const fs::path& scenario, const fs::path& transcript, const fs::path& templates, int max_rounds,
         double target, int episodes, std::uint64_t seed) {
        const auto spec = mf::arena::load_scenario_file(scenario);
        const auto set = mf::llm::TemplateSet::load(templates, fs::is_directory(templates / "dsl") ? templates / "dsl" : fs::path{});
        mf::llm::ReplayBackend replay(mf::llm::load_transcript(transcript));
        mf::pcc::PipelineConfig config;
        config.max_rounds = max_rounds;
        config.target_win_rate = target;
        config.episodes = episodes;
        config.base_seed = seed;
        return mf::pcc::serialize(mf::pcc::run_pipeline(spec, replay, set, config));
      },
      py::arg("scenario"), py::arg("transcript"), py::arg("templates"), py::arg("max_rounds") = 30,
      py::arg("target_win_rate") = 0.9, py::arg("episodes") = 10, py::arg("seed") = 0,
      "Pipeline trace JSON text from a recorded transcript.");

  m.def("group_advantages", [](const std::vector<double>& r) { return mf::forge::group_advantages(r); });
  m.def(
      "dpo_loss",
      [](double beta, double pc, double rc, double pr, double rr) { return mf::forge::dpo_loss({beta, pc, rc, pr, rr}); },
      py::arg("beta"), py::arg("policy_chosen"), py::arg("reference_chosen"), py::arg("policy_rejected"),
      py::arg("reference_rejected"));
  m.def("clipped_term", &mf::forge::clipped_term, py::arg("ratio"), py::arg("advantage"), py::arg("epsilon") = 0.2);
  m.def("kl_penalty", &mf::forge::kl_penalty, py::arg("log_policy"), py::arg("log_ref"));
  m.def("reward_stats", [](const std::vector<double>& r) {
    const auto s = mf::forge::stat_line("", r);
    return py::dict(py::arg("count") = s.count, py::arg("mean") = s.mean, py::arg("std") = s.std,
                    py::arg("min") = s.min, py::arg("max") = s.max, py::arg("median") = s.median);
  });
  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return mf::forge::pearson(x, y); });
  m.def(
      "triage",
      [](const std::string& response, const fs::path& scenario, int episodes, std::uint64_t seed) {
        mf::forge::TrainingRecord r;
        r.id = "py";
        r.response = response;
        mf::forge::evaluate_record(r, mf::arena::load_scenario_file(scenario), episodes, seed);
        return std::make_pair(mf::forge::to_string(mf::forge::triage(r)), mf::forge::grpo_reward(r));
      },
      py::arg("response"), py::arg("scenario"), py::arg("episodes") = 10, py::arg("seed") = 0,
      "(class, reward) for one model response.");

  m.def("cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = mf::cli::dispatch(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
