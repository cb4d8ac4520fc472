// SPDX-License-Identifier: Apache-2.0
// Regenerates a replay transcript from hand-authored responses.
//
//   make_replay_fixture FIXTURE_DIR
//
// FIXTURE_DIR holds run.json and responses/NN_*.md. The responses are served
// in file-name order to a pipeline run configured by run.json, and every
// exchange is written to FIXTURE_DIR/transcript.jsonl.
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "microforge/arena/scenario.hpp"
#include "microforge/llm/backend.hpp"
#include "microforge/pcc/pipeline.hpp"

namespace fs = std::filesystem;
using namespace microforge;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_replay_fixture FIXTURE_DIR\n";
    return 2;
  }
  const fs::path dir = argv[1];
  const auto run = nlohmann::json::parse(slurp(dir / "run.json"));

  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir / "responses")) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<std::string> responses;
  for (const auto& f : files) responses.push_back(slurp(f));

  const auto scenario =
      arena::load_scenario_file(fs::path(MICROFORGE_DATA_DIR) / "scenarios" / run.at("scenario").get<std::string>());
  const fs::path templates_dir = MICROFORGE_TEMPLATE_DIR;
  const auto templates = llm::TemplateSet::load(templates_dir, templates_dir / "dsl");

  pcc::PipelineConfig config;
  config.max_rounds = run.at("max_rounds");
  config.target_win_rate = run.at("target_win_rate");
  config.episodes = run.at("episodes");
  config.base_seed = run.at("base_seed");

  auto scripted = std::make_shared<llm::ScriptedBackend>(responses);
  llm::RecordBackend recorder(scripted, dir / "transcript.jsonl");
  const auto trace = pcc::run_pipeline(scenario, recorder, templates, config);
  std::cout << "status " << pcc::to_string(trace.status) << ", " << trace.code_rounds << " code rounds, "
            << recorder.size() << " records\n";
  if (recorder.size() != responses.size()) {
    std::cerr << "warning: " << responses.size() - recorder.size() << " responses unused\n";
  }
  return trace.status == pcc::Status::success ? 0 : 1;
}
