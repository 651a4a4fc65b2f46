// Copyright 2026 The CMSF Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// cmsf: run the filtering pipelines over a recorded bundle, evaluate
// predictions, render overlays and generate synthetic fixtures.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cmsf/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cross-modality semantic filtering for unsupervised audio-visual segmentation"};
  app.require_subcommand(1);

  cmsf::RunOptions run;
  std::string config;
  auto* run_cmd = app.add_subcommand("run", "Run one pipeline variant over a bundle and dataset split");
  run_cmd->add_option("--bundle", run.bundle, "Interchange bundle directory")->required();
  run_cmd->add_option("--dataset", run.dataset, "Dataset root")->required();
  run_cmd->add_option("--split", run.split, "S4 or MS3")->required();
  run_cmd->add_option("--variant", run.variant, "at-gdino-sam | owod-bind | sam-bind")->required();
  run_cmd->add_option("--config", config, "JSON file overriding pipeline thresholds");
  run_cmd->add_option("--out", run.out, "Output directory")->required();
  run_cmd->add_option("--workers", run.workers, "Frames processed concurrently")->check(CLI::PositiveNumber);

  cmsf::EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against ground truth");
  eval_cmd->add_option("--pred", eval.preds, "Prediction tree written by `run` (repeatable)")->required();
  eval_cmd->add_option("--dataset", eval.dataset, "Dataset root")->required();
  eval_cmd->add_option("--split", eval.splits, "S4 and/or MS3 (repeatable)")->required();
  eval_cmd->add_option("--beta-sq", eval.beta_sq, "F-measure beta^2")->capture_default_str();
  eval_cmd->add_option("--out", eval.out, "Report directory")->required();

  std::string image, mask, render_out;
  auto* render_cmd = app.add_subcommand("render", "Blend a mask over a frame");
  render_cmd->add_option("--image", image, "RGB PNG frame")->required();
  render_cmd->add_option("--mask", mask, "Grayscale PNG mask")->required();
  render_cmd->add_option("--out", render_out, "Output PNG")->required();

  std::string fixtures_out;
  std::uint64_t seed = 0;
  auto* fixtures_cmd = app.add_subcommand("make-fixtures", "Generate a synthetic dataset and bundle");
  fixtures_cmd->add_option("--out", fixtures_out, "Output directory")->required();
  fixtures_cmd->add_option("--seed", seed, "Generator seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return cmsf::kExitUsage;
  }

  if (*run_cmd) {
    if (!config.empty()) run.config = config;
    return cmsf::cmd_run(run);
  }
  if (*eval_cmd) return cmsf::cmd_eval(eval);
  if (*render_cmd) return cmsf::cmd_render(image, mask, render_out);
  return cmsf::cmd_make_fixtures(fixtures_out, seed);
}
