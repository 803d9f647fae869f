#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ltn/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ltn - Real Logic / Logic Tensor Network engine"};
  app.require_subcommand(1);

  ltn::RunManifest manifest;
  std::string snorm = "luk";
  std::string model_path;
  std::string query_text;
  int depth = 0;

  auto add_grounding_flags = [&](CLI::App* cmd) {
    cmd->add_option("--n", manifest.grounding.n, "embedding dimension (a KB's `embed` wins)");
    cmd->add_option("--k", manifest.grounding.k, "tensor network layers");
    cmd->add_option("--snorm", snorm, "s-norm: luk | prod | goedel");
  };

  CLI::App* train = app.add_subcommand("train", "fit a grounding to KB files");
  train->add_option("kb", manifest.kb_paths, "knowledge base files (unioned)")
      ->required()
      ->check(CLI::ExistingFile);
  add_grounding_flags(train);
  train->add_option("--steps", manifest.train.steps, "gradient steps");
  train->add_option("--lr", manifest.train.learning_rate, "learning rate");
  train->add_option("--decay", manifest.train.decay, "RMSProp decay");
  train->add_option("--eps", manifest.train.epsilon, "RMSProp epsilon");
  train->add_option("--lambda", manifest.train.lambda, "parameter smoothing factor");
  train->add_option("--depth", manifest.depth, "instantiation depth");
  train->add_option("--seed", manifest.train.seed, "base random seed");
  train->add_option("--restarts", manifest.train.restarts,
                    "seeded restarts, best loss wins (LTN_THREADS caps parallelism)");
  train->add_option("--log-every", manifest.train.log_every, "trace row interval");
  train->add_option("-o,--out", manifest.out_dir, "output directory");

  CLI::App* report = app.add_subcommand("report", "knowledge-completion tables for a model");
  report->add_option("model", model_path, "model.json from train")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("kb", manifest.kb_paths, "the KB files the model was trained on")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--depth", depth, "instantiation depth");
  report->add_option("-o,--out", manifest.out_dir, "output directory");

  CLI::App* query = app.add_subcommand("query", "evaluate a formula under a trained model");
  query->add_option("model", model_path, "model.json from train")
      ->required()
      ->check(CLI::ExistingFile);
  query->add_option("formula", query_text, "formula text, e.g. \"C(i)\"")->required();
  query->add_option("--depth", depth, "instantiation depth");

  CLI11_PARSE(app, argc, argv);

  if (train->parsed()) {
    auto parsed = ltn::snorm_from_name(snorm);
    if (!parsed) {
      std::cerr << "error: unknown s-norm '" << snorm << "'\n";
      return 2;
    }
    manifest.grounding.s_norm = *parsed;
    return ltn::cmd_train(manifest, std::cout, std::cerr);
  }
  if (report->parsed())
    return ltn::cmd_report(model_path, manifest.kb_paths, depth, manifest.out_dir, std::cout,
                           std::cerr);
  return ltn::cmd_query(model_path, query_text, depth, std::cout, std::cerr);
}
