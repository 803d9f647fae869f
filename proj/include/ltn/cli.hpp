#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ltn/optimizer.hpp"

namespace ltn {

// One CLI invocation, resolved from flags. Multiple KB files are unioned
// into a single theory (left to right).
struct RunManifest {
  std::vector<std::string> kb_paths;
  GroundingConfig grounding;
  TrainConfig train;
  int depth = 0;
  std::string out_dir = ".";
};

// Exit codes: 0 ok, 2 input errors (parse/signature/arity), 3 non-finite loss.
int cmd_train(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_report(const std::string& model_path, const std::vector<std::string>& kb_paths,
               int depth, const std::string& out_dir, std::ostream& out, std::ostream& err);
int cmd_query(const std::string& model_path, const std::string& formula_text, int depth,
              std::ostream& out, std::ostream& err);

// Rendering helpers, exposed for tests.
std::string render_completion_csv(const SatReport& report);
std::string render_axioms_csv(const SatReport& report);
std::string render_pretty_tables(const SatReport& report);
std::string render_trace_csv(const TrainTrace& trace);

}  // namespace ltn
