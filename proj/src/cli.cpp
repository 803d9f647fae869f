#include "ltn/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ltn/model_io.hpp"

namespace ltn {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

KbDocument load_documents(const std::vector<std::string>& paths) {
  std::vector<KbDocument> docs;
  for (const auto& path : paths) {
    try {
      docs.push_back(parse_kb(read_file(path)));
    } catch (const ParseError& e) {
      throw ParseError(path + ": " + e.what(), e.line, e.column);
    }
  }
  return merge_documents(docs);
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string format_double_shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Rebuilds the clause set from KB files against a trained model's signature;
// the signatures must agree exactly (Skolem symbols included).
GroundedTheory theory_for_model(GroundingEnv env, const KbDocument& merged, int depth) {
  Signature signature = merged.signature;
  std::vector<TheoryEntry> kb;
  for (const KbEntry& entry : merged.entries) {
    const std::string source = entry.formula->to_string();
    NormalizeResult norm = normalize(*entry.formula, signature);
    signature = std::move(norm.signature);
    for (std::size_t i = 0; i < norm.clauses.size(); ++i) {
      std::string label = source;
      if (norm.clauses.size() > 1) label += " #" + std::to_string(i + 1);
      kb.push_back(TheoryEntry{entry.interval, std::move(norm.clauses[i]), std::move(label)});
    }
  }
  if (!(signature == env.signature()))
    throw std::invalid_argument(
        "knowledge base does not match the model's signature; retrain or pass the training KBs");
  GroundedTheory theory;
  theory.kb = std::move(kb);
  theory.env = std::move(env);
  theory.depth = depth;
  return theory;
}

}  // namespace

std::string render_trace_csv(const TrainTrace& trace) {
  std::string out = "step,loss,mean_truth\n";
  for (const TraceRow& row : trace.rows) {
    out += std::to_string(row.step);
    out += ',';
    out += format_double_shortest(row.loss);
    out += ',';
    out += format_double_shortest(row.mean_truth);
    out += '\n';
  }
  return out;
}

std::string render_completion_csv(const SatReport& report) {
  std::string out;
  for (const auto& block : report.groups) {
    // Column layout per group: unary predicates first, then one column per
    // (binary predicate, column constant) pair. Higher arities list at the end.
    std::map<std::string, std::map<std::string, double>> by_row;  // row -> column -> value
    std::vector<std::string> unary_cols, binary_cols, extra_lines;
    for (const auto& atom : block.atoms) {
      if (atom.args.size() == 1) {
        if (std::find(unary_cols.begin(), unary_cols.end(), atom.predicate) == unary_cols.end())
          unary_cols.push_back(atom.predicate);
        by_row[atom.args[0]][atom.predicate] = atom.value;
      } else if (atom.args.size() == 2) {
        const std::string col = atom.predicate + ":" + atom.args[1];
        if (std::find(binary_cols.begin(), binary_cols.end(), col) == binary_cols.end())
          binary_cols.push_back(col);
        by_row[atom.args[0]][col] = atom.value;
      } else {
        std::string line = atom.predicate + "(";
        for (std::size_t i = 0; i < atom.args.size(); ++i) {
          if (i) line += ' ';
          line += atom.args[i];
        }
        line += ")," + format_value(atom.value);
        extra_lines.push_back(std::move(line));
      }
    }
    out += "group," + block.label + "\n";
    out += "constant";
    for (const auto& c : unary_cols) out += "," + c;
    for (const auto& c : binary_cols) out += "," + c;
    out += '\n';
    for (const auto& row : block.constants) {
      out += row;
      for (const auto& c : unary_cols) out += "," + format_value(by_row[row][c]);
      for (const auto& c : binary_cols) out += "," + format_value(by_row[row][c]);
      out += '\n';
    }
    for (const auto& line : extra_lines) out += line + "\n";
    out += '\n';
  }
  return out;
}

std::string render_axioms_csv(const SatReport& report) {
  std::string out = "axiom,scope,truth,loss,satisfied\n";
  for (const auto& entry : report.entries) {
    if (!entry.has_free_vars) continue;
    out += "\"" + entry.label + "\",global," + format_value(entry.truth) + "," +
           format_value(entry.loss) + "," + (entry.satisfied ? "yes" : "no") + "\n";
    for (const auto& [scope, value] : entry.per_group)
      out += "\"" + entry.label + "\"," + scope + "," + format_value(value) + ",,\n";
  }
  return out;
}

std::string render_pretty_tables(const SatReport& report) {
  std::ostringstream os;
  auto mark = [](double v) { return format_value(v) + (v > 0.5 ? "*" : " "); };

  for (const auto& block : report.groups) {
    os << "group " << block.label << "\n";
    std::map<std::string, std::map<std::string, double>> by_row;
    std::vector<std::string> unary, binary;
    std::vector<SatReport::AtomValue> extra;
    for (const auto& atom : block.atoms) {
      if (atom.args.size() == 1) {
        if (std::find(unary.begin(), unary.end(), atom.predicate) == unary.end())
          unary.push_back(atom.predicate);
        by_row[atom.args[0]][atom.predicate] = atom.value;
      } else if (atom.args.size() == 2) {
        if (std::find(binary.begin(), binary.end(), atom.predicate) == binary.end())
          binary.push_back(atom.predicate);
        by_row[atom.args[0]][atom.predicate + ":" + atom.args[1]] = atom.value;
      } else {
        extra.push_back(atom);
      }
    }
    os << "      ";
    for (const auto& p : unary) os << p << std::string(p.size() < 6 ? 6 - p.size() : 1, ' ');
    for (const auto& p : binary)
      for (const auto& c : block.constants)
        os << p << "(" << c << ")" << std::string(2, ' ');
    os << "\n";
    for (const auto& row : block.constants) {
      os << row << std::string(row.size() < 6 ? 6 - row.size() : 1, ' ');
      for (const auto& p : unary) os << mark(by_row[row][p]) << " ";
      for (const auto& p : binary)
        for (const auto& c : block.constants) {
          const std::string head = p + "(" + c + ")";
          std::string cell = mark(by_row[row][p + ":" + c]);
          os << cell << std::string(head.size() + 2 > cell.size() + 1
                                        ? head.size() + 2 - cell.size() - 1
                                        : 1,
                                    ' ');
        }
      os << "\n";
    }
    for (const auto& atom : extra) {
      os << atom.predicate << "(";
      for (std::size_t i = 0; i < atom.args.size(); ++i) {
        if (i) os << ", ";
        os << atom.args[i];
      }
      os << ") = " << format_value(atom.value) << "\n";
    }
    os << "\n";
  }

  bool any_axiom = false;
  for (const auto& entry : report.entries) any_axiom = any_axiom || entry.has_free_vars;
  if (any_axiom) {
    os << "axioms (aggregated degree; * marks > 0.5)\n";
    for (const auto& entry : report.entries) {
      if (!entry.has_free_vars) continue;
      os << "  " << entry.label << " = " << mark(entry.truth);
      if (!entry.per_group.empty()) {
        os << " (";
        for (std::size_t i = 0; i < entry.per_group.size(); ++i) {
          if (i) os << ", ";
          os << entry.per_group[i].first << ": " << format_value(entry.per_group[i].second);
        }
        os << ")";
      }
      os << "\n";
    }
  }
  return os.str();
}

int cmd_train(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
  try {
    const KbDocument merged = load_documents(manifest.kb_paths);
    GroundedTheory theory =
        build_theory(merged, manifest.grounding, manifest.train.seed, manifest.depth);
    TrainResult result = train(theory, manifest.train);

    std::filesystem::create_directories(manifest.out_dir);
    const std::string model_path =
        (std::filesystem::path(manifest.out_dir) / "model.json").string();
    const std::string trace_path =
        (std::filesystem::path(manifest.out_dir) / "trace.csv").string();
    save_model(result.env, model_path);
    write_file(trace_path, render_trace_csv(result.trace));

    theory.env = result.env;
    const SatCheck sat = check_satisfied(theory);
    std::size_t satisfied = 0;
    for (bool ok : sat.entry_satisfied)
      if (ok) ++satisfied;
    out << "trained " << theory.kb.size() << " kb entr" << (theory.kb.size() == 1 ? "y" : "ies")
        << ", best loss " << format_double_shortest(result.best_loss) << " (restart "
        << result.best_restart << ")\n";
    out << "strictly satisfied entries: " << satisfied << "/" << sat.entry_satisfied.size()
        << "\n";
    out << "wrote " << model_path << " and " << trace_path << "\n";
    return 0;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const TrainingError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_report(const std::string& model_path, const std::vector<std::string>& kb_paths,
               int depth, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  try {
    GroundingEnv env = load_model(model_path);
    const KbDocument merged = load_documents(kb_paths);
    GroundedTheory theory = theory_for_model(std::move(env), merged, depth);
    const SatReport report = completion_report(theory);

    std::filesystem::create_directories(out_dir);
    const std::string completion_path =
        (std::filesystem::path(out_dir) / "completion.csv").string();
    const std::string axioms_path = (std::filesystem::path(out_dir) / "axioms.csv").string();
    write_file(completion_path, render_completion_csv(report));
    write_file(axioms_path, render_axioms_csv(report));

    out << render_pretty_tables(report);
    out << "total loss " << format_double_shortest(report.total_loss) << "\n";
    out << "wrote " << completion_path << " and " << axioms_path << "\n";
    return 0;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_query(const std::string& model_path, const std::string& formula_text, int depth,
              std::ostream& out, std::ostream& err) {
  try {
    GroundingEnv env = load_model(model_path);
    FormulaPtr formula = parse_formula(formula_text, env.signature());
    NormalizeResult norm = normalize(*formula, env.signature());
    if (!(norm.signature == env.signature()))
      throw std::invalid_argument(
          "query introduces existential quantifiers; the model has no grounding for their "
          "Skolem functions");

    GroundedTheory theory;
    theory.env = std::move(env);
    theory.depth = depth;

    char buf[32];
    for (const Clause& clause : norm.clauses) {
      if (clause.is_ground()) {
        const double v = ground_clause(clause, theory.env);
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        out << clause.to_string() << " = " << buf << "\n";
        continue;
      }
      out << clause.to_string() << "\n";
      for (const Instantiation& inst :
           enumerate_bindings(clause, theory.env.signature(), depth)) {
        const double v = ground_clause(inst.clause, theory.env);
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        out << "  ";
        for (std::size_t i = 0; i < inst.binding.size(); ++i) {
          if (i) out << ", ";
          out << clause.free_vars[i] << " = " << inst.binding[i].to_string();
        }
        out << ": " << buf << "\n";
      }
      const double agg = aggregate_clause(clause, theory);
      std::snprintf(buf, sizeof(buf), "%.6f", agg);
      out << "  aggregate = " << buf << "\n";
    }
    return 0;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ltn
