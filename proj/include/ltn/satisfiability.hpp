#pragma once

#include <string>
#include <vector>

#include "ltn/grounding.hpp"
#include "ltn/kb.hpp"
#include "ltn/logic.hpp"
#include "ltn/normalize.hpp"

namespace ltn {

// One clause of the theory, tagged with its confidence interval and the
// formula it was normalised from (for reporting).
struct TheoryEntry {
  Interval interval;
  Clause clause;
  std::string label;  // source formula text, plus #i when it split into clauses
};

// A grounded theory: the clause set K over env's signature plus the
// instantiation depth bound used when aggregating universally quantified
// clauses.
struct GroundedTheory {
  std::vector<TheoryEntry> kb;
  GroundingEnv env;
  int depth = 0;
};

// Normalises a document's entries against its signature (extending it with
// Skolem symbols) and initialises the grounding. The result owns everything
// training needs.
GroundedTheory build_theory(const KbDocument& document, const GroundingConfig& config,
                            std::uint64_t seed, int depth);

// Distance from a truth value to the interval; zero inside it.
double clause_loss(double truth, const Interval& interval);

// Truth value of a (possibly open) clause: instantiations up to theory.depth
// evaluated and combined with the epsilon-stabilised harmonic mean. Ground
// clauses return their single value.
double aggregate_clause(const Clause& clause, const GroundedTheory& theory);

// Training objective: sum of per-entry interval losses on the aggregated
// truth values plus lambda * sum of squared learnable parameters.
double total_loss(const GroundedTheory& theory, double lambda);

// Tape-building variants used by the trainer; `scope` must wrap theory.env.
// When `entry_truths` is given it receives the aggregated truth node of each
// kb entry, aligned with theory.kb.
NodeId clause_loss_node(Tape& tape, NodeId truth, const Interval& interval);
NodeId aggregate_clause_node(EnvOnTape& scope, const Clause& clause, const Signature& signature,
                             int depth);
NodeId total_loss_node(EnvOnTape& scope, const GroundedTheory& theory, double lambda,
                       std::vector<NodeId>* entry_truths = nullptr);

struct SatCheck {
  std::vector<bool> entry_satisfied;
  bool all_satisfied = true;
};

// Instance-wise satisfaction: an entry holds iff every instantiation's value
// lies inside the entry's closed interval (stricter than the training loss,
// which only sees the aggregate).
SatCheck check_satisfied(const GroundedTheory& theory);

// Completion output, Table-1 shaped.
struct SatReport {
  struct AtomValue {
    std::string predicate;
    std::vector<std::string> args;
    double value = 0.0;
  };
  struct GroupBlock {
    std::string label;                   // e.g. "a..h"
    std::vector<std::string> constants;  // the group's constants
    std::vector<AtomValue> atoms;        // all predicates over group tuples
  };
  struct Entry {
    std::string label;
    Interval interval;
    double truth = 0.0;   // aggregated over all instantiations
    double loss = 0.0;
    bool satisfied = false;  // instance-wise
    bool has_free_vars = false;
    std::vector<std::pair<std::string, double>> per_group;  // group label -> degree
  };
  std::vector<GroupBlock> groups;
  std::vector<Entry> entries;
  double total_loss = 0.0;
};

// Evaluates every ground atom over the declared constant groups plus
// per-entry aggregated degrees (global and per group). Deterministic order.
SatReport completion_report(const GroundedTheory& theory, double lambda = 0.0);

}  // namespace ltn
