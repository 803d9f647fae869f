#include "ltn/satisfiability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ltn {

GroundedTheory build_theory(const KbDocument& document, const GroundingConfig& config,
                            std::uint64_t seed, int depth) {
  Signature signature = document.signature;
  std::vector<TheoryEntry> kb;
  for (const KbEntry& entry : document.entries) {
    const std::string source = entry.formula->to_string();
    NormalizeResult norm = normalize(*entry.formula, signature);
    signature = std::move(norm.signature);
    for (std::size_t i = 0; i < norm.clauses.size(); ++i) {
      std::string label = source;
      if (norm.clauses.size() > 1) label += " #" + std::to_string(i + 1);
      kb.push_back(TheoryEntry{entry.interval, std::move(norm.clauses[i]), std::move(label)});
    }
  }

  GroundingConfig effective = config;
  if (document.embedding_dim) effective.n = *document.embedding_dim;

  GroundedTheory theory;
  theory.kb = std::move(kb);
  theory.env = init_env(signature, effective, document.fixed, seed);
  theory.depth = depth;
  return theory;
}

double clause_loss(double truth, const Interval& interval) {
  if (truth < interval.lo) return interval.lo - truth;
  if (truth > interval.hi) return truth - interval.hi;
  return 0.0;
}

NodeId clause_loss_node(Tape& tape, NodeId truth, const Interval& interval) {
  // max(lo - t, t - hi, 0): below the interval the first term wins, above it
  // the second, inside it the 0.
  NodeId below = tape.sub(tape.scalar_input(interval.lo), truth);
  NodeId above = tape.sub(truth, tape.scalar_input(interval.hi));
  return tape.max(tape.max(below, above), tape.scalar_input(0.0));
}

NodeId aggregate_clause_node(EnvOnTape& scope, const Clause& clause, const Signature& signature,
                             int depth) {
  if (clause.is_ground()) return scope.clause_value(clause);
  std::vector<Instantiation> instances = enumerate_bindings(clause, signature, depth);
  if (instances.empty())
    throw std::invalid_argument("clause '" + clause.to_string() + "' has no instantiations");
  std::vector<NodeId> values;
  values.reserve(instances.size());
  for (const Instantiation& inst : instances) values.push_back(scope.clause_value(inst.clause));
  if (values.size() == 1) return values[0];
  return scope.tape().harmonic_mean_eps(values);
}

double aggregate_clause(const Clause& clause, const GroundedTheory& theory) {
  Tape tape;
  EnvOnTape scope(theory.env, tape, false);
  return tape.value(aggregate_clause_node(scope, clause, theory.env.signature(), theory.depth))
      .item();
}

NodeId total_loss_node(EnvOnTape& scope, const GroundedTheory& theory, double lambda,
                       std::vector<NodeId>* entry_truths) {
  Tape& tape = scope.tape();
  NodeId loss = tape.scalar_input(0.0);
  for (const TheoryEntry& entry : theory.kb) {
    NodeId truth = aggregate_clause_node(scope, entry.clause, theory.env.signature(), theory.depth);
    if (entry_truths) entry_truths->push_back(truth);
    loss = tape.add(loss, clause_loss_node(tape, truth, entry.interval));
  }
  if (lambda != 0.0) {
    NodeId reg = tape.scalar_input(0.0);
    for (const auto& [name, node] : scope.parameter_nodes())
      reg = tape.add(reg, tape.sum(tape.mul(node, node)));
    loss = tape.add(loss, tape.scalar_mul(lambda, reg));
  }
  return loss;
}

double total_loss(const GroundedTheory& theory, double lambda) {
  Tape tape;
  EnvOnTape scope(theory.env, tape, lambda != 0.0);
  NodeId loss = total_loss_node(scope, theory, lambda);
  return tape.value(loss).item();
}

SatCheck check_satisfied(const GroundedTheory& theory) {
  Tape tape;
  EnvOnTape scope(theory.env, tape, false);
  SatCheck out;
  for (const TheoryEntry& entry : theory.kb) {
    bool ok = true;
    for (const Instantiation& inst :
         enumerate_bindings(entry.clause, theory.env.signature(), theory.depth)) {
      const double v = tape.value(scope.clause_value(inst.clause)).item();
      if (v < entry.interval.lo || v > entry.interval.hi) {
        ok = false;
        break;
      }
    }
    out.entry_satisfied.push_back(ok);
    out.all_satisfied = out.all_satisfied && ok;
  }
  return out;
}

namespace {

std::string group_label(const std::vector<std::string>& group) {
  if (group.size() == 1) return group.front();
  return group.front() + ".." + group.back();
}

// Index of the group containing every constant mentioned in the binding,
// or -1 when the binding spans groups (or mentions none).
int binding_group(const std::vector<Term>& binding,
                  const std::vector<std::vector<std::string>>& groups) {
  int found = -1;
  for (const Term& t : binding) {
    if (t.kind() != Term::Kind::constant) continue;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      if (std::find(groups[gi].begin(), groups[gi].end(), t.symbol()) != groups[gi].end()) {
        if (found == -1)
          found = static_cast<int>(gi);
        else if (found != static_cast<int>(gi))
          return -1;
        break;
      }
    }
  }
  return found;
}

double harmonic_mean_eps_values(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  if (xs.size() == 1) return xs[0];
  double denom = 0.0;
  for (double x : xs) denom += 1.0 / (x + Tape::kHarmonicEps);
  return static_cast<double>(xs.size()) / denom;
}

void enumerate_group_tuples(const std::vector<std::string>& constants, int arity,
                            std::vector<std::vector<std::string>>& out) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(arity), 0);
  while (true) {
    std::vector<std::string> tuple;
    tuple.reserve(idx.size());
    for (std::size_t i : idx) tuple.push_back(constants[i]);
    out.push_back(std::move(tuple));
    std::size_t pos = idx.size();
    bool done = false;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < constants.size()) break;
      idx[pos] = 0;
      if (pos == 0) done = true;
    }
    if (done) break;
  }
}

}  // namespace

SatReport completion_report(const GroundedTheory& theory, double lambda) {
  SatReport report;
  Tape tape;
  EnvOnTape scope(theory.env, tape, false);
  const Signature& sig = theory.env.signature();

  // Ground-atom table: every predicate over every same-group constant tuple.
  for (const auto& group : sig.constant_groups()) {
    SatReport::GroupBlock block;
    block.label = group_label(group);
    block.constants = group;
    for (const auto& [pred, arity] : sig.predicates()) {
      std::vector<std::vector<std::string>> tuples;
      enumerate_group_tuples(group, arity, tuples);
      for (const auto& tuple : tuples) {
        std::vector<Term> args;
        args.reserve(tuple.size());
        for (const auto& c : tuple) args.push_back(Term::constant(c));
        SatReport::AtomValue cell;
        cell.predicate = pred;
        cell.args = tuple;
        cell.value = tape.value(scope.atom(pred, args)).item();
        block.atoms.push_back(std::move(cell));
      }
    }
    report.groups.push_back(std::move(block));
  }

  // Per-entry degrees: global aggregate, loss, strict satisfaction, and the
  // per-group aggregates (instantiations whose constants stay in one group).
  double loss_sum = 0.0;
  for (const TheoryEntry& entry : theory.kb) {
    SatReport::Entry row;
    row.label = entry.label;
    row.interval = entry.interval;
    row.has_free_vars = !entry.clause.is_ground();

    std::vector<Instantiation> instances =
        enumerate_bindings(entry.clause, sig, theory.depth);
    std::vector<double> values;
    values.reserve(instances.size());
    bool satisfied = true;
    std::vector<std::vector<double>> per_group(sig.constant_groups().size());
    for (const Instantiation& inst : instances) {
      const double v = tape.value(scope.clause_value(inst.clause)).item();
      values.push_back(v);
      if (v < entry.interval.lo || v > entry.interval.hi) satisfied = false;
      const int gi = binding_group(inst.binding, sig.constant_groups());
      if (gi >= 0) per_group[static_cast<std::size_t>(gi)].push_back(v);
    }
    // The epsilon keeps the harmonic mean finite at 0 but nudges it just past
    // 1 when every value is 1; the loss uses the raw aggregate (what training
    // sees), the displayed truth clamps back into [0,1].
    const double aggregate = harmonic_mean_eps_values(values);
    row.truth = std::min(1.0, aggregate);
    row.loss = clause_loss(aggregate, entry.interval);
    row.satisfied = satisfied;
    if (row.has_free_vars && sig.constant_groups().size() > 1) {
      for (std::size_t gi = 0; gi < per_group.size(); ++gi)
        if (!per_group[gi].empty())
          row.per_group.emplace_back(group_label(sig.constant_groups()[gi]),
                                     std::min(1.0, harmonic_mean_eps_values(per_group[gi])));
    }
    loss_sum += row.loss;
    report.entries.push_back(std::move(row));
  }

  if (lambda != 0.0) {
    double reg = 0.0;
    for (const auto& [name, tensor] : theory.env.learnable_parameters_const())
      for (double v : tensor->data) reg += v * v;
    loss_sum += lambda * reg;
  }
  report.total_loss = loss_sum;
  return report;
}

}  // namespace ltn
