#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltn/logic.hpp"
#include "ltn/tensor.hpp"

namespace ltn {

struct Interval {
  double lo = 1.0;
  double hi = 1.0;
  bool operator==(const Interval& other) const { return lo == other.lo && hi == other.hi; }
};

// A user-supplied grounding for one symbol: an explicit vector (constants)
// or a named builtin (functions/predicates), e.g. vector_sum or cosine.
struct FixedGrounding {
  enum class Kind { vector, builtin };
  Kind kind = Kind::vector;
  Tensor vector;
  std::string builtin;

  bool operator==(const FixedGrounding& other) const {
    return kind == other.kind && builtin == other.builtin &&
           vector.shape == other.vector.shape && vector.data == other.vector.data;
  }
};

struct KbEntry {
  Interval interval;
  FormulaPtr formula;
};

// Parsed knowledge-base file: declarations, fixed groundings, and
// interval-tagged facts/axioms (still as formula trees; normalisation to
// clauses happens when a theory is assembled).
struct KbDocument {
  Signature signature;
  std::optional<int> embedding_dim;           // `embed N.`
  std::map<std::string, FixedGrounding> fixed;
  std::vector<KbEntry> entries;

  bool operator==(const KbDocument& other) const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line, int column)
      : std::runtime_error(message + " at line " + std::to_string(line) + ", column " +
                           std::to_string(column)),
        line(line),
        column(column) {}
  int line;
  int column;
};

// Grammar (statements end with '.', comments run from '#' to end of line):
//   pred Name/arity.        func Name/arity.        const name [name ...].
//   embed N.
//   ground sym = [v, ...].  ground sym = builtin(name).
//   [lo, hi] formula.       formula.
// Formulas: ~ & | ->, forall x [y ...]:, exists y:, predicates over terms.
KbDocument parse_kb(const std::string& text);

// Parses a bare formula against an existing signature (the query path).
FormulaPtr parse_formula(const std::string& text, const Signature& signature);

// Inverse of parse_kb up to comments and whitespace:
// parse_kb(serialize_kb(d)) == d structurally.
std::string serialize_kb(const KbDocument& document);

// Left-to-right union: signatures merge (arities must agree), constant groups
// concatenate in file order, fixed groundings must not conflict, entries
// concatenate. Symbols may be re-declared across files.
KbDocument merge_documents(const std::vector<KbDocument>& documents);

}  // namespace ltn
