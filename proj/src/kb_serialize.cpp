#include <charconv>
#include <sstream>

#include "ltn/kb.hpp"

namespace ltn {

namespace {

// Shortest decimal string that round-trips the double exactly.
std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string serialize_kb(const KbDocument& document) {
  std::ostringstream out;
  out << "# ltn knowledge base\n";
  if (document.embedding_dim) out << "embed " << *document.embedding_dim << ".\n";
  for (const auto& [name, arity] : document.signature.predicates())
    out << "pred " << name << "/" << arity << ".\n";
  for (const auto& [name, arity] : document.signature.functions())
    out << "func " << name << "/" << arity << ".\n";
  for (const auto& group : document.signature.constant_groups()) {
    out << "const";
    for (const auto& c : group) out << ' ' << c;
    out << ".\n";
  }
  for (const auto& [sym, g] : document.fixed) {
    out << "ground " << sym << " = ";
    if (g.kind == FixedGrounding::Kind::vector) {
      out << '[';
      for (std::size_t i = 0; i < g.vector.data.size(); ++i) {
        if (i) out << ", ";
        out << format_double(g.vector.data[i]);
      }
      out << ']';
    } else {
      out << "builtin(" << g.builtin << ')';
    }
    out << ".\n";
  }
  for (const auto& entry : document.entries) {
    if (!(entry.interval == Interval{}))
      out << '[' << format_double(entry.interval.lo) << ", " << format_double(entry.interval.hi)
          << "] ";
    out << entry.formula->to_string() << ".\n";
  }
  return out.str();
}

}  // namespace ltn
