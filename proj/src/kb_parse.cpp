#include <cctype>
#include <cstdlib>
#include <string>
#include <vector>

#include "ltn/kb.hpp"

namespace ltn {

namespace {

enum class Tok { ident, number, punct, end };

struct Token {
  Tok kind;
  std::string text;   // ident text or punctuation spelling
  double num = 0.0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space_and_comments();
      if (at_end()) {
        out.push_back(Token{Tok::end, "", 0.0, line_, col_});
        return out;
      }
      const int line = line_, col = col_;
      const char c = peek();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string name;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
          name += take();
        out.push_back(Token{Tok::ident, std::move(name), 0.0, line, col});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '-' && (digit_at(pos_ + 1) || (char_at(pos_ + 1) == '.' && digit_at(pos_ + 2))))) {
        out.push_back(lex_number(line, col));
        continue;
      }
      if (c == '-') {
        take();
        if (!at_end() && peek() == '>') {
          take();
          out.push_back(Token{Tok::punct, "->", 0.0, line, col});
          continue;
        }
        throw ParseError("unexpected '-'", line, col);
      }
      if (std::string(".,/=[]():~&|").find(c) != std::string::npos) {
        take();
        out.push_back(Token{Tok::punct, std::string(1, c), 0.0, line, col});
        continue;
      }
      throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char char_at(std::size_t i) const { return i < text_.size() ? text_[i] : '\0'; }
  bool digit_at(std::size_t i) const {
    return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
  }

  char take() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space_and_comments() {
    while (!at_end()) {
      const char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') take();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        take();
      } else {
        return;
      }
    }
  }

  Token lex_number(int line, int col) {
    std::string s;
    if (peek() == '-') s += take();
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) s += take();
    // A decimal point belongs to the number only when a digit follows;
    // otherwise it is the statement terminator (e.g. "embed 9.").
    if (!at_end() && peek() == '.' && digit_at(pos_ + 1)) {
      s += take();
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) s += take();
    }
    if (!at_end() && (peek() == 'e' || peek() == 'E')) {
      std::size_t look = pos_ + 1;
      if (char_at(look) == '+' || char_at(look) == '-') ++look;
      if (digit_at(look)) {
        s += take();
        if (peek() == '+' || peek() == '-') s += take();
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) s += take();
      }
    }
    return Token{Tok::number, s, std::strtod(s.c_str(), nullptr), line, col};
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : tokens_(Lexer(text).run()) {}

  KbDocument document() {
    KbDocument doc;
    while (!at(Tok::end)) statement(doc);
    return doc;
  }

  FormulaPtr bare_formula(const Signature& signature) {
    sig_ = &signature;
    FormulaPtr f = formula();
    if (is_punct(".")) advance();
    expect_end();
    return f;
  }

 private:
  const Token& cur() const { return tokens_[pos_]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool is_punct(const std::string& s) const { return at(Tok::punct) && cur().text == s; }
  bool is_ident(const std::string& s) const { return at(Tok::ident) && cur().text == s; }
  void advance() { ++pos_; }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, cur().line, cur().col);
  }

  void expect_punct(const std::string& s) {
    if (!is_punct(s)) fail("expected '" + s + "'");
    advance();
  }

  void expect_end() {
    if (!at(Tok::end)) fail("unexpected trailing input");
  }

  std::string expect_ident(const std::string& what) {
    if (!at(Tok::ident)) fail("expected " + what);
    std::string s = cur().text;
    advance();
    return s;
  }

  double expect_number(const std::string& what) {
    if (!at(Tok::number)) fail("expected " + what);
    double v = cur().num;
    advance();
    return v;
  }

  int expect_positive_int(const std::string& what) {
    const Token tok = cur();
    double v = expect_number(what);
    if (v < 1 || v != static_cast<int>(v))
      throw ParseError(what + " must be a positive integer", tok.line, tok.col);
    return static_cast<int>(v);
  }

  void statement(KbDocument& doc) {
    const Token start = cur();
    try {
      if (is_ident("pred") || is_ident("func")) {
        const bool is_pred = cur().text == "pred";
        advance();
        std::string name = expect_ident("symbol name");
        expect_punct("/");
        int arity = expect_positive_int("arity");
        expect_punct(".");
        if (is_pred)
          doc.signature.add_predicate(name, arity);
        else
          doc.signature.add_function(name, arity);
        return;
      }
      if (is_ident("const")) {
        advance();
        std::vector<std::string> names;
        while (at(Tok::ident)) names.push_back(expect_ident("constant name"));
        if (names.empty()) fail("expected at least one constant name");
        expect_punct(".");
        doc.signature.add_constant_group(names);
        return;
      }
      if (is_ident("embed")) {
        advance();
        int n = expect_positive_int("embedding dimension");
        expect_punct(".");
        doc.embedding_dim = n;
        return;
      }
      if (is_ident("ground")) {
        ground_statement(doc);
        return;
      }
      entry_statement(doc);
    } catch (const std::invalid_argument& e) {
      // Signature-level violations (duplicate names, bad arity) re-surface
      // with the statement's position.
      throw ParseError(e.what(), start.line, start.col);
    }
  }

  void ground_statement(KbDocument& doc) {
    advance();  // ground
    const Token sym_tok = cur();
    std::string sym = expect_ident("symbol name");
    if (!doc.signature.has_symbol(sym))
      throw ParseError("grounding for undeclared symbol '" + sym + "'", sym_tok.line,
                       sym_tok.col);
    if (doc.fixed.count(sym))
      throw ParseError("duplicate grounding for '" + sym + "'", sym_tok.line, sym_tok.col);
    expect_punct("=");
    FixedGrounding g;
    if (is_punct("[")) {
      if (!doc.signature.has_constant(sym))
        throw ParseError("vector groundings apply to constants only", sym_tok.line, sym_tok.col);
      advance();
      std::vector<double> values;
      values.push_back(expect_number("vector element"));
      while (is_punct(",")) {
        advance();
        values.push_back(expect_number("vector element"));
      }
      expect_punct("]");
      g.kind = FixedGrounding::Kind::vector;
      g.vector = Tensor::vector(std::move(values));
    } else if (is_ident("builtin")) {
      if (doc.signature.has_constant(sym))
        throw ParseError("builtin groundings apply to functions and predicates", sym_tok.line,
                         sym_tok.col);
      advance();
      expect_punct("(");
      g.kind = FixedGrounding::Kind::builtin;
      g.builtin = expect_ident("builtin name");
      expect_punct(")");
    } else {
      fail("expected '[' vector or builtin(name)");
    }
    expect_punct(".");
    doc.fixed.emplace(std::move(sym), std::move(g));
  }

  void entry_statement(KbDocument& doc) {
    Interval interval;
    if (is_punct("[")) {
      const Token open = cur();
      advance();
      interval.lo = expect_number("interval lower bound");
      expect_punct(",");
      interval.hi = expect_number("interval upper bound");
      expect_punct("]");
      if (!(0.0 <= interval.lo && interval.lo <= interval.hi && interval.hi <= 1.0))
        throw ParseError("confidence interval must satisfy 0 <= lo <= hi <= 1", open.line,
                         open.col);
    }
    sig_ = &doc.signature;
    FormulaPtr f = formula();
    expect_punct(".");
    doc.entries.push_back(KbEntry{interval, std::move(f)});
  }

  // ------------------------------------------------------------- formulas

  FormulaPtr formula() { return implication(); }

  FormulaPtr implication() {
    FormulaPtr lhs = disjunction();
    if (is_punct("->")) {
      advance();
      return Formula::implication(std::move(lhs), implication());
    }
    return lhs;
  }

  FormulaPtr disjunction() {
    FormulaPtr f = conjunction();
    while (is_punct("|")) {
      advance();
      f = Formula::disjunction(std::move(f), conjunction());
    }
    return f;
  }

  FormulaPtr conjunction() {
    FormulaPtr f = unary();
    while (is_punct("&")) {
      advance();
      f = Formula::conjunction(std::move(f), unary());
    }
    return f;
  }

  FormulaPtr unary() {
    if (is_punct("~")) {
      advance();
      return Formula::negation(unary());
    }
    if (is_punct("(")) {
      advance();
      FormulaPtr f = formula();
      expect_punct(")");
      return f;
    }
    if (is_ident("forall") || is_ident("exists")) {
      const bool universal = cur().text == "forall";
      advance();
      std::vector<std::string> vars;
      while (at(Tok::ident) && !is_ident("forall") && !is_ident("exists"))
        vars.push_back(expect_ident("variable name"));
      if (vars.empty()) fail("expected at least one quantified variable");
      expect_punct(":");
      FormulaPtr body = formula();  // scope runs to the end of the formula
      for (auto it = vars.rbegin(); it != vars.rend(); ++it)
        body = universal ? Formula::forall(*it, std::move(body))
                         : Formula::exists(*it, std::move(body));
      return body;
    }
    return atom();
  }

  FormulaPtr atom() {
    const Token tok = cur();
    std::string name = expect_ident("predicate");
    if (!sig_->has_predicate(name)) {
      if (sig_->has_symbol(name))
        throw ParseError("'" + name + "' is not a predicate", tok.line, tok.col);
      throw ParseError("undeclared predicate '" + name + "'", tok.line, tok.col);
    }
    expect_punct("(");
    std::vector<Term> args;
    args.push_back(term());
    while (is_punct(",")) {
      advance();
      args.push_back(term());
    }
    expect_punct(")");
    const int arity = sig_->predicate_arity(name);
    if (static_cast<int>(args.size()) != arity)
      throw ParseError("predicate '" + name + "' expects " + std::to_string(arity) +
                           " argument(s), got " + std::to_string(args.size()),
                       tok.line, tok.col);
    return Formula::atom(std::move(name), std::move(args));
  }

  Term term() {
    const Token tok = cur();
    std::string name = expect_ident("term");
    if (is_punct("(")) {
      if (!sig_->has_function(name)) {
        if (sig_->has_symbol(name))
          throw ParseError("'" + name + "' is not a function", tok.line, tok.col);
        throw ParseError("undeclared function '" + name + "'", tok.line, tok.col);
      }
      advance();
      std::vector<Term> args;
      args.push_back(term());
      while (is_punct(",")) {
        advance();
        args.push_back(term());
      }
      expect_punct(")");
      const int arity = sig_->function_arity(name);
      if (static_cast<int>(args.size()) != arity)
        throw ParseError("function '" + name + "' expects " + std::to_string(arity) +
                             " argument(s), got " + std::to_string(args.size()),
                         tok.line, tok.col);
      return Term::apply(std::move(name), std::move(args));
    }
    if (sig_->has_constant(name)) return Term::constant(std::move(name));
    if (sig_->has_symbol(name))
      throw ParseError("'" + name + "' cannot be used as a term", tok.line, tok.col);
    return Term::variable(std::move(name));  // free or quantified variable
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const Signature* sig_ = nullptr;
};

}  // namespace

KbDocument parse_kb(const std::string& text) { return Parser(text).document(); }

FormulaPtr parse_formula(const std::string& text, const Signature& signature) {
  return Parser(text).bare_formula(signature);
}

bool KbDocument::operator==(const KbDocument& other) const {
  if (!(signature == other.signature) || embedding_dim != other.embedding_dim ||
      fixed != other.fixed || entries.size() != other.entries.size())
    return false;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!(entries[i].interval == other.entries[i].interval)) return false;
    if (!formulas_equal(entries[i].formula, other.entries[i].formula)) return false;
  }
  return true;
}

KbDocument merge_documents(const std::vector<KbDocument>& documents) {
  KbDocument merged;
  for (const KbDocument& doc : documents) {
    for (const auto& [name, arity] : doc.signature.predicates()) {
      if (merged.signature.has_predicate(name)) {
        if (merged.signature.predicate_arity(name) != arity)
          throw std::invalid_argument("predicate '" + name + "' re-declared with arity " +
                                      std::to_string(arity));
      } else {
        merged.signature.add_predicate(name, arity);
      }
    }
    for (const auto& [name, arity] : doc.signature.functions()) {
      if (merged.signature.has_function(name)) {
        if (merged.signature.function_arity(name) != arity)
          throw std::invalid_argument("function '" + name + "' re-declared with arity " +
                                      std::to_string(arity));
      } else {
        merged.signature.add_function(name, arity);
      }
    }
    for (const auto& group : doc.signature.constant_groups()) {
      std::vector<std::string> fresh;
      for (const auto& c : group)
        if (!merged.signature.has_constant(c)) fresh.push_back(c);
      if (!fresh.empty()) merged.signature.add_constant_group(fresh);
    }
    if (doc.embedding_dim) {
      if (merged.embedding_dim && *merged.embedding_dim != *doc.embedding_dim)
        throw std::invalid_argument("conflicting embed declarations");
      merged.embedding_dim = doc.embedding_dim;
    }
    for (const auto& [sym, g] : doc.fixed) {
      auto it = merged.fixed.find(sym);
      if (it != merged.fixed.end()) {
        if (!(it->second == g))
          throw std::invalid_argument("conflicting groundings for '" + sym + "'");
      } else {
        merged.fixed.emplace(sym, g);
      }
    }
    merged.entries.insert(merged.entries.end(), doc.entries.begin(), doc.entries.end());
  }
  return merged;
}

}  // namespace ltn
