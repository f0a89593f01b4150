// SPDX-License-Identifier: Apache-2.0
//
// Recursive-descent parser for the concrete formula grammar.
//
//   formula  := iff
//   iff      := implies ('<->' implies)*
//   implies  := or ('->' implies)?
//   or       := and ('|' and)*
//   and      := unary ('&' unary)*
//   unary    := '!' unary | quantifier | primary
//   quantifier := ('E' | 'A') var '.' formula
//              |  'E' ('>=' | '<=') int var '.' formula
//              |  'SOE' name ':' int '.' formula
//   primary  := '(' formula ')' | ['~'] name '(' vars ')' | var ('=' | '!=') var
//            |  dep(vars) | const(var) | inc(vars; vars) | exc(vars; vars)
//            |  ind(vars; vars; vars) | '@' name '(' vars (';' vars)* ')'

#include <cctype>
#include <map>
#include <utility>

#include "teamlogic/error.hpp"
#include "teamlogic/syntax.hpp"

namespace teamlogic {
namespace {

enum class Tok {
  kIdent,
  kInt,
  kLParen,
  kRParen,
  kComma,
  kSemi,
  kDot,
  kColon,
  kAt,
  kAnd,
  kOr,
  kArrow,
  kDoubleArrow,
  kBang,
  kTilde,
  kEq,
  kNeq,
  kGe,
  kLe,
  kEnd,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](Tok k, std::size_t len) {
    out.push_back({k, std::string(s.substr(i, len)), i});
    i += len;
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      push(Tok::kIdent, j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      push(Tok::kInt, j - i);
      continue;
    }
    auto next = [&](char d) { return i + 1 < s.size() && s[i + 1] == d; };
    switch (c) {
      case '(': push(Tok::kLParen, 1); break;
      case ')': push(Tok::kRParen, 1); break;
      case ',': push(Tok::kComma, 1); break;
      case ';': push(Tok::kSemi, 1); break;
      case '.': push(Tok::kDot, 1); break;
      case ':': push(Tok::kColon, 1); break;
      case '@': push(Tok::kAt, 1); break;
      case '&': push(Tok::kAnd, 1); break;
      case '|': push(Tok::kOr, 1); break;
      case '~': push(Tok::kTilde, 1); break;
      case '=': push(Tok::kEq, 1); break;
      case '-':
        if (!next('>')) throw ParseError("expected '->'", i);
        push(Tok::kArrow, 2);
        break;
      case '<':
        if (next('=')) {
          push(Tok::kLe, 2);
        } else if (i + 2 < s.size() && s[i + 1] == '-' && s[i + 2] == '>') {
          push(Tok::kDoubleArrow, 3);
        } else {
          throw ParseError("expected '<=' or '<->'", i);
        }
        break;
      case '>':
        if (!next('=')) throw ParseError("expected '>='", i);
        push(Tok::kGe, 2);
        break;
      case '!':
        if (next('=')) {
          push(Tok::kNeq, 2);
        } else {
          push(Tok::kBang, 1);
        }
        break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
  }
  out.push_back({Tok::kEnd, "", s.size()});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& options)
      : tokens_(tokenize(text)), options_(options) {}

  Formula parse() {
    Formula f = parse_iff();
    if (peek().kind != Tok::kEnd) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    advance();
    return true;
  }
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, peek().pos); }
  [[noreturn]] void fail_at(const std::string& message, std::size_t pos) const {
    throw ParseError(message, pos);
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) {
      fail(std::string("expected ") + what +
           (peek().kind == Tok::kEnd ? " but reached end of input" : " before '" + peek().text + "'"));
    }
    return advance();
  }

  bool team() const { return options_.layer == Layer::kTeam; }

  Formula parse_iff() {
    Formula f = parse_implies();
    while (peek().kind == Tok::kDoubleArrow) {
      if (team()) fail("'<->' is not allowed in the team layer");
      advance();
      f = iff(f, parse_implies());
    }
    return f;
  }

  Formula parse_implies() {
    Formula f = parse_or();
    if (peek().kind == Tok::kArrow) {
      if (team()) fail("'->' is not allowed in the team layer");
      advance();
      return implies(f, parse_implies());
    }
    return f;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (accept(Tok::kOr)) f = disj(f, parse_and());
    return f;
  }

  Formula parse_and() {
    Formula f = parse_unary();
    while (accept(Tok::kAnd)) f = conj(f, parse_unary());
    return f;
  }

  Formula parse_unary() {
    const Token& t = peek();
    if (t.kind == Tok::kBang) {
      if (team()) fail("negation may only occur in literals in the team layer (use ~R(...) or x!=y)");
      prefix_ok_ = false;
      advance();
      return negate(parse_unary());
    }
    if (t.kind == Tok::kIdent && peek(1).kind != Tok::kLParen) {
      if (t.text == "E" || t.text == "A") return parse_quantifier();
      if (t.text == "SOE") return parse_so_exists();
    }
    if (t.kind == Tok::kLParen) {
      advance();
      Formula f = parse_iff();
      expect(Tok::kRParen, "')'");
      prefix_ok_ = false;
      return f;
    }
    prefix_ok_ = false;
    return parse_atomic();
  }

  Variable parse_var(const char* what) { return expect(Tok::kIdent, what).text; }

  int parse_int() {
    const Token& t = expect(Tok::kInt, "an integer");
    try {
      return std::stoi(t.text);
    } catch (const std::exception&) {
      fail_at("integer out of range", t.pos);
    }
  }

  Formula parse_quantifier() {
    prefix_ok_ = false;
    const Token& q = advance();
    if (peek().kind == Tok::kGe || peek().kind == Tok::kLe) {
      if (q.text != "E") fail("counting is only available on E");
      if (team()) fail("counting quantifiers are not allowed in the team layer");
      bool at_least = advance().kind == Tok::kGe;
      int bound = parse_int();
      Variable v = parse_var("a variable");
      expect(Tok::kDot, "'.'");
      Formula body = parse_iff();
      return at_least ? count_exists(bound, v, body) : count_at_most(bound, v, body);
    }
    Variable v = parse_var("a variable after quantifier");
    expect(Tok::kDot, "'.' after quantified variable");
    if (peek().kind == Tok::kEnd) fail("missing quantifier body");
    Formula body = parse_iff();
    return q.text == "E" ? exists(v, body) : forall(v, body);
  }

  Formula parse_so_exists() {
    std::size_t at = peek().pos;
    if (options_.layer != Layer::kSigma11) fail("second-order quantifiers need the sigma11 layer");
    if (!prefix_ok_) fail_at("second-order quantifiers may only form a leading prefix", at);
    advance();
    std::string name = expect(Tok::kIdent, "a relation variable").text;
    expect(Tok::kColon, "':'");
    int arity = parse_int();
    if (arity < 1) fail("arity must be positive");
    expect(Tok::kDot, "'.'");
    if (peek().kind == Tok::kEnd) fail("missing body");
    so_scope_.emplace_back(name, arity);
    prefix_ok_ = true;
    Formula body = parse_iff();
    so_scope_.pop_back();
    return so_exists(name, arity, body);
  }

  VarTuple parse_var_list(Tok terminator_a, Tok terminator_b) {
    VarTuple out;
    if (peek().kind == terminator_a || peek().kind == terminator_b) return out;
    out.push_back(parse_var("a variable"));
    while (accept(Tok::kComma)) out.push_back(parse_var("a variable"));
    return out;
  }

  std::vector<VarTuple> parse_tuples() {
    std::vector<VarTuple> tuples;
    tuples.push_back(parse_var_list(Tok::kSemi, Tok::kRParen));
    while (accept(Tok::kSemi)) tuples.push_back(parse_var_list(Tok::kSemi, Tok::kRParen));
    expect(Tok::kRParen, "')'");
    return tuples;
  }

  Formula parse_atomic() {
    std::size_t at = peek().pos;
    if (accept(Tok::kTilde)) {
      const Token& name = expect(Tok::kIdent, "a relation symbol after '~'");
      expect(Tok::kLParen, "'('");
      return relation_literal(name, false);
    }
    if (accept(Tok::kAt)) {
      if (options_.layer != Layer::kTeam) fail_at("dependency atoms are only allowed in the team layer", at);
      std::string name = expect(Tok::kIdent, "an atom name").text;
      expect(Tok::kLParen, "'('");
      return generalized_atom(name, parse_tuples(), at);
    }
    const Token& id = expect(Tok::kIdent, "a formula");
    if (accept(Tok::kLParen)) {
      if (id.text == "dep" || id.text == "const" || id.text == "inc" || id.text == "exc" ||
          id.text == "ind") {
        return builtin_atom(id, parse_tuples());
      }
      return relation_literal(id, true);
    }
    if (peek().kind == Tok::kEq || peek().kind == Tok::kNeq) {
      bool positive = advance().kind == Tok::kEq;
      Variable rhs = parse_var("a variable");
      return eq(id.text, rhs, positive);
    }
    fail_at("expected '(' or '=' after '" + id.text + "'", id.pos);
  }

  Formula relation_literal(const Token& name, bool positive) {
    VarTuple args = parse_var_list(Tok::kRParen, Tok::kRParen);
    expect(Tok::kRParen, "')'");
    if (args.empty()) fail_at("relation " + name.text + " needs arguments", name.pos);
    int arity = static_cast<int>(args.size());
    for (auto it = so_scope_.rbegin(); it != so_scope_.rend(); ++it) {
      if (it->first == name.text) {
        if (it->second != arity) {
          fail_at("arity mismatch for " + name.text + ": bound with arity " +
                      std::to_string(it->second) + ", used with " + std::to_string(arity),
                  name.pos);
        }
        return rel(name.text, std::move(args), positive);
      }
    }
    if (options_.vocab != nullptr) {
      auto expected = options_.vocab->arity(name.text);
      if (!expected) fail_at("unknown relation symbol " + name.text, name.pos);
      if (*expected != arity) {
        fail_at("arity mismatch for " + name.text + ": expected " + std::to_string(*expected) +
                    ", got " + std::to_string(arity),
                name.pos);
      }
    } else {
      try {
        inferred_.add(name.text, arity);
      } catch (const InvalidArgument& e) {
        fail_at(std::string("arity mismatch: ") + e.what(), name.pos);
      }
    }
    return rel(name.text, std::move(args), positive);
  }

  Formula builtin_atom(const Token& id, std::vector<VarTuple> tuples) {
    if (!team()) fail_at("dependency atoms are only allowed in the team layer", id.pos);
    auto require = [&](bool ok, const char* message) {
      if (!ok) fail_at(id.text + ": " + message, id.pos);
    };
    if (id.text == "dep" || id.text == "const") {
      require(tuples.size() == 1, "arguments must be a single comma-separated list");
      VarTuple args = std::move(tuples[0]);
      require(!args.empty(), "needs at least one variable");
      if (id.text == "const") require(args.size() == 1, "takes exactly one variable");
      Variable dependent = args.back();
      args.pop_back();
      return dep_atom(std::move(args), std::move(dependent));
    }
    if (id.text == "inc" || id.text == "exc") {
      require(tuples.size() == 2, "expects two tuples separated by ';'");
      require(!tuples[0].empty() && tuples[0].size() == tuples[1].size(),
              "tuples must be nonempty and of equal length");
      return id.text == "inc" ? inc_atom(std::move(tuples[0]), std::move(tuples[1]))
                              : exc_atom(std::move(tuples[0]), std::move(tuples[1]));
    }
    require(tuples.size() == 3, "expects three tuples 'given; left; right'");
    return ind_atom(std::move(tuples[0]), std::move(tuples[1]), std::move(tuples[2]));
  }

  Formula generalized_atom(const std::string& name, std::vector<VarTuple> tuples, std::size_t at) {
    std::vector<int> type;
    for (const auto& t : tuples) {
      if (t.empty()) fail_at("@" + name + " has an empty tuple", at);
      type.push_back(static_cast<int>(t.size()));
    }
    const AtomSignature* sig = nullptr;
    if (options_.atoms != nullptr) {
      auto it = options_.atoms->find(name);
      if (it == options_.atoms->end()) fail_at("unknown atom @" + name, at);
      sig = &it->second;
    } else {
      auto [it, inserted] = inferred_atoms_.emplace(name, AtomSignature{name, type});
      sig = &it->second;
    }
    if (sig->type != type) fail_at("tuples of @" + name + " do not match its declared type", at);
    return gen_atom(name, std::move(tuples));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const ParseOptions& options_;
  Vocabulary inferred_;
  AtomTable inferred_atoms_;
  std::vector<std::pair<std::string, int>> so_scope_;
  bool prefix_ok_ = true;
};

// Rendering. Precedences: iff 1, implies 2, or 3, and 4, atomic/unary 5.
// `open` marks text ending in a quantifier body, which would swallow any
// operator written after it.
struct Rendered {
  std::string text;
  int prec;
  bool open;
};

std::string join(const VarTuple& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ",";
    out += vs[i];
  }
  return out;
}

std::string join_tuples(const std::vector<VarTuple>& ts) {
  std::string out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out += "; ";
    out += join(ts[i]);
  }
  return out;
}

Rendered render_node(const Formula& f);

std::string paren(const std::string& s) { return "(" + s + ")"; }

std::string operand(const Formula& f, int min_prec, bool must_close) {
  Rendered r = render_node(f);
  if (r.prec < min_prec || (must_close && r.open)) return paren(r.text);
  return r.text;
}

Rendered binary_op(const Formula& f, const char* op, int prec, bool right_assoc) {
  std::string left = operand(f->lhs, right_assoc ? prec + 1 : prec, true);
  Rendered right = render_node(f->rhs);
  bool wrap = right.prec < (right_assoc ? prec : prec + 1);
  std::string rtext = wrap ? paren(right.text) : right.text;
  return {left + " " + op + " " + rtext, prec, !wrap && right.open};
}

std::string body_text(const Formula& body) {
  Rendered r = render_node(body);
  if (r.prec >= 1 && r.prec <= 4) return paren(r.text);
  return r.text;
}

Rendered render_node(const Formula& f) {
  switch (f->kind) {
    case NodeKind::kRel:
      return {(f->positive ? "" : "~") + f->symbol + "(" + join(f->args) + ")", 5, false};
    case NodeKind::kEq:
      return {f->args[0] + (f->positive ? "=" : "!=") + f->args[1], 5, false};
    case NodeKind::kAnd: return binary_op(f, "&", 4, false);
    case NodeKind::kOr: return binary_op(f, "|", 3, false);
    case NodeKind::kImplies: return binary_op(f, "->", 2, true);
    case NodeKind::kIff: return binary_op(f, "<->", 1, false);
    case NodeKind::kNot: {
      const Formula& c = f->lhs;
      if (c->kind == NodeKind::kCountExists && c->count >= 1) {
        return {"E<=" + std::to_string(c->count - 1) + " " + c->var + ". " + body_text(c->lhs), 0, true};
      }
      Rendered r = render_node(c);
      if (r.prec < 5) return {"!" + paren(r.text), 5, false};
      return {"!" + r.text, r.open ? 0 : 5, r.open};
    }
    case NodeKind::kExists:
      return {"E " + f->var + ". " + body_text(f->lhs), 0, true};
    case NodeKind::kForall:
      return {"A " + f->var + ". " + body_text(f->lhs), 0, true};
    case NodeKind::kCountExists:
      return {"E>=" + std::to_string(f->count) + " " + f->var + ". " + body_text(f->lhs), 0, true};
    case NodeKind::kSOExists:
      return {"SOE " + f->symbol + ":" + std::to_string(f->count) + ". " + body_text(f->lhs), 0, true};
    case NodeKind::kGenAtom:
      return {"@" + f->symbol + "(" + join_tuples(f->tuples) + ")", 5, false};
    case NodeKind::kBuiltinAtom: {
      std::string text;
      switch (f->builtin) {
        case BuiltinKind::kDep:
        case BuiltinKind::kConst: {
          VarTuple all = f->tuples[0];
          all.push_back(f->tuples[1][0]);
          text = "dep(" + join(all) + ")";
          break;
        }
        default:
          text = std::string(builtin_name(f->builtin)) + "(" + join_tuples(f->tuples) + ")";
          break;
      }
      return {text, 5, false};
    }
  }
  return {"?", 5, false};
}

}  // namespace

Formula parse_formula(std::string_view text, const ParseOptions& options) {
  Parser parser(text, options);
  Formula f = parser.parse();
  check_layer(f, options.layer);
  return f;
}

std::string render(const Formula& f) {
  if (!f) return "";
  return render_node(f).text;
}

}  // namespace teamlogic
