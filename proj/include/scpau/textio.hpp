#pragma once

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scpau/interaction.hpp"
#include "scpau/signature.hpp"
#include "scpau/term.hpp"
#include "scpau/theory.hpp"

namespace scpau {

struct ParseContext {
  /// Declarations to check against; undeclared symbols are added unless strict.
  Signature* signature = nullptr;
  bool strict = false;
};

namespace detail {

inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

/// Maps variable spellings to ids: "?x<N>" keeps N, other names get fresh ids above the
/// largest explicit one, in order of first occurrence.
class VarNames {
 public:
  explicit VarNames(std::string_view text) {
    VarId max_explicit = 0;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] != '?' || (i > 0 && ident_char(text[i - 1]))) continue;
      std::size_t j = i + 1;
      while (j < text.size() && ident_char(text[j])) ++j;
      if (auto id = explicit_id(text.substr(i + 1, j - i - 1))) {
        max_explicit = std::max(max_explicit, *id);
        any = true;
      }
    }
    next_ = any ? max_explicit + 1 : 0;
  }

  VarId id(std::string_view name) {
    if (auto id = explicit_id(name)) return *id;
    auto [it, fresh] = named_.emplace(std::string(name), next_);
    if (fresh) ++next_;
    return it->second;
  }

 private:
  static std::optional<VarId> explicit_id(std::string_view name) {
    if (name.size() < 2 || name[0] != 'x') return std::nullopt;
    VarId v = 0;
    auto [p, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), v);
    if (ec != std::errc() || p != name.data() + name.size()) return std::nullopt;
    if (name.size() > 2 && name[1] == '0') return std::nullopt;
    return v;
  }

  std::map<std::string, VarId> named_;
  VarId next_ = 0;
};

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  std::string ident(const char* what) {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    if (start == pos_) fail(std::string("expected ") + what);
    return std::string(text_.substr(start, pos_ - start));
  }
  std::size_t offset() const { return pos_; }

  [[noreturn]] void fail(const std::string& msg) {
    skip_ws();
    const std::size_t end = std::min(text_.size(), pos_ + 1);
    if (pos_ >= text_.size()) throw ParseError(ErrorKind::syntax_error, {pos_, pos_}, msg + ", found end of input");
    throw ParseError(ErrorKind::syntax_error, {pos_, end},
                     msg + ", found '" + std::string(1, text_[pos_]) + "'");
  }
  [[noreturn]] void fail_at(ErrorKind kind, std::size_t start, const std::string& msg) {
    throw ParseError(kind, {start, pos_}, msg);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

inline Symbol declare_checked(Cursor& cur, std::size_t start, const ParseContext& ctx,
                              Signature& local, std::string_view name, std::size_t arity,
                              SymbolKind kind) {
  Signature& sig = ctx.signature ? *ctx.signature : local;
  if (auto known = sig.find(name)) {
    if (known->arity() != arity) {
      cur.fail_at(ErrorKind::arity_mismatch, start,
                  "symbol '" + std::string(name) + "' declared with arity " +
                      std::to_string(known->arity()) + ", used with " + std::to_string(arity));
    }
    return *known;
  }
  if (ctx.strict) cur.fail_at(ErrorKind::unknown_symbol, start, "unknown symbol '" + std::string(name) + "'");
  Symbol s = Symbol::make(name, arity, kind);
  sig.declare(s);
  return s;
}

inline Term parse_term_rec(Cursor& cur, VarNames& vars, const ParseContext& ctx, Signature& local) {
  const char c = cur.peek();
  const std::size_t start = cur.offset();
  if (c == '?') {
    cur.expect('?');
    return Term::var(vars.id(cur.ident("variable name")));
  }
  if (c == '#') {
    cur.expect('#');
    const std::string name = "#" + cur.ident("gate name");
    return Term::constant(declare_checked(cur, start, ctx, local, name, 0, SymbolKind::special_constant));
  }
  const std::string name = cur.ident("term");
  if (!cur.accept('(')) {
    return Term::constant(declare_checked(cur, start, ctx, local, name, 0, SymbolKind::ordinary_constant));
  }
  std::vector<Term> kids;
  do {
    kids.push_back(parse_term_rec(cur, vars, ctx, local));
  } while (cur.accept(','));
  cur.expect(')');
  const Symbol f = declare_checked(cur, start, ctx, local, name, kids.size(), SymbolKind::ordinary_function);
  return Term::app(f, std::move(kids));
}

/// Variable ids in order of first occurrence, renumbered from 0.
inline std::unordered_map<VarId, std::size_t> var_numbering(const Term& t) {
  std::unordered_map<VarId, std::size_t> out;
  for (VarId v : variables_in_order(t)) out.emplace(v, out.size());
  return out;
}

inline void render_rec(const Term& t, const std::unordered_map<VarId, std::size_t>& vars,
                       bool nary, std::string& out) {
  if (t.is_var()) {
    out += "?x" + std::to_string(vars.at(t.var_id()));
    return;
  }
  out += t.symbol().name();
  if (t.arity() == 0) return;
  const Symbol f = t.symbol();
  std::vector<const Term*> args;
  const bool spine = nary && (f == isym::seq() || f == isym::alt() || f == isym::par());
  const Term* cur = &t;
  if (spine) {
    while (cur->has_head(f)) {
      args.push_back(&cur->child(0));
      cur = &cur->child(1);
    }
    args.push_back(cur);
  } else {
    for (const Term& c : t.children()) args.push_back(&c);
  }
  out += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    render_rec(*args[i], vars, nary, out);
  }
  out += ')';
}

}  // namespace detail

inline Term parse_term(std::string_view text, const ParseContext& ctx = {}) {
  detail::Cursor cur(text);
  detail::VarNames vars(text);
  Signature local;
  Term t = detail::parse_term_rec(cur, vars, ctx, local);
  if (!cur.at_end()) cur.fail("expected end of input");
  return t;
}

/// Canonical text: symbol names, ", " between arguments, variables renumbered ?x0, ?x1, ...
inline std::string render(const Term& t) {
  std::string out;
  detail::render_rec(t, detail::var_numbering(t), false, out);
  return out;
}

// ---------------------------------------------------------------------------
// Interactions

namespace detail {

inline Term parse_interaction_rec(Cursor& cur, VarNames& vars, bool extended) {
  const char c = cur.peek();
  const std::size_t start = cur.offset();
  if (c == '?' && extended) {
    cur.expect('?');
    return Term::var(vars.id(cur.ident("variable name")));
  }
  if (c == '#' && extended) {
    cur.expect('#');
    return Term::constant(Symbol::special(cur.ident("gate name")));
  }
  if (c == '0') {
    cur.expect('0');
    if (std::isalnum(static_cast<unsigned char>(cur.peek())) && cur.offset() == start + 1) {
      cur.fail("expected interaction");
    }
    return empty_interaction();
  }
  const std::string head = cur.ident("interaction");
  if (!is_identifier(head)) cur.fail_at(ErrorKind::syntax_error, start, "invalid identifier '" + head + "'");
  if (cur.accept('!')) return emission(head, cur.ident("message"));
  if (cur.accept('?')) return reception(head, cur.ident("message"));
  if (!cur.accept('(')) cur.fail("expected '!', '?' or '(' after '" + head + "'");
  if (head == "vp") {
    const std::string l1 = cur.ident("lifeline");
    cur.expect(',');
    const std::string m = cur.ident("message");
    cur.expect(',');
    const std::string l2 = cur.ident("lifeline");
    cur.expect(')');
    if (l1 == l2) cur.fail_at(ErrorKind::vp_self_loop, start, "value passing from '" + l1 + "' to itself");
    return vp(l1, m, l2);
  }
  if (head == "loop") {
    Term body = parse_interaction_rec(cur, vars, extended);
    cur.expect(')');
    return Term::app(isym::loop(), {std::move(body)});
  }
  Symbol op;
  if (head == "seq") {
    op = isym::seq();
  } else if (head == "alt") {
    op = isym::alt();
  } else if (head == "par") {
    op = isym::par();
  } else {
    cur.fail_at(ErrorKind::unknown_symbol, start, "unknown operator '" + head + "'");
  }
  std::vector<Term> kids;
  kids.push_back(parse_interaction_rec(cur, vars, extended));
  while (cur.accept(',')) kids.push_back(parse_interaction_rec(cur, vars, extended));
  cur.expect(')');
  if (kids.size() < 2) cur.fail_at(ErrorKind::syntax_error, start, "'" + head + "' needs at least two operands");
  Term acc = kids.back();
  for (std::size_t i = kids.size() - 1; i-- > 0;) acc = Term::app(op, {kids[i], acc});
  return acc;
}

}  // namespace detail

/// Parses the interaction surface syntax; gates and variables only when extended.
inline Term parse_interaction(std::string_view text, bool extended = true) {
  detail::Cursor cur(text);
  detail::VarNames vars(text);
  Term t = detail::parse_interaction_rec(cur, vars, extended);
  if (!cur.at_end()) cur.fail("expected end of input");
  return t;
}

/// Like render, but right-nested seq/alt/par spines are printed n-ary.
inline std::string render_interaction(const Term& t) {
  std::string out;
  detail::render_rec(t, detail::var_numbering(t), true, out);
  return out;
}

// ---------------------------------------------------------------------------
// Taggings

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline Position parse_position(std::string_view s, std::size_t offset) {
  auto bad = [&] {
    return ParseError(ErrorKind::syntax_error, {offset, offset + s.size()},
                      "invalid position '" + std::string(s) + "'");
  };
  if (s == "eps") return Position{};
  Position p;
  std::size_t i = 0;
  while (true) {
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), v);
    if (ec != std::errc() || v == 0) throw bad();
    p.path.push_back(v);
    i = static_cast<std::size_t>(ptr - s.data());
    if (i == s.size()) return p;
    if (s[i] != '.') throw bad();
    ++i;
  }
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    f(text.substr(start, end - start), start);
    start = end + 1;
  }
}

}  // namespace detail

/// One entry per line: "POSL ; POSR ; #GATE". Blank lines and lines starting with '#' are skipped.
inline Tagging parse_tagging(std::string_view text) {
  Tagging out;
  std::set<Position> lefts, rights;
  detail::for_each_line(text, [&](std::string_view line, std::size_t offset) {
    const std::string_view body = detail::trim(line);
    if (body.empty() || body.front() == '#') return;
    const std::size_t base = offset + static_cast<std::size_t>(body.data() - line.data());
    std::vector<std::pair<std::string_view, std::size_t>> fields;
    std::size_t from = 0;
    while (true) {
      const std::size_t semi = body.find(';', from);
      const std::string_view raw = body.substr(from, semi == std::string_view::npos ? std::string_view::npos : semi - from);
      const std::string_view f = detail::trim(raw);
      fields.emplace_back(f, base + from + static_cast<std::size_t>(f.data() - raw.data()));
      if (semi == std::string_view::npos) break;
      from = semi + 1;
    }
    if (fields.size() != 3) {
      throw ParseError(ErrorKind::syntax_error, {base, base + body.size()}, "expected 'POS ; POS ; #GATE'");
    }
    const Position l = detail::parse_position(fields[0].first, fields[0].second);
    const Position r = detail::parse_position(fields[1].first, fields[1].second);
    const std::string_view g = fields[2].first;
    if (g.size() < 2 || g.front() != '#' || !is_identifier(g.substr(1))) {
      throw ParseError(ErrorKind::syntax_error, {fields[2].second, fields[2].second + g.size()},
                       "invalid gate '" + std::string(g) + "'");
    }
    if (!lefts.insert(l).second || !rights.insert(r).second) {
      throw ParseError(ErrorKind::duplicate_entry, {base, base + body.size()},
                       "position tagged twice in '" + std::string(body) + "'");
    }
    out.entries.push_back({l, r, Symbol::special(g)});
  });
  return out;
}

inline std::string render_tagging(const Tagging& gamma) {
  std::string out;
  for (const TagEntry& e : gamma.entries) {
    out += e.left.to_string() + " ; " + e.right.to_string() + " ; " + e.gate.name() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Theories

/// Lines "symbol : assoc comm unit=c" (any subset) and "eq: lhs = rhs"; '#' starts a comment line.
inline Theory parse_theory(std::string_view text) {
  Theory e;
  std::set<std::string> seen;
  detail::for_each_line(text, [&](std::string_view line, std::size_t offset) {
    const std::string_view body = detail::trim(line);
    if (body.empty() || body.front() == '#') return;
    const std::size_t base = offset + static_cast<std::size_t>(body.data() - line.data());
    const SourceSpan span{base, base + body.size()};
    const std::size_t colon = body.find(':');
    if (colon == std::string_view::npos) throw ParseError(ErrorKind::syntax_error, span, "expected ':'");
    const std::string_view name = detail::trim(body.substr(0, colon));
    const std::string_view rest = body.substr(colon + 1);
    if (name == "eq") {
      const std::size_t eq = rest.find('=');
      if (eq == std::string_view::npos) throw ParseError(ErrorKind::syntax_error, span, "expected '='");
      try {
        e.add_equation(parse_term(rest.substr(0, eq)), parse_term(rest.substr(eq + 1)));
      } catch (const ParseError& err) {
        throw ParseError(err.kind(), span, err.what());
      }
      return;
    }
    if (name.empty() || !std::all_of(name.begin(), name.end(), detail::ident_char)) {
      throw ParseError(ErrorKind::syntax_error, span, "invalid symbol name '" + std::string(name) + "'");
    }
    if (!seen.insert(std::string(name)).second) {
      throw ParseError(ErrorKind::duplicate_entry, span, "symbol '" + std::string(name) + "' listed twice");
    }
    Attributes attrs;
    std::istringstream words{std::string(rest)};
    std::string w;
    while (words >> w) {
      if (w == "assoc") {
        attrs.assoc = true;
      } else if (w == "comm") {
        attrs.comm = true;
      } else if (w.starts_with("unit=") && w.size() > 5 &&
                 std::all_of(w.begin() + 5, w.end(), detail::ident_char)) {
        attrs.unit = Symbol::constant(w.substr(5));
      } else {
        throw ParseError(ErrorKind::syntax_error, span, "unknown attribute '" + w + "'");
      }
    }
    try {
      e.set(Symbol::function(name, 2), attrs);
    } catch (const Error& err) {
      throw ParseError(err.kind(), span, err.what());
    }
  });
  return e;
}

inline std::string render_theory(const Theory& e) {
  std::string out;
  for (const auto& [f, a] : e.attributes()) {
    out += f.name() + " :";
    if (a.assoc) out += " assoc";
    if (a.comm) out += " comm";
    if (a.unit) out += " unit=" + a.unit->name();
    out += "\n";
  }
  for (const Equation& eq : e.raw_equations()) out += "eq: " + render(eq.lhs) + " = " + render(eq.rhs) + "\n";
  return out;
}

/// "interactions" or a theory file path.
inline Theory builtin_theory(std::string_view name) {
  if (name == "interactions") return interactions_theory();
  if (name == "empty" || name == "none") return Theory{};
  throw Error(ErrorKind::invalid_theory, "unknown builtin theory '" + std::string(name) + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_error, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorKind::io_error, "write to '" + path + "' failed");
}

}  // namespace scpau
