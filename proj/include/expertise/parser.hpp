#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "expertise/formula.hpp"
#include "expertise/signature.hpp"

namespace expertise {

// Recursive-descent parser for the formula grammar shared by scenario files
// and query flags:
//
//   formula := iff
//   iff     := imp ("<->" imp)*
//   imp     := or ("->" or)*          (right-associative)
//   or      := and ("|" and)*
//   and     := unary ("&" unary)*
//   unary   := "!" unary | atom
//   atom    := var | "true" | "false" | "(" formula ")"
//            | "E(" source "," prop-formula ")"
//            | "S(" source "," prop-formula ")"
//
// E/S arguments must be propositional; "E" and "S" act as keywords only when
// directly followed by "(".
class Parser {
 public:
  Parser(std::string_view text, const Signature& sig)
      : text_(text), sig_(sig) {}

  Formula parse() {
    Formula f = parse_iff(false);
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected trailing input", pos_);
    return f;
  }

 private:
  Formula parse_iff(bool prop_only) {
    Formula f = parse_imp(prop_only);
    while (match("<->")) f = Formula::iff(f, parse_imp(prop_only));
    return f;
  }

  Formula parse_imp(bool prop_only) {
    std::vector<Formula> parts{parse_or(prop_only)};
    while (match("->")) parts.push_back(parse_or(prop_only));
    Formula f = parts.back();
    for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it)
      f = Formula::implies(*it, f);
    return f;
  }

  Formula parse_or(bool prop_only) {
    Formula f = parse_and(prop_only);
    while (true) {
      skip_ws();
      // "|" but not part of another token
      if (pos_ < text_.size() && text_[pos_] == '|') {
        ++pos_;
        f = Formula::disj(f, parse_and(prop_only));
      } else {
        return f;
      }
    }
  }

  Formula parse_and(bool prop_only) {
    Formula f = parse_unary(prop_only);
    while (match("&")) f = Formula::conj(f, parse_unary(prop_only));
    return f;
  }

  Formula parse_unary(bool prop_only) {
    if (match("!")) return Formula::negate(parse_unary(prop_only));
    return parse_atom(prop_only);
  }

  Formula parse_atom(bool prop_only) {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    if (match("(")) {
      Formula f = parse_iff(prop_only);
      expect(")");
      return f;
    }
    std::size_t start = pos_;
    std::string id = identifier();
    if (id.empty()) throw ParseError("expected formula atom", pos_);
    if (id == "true") return Formula::truth(true);
    if (id == "false") return Formula::truth(false);
    if ((id == "E" || id == "S") && peek('(')) {
      if (prop_only)
        throw ParseError("E/S atoms may not be nested inside E/S arguments",
                         start);
      expect("(");
      SourceId src = source_name();
      expect(",");
      Formula arg = parse_iff(true);
      expect(")");
      return id == "E" ? Formula::expert(src, arg) : Formula::sound(src, arg);
    }
    VarId v = sig_.find_variable(id);
    if (v < 0) throw ParseError("unknown variable \"" + id + "\"", start);
    return Formula::var(v);
  }

  SourceId source_name() {
    skip_ws();
    std::size_t start = pos_;
    std::string name;
    if (pos_ < text_.size() && text_[pos_] == '*') {
      name = "*";
      ++pos_;
    } else {
      name = identifier();
    }
    if (name.empty()) throw ParseError("expected source name", pos_);
    SourceId s = sig_.find_source(name);
    if (s < 0) throw ParseError("unknown source \"" + name + "\"", start);
    return s;
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() &&
        (std::isalpha(static_cast<unsigned char>(text_[pos_])) ||
         text_[pos_] == '_')) {
      ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool match(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) != tok) return false;
    // "-" of "->" must not swallow "<->"; handled by ordering of calls.
    pos_ += tok.size();
    return true;
  }

  void expect(std::string_view tok) {
    if (!match(tok))
      throw ParseError("expected \"" + std::string(tok) + "\"", pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  std::string_view text_;
  const Signature& sig_;
  std::size_t pos_ = 0;
};

// Parses a formula of the full expertise language.
inline Formula parse_lformula(std::string_view text, const Signature& sig) {
  return Parser(text, sig).parse();
}

// Parses a purely propositional formula; E/S atoms are rejected.
inline Formula parse_formula(std::string_view text, const Signature& sig) {
  Formula f = Parser(text, sig).parse();
  if (!f.is_propositional())
    throw ParseError("expected a propositional formula (no E/S atoms)", 0);
  return f;
}

}  // namespace expertise
