#pragma once

#include <memory>
#include <string>
#include <vector>

#include "expertise/signature.hpp"

namespace expertise {

// Formula of the expertise language: propositional connectives over variable
// and constant atoms plus E(i, phi) and S(i, phi) atoms whose arguments are
// purely propositional. A formula without E/S atoms is a propositional
// formula (the language the sources report in).
class Formula {
 public:
  enum class Kind { True, False, Var, Not, And, Or, Imp, Iff, Expert, Sound };

  Formula() : Formula(truth(true)) {}

  static Formula truth(bool b) {
    return Formula(node(b ? Kind::True : Kind::False));
  }
  static Formula var(VarId v) {
    auto n = node(Kind::Var);
    n->var = v;
    return Formula(std::move(n));
  }
  static Formula negate(Formula a) {
    auto n = node(Kind::Not);
    n->a = a.n_;
    return Formula(std::move(n));
  }
  static Formula conj(Formula a, Formula b) { return binary(Kind::And, a, b); }
  static Formula disj(Formula a, Formula b) { return binary(Kind::Or, a, b); }
  static Formula implies(Formula a, Formula b) {
    return binary(Kind::Imp, a, b);
  }
  static Formula iff(Formula a, Formula b) { return binary(Kind::Iff, a, b); }
  static Formula expert(SourceId i, Formula arg) {
    return es(Kind::Expert, i, std::move(arg));
  }
  static Formula sound(SourceId i, Formula arg) {
    return es(Kind::Sound, i, std::move(arg));
  }

  Kind kind() const { return n_->kind; }
  VarId var_id() const { return n_->var; }
  SourceId source() const { return n_->source; }
  Formula left() const { return Formula(n_->a); }
  Formula right() const { return Formula(n_->b); }

  bool is_propositional() const {
    switch (kind()) {
      case Kind::Expert:
      case Kind::Sound:
        return false;
      case Kind::True:
      case Kind::False:
      case Kind::Var:
        return true;
      case Kind::Not:
        return left().is_propositional();
      default:
        return left().is_propositional() && right().is_propositional();
    }
  }

  std::string to_string(const Signature& sig) const { return print(sig, 0); }

 private:
  struct Node {
    Kind kind;
    VarId var = -1;
    SourceId source = -1;
    std::shared_ptr<const Node> a, b;
  };
  using NodePtr = std::shared_ptr<const Node>;

  explicit Formula(NodePtr n) : n_(std::move(n)) {}
  static std::shared_ptr<Node> node(Kind k) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    return n;
  }
  static std::shared_ptr<Node> node(bool b) {
    return node(b ? Kind::True : Kind::False);
  }
  static Formula binary(Kind k, Formula a, Formula b) {
    auto n = node(k);
    n->a = a.n_;
    n->b = b.n_;
    return Formula(std::move(n));
  }
  static Formula es(Kind k, SourceId i, Formula arg) {
    if (!arg.is_propositional())
      throw Error("E/S arguments must be propositional (no nesting)");
    auto n = node(k);
    n->source = i;
    n->a = arg.n_;
    return Formula(std::move(n));
  }

  // Precedence levels for printing: 0 iff, 1 imp, 2 or, 3 and, 4 unary.
  std::string print(const Signature& sig, int level) const {
    auto wrap = [&](int mine, const std::string& s) {
      return level > mine ? "(" + s + ")" : s;
    };
    switch (kind()) {
      case Kind::True:
        return "true";
      case Kind::False:
        return "false";
      case Kind::Var:
        return sig.variable_name(var_id());
      case Kind::Not:
        return "!" + left().print(sig, 4);
      case Kind::And:
        return wrap(3, left().print(sig, 3) + " & " + right().print(sig, 3));
      case Kind::Or:
        return wrap(2, left().print(sig, 2) + " | " + right().print(sig, 2));
      case Kind::Imp:
        return wrap(1, left().print(sig, 2) + " -> " + right().print(sig, 1));
      case Kind::Iff:
        return wrap(0, left().print(sig, 1) + " <-> " + right().print(sig, 0));
      case Kind::Expert:
        return "E(" + sig.source_name(source()) + ", " +
               left().print(sig, 0) + ")";
      case Kind::Sound:
        return "S(" + sig.source_name(source()) + ", " +
               left().print(sig, 0) + ")";
    }
    return {};
  }

  NodePtr n_;
};

}  // namespace expertise
