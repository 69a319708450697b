#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bdisim::bdi {

/// First-order term: atoms, numbers, text literals, variables, and compound
/// terms. Value semantics throughout.
class Term {
 public:
  enum class Kind { Atom, Number, Text, Var, Compound };

  static Term atom(std::string name);
  static Term number(double value);
  static Term text(std::string value);
  static Term var(std::string name);
  static Term compound(std::string functor, std::vector<Term> args);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }  // atom/var/functor/text
  double value() const { return num_; }
  const std::vector<Term>& args() const { return args_; }
  std::size_t arity() const { return args_.size(); }

  /// Functor name for compounds, atom name for atoms.
  const std::string& functor() const { return name_; }

  bool is_ground() const;
  bool operator==(const Term& other) const;
  bool operator!=(const Term& other) const { return !(*this == other); }

  std::string to_string() const;

  // Arithmetic expression sugar used when building plan bodies.
  friend Term operator+(Term a, Term b) {
    return compound("+", {std::move(a), std::move(b)});
  }
  friend Term operator-(Term a, Term b) {
    return compound("-", {std::move(a), std::move(b)});
  }
  friend Term operator*(Term a, Term b) {
    return compound("*", {std::move(a), std::move(b)});
  }
  friend Term operator/(Term a, Term b) {
    return compound("/", {std::move(a), std::move(b)});
  }

 private:
  Kind kind_ = Kind::Atom;
  std::string name_;
  double num_ = 0;
  std::vector<Term> args_;
};

Term t_cos(Term a);
Term t_sin(Term a);

using Bindings = std::map<std::string, Term>;

/// Follows variable bindings until a non-variable or an unbound variable.
const Term& walk(const Term& t, const Bindings& bindings);

/// Syntactic unification with occurs check; extends `bindings` with the most
/// general unifier on success and leaves it untouched on failure.
bool unify(const Term& a, const Term& b, Bindings& bindings);

/// Substitutes bound variables recursively.
Term substitute(const Term& t, const Bindings& bindings);

/// Evaluates an arithmetic term (numbers, bound variables, and the functors
/// + - * / cos sin sqrt abs min max mod) to a double, or nullopt when the
/// term is not arithmetic.
std::optional<double> eval_number(const Term& t, const Bindings& bindings);

/// Substitutes bindings and folds arithmetic compounds into number terms.
Term resolve(const Term& t, const Bindings& bindings);

}  // namespace bdisim::bdi
