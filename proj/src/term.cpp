#include "bdisim/term.hpp"

#include <cmath>
#include <cstdio>

namespace bdisim::bdi {

Term Term::atom(std::string name) {
  Term t;
  t.kind_ = Kind::Atom;
  t.name_ = std::move(name);
  return t;
}

Term Term::number(double value) {
  Term t;
  t.kind_ = Kind::Number;
  t.num_ = value;
  return t;
}

Term Term::text(std::string value) {
  Term t;
  t.kind_ = Kind::Text;
  t.name_ = std::move(value);
  return t;
}

Term Term::var(std::string name) {
  Term t;
  t.kind_ = Kind::Var;
  t.name_ = std::move(name);
  return t;
}

Term Term::compound(std::string functor, std::vector<Term> args) {
  Term t;
  t.kind_ = Kind::Compound;
  t.name_ = std::move(functor);
  t.args_ = std::move(args);
  return t;
}

Term t_cos(Term a) { return Term::compound("cos", {std::move(a)}); }
Term t_sin(Term a) { return Term::compound("sin", {std::move(a)}); }

bool Term::is_ground() const {
  switch (kind_) {
    case Kind::Var:
      return false;
    case Kind::Compound:
      for (const Term& a : args_) {
        if (!a.is_ground()) return false;
      }
      return true;
    default:
      return true;
  }
}

bool Term::operator==(const Term& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case Kind::Number:
      return num_ == other.num_;
    case Kind::Compound:
      return name_ == other.name_ && args_ == other.args_;
    default:
      return name_ == other.name_;
  }
}

std::string Term::to_string() const {
  switch (kind_) {
    case Kind::Atom:
      return name_;
    case Kind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.9g", num_);
      return buf;
    }
    case Kind::Text:
      return "\"" + name_ + "\"";
    case Kind::Var:
      return name_;
    case Kind::Compound: {
      std::string out = name_ + "(";
      for (std::size_t i = 0; i < args_.size(); ++i) {
        if (i) out += ",";
        out += args_[i].to_string();
      }
      return out + ")";
    }
  }
  return {};
}

const Term& walk(const Term& t, const Bindings& bindings) {
  const Term* cur = &t;
  while (cur->kind() == Term::Kind::Var) {
    auto it = bindings.find(cur->name());
    if (it == bindings.end()) break;
    cur = &it->second;
  }
  return *cur;
}

namespace {

bool occurs(const std::string& var, const Term& t, const Bindings& bindings) {
  const Term& w = walk(t, bindings);
  if (w.kind() == Term::Kind::Var) return w.name() == var;
  if (w.kind() == Term::Kind::Compound) {
    for (const Term& a : w.args()) {
      if (occurs(var, a, bindings)) return true;
    }
  }
  return false;
}

bool unify_impl(const Term& a, const Term& b, Bindings& bindings) {
  const Term& wa = walk(a, bindings);
  const Term& wb = walk(b, bindings);
  if (wa.kind() == Term::Kind::Var) {
    if (wb.kind() == Term::Kind::Var && wb.name() == wa.name()) return true;
    if (occurs(wa.name(), wb, bindings)) return false;
    bindings.emplace(wa.name(), wb);
    return true;
  }
  if (wb.kind() == Term::Kind::Var) return unify_impl(wb, wa, bindings);
  if (wa.kind() != wb.kind()) return false;
  switch (wa.kind()) {
    case Term::Kind::Number:
      return wa.value() == wb.value();
    case Term::Kind::Compound: {
      if (wa.name() != wb.name() || wa.arity() != wb.arity()) return false;
      for (std::size_t i = 0; i < wa.arity(); ++i) {
        if (!unify_impl(wa.args()[i], wb.args()[i], bindings)) return false;
      }
      return true;
    }
    default:
      return wa.name() == wb.name();
  }
}

}  // namespace

bool unify(const Term& a, const Term& b, Bindings& bindings) {
  Bindings attempt = bindings;
  if (!unify_impl(a, b, attempt)) return false;
  bindings = std::move(attempt);
  return true;
}

Term substitute(const Term& t, const Bindings& bindings) {
  const Term& w = walk(t, bindings);
  if (w.kind() == Term::Kind::Compound) {
    std::vector<Term> args;
    args.reserve(w.arity());
    for (const Term& a : w.args()) args.push_back(substitute(a, bindings));
    return Term::compound(w.name(), std::move(args));
  }
  return w;
}

std::optional<double> eval_number(const Term& t, const Bindings& bindings) {
  const Term& w = walk(t, bindings);
  switch (w.kind()) {
    case Term::Kind::Number:
      return w.value();
    case Term::Kind::Compound: {
      auto arg = [&](std::size_t i) { return eval_number(w.args()[i], bindings); };
      const std::string& f = w.name();
      if (w.arity() == 1) {
        auto a = arg(0);
        if (!a) return std::nullopt;
        if (f == "-") return -*a;
        if (f == "cos") return std::cos(*a);
        if (f == "sin") return std::sin(*a);
        if (f == "sqrt") return std::sqrt(*a);
        if (f == "abs") return std::fabs(*a);
        return std::nullopt;
      }
      if (w.arity() == 2) {
        auto a = arg(0), b = arg(1);
        if (!a || !b) return std::nullopt;
        if (f == "+") return *a + *b;
        if (f == "-") return *a - *b;
        if (f == "*") return *a * *b;
        if (f == "/") return *a / *b;
        if (f == "min") return std::fmin(*a, *b);
        if (f == "max") return std::fmax(*a, *b);
        if (f == "mod") return std::fmod(*a, *b);
        return std::nullopt;
      }
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

Term resolve(const Term& t, const Bindings& bindings) {
  if (auto v = eval_number(t, bindings)) return Term::number(*v);
  const Term& w = walk(t, bindings);
  if (w.kind() == Term::Kind::Compound) {
    std::vector<Term> args;
    args.reserve(w.arity());
    for (const Term& a : w.args()) args.push_back(resolve(a, bindings));
    return Term::compound(w.name(), std::move(args));
  }
  return w;
}

}  // namespace bdisim::bdi
