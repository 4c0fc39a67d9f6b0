#include "slent/presburger.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <numeric>
#include <sstream>

namespace slent::presburger {

namespace {

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b);
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  return (a / gcd64(a, b)) * b;
}

// Floor division with positive divisor.
std::int64_t floor_div(std::int64_t p, std::int64_t q) {
  std::int64_t d = p / q;
  if ((p % q != 0) && ((p < 0) != (q < 0))) --d;
  return d;
}

std::int64_t mod_pos(std::int64_t p, std::int64_t q) {
  std::int64_t m = p % q;
  return m < 0 ? m + q : m;
}

}  // namespace

// ---------------------------------------------------------------------------
// LinearTerm

LinearTerm LinearTerm::of_const(std::int64_t k) {
  LinearTerm lt;
  lt.constant = k;
  return lt;
}

LinearTerm LinearTerm::of_var(const std::string &name, std::int64_t coeff) {
  LinearTerm lt;
  if (coeff != 0) lt.coeffs[name] = coeff;
  return lt;
}

LinearTerm LinearTerm::from_term(const Term &t) {
  switch (t.kind()) {
    case Term::Kind::Var:
      return of_var(t.var_name());
    case Term::Kind::Const:
      return of_const(static_cast<std::int64_t>(t.const_value()));
    case Term::Kind::Sum:
      return from_term(t.lhs()).plus(from_term(t.rhs()));
  }
  return {};
}

LinearTerm LinearTerm::plus(const LinearTerm &o) const {
  LinearTerm out = *this;
  out.constant += o.constant;
  for (const auto &[v, c] : o.coeffs) {
    auto it = out.coeffs.find(v);
    if (it == out.coeffs.end()) {
      out.coeffs[v] = c;
    } else {
      it->second += c;
      if (it->second == 0) out.coeffs.erase(it);
    }
  }
  return out;
}

LinearTerm LinearTerm::minus(const LinearTerm &o) const { return plus(o.negated()); }

LinearTerm LinearTerm::negated() const { return scaled(-1); }

LinearTerm LinearTerm::scaled(std::int64_t k) const {
  LinearTerm out;
  if (k == 0) return out;
  out.constant = constant * k;
  for (const auto &[v, c] : coeffs) out.coeffs[v] = c * k;
  return out;
}

LinearTerm LinearTerm::plus_const(std::int64_t k) const {
  LinearTerm out = *this;
  out.constant += k;
  return out;
}

std::int64_t LinearTerm::coeff(const std::string &name) const {
  auto it = coeffs.find(name);
  return it == coeffs.end() ? 0 : it->second;
}

LinearTerm LinearTerm::without(const std::string &name) const {
  LinearTerm out = *this;
  out.coeffs.erase(name);
  return out;
}

std::int64_t LinearTerm::eval(const std::map<std::string, std::int64_t> &env) const {
  std::int64_t v = constant;
  for (const auto &[name, c] : coeffs) {
    auto it = env.find(name);
    if (it == env.end()) throw std::logic_error("unbound variable in evaluation: " + name);
    v += c * it->second;
  }
  return v;
}

// ---------------------------------------------------------------------------
// PbFormula

PbFormula PbFormula::make(Node n) { return PbFormula(std::make_shared<Node>(std::move(n))); }

PbFormula PbFormula::truth() { return make({Kind::True, {}, 0, {}, {}}); }
PbFormula PbFormula::falsity() { return make({Kind::False, {}, 0, {}, {}}); }

PbFormula PbFormula::eq(LinearTerm lt) {
  if (lt.is_ground()) return boolean(lt.constant == 0);
  std::int64_t g = 0;
  for (const auto &[v, c] : lt.coeffs) g = gcd64(g, c);
  if (g > 1) {
    if (lt.constant % g != 0) return falsity();
    LinearTerm r;
    r.constant = lt.constant / g;
    for (const auto &[v, c] : lt.coeffs) r.coeffs[v] = c / g;
    lt = r;
  }
  // Fix a sign to make Eq(lt) and Eq(-lt) identical.
  if (lt.coeffs.begin()->second < 0) lt = lt.negated();
  return make({Kind::Eq, std::move(lt), 0, {}, {}});
}

PbFormula PbFormula::le(LinearTerm lt) {
  if (lt.is_ground()) return boolean(lt.constant <= 0);
  std::int64_t g = 0;
  for (const auto &[v, c] : lt.coeffs) g = gcd64(g, c);
  if (g > 1) {
    LinearTerm r;
    for (const auto &[v, c] : lt.coeffs) r.coeffs[v] = c / g;
    r.constant = -floor_div(-lt.constant, g);
    lt = r;
  }
  return make({Kind::Le, std::move(lt), 0, {}, {}});
}

PbFormula PbFormula::dvd(std::int64_t d, LinearTerm lt) {
  if (d < 0) d = -d;
  if (d == 0) return eq(std::move(lt));
  if (d == 1) return truth();
  LinearTerm r;
  for (const auto &[v, c] : lt.coeffs) {
    std::int64_t m = mod_pos(c, d);
    if (m != 0) r.coeffs[v] = m;
  }
  r.constant = mod_pos(lt.constant, d);
  if (r.is_ground()) return boolean(r.constant == 0);
  std::int64_t g = d;
  for (const auto &[v, c] : r.coeffs) g = gcd64(g, c);
  g = gcd64(g, r.constant);
  if (g > 1) {
    LinearTerm q;
    for (const auto &[v, c] : r.coeffs) q.coeffs[v] = c / g;
    q.constant = r.constant / g;
    r = q;
    d /= g;
    if (d == 1) return truth();
  }
  return make({Kind::Dvd, std::move(r), d, {}, {}});
}

PbFormula PbFormula::negation(PbFormula f) {
  switch (f.kind()) {
    case Kind::True:
      return falsity();
    case Kind::False:
      return truth();
    case Kind::Not:
      return f.children()[0];
    default:
      return make({Kind::Not, {}, 0, {std::move(f)}, {}});
  }
}

PbFormula PbFormula::conj(std::vector<PbFormula> fs) {
  std::vector<PbFormula> kids;
  std::set<std::string> seen;
  for (auto &f : fs) {
    if (f.kind() == Kind::True) continue;
    if (f.kind() == Kind::False) return falsity();
    if (f.kind() == Kind::And) {
      for (const auto &k : f.children()) {
        if (k.kind() == Kind::False) return falsity();
        if (seen.insert(k.key()).second) kids.push_back(k);
      }
    } else if (seen.insert(f.key()).second) {
      kids.push_back(std::move(f));
    }
  }
  if (kids.empty()) return truth();
  if (kids.size() == 1) return kids[0];
  return make({Kind::And, {}, 0, std::move(kids), {}});
}

PbFormula PbFormula::disj(std::vector<PbFormula> fs) {
  std::vector<PbFormula> kids;
  std::set<std::string> seen;
  for (auto &f : fs) {
    if (f.kind() == Kind::False) continue;
    if (f.kind() == Kind::True) return truth();
    if (f.kind() == Kind::Or) {
      for (const auto &k : f.children()) {
        if (k.kind() == Kind::True) return truth();
        if (seen.insert(k.key()).second) kids.push_back(k);
      }
    } else if (seen.insert(f.key()).second) {
      kids.push_back(std::move(f));
    }
  }
  if (kids.empty()) return falsity();
  if (kids.size() == 1) return kids[0];
  return make({Kind::Or, {}, 0, std::move(kids), {}});
}

PbFormula PbFormula::implies(PbFormula a, PbFormula b) {
  return disj({negation(std::move(a)), std::move(b)});
}

PbFormula PbFormula::exists(std::string var, PbFormula body) {
  if (body.kind() == Kind::True || body.kind() == Kind::False) return body;
  return make({Kind::Exists, {}, 0, {std::move(body)}, std::move(var)});
}

PbFormula PbFormula::forall(std::string var, PbFormula body) {
  if (body.kind() == Kind::True || body.kind() == Kind::False) return body;
  return make({Kind::Forall, {}, 0, {std::move(body)}, std::move(var)});
}

std::size_t PbFormula::node_count() const {
  std::size_t n = 1;
  for (const auto &k : children()) n += k.node_count();
  return n;
}

static void collect_free(const PbFormula &f, std::set<std::string> &bound,
                         std::set<std::string> &out) {
  switch (f.kind()) {
    case PbFormula::Kind::Eq:
    case PbFormula::Kind::Le:
    case PbFormula::Kind::Dvd:
      for (const auto &[v, c] : f.linear().coeffs)
        if (!bound.count(v)) out.insert(v);
      break;
    case PbFormula::Kind::Exists:
    case PbFormula::Kind::Forall: {
      bool fresh = bound.insert(f.bound_var()).second;
      collect_free(f.children()[0], bound, out);
      if (fresh) bound.erase(f.bound_var());
      break;
    }
    default:
      for (const auto &k : f.children()) collect_free(k, bound, out);
  }
}

std::set<std::string> PbFormula::free_vars() const {
  std::set<std::string> bound, out;
  collect_free(*this, bound, out);
  return out;
}

static void key_rec(const PbFormula &f, std::ostringstream &os) {
  using K = PbFormula::Kind;
  switch (f.kind()) {
    case K::True: os << "T"; return;
    case K::False: os << "F"; return;
    case K::Eq: os << "E"; break;
    case K::Le: os << "L"; break;
    case K::Dvd: os << "D" << f.divisor(); break;
    case K::Not:
      os << "!(";
      key_rec(f.children()[0], os);
      os << ")";
      return;
    case K::And:
    case K::Or:
      os << (f.kind() == K::And ? "&(" : "|(");
      for (const auto &k : f.children()) {
        key_rec(k, os);
        os << ";";
      }
      os << ")";
      return;
    case K::Exists:
    case K::Forall:
      os << (f.kind() == K::Exists ? "?" : "@") << f.bound_var() << "(";
      key_rec(f.children()[0], os);
      os << ")";
      return;
  }
  os << "[";
  for (const auto &[v, c] : f.linear().coeffs) os << v << ":" << c << ",";
  os << "#" << f.linear().constant << "]";
}

std::string PbFormula::key() const {
  std::ostringstream os;
  key_rec(*this, os);
  return os.str();
}

// ---------------------------------------------------------------------------
// from_pure

PbFormula from_pure(const PureFormula &pi) {
  using K = PureFormula::Kind;
  switch (pi.kind()) {
    case K::True:
      return PbFormula::truth();
    case K::False:
      return PbFormula::falsity();
    case K::Eq:
      return PbFormula::eq(LinearTerm::from_term(pi.lhs()).minus(LinearTerm::from_term(pi.rhs())));
    case K::Neq:
      return PbFormula::negation(
          PbFormula::eq(LinearTerm::from_term(pi.lhs()).minus(LinearTerm::from_term(pi.rhs()))));
    case K::Le:
      return PbFormula::le(LinearTerm::from_term(pi.lhs()).minus(LinearTerm::from_term(pi.rhs())));
    case K::Lt:
      // t < u is t + 1 <= u.
      return PbFormula::le(LinearTerm::from_term(pi.lhs())
                               .plus_const(1)
                               .minus(LinearTerm::from_term(pi.rhs())));
    case K::And: {
      std::vector<PbFormula> kids;
      for (const auto &k : pi.children()) kids.push_back(from_pure(k));
      return PbFormula::conj(std::move(kids));
    }
    case K::Or: {
      std::vector<PbFormula> kids;
      for (const auto &k : pi.children()) kids.push_back(from_pure(k));
      return PbFormula::disj(std::move(kids));
    }
    case K::Not:
      return PbFormula::negation(from_pure(pi.children()[0]));
    case K::Exists:
      return PbFormula::exists(pi.bound_var(), from_pure(pi.children()[0]));
  }
  return PbFormula::truth();
}

// ---------------------------------------------------------------------------
// Evaluation

bool eval_qf(const PbFormula &f, const std::map<std::string, std::int64_t> &env) {
  using K = PbFormula::Kind;
  switch (f.kind()) {
    case K::True:
      return true;
    case K::False:
      return false;
    case K::Eq:
      return f.linear().eval(env) == 0;
    case K::Le:
      return f.linear().eval(env) <= 0;
    case K::Dvd:
      return mod_pos(f.linear().eval(env), f.divisor()) == 0;
    case K::Not:
      return !eval_qf(f.children()[0], env);
    case K::And:
      for (const auto &k : f.children())
        if (!eval_qf(k, env)) return false;
      return true;
    case K::Or:
      for (const auto &k : f.children())
        if (eval_qf(k, env)) return true;
      return false;
    case K::Exists:
    case K::Forall:
      throw std::logic_error("eval_qf on a quantified formula");
  }
  return false;
}

// ---------------------------------------------------------------------------
// NNF (negations pushed to atoms; only Dvd may stay negated)

static PbFormula nnf(const PbFormula &f, bool positive) {
  using K = PbFormula::Kind;
  switch (f.kind()) {
    case K::True:
      return PbFormula::boolean(positive);
    case K::False:
      return PbFormula::boolean(!positive);
    case K::Eq:
      if (positive) return f;
      // lt != 0 over integers: lt < 0 or lt > 0.
      return PbFormula::disj({PbFormula::le(f.linear().plus_const(1)),
                              PbFormula::le(f.linear().negated().plus_const(1))});
    case K::Le:
      if (positive) return f;
      // not (lt <= 0): -lt < 0.
      return PbFormula::le(f.linear().negated().plus_const(1));
    case K::Dvd:
      return positive ? f : PbFormula::negation(f);
    case K::Not:
      return nnf(f.children()[0], !positive);
    case K::And:
    case K::Or: {
      std::vector<PbFormula> kids;
      kids.reserve(f.children().size());
      for (const auto &k : f.children()) kids.push_back(nnf(k, positive));
      bool conj = (f.kind() == K::And) == positive;
      return conj ? PbFormula::conj(std::move(kids)) : PbFormula::disj(std::move(kids));
    }
    case K::Exists:
    case K::Forall:
      throw std::logic_error("nnf expects a quantifier-free formula");
  }
  return f;
}

// ---------------------------------------------------------------------------
// Cooper elimination

namespace {

bool contains_var(const PbFormula &f, const std::string &x) {
  using K = PbFormula::Kind;
  switch (f.kind()) {
    case K::Eq:
    case K::Le:
    case K::Dvd:
      return f.linear().coeff(x) != 0;
    default:
      for (const auto &k : f.children())
        if (contains_var(k, x)) return true;
      return false;
  }
}

// Rescale all atoms so the coefficient of x becomes +-1 (conceptually the
// variable is replaced by x_hat = l * x).
PbFormula unitize(const PbFormula &f, const std::string &x, std::int64_t l) {
  using K = PbFormula::Kind;
  switch (f.kind()) {
    case K::Eq: {
      std::int64_t a = f.linear().coeff(x);
      if (a == 0) return f;
      std::int64_t s = (l / (a < 0 ? -a : a)) * (a < 0 ? -1 : 1);
      LinearTerm lt = f.linear().scaled(s);  // coeff of x is now +l
      lt = lt.without(x).plus(LinearTerm::of_var(x, 1));
      return PbFormula::make_atom_eq_raw(std::move(lt));
    }
    case K::Le: {
      std::int64_t a = f.linear().coeff(x);
      if (a == 0) return f;
      std::int64_t s = l / (a < 0 ? -a : a);
      LinearTerm lt = f.linear().scaled(s);  // coeff of x is +-l
      std::int64_t sign = a < 0 ? -1 : 1;
      lt = lt.without(x).plus(LinearTerm::of_var(x, sign));
      return PbFormula::make_atom_le_raw(std::move(lt));
    }
    case K::Dvd: {
      std::int64_t a = f.linear().coeff(x);
      if (a == 0) return f;
      std::int64_t s = l / (a < 0 ? -a : a);
      LinearTerm lt = f.linear().scaled(a < 0 ? -s : s);  // coeff +l
      lt = lt.without(x).plus(LinearTerm::of_var(x, 1));
      return PbFormula::make_atom_dvd_raw(f.divisor() * s, std::move(lt));
    }
    case K::Not:
      return PbFormula::negation(unitize(f.children()[0], x, l));
    case K::And:
    case K::Or: {
      std::vector<PbFormula> kids;
      kids.reserve(f.children().size());
      for (const auto &k : f.children()) kids.push_back(unitize(k, x, l));
      return f.kind() == K::And ? PbFormula::conj(std::move(kids))
                                : PbFormula::disj(std::move(kids));
    }
    default:
      return f;
  }
}

// Substitute x := t into a unitized formula (coefficient of x in {-1,0,1}).
PbFormula subst_var(const PbFormula &f, const std::string &x, const LinearTerm &t) {
  using K = PbFormula::Kind;
  switch (f.kind()) {
    case K::Eq:
    case K::Le:
    case K::Dvd: {
      std::int64_t c = f.linear().coeff(x);
      if (c == 0) return f;
      LinearTerm lt = f.linear().without(x).plus(t.scaled(c));
      if (f.kind() == K::Eq) return PbFormula::eq(std::move(lt));
      if (f.kind() == K::Le) return PbFormula::le(std::move(lt));
      return PbFormula::dvd(f.divisor(), std::move(lt));
    }
    case K::Not:
      return PbFormula::negation(subst_var(f.children()[0], x, t));
    case K::And:
    case K::Or: {
      std::vector<PbFormula> kids;
      kids.reserve(f.children().size());
      for (const auto &k : f.children()) kids.push_back(subst_var(k, x, t));
      return f.kind() == K::And ? PbFormula::conj(std::move(kids))
                                : PbFormula::disj(std::move(kids));
    }
    default:
      return f;
  }
}

// F_{-inf}: the formula for x below every bound; x-atoms degenerate, Dvd stays.
PbFormula minus_inf(const PbFormula &f, const std::string &x) {
  using K = PbFormula::Kind;
  switch (f.kind()) {
    case K::Eq:
      return f.linear().coeff(x) != 0 ? PbFormula::falsity() : f;
    case K::Le: {
      std::int64_t c = f.linear().coeff(x);
      if (c == 0) return f;
      return c > 0 ? PbFormula::truth() : PbFormula::falsity();
    }
    case K::Dvd:
      return f;
    case K::Not:
      return PbFormula::negation(minus_inf(f.children()[0], x));
    case K::And:
    case K::Or: {
      std::vector<PbFormula> kids;
      kids.reserve(f.children().size());
      for (const auto &k : f.children()) kids.push_back(minus_inf(k, x));
      return f.kind() == K::And ? PbFormula::conj(std::move(kids))
                                : PbFormula::disj(std::move(kids));
    }
    default:
      return f;
  }
}

void collect_coeffs(const PbFormula &f, const std::string &x, std::int64_t &l) {
  using K = PbFormula::Kind;
  switch (f.kind()) {
    case K::Eq:
    case K::Le:
    case K::Dvd: {
      std::int64_t a = f.linear().coeff(x);
      if (a != 0) l = lcm64(l, a < 0 ? -a : a);
      break;
    }
    default:
      for (const auto &k : f.children()) collect_coeffs(k, x, l);
  }
}

void collect_divisors(const PbFormula &f, const std::string &x, std::int64_t &d) {
  using K = PbFormula::Kind;
  if (f.kind() == K::Dvd) {
    if (f.linear().coeff(x) != 0) d = lcm64(d, f.divisor());
    return;
  }
  for (const auto &k : f.children()) collect_divisors(k, x, d);
}

void collect_lower_bounds(const PbFormula &f, const std::string &x,
                          std::vector<LinearTerm> &bs, std::set<std::string> &seen) {
  using K = PbFormula::Kind;
  auto push = [&](LinearTerm b) {
    std::ostringstream os;
    for (const auto &[v, c] : b.coeffs) os << v << ":" << c << ",";
    os << "#" << b.constant;
    if (seen.insert(os.str()).second) bs.push_back(std::move(b));
  };
  switch (f.kind()) {
    case K::Eq: {
      std::int64_t c = f.linear().coeff(x);
      if (c != 0) {
        // x + r = 0 (unitized to +1): x = -r; lower-bound term -r - 1.
        LinearTerm r = f.linear().without(x);
        push(r.negated().plus_const(-1));
      }
      break;
    }
    case K::Le: {
      std::int64_t c = f.linear().coeff(x);
      if (c == -1) {
        // -x + r <= 0: x >= r; lower-bound term r - 1.
        LinearTerm r = f.linear().plus(LinearTerm::of_var(x, 1));
        push(r.plus_const(-1));
      }
      break;
    }
    default:
      for (const auto &k : f.children()) collect_lower_bounds(k, x, bs, seen);
  }
}

}  // namespace

// Raw atom constructors used by unitize: these must not re-normalize the
// coefficients (gcd division would destroy the +-1 coefficient layout), so
// they bypass the simplifying factories.
PbFormula PbFormula::make_atom_eq_raw(LinearTerm lt) {
  if (lt.is_ground()) return boolean(lt.constant == 0);
  return make({Kind::Eq, std::move(lt), 0, {}, {}});
}
PbFormula PbFormula::make_atom_le_raw(LinearTerm lt) {
  if (lt.is_ground()) return boolean(lt.constant <= 0);
  return make({Kind::Le, std::move(lt), 0, {}, {}});
}
PbFormula PbFormula::make_atom_dvd_raw(std::int64_t d, LinearTerm lt) {
  if (d < 0) d = -d;
  if (d == 1) return truth();
  if (lt.is_ground()) return boolean(mod_pos(lt.constant, d) == 0);
  return make({Kind::Dvd, std::move(lt), d, {}, {}});
}

// ---------------------------------------------------------------------------
// Solver

void Solver::check_budget(std::size_t nodes) {
  if (nodes > opts_.node_budget)
    throw ResourceLimitError("presburger node budget exceeded (" + std::to_string(nodes) + " > " +
                             std::to_string(opts_.node_budget) + ")");
}

PbFormula Solver::eliminate_exists(const std::string &x, const PbFormula &qf) {
  using K = PbFormula::Kind;
  if (!contains_var(qf, x)) return qf;

  // Miniscoping: push the quantifier through disjunctions and past
  // x-free conjuncts; Cooper then runs on much smaller formulas.
  PbFormula body = nnf(qf, true);
  if (body.kind() == K::Or) {
    std::vector<PbFormula> kids;
    for (const auto &k : body.children()) kids.push_back(eliminate_exists(x, k));
    return PbFormula::disj(std::move(kids));
  }
  if (body.kind() == K::And) {
    std::vector<PbFormula> with, without;
    for (const auto &k : body.children())
      (contains_var(k, x) ? with : without).push_back(k);
    if (!without.empty()) {
      without.push_back(eliminate_exists(x, PbFormula::conj(std::move(with))));
      return PbFormula::conj(std::move(without));
    }
  }

  // Unit-equality resolution: a top-level conjunct x + r = 0 or -x + r = 0
  // pins x, so substitute instead of running the full elimination.  The
  // substitute must be nonnegative for the witness to be a natural.
  {
    const std::vector<PbFormula> singleton{body};
    const std::vector<PbFormula> &cs =
        body.kind() == K::And ? body.children() : singleton;
    for (const auto &c : cs) {
      if (c.kind() != K::Eq) continue;
      std::int64_t a = c.linear().coeff(x);
      if (a != 1 && a != -1) continue;
      LinearTerm r = c.linear().without(x).scaled(-a);  // x = r
      std::vector<PbFormula> rest;
      rest.push_back(PbFormula::le(r.negated()));  // r >= 0
      for (const auto &k : cs) rest.push_back(subst_var(k, x, r));
      return PbFormula::conj(std::move(rest));
    }
  }

  // Relativize to naturals: conjoin -x <= 0.
  body = PbFormula::conj({body, PbFormula::le(LinearTerm::of_var(x, -1))});

  std::int64_t l = 1;
  collect_coeffs(body, x, l);
  PbFormula unit = unitize(body, x, l);
  if (l > 1) unit = PbFormula::conj({unit, PbFormula::dvd(l, LinearTerm::of_var(x, 1))});

  std::int64_t delta = 1;
  collect_divisors(unit, x, delta);

  std::vector<LinearTerm> lower;
  std::set<std::string> seen;
  collect_lower_bounds(unit, x, lower, seen);

  std::size_t base = unit.node_count();
  check_budget(base * static_cast<std::size_t>(delta) * (lower.size() + 1));

  PbFormula fm = minus_inf(unit, x);
  std::vector<PbFormula> disjuncts;
  for (std::int64_t j = 1; j <= delta; ++j) {
    disjuncts.push_back(subst_var(fm, x, LinearTerm::of_const(j)));
    for (const auto &b : lower) disjuncts.push_back(subst_var(unit, x, b.plus_const(j)));
  }
  PbFormula out = PbFormula::disj(std::move(disjuncts));
  check_budget(out.node_count());
  return out;
}

PbFormula Solver::qe_rec(const PbFormula &f) {
  using K = PbFormula::Kind;
  switch (f.kind()) {
    case K::True:
    case K::False:
    case K::Eq:
    case K::Le:
    case K::Dvd:
      return f;
    case K::Not:
      return PbFormula::negation(qe_rec(f.children()[0]));
    case K::And:
    case K::Or: {
      std::vector<PbFormula> kids;
      kids.reserve(f.children().size());
      for (const auto &k : f.children()) kids.push_back(qe_rec(k));
      return f.kind() == K::And ? PbFormula::conj(std::move(kids))
                                : PbFormula::disj(std::move(kids));
    }
    case K::Exists:
      return eliminate_exists(f.bound_var(), qe_rec(f.children()[0]));
    case K::Forall: {
      PbFormula inner = qe_rec(f.children()[0]);
      PbFormula neg = nnf(PbFormula::negation(inner), true);
      return PbFormula::negation(eliminate_exists(f.bound_var(), neg));
    }
  }
  return f;
}

PbFormula Solver::qe(const PbFormula &f) { return qe_rec(f); }

bool Solver::decide(const PbFormula &f) {
  std::string k = f.key();
  auto it = decide_cache_.find(k);
  if (it != decide_cache_.end()) return it->second;
  ++decide_calls_;
  PbFormula g = qe_rec(f);
  bool result;
  switch (g.kind()) {
    case PbFormula::Kind::True:
      result = true;
      break;
    case PbFormula::Kind::False:
      result = false;
      break;
    default: {
      if (!g.free_vars().empty())
        throw std::logic_error("decide on a non-closed formula");
      result = eval_qf(g, {});
      break;
    }
  }
  decide_cache_.emplace(std::move(k), result);
  return result;
}

bool Solver::is_satisfiable(const PureFormula &pi) {
  PbFormula f = from_pure(pi);
  for (const auto &v : f.free_vars()) f = PbFormula::exists(v, f);
  return decide(f);
}

bool Solver::pure_entails(const PureFormula &pi, const PureFormula &gamma) {
  PbFormula f = PbFormula::implies(from_pure(pi), from_pure(gamma));
  for (const auto &v : f.free_vars()) f = PbFormula::forall(v, f);
  return decide(f);
}

// ---------------------------------------------------------------------------
// SMT-LIB export

namespace {

std::string smt_symbol(const std::string &name) {
  bool simple = !name.empty() && std::isalpha(static_cast<unsigned char>(name[0]));
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') simple = false;
  return simple ? name : "|" + name + "|";
}

std::string smt_sum(const std::vector<std::string> &parts) {
  if (parts.empty()) return "0";
  if (parts.size() == 1) return parts[0];
  std::string out = "(+";
  for (const auto &p : parts) out += " " + p;
  return out + ")";
}

// Split lt into nonnegative sides: lt = pos - neg with pos, neg >= 0 terms.
void smt_sides(const LinearTerm &lt, std::string &pos, std::string &neg) {
  std::vector<std::string> p, n;
  for (const auto &[v, c] : lt.coeffs) {
    std::string sym = smt_symbol(v);
    if (c == 1) p.push_back(sym);
    else if (c == -1) n.push_back(sym);
    else if (c > 1) p.push_back("(* " + std::to_string(c) + " " + sym + ")");
    else n.push_back("(* " + std::to_string(-c) + " " + sym + ")");
  }
  if (lt.constant > 0) p.push_back(std::to_string(lt.constant));
  if (lt.constant < 0) n.push_back(std::to_string(-lt.constant));
  pos = smt_sum(p);
  neg = smt_sum(n);
}

std::string smt_term(const LinearTerm &lt) {
  std::string pos, neg;
  smt_sides(lt, pos, neg);
  if (neg == "0") return pos;
  return "(- " + pos + " " + neg + ")";
}

std::string smt_formula(const PbFormula &f) {
  using K = PbFormula::Kind;
  switch (f.kind()) {
    case K::True:
      return "true";
    case K::False:
      return "false";
    case K::Eq: {
      std::string pos, neg;
      smt_sides(f.linear(), pos, neg);
      return "(= " + pos + " " + neg + ")";
    }
    case K::Le: {
      std::string pos, neg;
      smt_sides(f.linear(), pos, neg);
      return "(<= " + pos + " " + neg + ")";
    }
    case K::Dvd:
      return "(= (mod " + smt_term(f.linear()) + " " + std::to_string(f.divisor()) + ") 0)";
    case K::Not:
      return "(not " + smt_formula(f.children()[0]) + ")";
    case K::And:
    case K::Or: {
      std::string out = f.kind() == K::And ? "(and" : "(or";
      for (const auto &k : f.children()) out += " " + smt_formula(k);
      return out + ")";
    }
    case K::Exists:
      return "(exists ((" + smt_symbol(f.bound_var()) + " Int)) (and (>= " +
             smt_symbol(f.bound_var()) + " 0) " + smt_formula(f.children()[0]) + "))";
    case K::Forall:
      return "(forall ((" + smt_symbol(f.bound_var()) + " Int)) (=> (>= " +
             smt_symbol(f.bound_var()) + " 0) " + smt_formula(f.children()[0]) + "))";
  }
  return "true";
}

}  // namespace

std::string to_smtlib(const PbFormula &f) {
  std::ostringstream os;
  os << "(set-logic LIA)\n";
  for (const auto &v : f.free_vars()) {
    os << "(declare-const " << smt_symbol(v) << " Int)\n";
    os << "(assert (>= " << smt_symbol(v) << " 0))\n";
  }
  os << "(assert " << smt_formula(f) << ")\n";
  os << "(check-sat)\n";
  return os.str();
}

std::string to_string(const PbFormula &f) { return smt_formula(f); }

}  // namespace slent::presburger
