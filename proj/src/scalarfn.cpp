#include "norden/scalarfn.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <utility>

#include "norden/errors.hpp"

namespace norden {

namespace detail {

class FnImpl {
 public:
  FnImpl(ScalarFn::Kind kind, std::string name, double t_max)
      : kind_(kind), name_(std::move(name)), t_max_(t_max) {}
  virtual ~FnImpl() = default;
  virtual Taylor eval(double t, int order) const = 0;
  virtual std::shared_ptr<const OdeTable> table() const { return nullptr; }

  ScalarFn::Kind kind_;
  std::string name_;
  double t_max_;

  static ScalarFn wrap(std::shared_ptr<const FnImpl> impl) { return ScalarFn(std::move(impl)); }
};

namespace {

class ConstantImpl final : public FnImpl {
 public:
  explicit ConstantImpl(double v)
      : FnImpl(ScalarFn::Kind::Constant, format_value(v),
               std::numeric_limits<double>::infinity()),
        v_(v) {}
  Taylor eval(double, int order) const override { return Taylor::constant(v_, order); }

  static std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

 private:
  double v_;
};

// ----------------------------------------------------------------------
// Expression AST
// ----------------------------------------------------------------------

struct Node {
  enum class Op { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Sqrt, Exp, Log } op;
  double num = 0.0;
  std::unique_ptr<Node> lhs, rhs;
};

Taylor eval_node(const Node& nd, const Taylor& t) {
  using Op = Node::Op;
  switch (nd.op) {
    case Op::Num: return Taylor::constant(nd.num, t.order());
    case Op::Var: return t;
    case Op::Add: return eval_node(*nd.lhs, t) + eval_node(*nd.rhs, t);
    case Op::Sub: return eval_node(*nd.lhs, t) - eval_node(*nd.rhs, t);
    case Op::Mul: return eval_node(*nd.lhs, t) * eval_node(*nd.rhs, t);
    case Op::Div: return eval_node(*nd.lhs, t) / eval_node(*nd.rhs, t);
    case Op::Pow: {
      Taylor base = eval_node(*nd.lhs, t);
      Taylor expo = eval_node(*nd.rhs, t);
      bool expo_const = true;
      for (int k = 1; k <= expo.order(); ++k)
        if (expo[k] != 0.0) expo_const = false;
      if (expo_const) return pow(base, expo.value());
      return exp(log(base) * expo);
    }
    case Op::Neg: return -eval_node(*nd.lhs, t);
    case Op::Sqrt: return sqrt(eval_node(*nd.lhs, t));
    case Op::Exp: return exp(eval_node(*nd.lhs, t));
    case Op::Log: return log(eval_node(*nd.lhs, t));
  }
  throw Error("unreachable expression node");
}

class ExprImpl final : public FnImpl {
 public:
  ExprImpl(std::unique_ptr<Node> root, std::string src)
      : FnImpl(ScalarFn::Kind::Expression, std::move(src),
               std::numeric_limits<double>::infinity()),
        root_(std::move(root)) {}
  Taylor eval(double t, int order) const override {
    return eval_node(*root_, Taylor::variable(t, order));
  }

 private:
  std::unique_ptr<Node> root_;
};

// ----------------------------------------------------------------------
// Recursive-descent parser
// ----------------------------------------------------------------------

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  std::unique_ptr<Node> parse() {
    auto e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "syntax error at offset " << pos_ << ": " << msg;
    throw ParseError(pos_, os.str());
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }
  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::unique_ptr<Node> parse_expr() {
    auto lhs = parse_term();
    for (;;) {
      char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      auto node = std::make_unique<Node>();
      node->op = (c == '+') ? Node::Op::Add : Node::Op::Sub;
      node->lhs = std::move(lhs);
      node->rhs = parse_term();
      lhs = std::move(node);
    }
  }

  std::unique_ptr<Node> parse_term() {
    auto lhs = parse_unary();
    for (;;) {
      char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos_;
      auto node = std::make_unique<Node>();
      node->op = (c == '*') ? Node::Op::Mul : Node::Op::Div;
      node->lhs = std::move(lhs);
      node->rhs = parse_unary();
      lhs = std::move(node);
    }
  }

  std::unique_ptr<Node> parse_unary() {
    char c = peek();
    if (c == '-') {
      ++pos_;
      auto node = std::make_unique<Node>();
      node->op = Node::Op::Neg;
      node->lhs = parse_unary();
      return node;
    }
    if (c == '+') {
      ++pos_;
      return parse_unary();
    }
    return parse_power();
  }

  std::unique_ptr<Node> parse_power() {
    auto base = parse_primary();
    if (peek() == '^') {
      ++pos_;
      auto node = std::make_unique<Node>();
      node->op = Node::Op::Pow;
      node->lhs = std::move(base);
      node->rhs = parse_unary();  // right-associative, sign allowed in exponent
      return node;
    }
    return base;
  }

  std::unique_ptr<Node> parse_primary() {
    char c = peek();
    if (c == '\0') fail("expected expression");
    if (c == '(') {
      ++pos_;
      auto e = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    fail("unexpected character");
  }

  std::unique_ptr<Node> parse_number() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' belonged to something else
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    try {
      auto node = std::make_unique<Node>();
      node->op = Node::Op::Num;
      node->num = std::stod(text);
      return node;
    } catch (const std::exception&) {
      pos_ = start;
      fail("malformed number");
    }
  }

  std::unique_ptr<Node> parse_ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                  src_[pos_] == '_'))
      ++pos_;
    std::string id(src_.substr(start, pos_ - start));
    if (id == "t") {
      auto node = std::make_unique<Node>();
      node->op = Node::Op::Var;
      return node;
    }
    Node::Op fn;
    if (id == "sqrt") fn = Node::Op::Sqrt;
    else if (id == "exp") fn = Node::Op::Exp;
    else if (id == "log") fn = Node::Op::Log;
    else {
      pos_ = start;
      std::ostringstream os;
      os << "unknown identifier '" << id << "' at offset " << start;
      throw ParseError(start, os.str());
    }
    if (!consume('(')) fail("expected '(' after function name");
    auto arg = parse_expr();
    int extra = 0;
    while (peek() == ',') {  // count surplus arguments for a precise message
      ++pos_;
      (void)parse_expr();
      ++extra;
    }
    if (extra > 0) {
      std::ostringstream os;
      os << "function '" << id << "' expects 1 argument, got " << (1 + extra);
      throw ParseError(pos_, os.str());
    }
    if (!consume(')')) fail("expected ')'");
    auto node = std::make_unique<Node>();
    node->op = fn;
    node->lhs = std::move(arg);
    return node;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class CompositeImpl final : public FnImpl {
 public:
  CompositeImpl(std::string name, double t_max, std::function<Taylor(double, int)> recipe)
      : FnImpl(ScalarFn::Kind::Composite, std::move(name), t_max), recipe_(std::move(recipe)) {}
  Taylor eval(double t, int order) const override { return recipe_(t, order); }

 private:
  std::function<Taylor(double, int)> recipe_;
};

class OdeFnImpl final : public FnImpl {
 public:
  OdeFnImpl(std::shared_ptr<const OdeTable> table, int comp)
      : FnImpl(ScalarFn::Kind::OdeTable, table->comp_name(comp), table->t_end()),
        table_(std::move(table)),
        comp_(comp) {}
  Taylor eval(double t, int order) const override { return table_->eval(t, comp_, order); }
  std::shared_ptr<const OdeTable> table() const override { return table_; }

 private:
  std::shared_ptr<const OdeTable> table_;
  int comp_;
};

}  // namespace

// ----------------------------------------------------------------------
// OdeTable
// ----------------------------------------------------------------------

OdeTable::OdeTable(OdeSystem sys, std::vector<double> y0, double t_max, double step)
    : sys_(std::move(sys)), names_(sys_.names) {
  if (step <= 0.0) throw Error("ode step must be positive");
  if (t_max <= 0.0) throw Error("ode t_max must be positive");
  const int ncomp = static_cast<int>(y0.size());
  if (names_.size() != y0.size()) {
    names_.resize(y0.size());
    for (int i = 0; i < ncomp; ++i)
      if (names_[i].empty()) names_[i] = "y" + std::to_string(i);
  }
  const auto nsteps = static_cast<std::size_t>(std::ceil(t_max / step - 1e-9));
  step_ = t_max / static_cast<double>(nsteps);
  t_end_ = t_max;

  auto rhs_values = [&](double t, const std::vector<double>& y) {
    std::vector<Jet1> yj(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) yj[i] = Jet1(y[i], 0.0);
    std::vector<Jet1> out = sys_.rhs(Jet1(t, 0.0), yj);
    std::vector<double> f(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      f[i] = out[i].v;
      if (!std::isfinite(f[i]))
        throw DenominatorError(t, "ode right-hand side non-finite at t=" +
                                      ConstantImpl::format_value(t));
    }
    return f;
  };

  std::vector<double> y = std::move(y0);
  grid_t_.reserve(nsteps + 1);
  values_.reserve(nsteps + 1);
  derivs_.reserve(nsteps + 1);
  second_.reserve(nsteps + 1);

  auto record = [&](double t, const std::vector<double>& yv) {
    std::vector<double> f = rhs_values(t, yv);
    // jet pass: propagate (y, y') through the rhs to get y'' as well
    std::vector<Jet1> yj(yv.size());
    for (std::size_t i = 0; i < yv.size(); ++i) yj[i] = Jet1(yv[i], f[i]);
    std::vector<Jet1> out = sys_.rhs(Jet1(t, 1.0), yj);
    std::vector<double> s(yv.size());
    for (std::size_t i = 0; i < yv.size(); ++i) s[i] = out[i].d;
    grid_t_.push_back(t);
    values_.push_back(yv);
    derivs_.push_back(std::move(f));
    second_.push_back(std::move(s));
  };

  record(0.0, y);
  std::vector<double> k1, k2, k3, k4, tmp(y.size());
  for (std::size_t n = 0; n < nsteps; ++n) {
    const double t = static_cast<double>(n) * step_;
    const double h = step_;
    k1 = derivs_.back();  // rhs at the node, already computed
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    k2 = rhs_values(t + 0.5 * h, tmp);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    k3 = rhs_values(t + 0.5 * h, tmp);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + h * k3[i];
    k4 = rhs_values(t + h, tmp);
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    record(std::min(t + h, t_max), y);
  }
}

void OdeTable::hermite_state(double t, std::vector<double>& y, std::vector<double>& yp) const {
  const std::size_t last = grid_t_.size() - 2;
  auto k = static_cast<std::size_t>(std::max(0.0, std::floor(t / step_)));
  if (k > last) k = last;
  const double h = step_;
  const double tau = (t - grid_t_[k]) / h;
  const double t2 = tau * tau, t3 = t2 * tau;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + tau;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const double d00 = (6 * t2 - 6 * tau) / h, d10 = (3 * t2 - 4 * tau + 1) / h;
  const double d01 = (-6 * t2 + 6 * tau) / h, d11 = (3 * t2 - 2 * tau) / h;
  const int nc = components();
  y.resize(nc);
  yp.resize(nc);
  for (int i = 0; i < nc; ++i) {
    const double ya = values_[k][i], yb = values_[k + 1][i];
    const double fa = derivs_[k][i], fb = derivs_[k + 1][i];
    y[i] = h00 * ya + h * h10 * fa + h01 * yb + h * h11 * fb;
    yp[i] = d00 * ya + h * d10 * fa + d01 * yb + h * d11 * fb;
  }
}

Taylor OdeTable::eval(double t, int comp, int order) const {
  std::vector<double> y, yp;
  hermite_state(t, y, yp);
  Taylor out = Taylor::constant(y[comp], order);
  if (order == 0) return out;

  // derivative channel: rhs at the interpolated state
  std::vector<Jet1> yj(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) yj[i] = Jet1(y[i], yp[i]);
  std::vector<Jet1> f = sys_.rhs(Jet1(t, 1.0), yj);

  std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
  c[0] = y[comp];
  c[1] = f[comp].v;
  if (order >= 2) c[2] = f[comp].d / 2.0;
  if (order >= 3) {
    // third coefficient from the cubic's constant third derivative
    const std::size_t last = grid_t_.size() - 2;
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor(t / step_)));
    if (k > last) k = last;
    const double h = step_;
    const double ya = values_[k][comp], yb = values_[k + 1][comp];
    const double fa = derivs_[k][comp], fb = derivs_[k + 1][comp];
    const double hppp = (12 * (ya - yb) / (h * h * h)) + 6 * (fa + fb) / (h * h);
    c[3] = hppp / 6.0;
  }
  return Taylor(std::move(c));
}

}  // namespace detail

// ----------------------------------------------------------------------
// ScalarFn
// ----------------------------------------------------------------------

ScalarFn::ScalarFn() : impl_(std::make_shared<detail::ConstantImpl>(0.0)) {}
ScalarFn::ScalarFn(std::shared_ptr<const detail::FnImpl> impl) : impl_(std::move(impl)) {}

ScalarFn ScalarFn::constant(double v) {
  return ScalarFn(std::make_shared<detail::ConstantImpl>(v));
}

static void check_domain(double t, double t_max, const std::string& name) {
  if (t < 0.0 || !(t <= t_max * (1.0 + 1e-12) + 1e-300)) {
    std::ostringstream os;
    os << "t=" << t << " outside domain [0, " << t_max << ") of '" << name << "'";
    throw DomainError(t, os.str());
  }
}

Jet1 ScalarFn::eval_jet(double t) const {
  check_domain(t, impl_->t_max_, impl_->name_);
  return impl_->eval(t, 1).jet();
}

Taylor ScalarFn::eval_taylor(double t, int order) const {
  check_domain(t, impl_->t_max_, impl_->name_);
  return impl_->eval(t, order);
}

ScalarFn::Kind ScalarFn::kind() const { return impl_->kind_; }
double ScalarFn::t_max() const { return impl_->t_max_; }
const std::string& ScalarFn::name() const { return impl_->name_; }

ScalarFn ScalarFn::renamed(std::string name) const {
  auto self = impl_;
  auto c = std::make_shared<detail::CompositeImpl>(
      std::move(name), impl_->t_max_,
      [self](double t, int order) { return self->eval(t, order); });
  c->kind_ = impl_->kind_;
  return ScalarFn(std::move(c));
}

ScalarFn ScalarFn::with_t_max(double t_max) const {
  auto self = impl_;
  auto c = std::make_shared<detail::CompositeImpl>(
      impl_->name_, t_max, [self](double t, int order) { return self->eval(t, order); });
  c->kind_ = impl_->kind_;
  return ScalarFn(std::move(c));
}

std::shared_ptr<const detail::OdeTable> ScalarFn::table() const { return impl_->table(); }

ScalarFn operator+(const ScalarFn& f, double delta) {
  auto self = f.impl_;
  return ScalarFn(std::make_shared<detail::CompositeImpl>(
      f.name() + "+" + detail::ConstantImpl::format_value(delta), f.t_max(),
      [self, delta](double t, int order) { return self->eval(t, order) + delta; }));
}

ScalarFn operator*(double scale, const ScalarFn& f) {
  auto self = f.impl_;
  return ScalarFn(std::make_shared<detail::CompositeImpl>(
      detail::ConstantImpl::format_value(scale) + "*" + f.name(), f.t_max(),
      [self, scale](double t, int order) { return self->eval(t, order) * scale; }));
}

ScalarFn parse_expr(std::string_view src) {
  detail::Parser parser(src);
  auto root = parser.parse();
  return detail::FnImpl::wrap(
      std::make_shared<detail::ExprImpl>(std::move(root), std::string(src)));
}

ScalarFn make_composite(std::string name, double t_max,
                        std::function<Taylor(double, int)> recipe) {
  return detail::FnImpl::wrap(
      std::make_shared<detail::CompositeImpl>(std::move(name), t_max, std::move(recipe)));
}

std::vector<ScalarFn> integrate_ode(const OdeSystem& sys, std::vector<double> y0,
                                    double t_max, double step) {
  auto table = std::make_shared<const detail::OdeTable>(sys, std::move(y0), t_max, step);
  std::vector<ScalarFn> out;
  out.reserve(table->components());
  for (int i = 0; i < table->components(); ++i)
    out.push_back(detail::FnImpl::wrap(std::make_shared<detail::OdeFnImpl>(table, i)));
  return out;
}

void write_table_csv(std::ostream& os, const detail::OdeTable& table) {
  os << "t";
  for (int i = 0; i < table.components(); ++i)
    os << "," << table.comp_name(i) << "," << table.comp_name(i) << "_deriv";
  os << "\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (std::size_t k = 0; k < table.nodes(); ++k) {
    put(table.node_t(k));
    for (int i = 0; i < table.components(); ++i) {
      os << ",";
      put(table.node_value(k, i));
      os << ",";
      put(table.node_deriv(k, i));
    }
    os << "\n";
  }
}

void write_functions_csv(std::ostream& os,
                         const std::vector<std::pair<std::string, ScalarFn>>& fns,
                         double t_max, int samples) {
  os << "t";
  for (const auto& [name, fn] : fns) os << "," << name << "," << name << "_deriv";
  os << "\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (int k = 0; k < samples; ++k) {
    double t = t_max * static_cast<double>(k) / static_cast<double>(samples - 1);
    put(t);
    for (const auto& [name, fn] : fns) {
      Jet1 j = fn.eval_jet(t);
      os << ",";
      put(j.v);
      os << ",";
      put(j.d);
    }
    os << "\n";
  }
}

}  // namespace norden
