#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "norden/jet.hpp"
#include "norden/taylor.hpp"

namespace norden {

namespace detail {
class FnImpl;
class OdeTable;
}  // namespace detail

/// A smooth real function of the energy density t, evaluable as a truncated
/// Taylor series (hence as a 1-jet) at any point of its domain [0, t_max).
///
/// Kinds: parsed expression, constant, dense ODE table with derivative
/// channel, or a composite recipe over other functions. Immutable after
/// construction; safe to share and evaluate concurrently.
class ScalarFn {
 public:
  enum class Kind { Constant, Expression, OdeTable, Composite };

  ScalarFn();  // the zero constant
  static ScalarFn constant(double v);

  /// (f(t), f'(t)); throws DomainError outside [0, t_max).
  Jet1 eval_jet(double t) const;

  /// Taylor coefficients of f at t, through the given order.
  Taylor eval_taylor(double t, int order) const;

  double operator()(double t) const { return eval_jet(t).v; }

  Kind kind() const;
  double t_max() const;
  const std::string& name() const;

  ScalarFn renamed(std::string name) const;
  ScalarFn with_t_max(double t_max) const;

  /// Additive / multiplicative tweaks (used for perturbation witnesses).
  friend ScalarFn operator+(const ScalarFn& f, double delta);
  friend ScalarFn operator*(double scale, const ScalarFn& f);

  std::shared_ptr<const detail::OdeTable> table() const;  // null unless OdeTable kind

 private:
  friend class detail::FnImpl;
  explicit ScalarFn(std::shared_ptr<const detail::FnImpl> impl);
  std::shared_ptr<const detail::FnImpl> impl_;
};

/// Parse an expression over literal reals, the variable t, operators
/// + - * / ^, parentheses and the functions sqrt, exp, log.
/// Throws ParseError (with byte offset) on malformed input.
ScalarFn parse_expr(std::string_view src);

/// Composite over other functions: the recipe receives the evaluation point
/// and the requested order and returns the Taylor coefficients there.
/// `prime_depth` is how many derivative levels the recipe takes of its
/// inputs internally (so callers know the accuracy budget).
ScalarFn make_composite(std::string name, double t_max,
                        std::function<Taylor(double, int)> recipe);

/// First-order ODE system with dense output. The right-hand side is
/// jet-valued: called with t = (t0, 1) and state components (y_i, y_i'),
/// it returns (y_i', y_i''), which gives the tables an exact second
/// derivative channel.
struct OdeSystem {
  std::function<std::vector<Jet1>(Jet1 t, const std::vector<Jet1>& state)> rhs;
  std::vector<std::string> names;
};

/// Classical RK4 on a uniform grid over [0, t_max], cubic Hermite dense
/// output between nodes; the derivative channel is the right-hand side
/// evaluated at the interpolated state. Returns one ScalarFn per component,
/// all sharing one table. Throws DenominatorError (with the offending t)
/// if the rhs is non-finite or raises.
std::vector<ScalarFn> integrate_ode(const OdeSystem& sys, std::vector<double> y0,
                                    double t_max, double step);

/// CSV dump of an ODE table: t, then value and deriv per component.
void write_table_csv(std::ostream& os, const detail::OdeTable& table);

/// Generic CSV dump for arbitrary functions sampled on a uniform grid.
void write_functions_csv(std::ostream& os,
                         const std::vector<std::pair<std::string, ScalarFn>>& fns,
                         double t_max, int samples);

namespace detail {

class OdeTable {
 public:
  OdeTable(OdeSystem sys, std::vector<double> y0, double t_max, double step);

  int components() const { return static_cast<int>(names_.size()); }
  double t_end() const { return t_end_; }
  double step() const { return step_; }
  std::size_t nodes() const { return grid_t_.size(); }
  double node_t(std::size_t k) const { return grid_t_[k]; }
  double node_value(std::size_t k, int comp) const { return values_[k][comp]; }
  double node_deriv(std::size_t k, int comp) const { return derivs_[k][comp]; }
  const std::string& comp_name(int comp) const { return names_[comp]; }

  /// Taylor coefficients of one component at interior t.
  Taylor eval(double t, int comp, int order) const;

 private:
  void hermite_state(double t, std::vector<double>& y, std::vector<double>& yp) const;

  OdeSystem sys_;
  std::vector<std::string> names_;
  double t_end_ = 0.0;
  double step_ = 0.0;
  std::vector<double> grid_t_;
  std::vector<std::vector<double>> values_;  // [node][comp]
  std::vector<std::vector<double>> derivs_;  // [node][comp] = rhs at node
  std::vector<std::vector<double>> second_;  // [node][comp] = d(rhs)/dt at node
};

}  // namespace detail

}  // namespace norden
