#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "layerforge/graph.hpp"
#include "layerforge/layering.hpp"
#include "layerforge/rational.hpp"

namespace layerforge {

// ---------------------------------------------------------------------------
// Solver-agnostic linear model

enum class VarKind { kBinary, kContinuous };
enum class Sense { kLe, kEq, kGe };

struct Variable {
  std::string name;
  VarKind kind = VarKind::kBinary;
  Rational lower{0};
  std::optional<Rational> upper{Rational(1)};  // nullopt: unbounded above
};

struct Term {
  int var = 0;
  Rational coef;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;  // sorted by var, no duplicates, no zeros
  Sense sense = Sense::kLe;
  Rational rhs{0};
};

struct Fixing {
  int var = 0;
  Rational value;
};

// Minimisation model. Terms are merged and sorted on insertion so that two
// builds of the same model are identical.
class ModelIR {
 public:
  int add_variable(std::string name, VarKind kind, Rational lower, std::optional<Rational> upper);
  int add_binary(std::string name) { return add_variable(std::move(name), VarKind::kBinary, Rational(0), Rational(1)); }

  void add_constraint(std::string name, std::vector<Term> terms, Sense sense, Rational rhs);
  void set_objective(std::vector<Term> terms, Rational constant);
  void fix(int var, Rational value);

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  const std::vector<Term>& objective() const { return objective_; }
  const Rational& objective_constant() const { return objective_constant_; }
  const std::vector<Fixing>& fixings() const { return fixings_; }

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_constraints() const { return static_cast<int>(rows_.size()); }
  std::optional<int> find(const std::string& name) const;

  // Human-readable warnings attached by the builders.
  std::vector<std::string> warnings;

 private:
  std::vector<Term> normalize(std::vector<Term> terms) const;

  std::vector<Variable> vars_;
  std::map<std::string, int> by_name_;
  std::vector<Constraint> rows_;
  std::vector<Term> objective_;
  Rational objective_constant_{0};
  std::vector<Fixing> fixings_;
};

// One value per declared variable; nullopt marks an unassigned variable.
using Assignment = std::vector<std::optional<Rational>>;

// Exact objective value. Throws std::invalid_argument when an objective
// variable is unassigned.
Rational model_objective_at(const Assignment& point, const ModelIR& model);

// Descriptions of every violated bound, integrality requirement, fixing and
// constraint; empty when the point is feasible.
std::vector<std::string> violations(const Assignment& point, const ModelIR& model);

// ---------------------------------------------------------------------------
// Model families

enum class Family { kQla, kCgl };
std::string_view family_name(Family f);
Family parse_family(std::string_view name);

enum class ScalarKind { kNone, kWidth, kInvScale };

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Quadratic layer assignment: x(v,k) = [L(v) = k] and continuous products
// p(u,k,v,l) = x(u,k) x(v,l) for every arc and k != l. Diagonal products are
// never declared.
struct QlaIndex {
  int num_vertices = 0;
  int y = 0;
  Variant variant = Variant::kGlp;
  ScalarKind scalar_kind = ScalarKind::kNone;
  int scalar = -1;
  std::vector<int> x;  // v*y + (k-1)
  std::vector<int> p;  // (a*y + (k-1))*y + (l-1), -1 on the diagonal

  int x_var(VertexId v, int k) const { return x[static_cast<std::size_t>(v * y + k - 1)]; }
  int p_var(int arc, int k, int l) const {
    return p[static_cast<std::size_t>((arc * y + k - 1) * y + l - 1)];
  }
};

struct QlaModel {
  ModelIR model;
  QlaIndex index;
};

// Variants DLP, DLP_W, GLP, GLP_W and GLP_MS_STAR. DLP variants fix every
// product with k > l to zero.
QlaModel build_qla(const DiGraph& g, int y, Variant variant, const WeightScheme& scheme);

// Ordering model: y(k,v) = [k < L(v)], r(a) = [arc reversed], d(a,k) = [arc
// passes layer k].
struct CglIndex {
  int num_vertices = 0;
  int y = 0;
  Variant variant = Variant::kGlpW;
  ScalarKind scalar_kind = ScalarKind::kNone;
  int scalar = -1;
  bool first_layer_constraint = false;
  std::vector<int> ord;  // v*(y-1) + (k-1), k in 1..y-1
  std::vector<int> rev;  // per arc
  std::vector<int> dum;  // a*(y-2) + (k-2), k in 2..y-1

  int y_var(int k, VertexId v) const { return ord[static_cast<std::size_t>(v * (y - 1) + k - 1)]; }
  int r_var(int arc) const { return rev[static_cast<std::size_t>(arc)]; }
  int d_var(int arc, int k) const { return dum[static_cast<std::size_t>(arc * (y - 2) + k - 2)]; }
};

struct CglModel {
  ModelIR model;
  CglIndex index;
};

// Variants GLP_W and GLP_MS_STAR, Y >= 3.
CglModel build_cgl(const DiGraph& g, int y, Variant variant, const WeightScheme& scheme,
                   bool first_layer_constraint = false);

// Closed-form sizes of the models as built here.
struct ModelCounts {
  long long variables = 0;
  long long constraints = 0;
};
ModelCounts qla_expected_counts(int num_vertices, int num_arcs, int y, Variant variant);
ModelCounts cgl_expected_counts(int num_vertices, int num_arcs, int y, Variant variant,
                                bool first_layer_constraint = false);

// Canonical point of a layering. Throws InfeasibleLayering if l is not
// feasible for the index's variant or exceeds its layer bound.
Assignment encode_layering(const DiGraph& g, const Layering& l, const QlaIndex& index,
                           const WeightScheme& scheme);
Assignment encode_layering(const DiGraph& g, const Layering& l, const CglIndex& index,
                           const WeightScheme& scheme);

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads the layering off the binary variables. Throws DecodeError when an
// x-row does not hold exactly one 1, or y(.,v) is not non-increasing in k.
Layering decode_assignment(const Assignment& point, const QlaIndex& index);
Layering decode_assignment(const Assignment& point, const CglIndex& index);

// ---------------------------------------------------------------------------
// Text formats

// CPLEX-style LP text. Every row (and the objective) is multiplied by the
// least common multiple of its coefficient denominators so that only integer
// literals appear; the objective factor is recorded in a leading comment.
// Fixings are written as equal lower and upper bounds.
void write_lp(const ModelIR& model, std::ostream& out);

// Factor applied to the objective by write_lp.
std::int64_t lp_objective_scale(const ModelIR& model);

// "name value" lines ('#' comments, blank lines ignored). Unlisted variables
// are 0. Binary values within 1e-6 of 0 or 1 are snapped; anything else is an
// error, as is an unknown name.
Assignment read_solution(std::istream& in, const ModelIR& model);

}  // namespace layerforge
