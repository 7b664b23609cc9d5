#include "layerforge/model.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace layerforge {

// ---------------------------------------------------------------------------
// ModelIR

int ModelIR::add_variable(std::string name, VarKind kind, Rational lower,
                          std::optional<Rational> upper) {
  const int id = num_variables();
  auto [it, inserted] = by_name_.emplace(name, id);
  if (!inserted) throw std::logic_error("duplicate variable name " + name);
  vars_.push_back({std::move(name), kind, lower, upper});
  return id;
}

std::vector<Term> ModelIR::normalize(std::vector<Term> terms) const {
  for (const Term& t : terms) {
    if (t.var < 0 || t.var >= num_variables()) throw std::logic_error("term references undeclared variable");
  }
  std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  for (const Term& t : terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == Rational(0); });
  return merged;
}

void ModelIR::add_constraint(std::string name, std::vector<Term> terms, Sense sense, Rational rhs) {
  rows_.push_back({std::move(name), normalize(std::move(terms)), sense, rhs});
}

void ModelIR::set_objective(std::vector<Term> terms, Rational constant) {
  objective_ = normalize(std::move(terms));
  objective_constant_ = constant;
}

void ModelIR::fix(int var, Rational value) {
  if (var < 0 || var >= num_variables()) throw std::logic_error("fixing references undeclared variable");
  fixings_.push_back({var, value});
}

std::optional<int> ModelIR::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

namespace {

const Rational& value_of(const Assignment& point, const ModelIR& model, int var) {
  if (point.size() != static_cast<std::size_t>(model.num_variables())) {
    throw std::invalid_argument("assignment size does not match the model");
  }
  const auto& v = point[static_cast<std::size_t>(var)];
  if (!v) throw std::invalid_argument("variable " + model.variables()[static_cast<std::size_t>(var)].name + " has no value");
  return *v;
}

Rational row_activity(const Assignment& point, const ModelIR& model, const std::vector<Term>& terms) {
  Rational sum(0);
  for (const Term& t : terms) sum += t.coef * value_of(point, model, t.var);
  return sum;
}

}  // namespace

Rational model_objective_at(const Assignment& point, const ModelIR& model) {
  return row_activity(point, model, model.objective()) + model.objective_constant();
}

std::vector<std::string> violations(const Assignment& point, const ModelIR& model) {
  std::vector<std::string> out;
  if (point.size() != static_cast<std::size_t>(model.num_variables())) {
    out.push_back("assignment size does not match the model");
    return out;
  }
  for (int i = 0; i < model.num_variables(); ++i) {
    const Variable& var = model.variables()[static_cast<std::size_t>(i)];
    const auto& value = point[static_cast<std::size_t>(i)];
    if (!value) {
      out.push_back(var.name + " unassigned");
      continue;
    }
    if (*value < var.lower || (var.upper && *value > *var.upper)) {
      out.push_back(var.name + " = " + to_string(*value) + " outside bounds");
    }
    if (var.kind == VarKind::kBinary && *value != Rational(0) && *value != Rational(1)) {
      out.push_back(var.name + " = " + to_string(*value) + " not binary");
    }
  }
  if (!out.empty()) return out;
  for (const Fixing& f : model.fixings()) {
    if (*point[static_cast<std::size_t>(f.var)] != f.value) {
      out.push_back(model.variables()[static_cast<std::size_t>(f.var)].name + " violates fixing to " +
                    to_string(f.value));
    }
  }
  for (const Constraint& row : model.constraints()) {
    const Rational lhs = row_activity(point, model, row.terms);
    bool ok = row.sense == Sense::kLe   ? lhs <= row.rhs
              : row.sense == Sense::kGe ? lhs >= row.rhs
                                        : lhs == row.rhs;
    if (!ok) out.push_back(row.name + ": lhs " + to_string(lhs) + " vs rhs " + to_string(row.rhs));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Naming

std::string_view family_name(Family f) { return f == Family::kQla ? "qla" : "cgl"; }

Family parse_family(std::string_view name) {
  if (name == "qla" || name == "QLA") return Family::kQla;
  if (name == "cgl" || name == "CGL") return Family::kCgl;
  throw std::invalid_argument("unknown model family '" + std::string(name) + "'");
}

namespace {

// "u_v", with "_a<j>" appended on the j-th repeated copy of a parallel arc.
std::vector<std::string> arc_tags(const DiGraph& g) {
  auto copy = g.parallel_copy_index();
  std::vector<std::string> tags;
  tags.reserve(static_cast<std::size_t>(g.num_arcs()));
  for (int a = 0; a < g.num_arcs(); ++a) {
    const Arc& arc = g.arc(a);
    std::string tag = std::to_string(arc.tail) + "_" + std::to_string(arc.head);
    if (copy[static_cast<std::size_t>(a)] > 0) tag += "_a" + std::to_string(copy[static_cast<std::size_t>(a)]);
    tags.push_back(std::move(tag));
  }
  return tags;
}

// Splices the layer pair into a tag: "u_k_v_l" (+ copy suffix).
std::string product_name(const Arc& arc, int k, int l, int copy) {
  std::string name = "p_" + std::to_string(arc.tail) + "_" + std::to_string(k) + "_" +
                     std::to_string(arc.head) + "_" + std::to_string(l);
  if (copy > 0) name += "_a" + std::to_string(copy);
  return name;
}

std::string k_str(int k) { return std::to_string(k); }

}  // namespace

// ---------------------------------------------------------------------------
// QLA

QlaModel build_qla(const DiGraph& g, int y, Variant variant, const WeightScheme& scheme) {
  if (variant == Variant::kGlpMs) {
    throw ModelError("GLP_MS has no linear model; use GLP_MS_STAR or the direct solver");
  }
  if (y < 1 || (y < 2 && g.num_arcs() > 0)) {
    throw ModelError("QLA needs Y >= 2 when arcs are present (got Y=" + std::to_string(y) + ")");
  }
  scheme.validate();

  const int n = g.num_vertices();
  const int m = g.num_arcs();
  const auto copy = g.parallel_copy_index();
  QlaModel out;
  ModelIR& ir = out.model;
  QlaIndex& idx = out.index;
  idx.num_vertices = n;
  idx.y = y;
  idx.variant = variant;

  idx.x.resize(static_cast<std::size_t>(n * y));
  for (int v = 0; v < n; ++v) {
    for (int k = 1; k <= y; ++k) {
      idx.x[static_cast<std::size_t>(v * y + k - 1)] = ir.add_binary("x_" + std::to_string(v) + "_" + k_str(k));
    }
  }
  idx.p.assign(static_cast<std::size_t>(m) * y * y, -1);
  for (int a = 0; a < m; ++a) {
    for (int k = 1; k <= y; ++k) {
      for (int l = 1; l <= y; ++l) {
        if (k == l) continue;
        idx.p[static_cast<std::size_t>((a * y + k - 1) * y + l - 1)] =
            ir.add_variable(product_name(g.arc(a), k, l, copy[static_cast<std::size_t>(a)]),
                            VarKind::kContinuous, Rational(0), Rational(1));
      }
    }
  }
  if (has_width_term(variant)) {
    idx.scalar_kind = ScalarKind::kWidth;
    idx.scalar = ir.add_variable("W", VarKind::kContinuous, Rational(0), std::nullopt);
  } else if (variant == Variant::kGlpMsStar) {
    idx.scalar_kind = ScalarKind::kInvScale;
    idx.scalar = ir.add_variable("Sbar", VarKind::kContinuous, Rational(0), std::nullopt);
  }

  const auto tags = arc_tags(g);

  for (int v = 0; v < n; ++v) {
    std::vector<Term> row;
    for (int k = 1; k <= y; ++k) row.push_back({idx.x_var(v, k), Rational(1)});
    ir.add_constraint("assign_" + std::to_string(v), std::move(row), Sense::kEq, Rational(1));
  }
  for (int a = 0; a < m; ++a) {
    const Arc& arc = g.arc(a);
    for (int k = 1; k <= y; ++k) {
      std::vector<Term> row;
      for (int l = 1; l <= y; ++l) {
        if (l != k) row.push_back({idx.p_var(a, k, l), Rational(1)});
      }
      row.push_back({idx.x_var(arc.tail, k), Rational(-1)});
      ir.add_constraint("lin_tail_" + tags[static_cast<std::size_t>(a)] + "_" + k_str(k), std::move(row), Sense::kEq, Rational(0));
    }
    for (int l = 1; l <= y; ++l) {
      std::vector<Term> row;
      for (int k = 1; k <= y; ++k) {
        if (k != l) row.push_back({idx.p_var(a, k, l), Rational(1)});
      }
      row.push_back({idx.x_var(arc.head, l), Rational(-1)});
      ir.add_constraint("lin_head_" + tags[static_cast<std::size_t>(a)] + "_" + k_str(l), std::move(row), Sense::kEq, Rational(0));
    }
  }

  if (idx.scalar_kind != ScalarKind::kNone) {
    // Scalar coefficient: W, or r_W * Sbar.
    const Rational scalar_coef = idx.scalar_kind == ScalarKind::kWidth ? Rational(1) : scheme.r_w;
    for (int k = 1; k <= y; ++k) {
      std::vector<Term> row;
      for (int v = 0; v < n; ++v) row.push_back({idx.x_var(v, k), Rational(1)});
      if (k != 1 && k != y) {
        for (int a = 0; a < m; ++a) {
          for (int l = 1; l < k; ++l) {
            for (int mm = k + 1; mm <= y; ++mm) {
              row.push_back({idx.p_var(a, l, mm), Rational(1)});
              row.push_back({idx.p_var(a, mm, l), Rational(1)});
            }
          }
        }
      }
      row.push_back({idx.scalar, -scalar_coef});
      ir.add_constraint("width_" + k_str(k), std::move(row), Sense::kLe, Rational(0));
    }
  }
  if (idx.scalar_kind == ScalarKind::kInvScale) {
    for (int v = 0; v < n; ++v) {
      std::vector<Term> row;
      for (int k = 1; k <= y; ++k) row.push_back({idx.x_var(v, k), Rational(k)});
      row.push_back({idx.scalar, -scheme.r_h});
      ir.add_constraint("height_" + std::to_string(v), std::move(row), Sense::kLe, Rational(0));
    }
  }

  if (is_directed(variant)) {
    for (int a = 0; a < m; ++a) {
      for (int k = 2; k <= y; ++k) {
        for (int l = 1; l < k; ++l) ir.fix(idx.p_var(a, k, l), Rational(0));
      }
    }
  }

  std::vector<Term> obj;
  for (int a = 0; a < m; ++a) {
    for (int k = 2; k <= y; ++k) {
      for (int l = 1; l < k; ++l) {
        const Rational len = scheme.w_len * Rational(k - l);
        obj.push_back({idx.p_var(a, l, k), len});
        obj.push_back({idx.p_var(a, k, l), is_directed(variant) ? len : len + scheme.w_rev});
      }
    }
  }
  if (idx.scalar_kind == ScalarKind::kWidth) obj.push_back({idx.scalar, scheme.w_wid});
  if (idx.scalar_kind == ScalarKind::kInvScale) obj.push_back({idx.scalar, scheme.w_scl});
  ir.set_objective(std::move(obj), Rational(0));
  return out;
}

ModelCounts qla_expected_counts(int n, int m, int y, Variant variant) {
  ModelCounts c;
  c.variables = static_cast<long long>(n) * y + static_cast<long long>(m) * y * (y - 1);
  c.constraints = 2LL * m * y + n;
  if (has_width_term(variant)) {
    c.variables += 1;
    c.constraints += y;
  } else if (variant == Variant::kGlpMsStar) {
    c.variables += 1;
    c.constraints += y + n;
  }
  return c;
}

// ---------------------------------------------------------------------------
// CGL

CglModel build_cgl(const DiGraph& g, int y, Variant variant, const WeightScheme& scheme,
                   bool first_layer_constraint) {
  if (variant != Variant::kGlpW && variant != Variant::kGlpMsStar) {
    throw ModelError("CGL models exist for GLP_W and GLP_MS_STAR only (got " +
                     std::string(variant_name(variant)) + ")");
  }
  if (y < 3) throw ModelError("CGL needs Y >= 3 (got Y=" + std::to_string(y) + ")");
  scheme.validate();

  const int n = g.num_vertices();
  const int m = g.num_arcs();
  CglModel out;
  ModelIR& ir = out.model;
  CglIndex& idx = out.index;
  idx.num_vertices = n;
  idx.y = y;
  idx.variant = variant;
  idx.first_layer_constraint = first_layer_constraint;
  const auto tags = arc_tags(g);

  idx.ord.resize(static_cast<std::size_t>(n * (y - 1)));
  for (int v = 0; v < n; ++v) {
    for (int k = 1; k <= y - 1; ++k) {
      idx.ord[static_cast<std::size_t>(v * (y - 1) + k - 1)] = ir.add_binary("y_" + k_str(k) + "_" + std::to_string(v));
    }
  }
  idx.rev.resize(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) idx.rev[static_cast<std::size_t>(a)] = ir.add_binary("r_" + tags[static_cast<std::size_t>(a)]);
  idx.dum.resize(static_cast<std::size_t>(m * (y - 2)));
  for (int a = 0; a < m; ++a) {
    const Arc& arc = g.arc(a);
    const auto copy_suffix = tags[static_cast<std::size_t>(a)].substr(
        (std::to_string(arc.tail) + "_" + std::to_string(arc.head)).size());
    for (int k = 2; k <= y - 1; ++k) {
      idx.dum[static_cast<std::size_t>(a * (y - 2) + k - 2)] = ir.add_binary(
          "d_" + std::to_string(arc.tail) + "_" + std::to_string(arc.head) + "_" + k_str(k) + copy_suffix);
    }
  }
  if (variant == Variant::kGlpW) {
    idx.scalar_kind = ScalarKind::kWidth;
    idx.scalar = ir.add_variable("W", VarKind::kContinuous, Rational(0), std::nullopt);
  } else {
    idx.scalar_kind = ScalarKind::kInvScale;
    idx.scalar = ir.add_variable("Sbar", VarKind::kContinuous, Rational(0), std::nullopt);
  }

  for (int v = 0; v < n; ++v) {
    for (int k = 2; k <= y - 1; ++k) {
      ir.add_constraint("trans_" + std::to_string(v) + "_" + k_str(k),
                        {{idx.y_var(k, v), Rational(1)}, {idx.y_var(k - 1, v), Rational(-1)}}, Sense::kLe,
                        Rational(0));
    }
  }

  for (int a = 0; a < m; ++a) {
    const VertexId u = g.arc(a).tail;
    const VertexId v = g.arc(a).head;
    const int r = idx.r_var(a);
    const std::string& tag = tags[static_cast<std::size_t>(a)];
    ir.add_constraint("rev_lo_tail_" + tag, {{idx.y_var(1, u), Rational(1)}, {r, Rational(-1)}}, Sense::kGe, Rational(0));
    ir.add_constraint("rev_lo_head_" + tag, {{idx.y_var(1, v), Rational(1)}, {r, Rational(1)}}, Sense::kGe, Rational(1));
    for (int k = 2; k <= y - 1; ++k) {
      ir.add_constraint("rev_fwd_" + tag + "_" + k_str(k),
                        {{idx.y_var(k - 1, u), Rational(1)}, {idx.y_var(k, v), Rational(-1)}, {r, Rational(-1)}},
                        Sense::kLe, Rational(0));
      ir.add_constraint("rev_bwd_" + tag + "_" + k_str(k),
                        {{idx.y_var(k - 1, v), Rational(1)}, {idx.y_var(k, u), Rational(-1)}, {r, Rational(1)}},
                        Sense::kLe, Rational(1));
    }
    ir.add_constraint("rev_hi_tail_" + tag, {{idx.y_var(y - 1, u), Rational(1)}, {r, Rational(-1)}}, Sense::kLe, Rational(0));
    ir.add_constraint("rev_hi_head_" + tag, {{idx.y_var(y - 1, v), Rational(1)}, {r, Rational(1)}}, Sense::kLe, Rational(1));
  }

  for (int a = 0; a < m; ++a) {
    const VertexId u = g.arc(a).tail;
    const VertexId v = g.arc(a).head;
    const std::string& tag = tags[static_cast<std::size_t>(a)];
    for (int k = 2; k <= y - 1; ++k) {
      const int d = idx.d_var(a, k);
      ir.add_constraint("dummy_down_" + tag + "_" + k_str(k),
                        {{idx.y_var(k, u), Rational(1)}, {idx.y_var(k - 1, v), Rational(-1)}, {d, Rational(-1)}},
                        Sense::kLe, Rational(0));
      ir.add_constraint("dummy_up_" + tag + "_" + k_str(k),
                        {{idx.y_var(k, v), Rational(1)}, {idx.y_var(k - 1, u), Rational(-1)}, {d, Rational(-1)}},
                        Sense::kLe, Rational(0));
    }
  }

  const Rational scalar_coef = idx.scalar_kind == ScalarKind::kWidth ? Rational(1) : scheme.r_w;
  {
    // sum_v (1 - y_1v) <= W  <=>  -sum_v y_1v - W <= -|V|
    std::vector<Term> row;
    for (int v = 0; v < n; ++v) row.push_back({idx.y_var(1, v), Rational(-1)});
    row.push_back({idx.scalar, -scalar_coef});
    ir.add_constraint("width_1", std::move(row), Sense::kLe, Rational(-n));
  }
  for (int k = 2; k <= y - 1; ++k) {
    std::vector<Term> row;
    for (int v = 0; v < n; ++v) {
      row.push_back({idx.y_var(k - 1, v), Rational(1)});
      row.push_back({idx.y_var(k, v), Rational(-1)});
    }
    for (int a = 0; a < m; ++a) row.push_back({idx.d_var(a, k), Rational(1)});
    row.push_back({idx.scalar, -scalar_coef});
    ir.add_constraint("width_" + k_str(k), std::move(row), Sense::kLe, Rational(0));
  }
  {
    std::vector<Term> row;
    for (int v = 0; v < n; ++v) row.push_back({idx.y_var(y - 1, v), Rational(1)});
    row.push_back({idx.scalar, -scalar_coef});
    ir.add_constraint("width_" + k_str(y), std::move(row), Sense::kLe, Rational(0));
  }
  if (idx.scalar_kind == ScalarKind::kInvScale) {
    for (int v = 0; v < n; ++v) {
      std::vector<Term> row;
      for (int k = 1; k <= y - 1; ++k) row.push_back({idx.y_var(k, v), Rational(1)});
      row.push_back({idx.scalar, -scheme.r_h});
      ir.add_constraint("height_" + std::to_string(v), std::move(row), Sense::kLe, Rational(-1));
    }
  }
  if (first_layer_constraint) {
    // sum_v (1 - y_1v) >= 1
    std::vector<Term> row;
    for (int v = 0; v < n; ++v) row.push_back({idx.y_var(1, v), Rational(-1)});
    ir.add_constraint("first_layer", std::move(row), Sense::kGe, Rational(1 - n));
  }

  std::vector<Term> obj;
  for (int a = 0; a < m; ++a) {
    obj.push_back({idx.r_var(a), scheme.w_rev});
    for (int k = 2; k <= y - 1; ++k) obj.push_back({idx.d_var(a, k), scheme.w_len});
  }
  obj.push_back({idx.scalar, idx.scalar_kind == ScalarKind::kWidth ? scheme.w_wid : scheme.w_scl});
  ir.set_objective(std::move(obj), scheme.w_len * Rational(m));

  if (scheme.w_len == Rational(0) && m > 0) {
    ir.warnings.push_back(
        "w_len = 0: dummy variables are only bounded below, so dummy counts read from a solution "
        "are upper bounds");
  }
  return out;
}

ModelCounts cgl_expected_counts(int n, int m, int y, Variant variant, bool first_layer_constraint) {
  ModelCounts c;
  c.variables = static_cast<long long>(n) * (y - 1) + m + static_cast<long long>(m) * (y - 2) + 1;
  c.constraints = (4LL * m + n + 1) * (y - 2) + 4LL * m + 2;
  if (variant == Variant::kGlpMsStar) c.constraints += n;
  if (first_layer_constraint) c.constraints += 1;
  return c;
}

// ---------------------------------------------------------------------------
// Encode / decode

namespace {

void require_encodable(const DiGraph& g, const Layering& l, int y, Variant variant) {
  if (l.size() != g.num_vertices()) throw InfeasibleLayering("layering does not cover the graph");
  for (int v = 0; v < l.size(); ++v) {
    if (l[v] < 1 || l[v] > y) {
      throw InfeasibleLayering("vertex " + std::to_string(v) + " on layer " + std::to_string(l[v]) +
                               " outside the model's 1.." + std::to_string(y));
    }
  }
  if (!check_feasible(g, l, variant == Variant::kDlp || variant == Variant::kDlpW ? variant : Variant::kGlp)) {
    throw InfeasibleLayering("layering is infeasible for " + std::string(variant_name(variant)));
  }
}

Rational scalar_value(const DiGraph& g, const Layering& l, int y, ScalarKind kind, const WeightScheme& s) {
  Metrics m = evaluate(g, Layering{l.layer, y}, s);
  return kind == ScalarKind::kWidth ? Rational(m.width) : m.inv_scale;
}

}  // namespace

Assignment encode_layering(const DiGraph& g, const Layering& l, const QlaIndex& idx, const WeightScheme& s) {
  require_encodable(g, l, idx.y, idx.variant);
  std::size_t size = 0;
  for (int id : idx.x) size = std::max(size, static_cast<std::size_t>(id) + 1);
  for (int id : idx.p) size = std::max(size, static_cast<std::size_t>(id + 1));
  if (idx.scalar >= 0) size = std::max(size, static_cast<std::size_t>(idx.scalar) + 1);
  Assignment point(size, Rational(0));
  for (int v = 0; v < idx.num_vertices; ++v) point[static_cast<std::size_t>(idx.x_var(v, l[v]))] = Rational(1);
  for (int a = 0; a < g.num_arcs(); ++a) {
    point[static_cast<std::size_t>(idx.p_var(a, l[g.arc(a).tail], l[g.arc(a).head]))] = Rational(1);
  }
  if (idx.scalar >= 0) point[static_cast<std::size_t>(idx.scalar)] = scalar_value(g, l, idx.y, idx.scalar_kind, s);
  return point;
}

Assignment encode_layering(const DiGraph& g, const Layering& l, const CglIndex& idx, const WeightScheme& s) {
  require_encodable(g, l, idx.y, idx.variant);
  if (idx.first_layer_constraint &&
      std::find(l.layer.begin(), l.layer.end(), 1) == l.layer.end() && !l.layer.empty()) {
    throw InfeasibleLayering("model requires an occupied first layer");
  }
  Assignment point(static_cast<std::size_t>(idx.scalar) + 1, Rational(0));
  for (int v = 0; v < idx.num_vertices; ++v) {
    for (int k = 1; k <= idx.y - 1; ++k) {
      point[static_cast<std::size_t>(idx.y_var(k, v))] = Rational(k < l[v] ? 1 : 0);
    }
  }
  for (int a = 0; a < g.num_arcs(); ++a) {
    const int lu = l[g.arc(a).tail];
    const int lv = l[g.arc(a).head];
    point[static_cast<std::size_t>(idx.r_var(a))] = Rational(lv < lu ? 1 : 0);
    for (int k = 2; k <= idx.y - 1; ++k) {
      const bool between = std::min(lu, lv) < k && k < std::max(lu, lv);
      point[static_cast<std::size_t>(idx.d_var(a, k))] = Rational(between ? 1 : 0);
    }
  }
  point[static_cast<std::size_t>(idx.scalar)] = scalar_value(g, l, idx.y, idx.scalar_kind, s);
  return point;
}

namespace {

int binary_at(const Assignment& point, int var) {
  if (var < 0 || static_cast<std::size_t>(var) >= point.size() || !point[static_cast<std::size_t>(var)]) {
    throw DecodeError("missing value for variable " + std::to_string(var));
  }
  const Rational& value = *point[static_cast<std::size_t>(var)];
  if (value == Rational(0)) return 0;
  if (value == Rational(1)) return 1;
  throw DecodeError("non-binary value " + to_string(value) + " on variable " + std::to_string(var));
}

}  // namespace

Layering decode_assignment(const Assignment& point, const QlaIndex& idx) {
  Layering l{std::vector<int>(static_cast<std::size_t>(idx.num_vertices), 0), idx.y};
  for (int v = 0; v < idx.num_vertices; ++v) {
    int ones = 0;
    for (int k = 1; k <= idx.y; ++k) {
      if (binary_at(point, idx.x_var(v, k)) == 1) {
        ++ones;
        l.layer[static_cast<std::size_t>(v)] = k;
      }
    }
    if (ones != 1) {
      throw DecodeError("vertex " + std::to_string(v) + " assigned to " + std::to_string(ones) +
                        " layers, expected exactly one");
    }
  }
  return l;
}

Layering decode_assignment(const Assignment& point, const CglIndex& idx) {
  Layering l{std::vector<int>(static_cast<std::size_t>(idx.num_vertices), 0), idx.y};
  for (int v = 0; v < idx.num_vertices; ++v) {
    int previous = 1;
    int layer = 1;
    for (int k = 1; k <= idx.y - 1; ++k) {
      const int bit = binary_at(point, idx.y_var(k, v));
      if (bit > previous) {
        throw DecodeError("transitivity violated for vertex " + std::to_string(v) + " at k=" + std::to_string(k));
      }
      previous = bit;
      layer += bit;
    }
    l.layer[static_cast<std::size_t>(v)] = layer;
  }
  return l;
}

// ---------------------------------------------------------------------------
// LP text

namespace {

std::int64_t lcm_of_denominators(const std::vector<Term>& terms, const Rational& extra) {
  std::int64_t lcm = extra.denominator();
  for (const Term& t : terms) lcm = std::lcm(lcm, t.coef.denominator());
  return lcm;
}

void write_terms(std::ostream& out, const ModelIR& model, const std::vector<Term>& terms,
                 std::int64_t scale, std::size_t indent) {
  int on_line = 0;
  bool first = true;
  for (const Term& t : terms) {
    const Rational scaled = t.coef * Rational(scale);
    const std::int64_t c = scaled.numerator();
    if (on_line == 8) {
      out << '\n' << std::string(indent, ' ');
      on_line = 0;
    }
    if (first) {
      if (c < 0) out << "- ";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    const std::int64_t mag = c < 0 ? -c : c;
    if (mag != 1) out << mag << ' ';
    out << model.variables()[static_cast<std::size_t>(t.var)].name;
    first = false;
    ++on_line;
  }
}

}  // namespace

std::int64_t lp_objective_scale(const ModelIR& model) {
  return lcm_of_denominators(model.objective(), model.objective_constant());
}

void write_lp(const ModelIR& model, std::ostream& out) {
  const std::int64_t obj_scale = lp_objective_scale(model);
  out << "\\ layerforge model: " << model.num_variables() << " variables, " << model.num_constraints()
      << " constraints\n";
  out << "\\ objective scale: " << obj_scale << '\n';
  out << "Minimize\n obj: ";
  if (model.objective().empty()) {
    if (model.num_variables() > 0) out << "0 " << model.variables().front().name;
  } else {
    write_terms(out, model, model.objective(), obj_scale, 6);
  }
  const Rational constant = model.objective_constant() * Rational(obj_scale);
  if (constant != Rational(0)) {
    out << (constant < 0 ? " - " : " + ") << (constant < 0 ? -constant.numerator() : constant.numerator());
  }
  out << "\nSubject To\n";
  for (const Constraint& row : model.constraints()) {
    const std::int64_t scale = lcm_of_denominators(row.terms, row.rhs);
    out << ' ' << row.name << ": ";
    if (row.terms.empty()) {
      out << "0 " << model.variables().front().name;
    } else {
      write_terms(out, model, row.terms, scale, row.name.size() + 3);
    }
    out << (row.sense == Sense::kLe ? " <= " : row.sense == Sense::kGe ? " >= " : " = ")
        << (row.rhs * Rational(scale)).numerator() << '\n';
  }

  std::map<int, Rational> fixed;
  for (const Fixing& f : model.fixings()) fixed[f.var] = f.value;
  out << "Bounds\n";
  for (int i = 0; i < model.num_variables(); ++i) {
    const Variable& var = model.variables()[static_cast<std::size_t>(i)];
    if (auto it = fixed.find(i); it != fixed.end()) {
      out << ' ' << var.name << " = " << to_decimal(it->second) << '\n';
      continue;
    }
    if (var.kind == VarKind::kBinary) continue;
    if (var.upper) {
      out << ' ' << to_decimal(var.lower) << " <= " << var.name << " <= " << to_decimal(*var.upper) << '\n';
    } else {
      out << ' ' << var.name << " >= " << to_decimal(var.lower) << '\n';
    }
  }
  std::vector<int> binaries;
  for (int i = 0; i < model.num_variables(); ++i) {
    if (model.variables()[static_cast<std::size_t>(i)].kind == VarKind::kBinary) binaries.push_back(i);
  }
  if (!binaries.empty()) {
    out << "Binaries\n";
    for (std::size_t i = 0; i < binaries.size(); ++i) {
      out << ' ' << model.variables()[static_cast<std::size_t>(binaries[i])].name;
      if (i % 8 == 7 || i + 1 == binaries.size()) out << '\n';
    }
  }
  out << "End\n";
}

Assignment read_solution(std::istream& in, const ModelIR& model) {
  Assignment point(static_cast<std::size_t>(model.num_variables()), Rational(0));
  const Rational tolerance(1, 1'000'000);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string name;
    std::string value_text;
    std::string extra;
    if (!(fields >> name)) continue;
    if (!(fields >> value_text) || (fields >> extra)) throw ParseError(line_no, "expected 'name value'");
    auto id = model.find(name);
    if (!id) throw ParseError(line_no, "unknown variable '" + name + "'");
    Rational value;
    try {
      value = parse_rational(value_text);
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
    if (model.variables()[static_cast<std::size_t>(*id)].kind == VarKind::kBinary) {
      if (abs(value) <= tolerance) {
        value = 0;
      } else if (abs(value - 1) <= tolerance) {
        value = 1;
      } else {
        throw ParseError(line_no, "binary variable " + name + " has value " + value_text);
      }
    }
    point[static_cast<std::size_t>(*id)] = value;
  }
  return point;
}

}  // namespace layerforge
