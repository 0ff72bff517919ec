#include <fmt/format.h>

#include "diracbvp/bvp_solver.hpp"
#include "diracbvp/linalg.hpp"

namespace diracbvp {

namespace {

void line(std::string& out, const std::string& key, double value) { out += fmt::format("{} = {:.12e}\n", key, value); }

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

double smallest_singular_value(const Matrix& a) {
  if (a.cols() == 0) return 0.0;
  const Eigen::VectorXd s = linalg::singular_values(a);
  return s[s.size() - 1];
}

void add_condition(WellposednessReport& rep, const std::string& name, const Matrix& k, double cap) {
  const double c = condition_number(k);
  rep.condition_numbers.emplace_back(name, c);
  if (!(c <= cap)) rep.flags.push_back("ill_conditioned:" + name);
}

}  // namespace

std::string SolveReport::to_text() const {
  std::string out;
  out += fmt::format("kind = {}\n", to_string(kind));
  out += fmt::format("formula = {}\n", formula);
  for (const auto& [name, value] : condition_numbers) line(out, "cond." + name, value);
  line(out, "boundary_residual", boundary_residual);
  line(out, "hardy_residual", hardy_residual);
  line(out, "projection_loss", projection_loss);
  line(out, "invariance_defect", invariance_defect);
  if (second_order_residual) line(out, "second_order_residual", *second_order_residual);
  line(out, "norm.trace", norms.trace);
  line(out, "norm.sup_t", norms.sup_t);
  line(out, "norm.triplebar", norms.triplebar_dt);
  line(out, "norm.nontangential", norms.nontangential);
  for (const auto& [name, value] : extra) line(out, name, value);
  out += fmt::format("flags = {}\n", join(flags));
  return out;
}

std::string WellposednessReport::to_text() const {
  std::string out;
  for (const auto& [name, value] : condition_numbers) line(out, "cond." + name, value);
  for (const auto& [name, value] : projection_gaps) line(out, "gap." + name, value);
  line(out, "cauchy_norm", cauchy_norm);
  out += fmt::format("flags = {}\n", join(flags));
  return out;
}

WellposednessReport wellposedness_report(const BoundaryOperators& ops) {
  WellposednessReport rep;
  const double cap = ops.options().cond_cap;
  const Eigen::Index r = ops.basis().dim();
  const Matrix id = Matrix::Identity(r, r);
  const Matrix& e = ops.cauchy();
  const Matrix& na = ops.reflection_b();
  const Matrix& n = ops.reflection();
  add_condition(rep, "I-EN_A", id - e * na, cap);
  add_condition(rep, "I+EN_A", id + e * na, cap);
  add_condition(rep, "E-N_A", e - na, cap);
  if (ops.degree() == 1) {
    add_condition(rep, "I-EN", id - e * n, cap);
    add_condition(rep, "I+EN", id + e * n, cap);
    add_condition(rep, "E+N", e + n, cap);
    add_condition(rep, "E-N", e - n, cap);
  }

  const Matrix hardy = linalg::orthonormal_range(ops.hardy_eigenvectors(+1), 1e-12);
  rep.projection_gaps.emplace_back("N+_A", smallest_singular_value(0.5 * (id + na) * hardy));
  rep.projection_gaps.emplace_back("N-_A", smallest_singular_value(0.5 * (id - na) * hardy));
  if (ops.degree() == 1) {
    rep.projection_gaps.emplace_back("N+", smallest_singular_value(0.5 * (id + n) * hardy));
    rep.projection_gaps.emplace_back("N-", smallest_singular_value(0.5 * (id - n) * hardy));
  }
  rep.cauchy_norm = linalg::spectral_norm(e);
  return rep;
}

WellposednessReport wellposedness_report(const BoundaryOperators& ops, Complex lambda) {
  WellposednessReport rep = wellposedness_report(ops);
  const Eigen::Index r = ops.basis().dim();
  add_condition(rep, "lambda-EN_B", lambda * Matrix::Identity(r, r) - ops.cauchy() * ops.reflection_b(),
                ops.options().cond_cap);
  return rep;
}

}  // namespace diracbvp
