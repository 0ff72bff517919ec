#include "diracbvp/diagnostics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "diracbvp/coefficients.hpp"
#include "diracbvp/errors.hpp"
#include "diracbvp/io.hpp"
#include "diracbvp/linalg.hpp"

namespace diracbvp::diagnostics {

namespace {

constexpr BasisIndex kNormal{1u};
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vector random_coords(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = Complex(g(rng), g(rng));
  return v;
}

/// Sum over points of <X(p) u(p), v(p)>.
Complex pointwise_pairing(const Torus& t, const std::vector<Matrix>& maps, const Vector& u, const Vector& v) {
  const int ld = t.lambda_dim();
  Complex s = 0.0;
  for (int p = 0; p < t.point_count(); ++p) {
    const auto up = u.segment(static_cast<Eigen::Index>(p) * ld, ld);
    const auto vp = v.segment(static_cast<Eigen::Index>(p) * ld, ld);
    s += vp.dot(maps[static_cast<std::size_t>(p)] * up);
  }
  return s;
}

double relative_gap(Complex a, Complex b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

bool is_real(const CoefficientField& b) {
  for (const Matrix& m : b.maps())
    if (m.imag().cwiseAbs().maxCoeff() > 0.0) return false;
  return true;
}

bool is_identity(const CoefficientField& b) {
  for (const Matrix& m : b.maps())
    if ((m - Matrix::Identity(m.rows(), m.cols())).norm() > 0.0) return false;
  return true;
}

std::string csv_cell(double v) { return std::isnan(v) ? "" : io::format_number(v); }

}  // namespace

// ------------------------------------------------------------------ records

Measurement Measurement::at_most(std::string name, double value, double bound, std::string claim, bool gating) {
  return {std::move(name), value, Relation::at_most, kNaN, bound, std::move(claim), gating};
}

Measurement Measurement::at_least(std::string name, double value, double bound, std::string claim, bool gating) {
  return {std::move(name), value, Relation::at_least, bound, kNaN, std::move(claim), gating};
}

Measurement Measurement::within(std::string name, double value, double lo, double hi, std::string claim, bool gating) {
  return {std::move(name), value, Relation::within, lo, hi, std::move(claim), gating};
}

Measurement Measurement::report(std::string name, double value, std::string claim) {
  return {std::move(name), value, Relation::report, kNaN, kNaN, std::move(claim), false};
}

bool Measurement::passed() const {
  switch (relation) {
    case Relation::at_most: return value <= upper;
    case Relation::at_least: return value >= lower;
    case Relation::within: return value >= lower && value <= upper;
    case Relation::report: return true;
  }
  return false;
}

std::string Measurement::threshold() const {
  switch (relation) {
    case Relation::at_most: return fmt::format("<= {:.3g}", upper);
    case Relation::at_least: return fmt::format(">= {:.3g}", lower);
    case Relation::within: return fmt::format("in [{:.3g}, {:.3g}]", lower, upper);
    case Relation::report: return "recorded";
  }
  return "";
}

bool CampaignResult::passed() const { return failures().empty(); }

std::vector<std::string> CampaignResult::failures() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (const Measurement& m : points[i].measurements)
      if (m.gating && !m.passed())
        out.push_back(fmt::format("point {}: {} = {:.6g} not {}", i, m.name, m.value, m.threshold()));
  return out;
}

double CampaignResult::max_of(const std::string& name) const {
  double best = kNaN;
  for (const CampaignPoint& p : points)
    for (const Measurement& m : p.measurements)
      if (m.name == name && (std::isnan(best) || m.value > best)) best = m.value;
  return best;
}

double CampaignResult::min_of(const std::string& name) const {
  double best = kNaN;
  for (const CampaignPoint& p : points)
    for (const Measurement& m : p.measurements)
      if (m.name == name && (std::isnan(best) || m.value < best)) best = m.value;
  return best;
}

std::string CampaignResult::csv() const {
  std::vector<std::string> params, measures;
  std::map<std::string, std::string> thresholds;
  for (const CampaignPoint& p : points) {
    for (const auto& [k, v] : p.parameters)
      if (std::find(params.begin(), params.end(), k) == params.end()) params.push_back(k);
    for (const Measurement& m : p.measurements)
      if (std::find(measures.begin(), measures.end(), m.name) == measures.end()) measures.push_back(m.name);
  }
  std::string out = "point";
  for (const auto& k : params) out += "," + k;
  for (const auto& m : measures) out += fmt::format(",{0},{0}.threshold,{0}.pass", m);
  out += ",note\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const CampaignPoint& p = points[i];
    out += std::to_string(i);
    for (const auto& k : params) {
      auto it = std::find_if(p.parameters.begin(), p.parameters.end(), [&](const auto& kv) { return kv.first == k; });
      out += "," + (it == p.parameters.end() ? std::string() : csv_cell(it->second));
    }
    for (const auto& name : measures) {
      auto it = std::find_if(p.measurements.begin(), p.measurements.end(),
                             [&](const Measurement& m) { return m.name == name; });
      if (it == p.measurements.end()) {
        out += ",,,";
      } else {
        const char* flag = it->relation == Relation::report ? "info" : (it->passed() ? "pass" : "fail");
        out += fmt::format(",{},{},{}", csv_cell(it->value), it->threshold(), flag);
      }
    }
    out += ",\"" + p.note + "\"\n";
  }
  return out;
}

std::string CampaignResult::summary() const {
  std::string out = fmt::format("campaign = {}\nseed = {}\nexploratory = {}\nstatus = {}\n", id, seed,
                                exploratory ? "yes" : "no", passed() ? "pass" : "fail");
  for (const auto& n : notes) out += "note = " + n + "\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const CampaignPoint& p = points[i];
    std::string params;
    for (const auto& [k, v] : p.parameters) params += fmt::format("{}{}={:.6g}", params.empty() ? "" : " ", k, v);
    out += fmt::format("[point {}] {}{}\n", i, params, p.note.empty() ? "" : " (" + p.note + ")");
    for (const Measurement& m : p.measurements) {
      const char* flag = m.relation == Relation::report ? "info"
                         : m.passed()                   ? "pass"
                         : m.gating                     ? "FAIL"
                                                        : "outside (non-gating)";
      out += fmt::format("  {} = {:.9g}  {}  {}  ; {}\n", m.name, m.value, m.threshold(), flag, m.claim);
    }
  }
  return out;
}

void write_campaign(const CampaignResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  io::write_file_atomic(dir / (result.id + ".csv"), result.csv());
  io::write_file_atomic(dir / (result.id + "_summary.txt"), result.summary());
}

ScalarField smooth_data(const Torus& torus, std::uint64_t seed, int max_wavenumber) {
  if (max_wavenumber < 1) throw InvalidArgument("smooth_data: max_wavenumber must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const int n = torus.dim_n();
  const int k1_max = n == 2 ? max_wavenumber : 0;
  ScalarField u(torus);
  const double w = 2.0 * std::numbers::pi / torus.period();
  for (int k0 = -max_wavenumber; k0 <= max_wavenumber; ++k0)
    for (int k1 = -k1_max; k1 <= k1_max; ++k1) {
      const Complex c(g(rng), g(rng));
      if (k0 == 0 && k1 == 0) continue;
      const Complex coeff = c / (1.0 + k0 * k0 + k1 * k1);
      for (int p = 0; p < torus.point_count(); ++p) {
        double phase = w * k0 * torus.coordinate(p, 0);
        if (n == 2) phase += w * k1 * torus.coordinate(p, 1);
        u.values()[p] += coeff * std::polar(1.0, phase);
      }
    }
  return u;
}

// ------------------------------------------------------------------ campaigns

CampaignResult rellich_campaign(const CoefficientField& b, const RellichOptions& options) {
  if (!b.is_hermitian(1e-12)) throw InvalidArgument("rellich_campaign: coefficient must be hermitian");
  if (options.samples < 1) throw InvalidArgument("rellich_campaign: need at least one sample");
  CampaignResult result;
  result.id = "rellich";
  result.seed = options.seed;
  result.exploratory = !is_real(b);
  if (result.exploratory) result.notes.push_back("complex hermitian coefficient: identities recorded as data");
  const bool gate = !result.exploratory;

  const Torus& t = b.torus();
  const auto ops = make_boundary_operators(b);
  const int n = t.dim_n();
  const MultiVector e0 = MultiVector::basis(n, kNormal);
  const Matrix hook = hook_matrix(e0), wedge = wedge_matrix(e0);
  const Matrix pn = normal_projector(n), pt = tangential_projector(n);
  std::vector<Matrix> hook_b, wedge_b, normal_b, tangential_b;
  for (const Matrix& m : b.maps()) {
    hook_b.push_back(hook.adjoint() * hook * m);
    wedge_b.push_back(wedge.adjoint() * wedge * m);
    normal_b.push_back(pn * m * pn);
    tangential_b.push_back(pt * m * pt);
  }
  const Eigen::Index r = ops->basis().dim();
  const Matrix id = Matrix::Identity(r, r);
  const Matrix nb_plus = 0.5 * (id + ops->reflection_b()), nb_minus = 0.5 * (id - ops->reflection_b());

  std::mt19937_64 rng(options.seed);
  for (int side : {+1, -1}) {
    const Matrix& proj = side > 0 ? ops->hardy_plus() : ops->hardy_minus();
    double worst_hook = 0.0, worst_wedge = 0.0, worst_component = 0.0;
    double np_lo = std::numeric_limits<double>::infinity(), np_hi = 0.0;
    double nm_lo = std::numeric_limits<double>::infinity(), nm_hi = 0.0;
    const int count = side > 0 ? (options.samples + 1) / 2 : options.samples / 2;
    for (int s = 0; s < count; ++s) {
      const Vector c = proj * random_coords(r, rng);
      const Vector f = ops->basis().ambient(c);
      const Complex full = pointwise_pairing(t, b.maps(), f, f);
      worst_hook = std::max(worst_hook, relative_gap(full.real(), 2.0 * pointwise_pairing(t, hook_b, f, f).real()));
      worst_wedge = std::max(worst_wedge, relative_gap(full.real(), 2.0 * pointwise_pairing(t, wedge_b, f, f).real()));
      worst_component = std::max(
          worst_component, relative_gap(pointwise_pairing(t, normal_b, f, f), pointwise_pairing(t, tangential_b, f, f)));
      const double fn = c.norm();
      const double a = (nb_plus * c).norm() / fn, bm = (nb_minus * c).norm() / fn;
      np_lo = std::min(np_lo, a);
      np_hi = std::max(np_hi, a);
      nm_lo = std::min(nm_lo, bm);
      nm_hi = std::max(nm_hi, bm);
    }
    CampaignPoint point;
    point.parameters = {{"side", static_cast<double>(side)}, {"samples", static_cast<double>(count)}};
    point.measurements = {
        Measurement::at_most("rellich_normal_error", worst_hook, options.tolerance,
                             "(Bf,f) equals twice the real normal-component pairing", gate),
        Measurement::at_most("rellich_tangential_error", worst_wedge, options.tolerance,
                             "(Bf,f) equals twice the real tangential-component pairing", gate),
        Measurement::at_most("component_error", worst_component, options.tolerance,
                             "normal and tangential energies of a Hardy trace agree", gate),
        Measurement::report("nb_plus_ratio_min", np_lo, "lower constant of ||N_B^+ f|| against ||f||"),
        Measurement::report("nb_plus_ratio_max", np_hi, "upper constant of ||N_B^+ f|| against ||f||"),
        Measurement::report("nb_minus_ratio_min", nm_lo, "lower constant of ||N_B^- f|| against ||f||"),
        Measurement::report("nb_minus_ratio_max", nm_hi, "upper constant of ||N_B^- f|| against ||f||"),
    };
    result.points.push_back(std::move(point));
  }
  return result;
}

CampaignResult block_campaign(const CoefficientField& b, const BlockOptions& options) {
  if (!b.is_block(1e-12)) throw InvalidArgument("block_campaign: coefficient must commute with the normal/tangential splitting");
  CampaignResult result;
  result.id = "block";
  const auto ops = make_boundary_operators(b, options.degree);
  const Matrix& e = ops->cauchy();
  const Matrix& nb = ops->reflection_b();
  const Eigen::Index r = e.rows();
  const Matrix id = Matrix::Identity(r, r);
  const Matrix nonkernel = e * e;

  CampaignPoint base;
  base.parameters = {{"degree", static_cast<double>(options.degree)}};
  base.measurements = {
      Measurement::at_most("anticommutator", linalg::spectral_norm(e * nb + nb * e), options.tolerance,
                           "E N_B + N_B E vanishes for block coefficients"),
      Measurement::at_most("reflection_defect", linalg::spectral_norm(nb - ops->reflection()), options.tolerance,
                           "N_B equals N for block coefficients"),
      Measurement::report("kernel_dim", static_cast<double>(ops->spectral().kernel_count()),
                          "closed form compared on the non-kernel range"),
  };
  result.points.push_back(std::move(base));

  const std::vector<std::pair<std::string, Complex>> lambdas{
      {"1", 1.0}, {"-1", -1.0}, {"2i(1+delta)", Complex(0.0, 2.0 * (1.0 + options.delta))}};
  for (const auto& [label, lam] : lambdas) {
    const Matrix generic = linalg::checked_solve(lam * id - e * nb, nonkernel, 0.0);
    const Matrix closed = (lam * id - nb * e) * nonkernel / (lam * lam + 1.0);
    CampaignPoint p;
    p.parameters = {{"lambda_re", lam.real()}, {"lambda_im", lam.imag()}};
    p.note = "lambda = " + label;
    p.measurements = {Measurement::at_most("closed_form_error", (generic - closed).norm() / closed.norm(),
                                           options.tolerance,
                                           "(lambda - E N_B)^{-1} = (lambda - N_B E) / (lambda^2 + 1) off the kernel")};
    result.points.push_back(std::move(p));
  }

  // lambda = i is the degenerate point: transmission must refuse it.
  CampaignPoint degenerate;
  degenerate.parameters = {{"lambda_re", 0.0}, {"lambda_im", 1.0}};
  degenerate.note = "lambda = i";
  double rejected = 0.0;
  try {
    (void)solve_transmission(ops, Field(b.torus()), Complex(1.0, 1.0), Complex(-1.0, 1.0));
  } catch (const WellPosednessFailure&) {
    rejected = 1.0;
  }
  degenerate.measurements = {Measurement::at_least("degenerate_rejected", rejected, 1.0,
                                                   "lambda^2 + 1 = 0 is rejected for block coefficients")};
  result.points.push_back(std::move(degenerate));
  return result;
}

CampaignResult perturbation_campaign(const CoefficientField& b0, const CoefficientField& direction,
                                     const PerturbationOptions& options) {
  if (options.eps.empty()) throw InvalidArgument("perturbation_campaign: empty eps list");
  CampaignResult result;
  result.id = "perturbation";
  result.seed = options.seed;
  const auto base = make_boundary_operators(b0);
  const QuadraticConstants c0 = quadratic_constants(base->spectral());
  const std::vector<std::pair<std::string, BvpKind>> kinds{
      {"neumann", BvpKind::neumann}, {"regularity", BvpKind::regularity}, {"neu_perp", BvpKind::neu_perp}};
  std::vector<Matrix> s0;
  for (const auto& [name, kind] : kinds) s0.push_back(solution_operator(*base, kind));
  result.notes.push_back("dirichlet shares the neu_perp solution operator");

  std::map<std::string, std::vector<double>> ratios;
  {
    CampaignPoint zero;
    zero.parameters = {{"eps", 0.0}};
    const auto same = make_boundary_operators(b0.perturbed(direction, 0.0));
    zero.measurements.push_back(Measurement::at_most("cauchy_difference", linalg::spectral_norm(same->cauchy() - base->cauchy()),
                                                     0.0, "zero perturbation leaves E unchanged"));
    zero.measurements.push_back(Measurement::report("c_low", c0.c_low, "lower quadratic-estimate constant"));
    zero.measurements.push_back(Measurement::report("c_high", c0.c_high, "upper quadratic-estimate constant"));
    result.points.push_back(std::move(zero));
  }
  for (double eps : options.eps) {
    CampaignPoint point;
    point.parameters = {{"eps", eps}};
    const CoefficientField be = b0.perturbed(direction, eps);
    point.measurements.push_back(Measurement::report("kappa", be.kappa(), "accretivity constant of the perturbed coefficient"));
    if (!be.is_accretive()) {
      point.note = fmt::format("rejected: kappa = {:.3e}", be.kappa());
      result.notes.push_back(fmt::format("eps = {:.3g} rejected (kappa = {:.3e})", eps, be.kappa()));
      result.points.push_back(std::move(point));
      continue;
    }
    try {
      const auto ops = make_boundary_operators(be);
      const QuadraticConstants c = quadratic_constants(ops->spectral());
      point.measurements.push_back(Measurement::at_least("c_low", c.c_low, 0.5 * c0.c_low,
                                                         "lower quadratic constant stays above half its base value"));
      point.measurements.push_back(Measurement::report("c_high", c.c_high, "upper quadratic-estimate constant"));
      const double er = linalg::spectral_norm(ops->cauchy() - base->cauchy()) / eps;
      ratios["cauchy_ratio"].push_back(er);
      point.measurements.push_back(Measurement::report("cauchy_ratio", er, "||E_eps - E_0|| / eps"));
      for (std::size_t i = 0; i < kinds.size(); ++i) {
        const double sr = linalg::spectral_norm(solution_operator(*ops, kinds[i].second) - s0[i]) / eps;
        const std::string key = kinds[i].first + "_ratio";
        ratios[key].push_back(sr);
        point.measurements.push_back(Measurement::report(key, sr, "||S_eps - S_0|| / eps for " + kinds[i].first));
      }
    } catch (const Error& e) {
      point.note = std::string("decomposition failed: ") + e.what();
      result.notes.push_back(fmt::format("eps = {:.3g}: {}", eps, e.what()));
    }
    result.points.push_back(std::move(point));
  }

  CampaignPoint spread;
  spread.note = "ratio spread across eps";
  for (const auto& [key, values] : ratios) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double s = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
    spread.measurements.push_back(Measurement::at_most(key + "_spread", s, options.spread_limit,
                                                       "Lipschitz ratio bounded by one constant across eps"));
  }
  result.points.push_back(std::move(spread));
  return result;
}

CampaignResult kkpt_scan(const KkptOptions& options) {
  if (options.k.empty() || options.points.empty()) throw InvalidArgument("kkpt_scan: empty parameter grid");
  CampaignResult result;
  result.id = "kkpt_scan";
  // cond[name][grid][k]
  std::map<std::string, std::vector<std::vector<double>>> cond;
  for (std::size_t g = 0; g < options.points.size(); ++g) {
    const Torus t(1, options.points[g], options.period);
    for (std::size_t j = 0; j < options.k.size(); ++j) {
      const double k = options.k[j];
      const auto ops = make_boundary_operators(families::kkpt(t, k));
      CampaignPoint point;
      point.parameters = {{"N", static_cast<double>(options.points[g])}, {"k", k}};
      const double en = linalg::spectral_norm(ops->cauchy());
      point.measurements.push_back(Measurement::within("cauchy_norm", en, 1.0 - options.norm_tolerance,
                                                       1.0 + options.norm_tolerance,
                                                       "||E|| = 1 for the self-adjoint counterexample family"));
      const WellposednessReport rep = wellposedness_report(*ops);
      for (const auto& [name, c] : rep.condition_numbers) {
        auto& table = cond[name];
        table.resize(options.points.size(), std::vector<double>(options.k.size(), kNaN));
        table[g][j] = c;
        point.measurements.push_back(Measurement::report("cond:" + name, c, "condition number of " + name));
      }
      result.points.push_back(std::move(point));
    }
  }

  CampaignPoint trend;
  trend.note = "growth in k and under refinement at the largest k";
  int monotone = 0;
  std::string names;
  for (const auto& [name, table] : cond) {
    bool increasing = true;
    for (const auto& row : table)
      for (std::size_t j = 1; j < row.size(); ++j) increasing = increasing && row[j] > row[j - 1];
    const double coarse = table.front().back(), fine = table.back().back();
    const bool refines = table.size() < 2 || fine > coarse;
    const double growth = coarse > 0.0 ? fine / coarse : kNaN;
    trend.measurements.push_back(Measurement::report("refinement_growth:" + name, growth,
                                                     "condition growth under grid refinement at the largest k"));
    const bool proxy = fine > 1e10 || growth > 10.0;
    trend.measurements.push_back(Measurement::report("failure_proxy:" + name, proxy ? 1.0 : 0.0,
                                                     "condition above 1e10 or growing more than tenfold per doubling"));
    if (increasing && refines) {
      ++monotone;
      names += (names.empty() ? "" : ",") + name;
    }
  }
  trend.measurements.push_back(Measurement::at_least(
      "monotone_condition_numbers", monotone, 1.0,
      "some boundary-operator condition number grows with k and under refinement"));
  if (!names.empty()) result.notes.push_back("monotone: " + names);
  result.points.push_back(std::move(trend));
  return result;
}

CampaignResult psi_comparability(const CoefficientField& b, int samples, std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("psi_comparability: need at least one sample");
  CampaignResult result;
  result.id = "psi_comparability";
  result.seed = seed;
  const auto ops = make_boundary_operators(b);
  const SpectralDecomposition& dec = ops->spectral();
  QuadratureOptions q, psi;
  psi.symbol = QuadraticSymbol::psi_exp;
  std::mt19937_64 rng(seed);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vector f = random_coords(dec.dim(), rng);
    const double r = quadratic_norm(dec, f, q) / quadratic_norm(dec, f, psi);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const double factor = std::max(hi, 1.0 / lo);
  CampaignPoint p;
  p.parameters = {{"samples", static_cast<double>(samples)}};
  p.measurements = {Measurement::report("ratio_min", lo, "smallest q/psi quadratic-norm ratio"),
                    Measurement::report("ratio_max", hi, "largest q/psi quadratic-norm ratio"),
                    Measurement::at_most("factor", factor, 2.0,
                                         "quadratic norms from q_t and z exp(-|z|) are comparable", b.is_hermitian(1e-12))};
  result.points.push_back(std::move(p));
  return result;
}

CampaignResult hodge_campaign(const CoefficientField& b) {
  CampaignResult result;
  result.id = "hodge";
  const HodgeSplitting h = hodge_splitting(b);
  CampaignPoint p;
  p.parameters = {{"range_dim", static_cast<double>(h.range_dim)}, {"null_dim", static_cast<double>(h.null_dim)}};
  p.measurements = {
      Measurement::at_least("range_projection_norm", h.range_projection_norm, 1.0 - 1e-9, "a nonzero projection has norm >= 1"),
      Measurement::at_least("null_projection_norm", h.null_projection_norm, 1.0 - 1e-9, "a nonzero projection has norm >= 1"),
      Measurement::at_most("splitting_constant", h.constant, 1e8, "the splitting is topological (finite constant)"),
      Measurement::report("dimension_total", static_cast<double>(h.range_dim + h.null_dim), "range plus null dimension"),
  };
  if (is_identity(b)) {
    p.measurements.push_back(Measurement::within("identity_range_norm", h.range_projection_norm, 1.0 - 1e-9, 1.0 + 1e-9,
                                                 "orthogonal projections for B = I"));
    p.measurements.push_back(Measurement::within("identity_null_norm", h.null_projection_norm, 1.0 - 1e-9, 1.0 + 1e-9,
                                                 "orthogonal projections for B = I"));
  }
  result.points.push_back(std::move(p));
  return result;
}

CampaignResult duality_campaign(const CoefficientField& b, double tolerance) {
  CampaignResult result;
  result.id = "duality";
  const CoefficientField bs = b.adjoint();
  const Torus& t = b.torus();
  auto rel = [](const Matrix& a, const Matrix& ref) { return (a - ref).norm() / ref.norm(); };
  const Matrix tb = adjoint_in_duality(assemble_TB(b), b).entries;
  const Matrix n = assemble_N(t).entries;
  const Matrix nb = assemble_NB(b).reflection.entries;
  CampaignPoint p;
  p.parameters = {{"n", static_cast<double>(t.dim_n())}, {"N", static_cast<double>(t.points_per_axis())}};
  p.measurements = {
      Measurement::at_most("generator_defect", rel(tb, -assemble_TB(bs).entries), tolerance,
                           "the dual of T_B is -T_{B*}"),
      Measurement::at_most("reflection_defect", rel(adjoint_in_duality({n, "full"}, b).entries, n), tolerance,
                           "N is self-dual"),
      Measurement::at_most("perturbed_reflection_defect",
                           rel(adjoint_in_duality({nb, "full"}, b).entries, assemble_NB_hut(bs).reflection.entries),
                           tolerance, "the dual of N_B is the complementary reflection of B*"),
  };
  result.points.push_back(std::move(p));
  return result;
}

CampaignResult offdiag_campaign(const CoefficientField& b, const OffDiagonalOptions& options) {
  CampaignResult result;
  result.id = "offdiag";
  result.exploratory = true;
  const Torus& t = b.torus();
  const OperatorMatrix tb = assemble_TB(b);
  const Eigen::Index dim = tb.dim();
  Vector source = Vector::Zero(dim);
  source[kNormal.bits()] = 1.0;  // e0 at the first grid point
  const Matrix k = Matrix::Identity(dim, dim) + Complex(0.0, options.t) * tb.entries;
  const Vector u = linalg::checked_solve(k, source);
  const int ld = t.lambda_dim();
  std::vector<double> dist(static_cast<std::size_t>(t.point_count()));
  for (int p = 0; p < t.point_count(); ++p) {
    double d2 = 0.0;
    for (int a = 0; a < t.dim_n(); ++a) {
      const double x = t.coordinate(p, a);
      const double d = std::min(x, t.period() - x);
      d2 += d * d;
    }
    dist[static_cast<std::size_t>(p)] = std::sqrt(d2);
  }
  const double total = u.squaredNorm();
  for (double ratio : options.distance_ratios) {
    double outside = 0.0;
    for (int p = 0; p < t.point_count(); ++p)
      if (dist[static_cast<std::size_t>(p)] > ratio * options.t)
        outside += u.segment(static_cast<Eigen::Index>(p) * ld, ld).squaredNorm();
    CampaignPoint point;
    point.parameters = {{"t", options.t}, {"distance_over_t", ratio}};
    point.measurements = {Measurement::at_most("mass_fraction", outside / total, options.mass_limit,
                                               "resolvent mass decays away from the source", false)};
    result.points.push_back(std::move(point));
  }
  return result;
}

CampaignResult sector_campaign(const std::vector<NamedCoefficient>& families, double constant_tolerance,
                               double variable_tolerance) {
  if (families.empty()) throw InvalidArgument("sector_campaign: no coefficients given");
  CampaignResult result;
  result.id = "sector";
  for (std::size_t i = 0; i < families.size(); ++i) {
    const CoefficientField& b = families[i].field;
    const auto ops = make_boundary_operators(b);
    const double tol = b.is_constant(1e-14) ? constant_tolerance : variable_tolerance;
    CampaignPoint p;
    p.parameters = {{"family", static_cast<double>(i)}, {"omega", ops->spectral().omega()}};
    p.note = families[i].name;
    p.measurements = {Measurement::at_least("min_sector_margin", ops->spectral().min_sector_margin(), -tol,
                                            "non-kernel spectrum lies in the bisector of angle omega"),
                      Measurement::report("kappa", b.kappa(), "accretivity constant"),
                      Measurement::report("sup_norm", b.sup_norm(), "coefficient sup norm")};
    result.points.push_back(std::move(p));
  }
  return result;
}

}  // namespace diracbvp::diagnostics
