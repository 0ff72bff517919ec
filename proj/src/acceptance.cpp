#include "diracbvp/acceptance.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "diracbvp/bvp_solver.hpp"
#include "diracbvp/coefficients.hpp"
#include "diracbvp/diagnostics.hpp"
#include "diracbvp/errors.hpp"
#include "diracbvp/linalg.hpp"
#include "diracbvp/oracles.hpp"

namespace diracbvp::acceptance {

namespace {

using diagnostics::CampaignResult;

struct Outcome {
  bool passed = false;
  std::string detail;
};

double rel(const Vector& a, const Vector& b) {
  const double s = std::max(a.norm(), b.norm());
  return s == 0.0 ? 0.0 : (a - b).norm() / s;
}

std::vector<double> log_times(double lo, double hi, int count) {
  std::vector<double> ts;
  for (int i = 0; i < count; ++i) ts.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  return ts;
}

std::string campaign_detail(const CampaignResult& c) {
  const auto f = c.failures();
  return f.empty() ? "" : " [" + f.front() + (f.size() > 1 ? fmt::format(" +{} more", f.size() - 1) : "") + "]";
}

// 1. exterior algebra identities
Outcome algebra(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  auto random_mv = [&](int n) {
    MultiVector f(n);
    for (int b = 0; b < f.size(); ++b) f.coeffs()[b] = Complex(g(rng), g(rng));
    return f;
  };
  auto random_vec = [&](int n) {
    Eigen::VectorXd a(n + 1);
    for (int i = 0; i <= n; ++i) a[i] = g(rng);
    return MultiVector::vector(n, a);
  };
  double worst = 0.0;
  auto check = [&](const MultiVector& lhs, const MultiVector& rhs, double scale) {
    worst = std::max(worst, (lhs - rhs).norm() / scale);
  };
  for (int n : {1, 2})
    for (int trial = 0; trial < 1000; ++trial) {
      const MultiVector a = random_vec(n), b = random_vec(n);
      const MultiVector f = random_mv(n), gg = random_mv(n), h = random_mv(n);
      const double ab = a.norm() * b.norm(), fgh = f.norm() * gg.norm() * h.norm();
      check(wedge(a, b), -1.0 * wedge(b, a), ab);
      check(wedge(a, a), MultiVector(n), a.norm() * a.norm());
      check(wedge(f, wedge(gg, h)), wedge(wedge(f, gg), h), fgh);
      check(hook(f, hook(gg, h)), hook(wedge(gg, f), h), fgh);
      check(hook(a, wedge(b, f)), dot(a, b) * f - wedge(b, hook(a, f)), ab * f.norm());
      check(mu(mu_star(f)) + mu_star(mu(f)), f, f.norm());
      check(m_op(m_op(f)), f, f.norm());
    }
  return {worst <= 1e-12, fmt::format("max relative error {:.2e} (limit 1e-12) over 2x1000 draws", worst)};
}

// 2. grid solves against the per-mode constant-coefficient oracle
Outcome symbol_oracle(std::uint64_t seed) {
  const Torus t(1, 256);
  families::Rng rng(seed);
  const std::vector<double> ts = log_times(0.01, 3.0, 10);
  double worst = 0.0;
  for (int trial = 0; trial < 2; ++trial) {
    const Matrix a = trial == 0 ? Matrix(Matrix::Identity(2, 2)) : families::random_accretive_matrix(2, rng);
    const auto ops = make_boundary_operators(CoefficientField::constant_vector_block(t, a));
    const ScalarField phi = diagnostics::smooth_data(t, seed + 1, 8);
    const BoundaryData reg = BoundaryData::regularity_from_potential(diagnostics::smooth_data(t, seed + 2, 8));
    const std::vector<std::pair<Solution, oracles::ConstantSolution>> cases{
        {solve_neumann(ops, phi), oracles::constant_solver(a, BoundaryData::neumann(phi))},
        {solve_regularity(ops, reg.field), oracles::constant_solver(a, reg)},
        {solve_neu_perp(ops, phi), oracles::constant_solver(a, BoundaryData::neu_perp(phi))},
    };
    for (const auto& [sol, oracle] : cases) {
      worst = std::max(worst, rel(ops->to_field(sol.field.trace()).data(), oracle.trace().data()));
      for (double s : ts) worst = std::max(worst, rel(sol.field.field_at(s).data(), oracle.at(s).data()));
    }
    const Solution dir = solve_dirichlet(ops, phi);
    const auto dir_oracle = oracles::constant_solver(a, BoundaryData::dirichlet(phi));
    worst = std::max(worst, rel(ops->to_field(dir.field.trace()).data(), dir_oracle.trace().data()));
    worst = std::max(worst, rel(dirichlet_value(dir.field, 0.0).values(), phi.values()));
    for (double s : ts) {
      worst = std::max(worst, rel(dir.field.field_at(s).data(), dir_oracle.at(s).data()));
      worst = std::max(worst, rel(dirichlet_value(dir.field, s).values(), dir_oracle.normal_at(s).values()));
    }
  }
  return {worst <= 1e-9, fmt::format("max relative deviation {:.2e} (limit 1e-9), A in {{I, random accretive}}", worst)};
}

// 3. regularity solve against the line Cauchy kernel
Outcome line_kernel() {
  const double period = 16.0, centre = 8.0, sigma = 0.4;
  const Torus t(1, 512, period);
  auto gaussian = [=](double x) { return std::exp(-(x - centre) * (x - centre) / (2.0 * sigma * sigma)); };
  auto potential = [=](double x) { return -(x - centre) / (sigma * sigma) * gaussian(x); };
  auto data = [=](double x) {
    const double u = (x - centre) / sigma;
    return (u * u - 1.0) / (sigma * sigma) * gaussian(x);
  };
  ScalarField psi(t);
  for (int p = 0; p < t.point_count(); ++p) psi.values()[p] = potential(t.coordinate(p, 0));
  const auto ops = make_boundary_operators(CoefficientField::identity(t));
  const Solution sol = solve_regularity(ops, BoundaryData::regularity_from_potential(psi).field);
  double num = 0.0, den = 0.0;
  for (double s : {0.2, 0.5, 0.8, 1.1, 1.5}) {
    const Field f = sol.field.field_at(s);
    for (double dx : {-1.0, -0.25, 0.5, 1.25}) {
      const int p = static_cast<int>(std::lround((centre + dx) / t.spacing()));
      const oracles::LineValue ref = oracles::cauchy_extension_line(data, centre - 7.0, centre + 7.0, s, t.coordinate(p, 0));
      num = std::max({num, std::abs(f.coeff(p, BasisIndex(1u)) - ref.normal), std::abs(f.coeff(p, BasisIndex(2u)) - ref.tangential)});
      den = std::max({den, std::abs(ref.normal), std::abs(ref.tangential)});
    }
  }
  const double err = num / den;
  return {err <= 1e-3, fmt::format("max deviation / max kernel value {:.2e} (limit 1e-3) at 20 points", err)};
}

// 4. sector membership of the non-kernel spectrum
Outcome sector(std::uint64_t seed) {
  const Torus t(1, 128);
  std::vector<diagnostics::NamedCoefficient> fams{
      {"identity", CoefficientField::identity(t)},
      {"block", families::smooth_block(t, seed)},
      {"real_symmetric", families::smooth_real_symmetric(t, seed)},
  };
  for (double k : {1.0, 2.0, 4.0}) fams.push_back({fmt::format("kkpt_{}", k), families::kkpt(t, k)});
  const CampaignResult c = diagnostics::sector_campaign(fams);
  return {c.passed(), fmt::format("min margin {:.3e} rad over {} families", c.min_of("min_sector_margin"), fams.size()) +
                          campaign_detail(c)};
}

// 5. Rellich identities
Outcome rellich(std::uint64_t seed) {
  double worst = 0.0;
  bool ok = true;
  std::string detail;
  for (const Torus& t : {Torus(1, 64), Torus(2, 8)}) {
    diagnostics::RellichOptions opt;
    opt.seed = seed;
    const CampaignResult c = diagnostics::rellich_campaign(families::smooth_real_symmetric(t, seed, 0.3), opt);
    ok = ok && c.passed();
    for (const char* name : {"rellich_normal_error", "rellich_tangential_error", "component_error"})
      worst = std::max(worst, c.max_of(name));
    detail += campaign_detail(c);
  }
  return {ok, fmt::format("max relative error {:.2e} (limit 1e-7), 100 fields each for n = 1, 2", worst) + detail};
}

// 6. block identities
Outcome block(std::uint64_t seed) {
  const CampaignResult c = diagnostics::block_campaign(families::smooth_block(Torus(1, 32), seed));
  return {c.passed(), fmt::format("anticommutator {:.2e}, N_B - N {:.2e}, closed form {:.2e} (limit 1e-9)",
                                  c.max_of("anticommutator"), c.max_of("reflection_defect"), c.max_of("closed_form_error")) +
                          campaign_detail(c)};
}

// 7. quadratic estimates in self-adjoint cases
Outcome quadratic(std::uint64_t seed) {
  const Torus t(1, 64);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  double worst_value = 0.0, worst_const = 0.0;
  for (double k : {0.0, 1.0, 4.0}) {
    const auto ops = make_boundary_operators(families::kkpt(t, k));
    const SpectralDecomposition& dec = ops->spectral();
    for (int s = 0; s < 5; ++s) {
      Vector f(dec.dim());
      for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = Complex(g(rng), g(rng));
      const double q = quadratic_norm(dec, f);
      const double exact = oracles::selfadjoint_qe_value(ops->generator(), f);
      worst_value = std::max(worst_value, std::abs(q * q - exact) / exact);
    }
    const QuadraticConstants c = quadratic_constants(dec);
    worst_const = std::max({worst_const, std::abs(c.c_low - 1.0 / std::sqrt(2.0)), std::abs(c.c_high - 1.0 / std::sqrt(2.0))});
  }
  return {worst_value <= 1e-4 && worst_const <= 1e-3,
          fmt::format("value error {:.2e} (limit 1e-4), constant error {:.2e} (limit 1e-3), A in {{I, KKPT 1, 4}}",
                      worst_value, worst_const)};
}

// 8. perturbation stability
Outcome perturbation(std::uint64_t seed) {
  const Torus t(1, 32);
  bool ok = true;
  std::string detail;
  for (int which = 0; which < 2; ++which) {
    const bool block_case = which == 0;
    const CoefficientField b0 = block_case ? families::smooth_block(t, seed) : families::smooth_real_symmetric(t, seed);
    families::DirectionOptions dir;
    dir.block_structured = block_case;
    diagnostics::PerturbationOptions opt;
    opt.seed = seed;
    const CampaignResult c = diagnostics::perturbation_campaign(b0, families::smooth_direction(t, seed + 7, dir), opt);
    ok = ok && c.passed();
    double spread = 0.0;
    for (const char* k : {"cauchy_ratio_spread", "neumann_ratio_spread", "regularity_ratio_spread", "neu_perp_ratio_spread"})
      spread = std::max(spread, c.max_of(k));
    detail += fmt::format("{}{}: worst spread {:.2f} (limit 3), min c_low {:.3f}", which ? "; " : "",
                          block_case ? "block" : "real symmetric", spread, c.min_of("c_low")) +
              campaign_detail(c);
  }
  return {ok, detail};
}

// 9. KKPT well-posedness landscape
Outcome kkpt() {
  const CampaignResult c = diagnostics::kkpt_scan();
  std::string monotone;
  for (const auto& n : c.notes) monotone += n;
  return {c.passed(), fmt::format("||E|| in [{:.8f}, {:.8f}]; {}", c.min_of("cauchy_norm"), c.max_of("cauchy_norm"),
                                  monotone.empty() ? "no monotone condition number" : monotone) +
                          campaign_detail(c)};
}

// 10. solution-norm equivalences and refinement stability
Outcome norm_equivalence(std::uint64_t seed) {
  double lo = 1e300, hi = 0.0, drift = 0.0;
  for (int family = 0; family < 4; ++family) {
    std::vector<std::vector<double>> ratios;
    for (int pts : {64, 128}) {
      const Torus t(1, pts);
      families::Rng rng(seed);
      const CoefficientField b = family == 0   ? CoefficientField::identity(t)
                                 : family == 1 ? families::smooth_real_symmetric(t, seed)
                                 : family == 2 ? families::smooth_accretive(t, seed)
                                               : CoefficientField::constant_vector_block(t, families::random_accretive_matrix(2, rng));
      const auto ops = make_boundary_operators(b);
      const ScalarField phi = diagnostics::smooth_data(t, seed + 3, 4);
      std::vector<double> r;
      for (const Solution& s : {solve_neumann(ops, phi), solve_dirichlet(ops, phi),
                                solve_regularity(ops, BoundaryData::regularity_from_potential(phi).field)}) {
        const NormSummary& m = s.report.norms;
        for (double v : {m.triplebar_dt, m.sup_t, m.nontangential}) r.push_back(v / m.trace);
      }
      ratios.push_back(r);
    }
    for (std::size_t i = 0; i < ratios[0].size(); ++i) {
      lo = std::min({lo, ratios[0][i], ratios[1][i]});
      hi = std::max({hi, ratios[0][i], ratios[1][i]});
      drift = std::max(drift, std::abs(ratios[1][i] / ratios[0][i] - 1.0));
    }
  }
  return {lo >= 1.0 / 50.0 && hi <= 50.0 && drift <= 0.2,
          fmt::format("ratios in [{:.3f}, {:.3f}] (limit [0.02, 50]), N-doubling drift {:.2e} (limit 0.2)", lo, hi, drift)};
}

// 11. duality identities
Outcome duality(std::uint64_t seed) {
  bool ok = true;
  double worst = 0.0;
  std::string detail;
  families::Rng rng(seed);
  const std::vector<CoefficientField> cases{families::smooth_accretive(Torus(1, 16), seed),
                                            families::smooth_accretive(Torus(2, 8), seed),
                                            CoefficientField::constant_vector_block(Torus(1, 16), families::random_accretive_matrix(2, rng))};
  for (const CoefficientField& b : cases) {
    const CampaignResult c = diagnostics::duality_campaign(b);
    ok = ok && c.passed();
    for (const char* k : {"generator_defect", "reflection_defect", "perturbed_reflection_defect"}) worst = std::max(worst, c.max_of(k));
    detail += campaign_detail(c);
  }
  return {ok, fmt::format("max relative defect {:.2e} (limit 1e-9)", worst) + detail};
}

// 12. Dirichlet second-order residual and Poisson factor
Outcome dirichlet(std::uint64_t seed) {
  const std::vector<double> ts = log_times(0.01, 2.0, 10);
  double residual = 0.0;
  for (const Torus& t : {Torus(1, 64), Torus(2, 16)}) {
    const auto ops = make_boundary_operators(families::smooth_real_symmetric(t, seed));
    const Solution sol = solve_dirichlet(ops, diagnostics::smooth_data(t, seed + 5, 3));
    for (double s : ts) residual = std::max(residual, second_order_residual(sol.field, s));
  }
  const Torus t(1, 64);
  const ScalarField u = diagnostics::smooth_data(t, seed + 6, 8);
  const Solution id = solve_dirichlet(make_boundary_operators(CoefficientField::identity(t)), u);
  double poisson = 0.0;
  for (double s : ts)
    poisson = std::max(poisson, (dirichlet_value(id.field, s).values() - oracles::poisson_extension(u, s).values()).norm() /
                                    u.values().norm());
  return {residual <= 1e-6 && poisson <= 1e-10,
          fmt::format("second-order residual {:.2e} (limit 1e-6), Poisson deviation {:.2e} (limit 1e-10)", residual, poisson)};
}

struct Criterion {
  int id;
  const char* name;
  double budget;
  std::function<Outcome(std::uint64_t)> run;
};

}  // namespace

std::vector<Row> run(const Options& options, const std::function<void(const Row&)>& on_row) {
  const std::vector<Criterion> all{
      {1, "algebra identities", 1.0, algebra},
      {2, "symbol oracle equivalence", 10.0, symbol_oracle},
      {3, "line Cauchy kernel", 30.0, [](std::uint64_t) { return line_kernel(); }},
      {4, "sector bound", 30.0, sector},
      {5, "Rellich identities", 60.0, rellich},
      {6, "block identities", 30.0, block},
      {7, "quadratic estimate oracle", 30.0, quadratic},
      {8, "perturbation stability", 180.0, perturbation},
      {9, "well-posedness landscape", 120.0, [](std::uint64_t) { return kkpt(); }},
      {10, "solution-norm equivalences", 120.0, norm_equivalence},
      {11, "duality", 30.0, duality},
      {12, "Dirichlet residual", 60.0, dirichlet},
  };
  std::vector<Row> rows;
  for (const Criterion& c : all) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), c.id) == options.only.end()) continue;
    Row row{c.id, c.name, false, "", 0.0, c.budget};
    const auto start = std::chrono::steady_clock::now();
    try {
      const Outcome o = c.run(options.seed);
      row.passed = o.passed;
      row.detail = o.detail;
    } catch (const std::exception& e) {
      row.detail = std::string("exception: ") + e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (row.seconds > row.budget_seconds) {
      row.passed = false;
      row.detail += fmt::format(" [time budget {:.0f} s exceeded]", row.budget_seconds);
    }
    if (on_row) on_row(row);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_row(const Row& row) {
  return fmt::format("[{}] {:>2}. {:<28} {:7.2f}s / {:>4.0f}s  {}", row.passed ? "PASS" : "FAIL", row.id, row.name,
                     row.seconds, row.budget_seconds, row.detail);
}

std::string format_table(const std::vector<Row>& rows) {
  std::string out;
  int passed = 0;
  for (const Row& r : rows) {
    out += format_row(r) + "\n";
    passed += r.passed ? 1 : 0;
  }
  out += fmt::format("{}/{} criteria passed\n", passed, rows.size());
  return out;
}

}  // namespace diracbvp::acceptance
