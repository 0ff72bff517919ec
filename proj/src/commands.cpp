#include "diracbvp/commands.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

#include "diracbvp/acceptance.hpp"
#include "diracbvp/coefficients.hpp"
#include "diracbvp/diagnostics.hpp"
#include "diracbvp/errors.hpp"
#include "diracbvp/io.hpp"
#include "diracbvp/oracles.hpp"

namespace diracbvp::cli {

namespace {

void emit(const Logger& log, const std::string& message) {
  if (log) log(message);
}

std::filesystem::path prepare_output(const RunConfig& config, CommandResult& result) {
  std::filesystem::create_directories(config.output);
  const auto path = config.output / "resolved_config.ini";
  io::write_file_atomic(path, config.to_text());
  result.files.push_back(path);
  return config.output;
}

void write(CommandResult& result, const std::filesystem::path& path, const std::string& content) {
  io::write_file_atomic(path, content);
  result.files.push_back(path);
}

ScalarField profile(const RunConfig& config, const Torus& torus) {
  const ProblemSpec& pr = config.problem;
  if (pr.profile.empty()) throw ConfigError("[problem] profile is required (mode, gaussian, step or csv)");
  if (pr.profile == "csv") return io::read_scalar_csv(pr.csv, torus);
  const double period = torus.period();
  const double center = pr.center.value_or(period / 2.0);
  ScalarField f(torus);
  for (int p = 0; p < torus.point_count(); ++p) {
    const double x = torus.coordinate(p, pr.axis);
    double v = 0.0;
    if (pr.profile == "mode") {
      v = std::cos(2.0 * std::numbers::pi * pr.mode * x / period);
    } else if (pr.profile == "gaussian") {
      const double d = std::remainder(x - center, period);
      v = std::exp(-d * d / (2.0 * pr.width * pr.width));
    } else {
      v = x < period / 2.0 ? 1.0 : -1.0;
    }
    f.values()[p] = pr.amplitude * v;
  }
  return f;
}

CoefficientField named_family(const std::string& family, const Torus& torus, std::uint64_t seed, double k,
                              double kappa_floor) {
  if (family == "identity") return CoefficientField::identity(torus);
  if (family == "kkpt") return families::kkpt(torus, k);
  if (family == "real_symmetric") return families::smooth_real_symmetric(torus, seed, kappa_floor);
  if (family == "accretive") return families::smooth_accretive(torus, seed);
  if (family == "block") return families::smooth_block(torus, seed);
  throw ConfigError("unsupported coefficient family '" + family + "'");
}

std::string norms_csv(const NormSummary& n, const std::vector<std::pair<std::string, double>>& extra) {
  std::string out = "name,value\n";
  for (const auto& [name, value] : std::vector<std::pair<std::string, double>>{
           {"trace", n.trace}, {"sup_t", n.sup_t}, {"triplebar_dt", n.triplebar_dt}, {"nontangential", n.nontangential}})
    out += name + "," + io::format_number(value) + "\n";
  for (const auto& [name, value] : extra) out += name + "," + io::format_number(value) + "\n";
  return out;
}

std::string samples_csv(const std::vector<const SolutionField*>& sides, bool second_order) {
  std::string out = "t,side,field_norm,normal_norm,second_order_residual\n";
  for (const SolutionField* s : sides) {
    const BoundaryOperators& ops = s->operators();
    for (double t : s->t_samples()) {
      const Vector f = s->at(t);
      out += fmt::format("{},{},{},{},{}\n", io::format_number(t), s->side() > 0 ? "upper" : "lower",
                         io::format_number(ops.field_norm(f)),
                         io::format_number(std::sqrt(ops.torus().cell_weight()) * normal_component(ops, f).values().norm()),
                         second_order ? io::format_number(second_order_residual(*s, t)) : "");
    }
  }
  return out;
}

int gate_report(const SolveReport& report, const BvpOptions& tol) {
  return report.boundary_residual <= tol.residual_tol && report.hardy_residual <= tol.hardy_tol ? kOk : kNumerical;
}

constexpr double kRefinementGrowthLimit = 10.0;

/// Ratio of the boundary operator's condition number at N to the same number at N/2.
std::optional<double> refinement_growth(const RunConfig& config, const BoundaryData& data, const SolveReport& report) {
  if (report.condition_numbers.empty() || config.torus.points < 16 || config.coefficient.family == "csv")
    return std::nullopt;
  TorusSpec coarse_spec = config.torus;
  coarse_spec.points /= 2;
  const Torus coarse = coarse_spec.make();
  const auto ops = make_boundary_operators(make_coefficient(config, coarse), data.degree, config.tolerances);
  const auto& [name, fine] = report.condition_numbers.front();
  Matrix k;
  if (name == "E-N_A") k = ops->cauchy() - ops->reflection_b();
  else if (name == "E+N") k = ops->cauchy() + ops->reflection();
  else if (name == "E-N") k = ops->cauchy() - ops->reflection();
  else return std::nullopt;
  return fine / condition_number(k);
}

double relative(const Vector& a, const Vector& b) {
  const double s = std::max(a.norm(), b.norm());
  return s == 0.0 ? 0.0 : (a - b).norm() / s;
}

}  // namespace

CoefficientField make_coefficient(const RunConfig& config, const Torus& torus) {
  const CoefficientSpec& co = config.coefficient;
  if (co.family == "scaled_identity") return CoefficientField::scaled_identity(torus, co.scale);
  if (co.family == "constant") {
    const int side = torus.dim_n() + 1;
    if (co.matrix.size() != static_cast<std::size_t>(side * side))
      throw ConfigError(fmt::format("[coefficient] matrix needs {} entries", side * side));
    Matrix a(side, side);
    for (int i = 0; i < side; ++i)
      for (int j = 0; j < side; ++j) a(i, j) = co.matrix[static_cast<std::size_t>(i * side + j)];
    return CoefficientField::constant_vector_block(torus, a);
  }
  if (co.family == "csv") return io::read_coefficient_csv(co.csv, torus);
  return named_family(co.family, torus, config.coefficient_seed(), co.k, co.kappa_floor);
}

BoundaryData make_boundary_data(const RunConfig& config, const Torus& torus) {
  if (!config.problem.kind) throw ConfigError("[problem] kind is required");
  const ScalarField data = profile(config, torus);
  switch (*config.problem.kind) {
    case BvpKind::neumann: return BoundaryData::neumann(data);
    case BvpKind::neu_perp: return BoundaryData::neu_perp(data);
    case BvpKind::dirichlet: return BoundaryData::dirichlet(data);
    case BvpKind::regularity: return BoundaryData::regularity_from_potential(data);
    case BvpKind::transmission: {
      if (config.problem.degree != 1)
        throw ConfigError("[problem] transmission profiles are scalar and need degree = 1");
      Field g(torus);
      for (int p = 0; p < torus.point_count(); ++p) g.coeff(p, BasisIndex(1u)) = data.values()[p];
      return BoundaryData::transmission(g, 1, config.problem.alpha_plus, config.problem.alpha_minus);
    }
  }
  throw ConfigError("[problem] unsupported kind");
}

CommandResult cmd_solve(const RunConfig& config, const Logger& log) {
  const Torus torus = config.torus.make();
  const BoundaryData data = make_boundary_data(config, torus);
  CommandResult result;
  const auto dir = prepare_output(config, result);
  emit(log, fmt::format("assembling {} on n = {}, N = {}", config.coefficient.family, torus.dim_n(), torus.points_per_axis()));
  const auto ops = make_boundary_operators(make_coefficient(config, torus), data.degree, config.tolerances);
  emit(log, "solving " + to_string(data.kind));

  SolveReport report;
  Vector trace;
  std::vector<const SolutionField*> sides;
  std::optional<Solution> single;
  std::optional<TransmissionSolution> pair;
  switch (data.kind) {
    case BvpKind::neumann: single = solve_neumann(ops, data.scalar); break;
    case BvpKind::neu_perp: single = solve_neu_perp(ops, data.scalar); break;
    case BvpKind::dirichlet: single = solve_dirichlet(ops, data.scalar); break;
    case BvpKind::regularity: single = solve_regularity(ops, data.field); break;
    case BvpKind::transmission:
      pair = solve_transmission(ops, data.field, data.alpha_plus, data.alpha_minus);
      break;
  }
  if (single) {
    report = single->report;
    trace = single->field.trace();
    sides.push_back(&single->field);
  } else {
    report = pair->report;
    trace = pair->trace;
    sides = {&pair->upper, &pair->lower};
  }

  const std::optional<double> growth = refinement_growth(config, data, report);
  if (growth) report.extra.emplace_back("condition_refinement_ratio", *growth);

  write(result, dir / "report.txt", report.to_text());
  write(result, dir / "trace.csv", io::field_csv(ops->to_field(trace)));
  write(result, dir / "samples.csv", samples_csv(sides, data.kind == BvpKind::dirichlet));
  write(result, dir / "norms.csv", norms_csv(report.norms, report.extra));
  result.exit_code = gate_report(report, config.tolerances);
  result.summary = fmt::format("{}: boundary residual {:.3e}, hardy residual {:.3e}{}", to_string(data.kind),
                               report.boundary_residual, report.hardy_residual,
                               result.exit_code == kOk ? "" : " (above tolerance)");
  if (growth && *growth > kRefinementGrowthLimit) {
    result.exit_code = kWellPosedness;
    result.summary += fmt::format("\nwell-posedness failure: condition number {:.6e} grew {:.2f}x under N doubling",
                                  report.condition_numbers.front().second, *growth);
  }
  return result;
}

CommandResult cmd_campaign(const RunConfig& config, const Logger& log) {
  const CampaignSpec& ca = config.campaign;
  if (ca.id.empty()) throw ConfigError("[campaign] id is required");
  const Torus torus = config.torus.make();
  CommandResult result;
  const auto dir = prepare_output(config, result);
  emit(log, "running campaign " + ca.id);

  diagnostics::CampaignResult res;
  if (ca.id == "kkpt") {
    diagnostics::KkptOptions opt;
    opt.k = ca.k;
    opt.points = ca.points;
    opt.period = torus.period();
    opt.norm_tolerance = ca.tolerance.value_or(opt.norm_tolerance);
    res = diagnostics::kkpt_scan(opt);
  } else if (ca.id == "sector") {
    std::vector<diagnostics::NamedCoefficient> fams;
    for (const auto& name : ca.families) {
      if (name == "kkpt") {
        for (double k : ca.k) fams.push_back({fmt::format("kkpt_{}", k), families::kkpt(torus, k)});
      } else {
        fams.push_back({name, named_family(name, torus, config.coefficient_seed(), config.coefficient.k,
                                           config.coefficient.kappa_floor)});
      }
    }
    if (fams.empty()) throw ConfigError("[campaign] empty campaign grid");
    res = diagnostics::sector_campaign(fams);
  } else {
    const CoefficientField b = make_coefficient(config, torus);
    if (ca.id == "rellich") {
      diagnostics::RellichOptions opt{ca.samples, config.seed, ca.tolerance.value_or(1e-7)};
      res = diagnostics::rellich_campaign(b, opt);
    } else if (ca.id == "block") {
      diagnostics::BlockOptions opt{ca.delta, ca.tolerance.value_or(1e-9), config.problem.degree};
      res = diagnostics::block_campaign(b, opt);
    } else if (ca.id == "perturbation") {
      families::DirectionOptions dir_opt;
      dir_opt.block_structured = b.is_block();
      diagnostics::PerturbationOptions opt;
      opt.eps = ca.eps;
      opt.seed = config.seed;
      res = diagnostics::perturbation_campaign(b, families::smooth_direction(torus, config.seed + 1, dir_opt), opt);
    } else if (ca.id == "psi") {
      res = diagnostics::psi_comparability(b, ca.samples, config.seed);
    } else if (ca.id == "hodge") {
      res = diagnostics::hodge_campaign(b);
    } else if (ca.id == "duality") {
      res = diagnostics::duality_campaign(b, ca.tolerance.value_or(1e-9));
    } else {
      diagnostics::OffDiagonalOptions opt;
      opt.t = ca.t;
      opt.distance_ratios = ca.ratios;
      res = diagnostics::offdiag_campaign(b, opt);
    }
  }
  res.seed = config.seed;
  diagnostics::write_campaign(res, dir);
  result.files.push_back(dir / (res.id + ".csv"));
  result.files.push_back(dir / (res.id + "_summary.txt"));
  result.exit_code = res.passed() ? kOk : kGatingFailure;
  result.summary = res.summary();
  return result;
}

CommandResult cmd_oracle(const RunConfig& config, const Logger& log) {
  const Torus torus = config.torus.make();
  const CoefficientField b = make_coefficient(config, torus);
  if (!b.is_constant()) throw ConfigError("[coefficient] the oracle comparison needs a constant coefficient");
  const BoundaryData data = make_boundary_data(config, torus);
  if (data.kind == BvpKind::transmission) throw ConfigError("[problem] the oracle does not cover transmission");
  CommandResult result;
  const auto dir = prepare_output(config, result);
  emit(log, "comparing grid solve with the per-mode oracle for " + to_string(data.kind));

  const auto ops = make_boundary_operators(b, 1, config.tolerances);
  const Solution sol = data.kind == BvpKind::neumann     ? solve_neumann(ops, data.scalar)
                       : data.kind == BvpKind::neu_perp  ? solve_neu_perp(ops, data.scalar)
                       : data.kind == BvpKind::dirichlet ? solve_dirichlet(ops, data.scalar)
                                                         : solve_regularity(ops, data.field);
  const oracles::ConstantSolution oracle = oracles::constant_solver(b.vector_block(0), data);

  std::vector<double> ts{0.0};
  for (int i = 0; i < 10; ++i) ts.push_back(0.01 * std::pow(300.0, i / 9.0));
  std::string csv = "t,grid_norm,oracle_norm,max_deviation\n";
  double worst = 0.0;
  for (double t : ts) {
    const Vector grid = sol.field.field_at(t).data();
    const Vector ref = oracle.at(t).data();
    const double dev = relative(grid, ref);
    worst = std::max(worst, dev);
    const double w = std::sqrt(torus.cell_weight());
    csv += fmt::format("{},{},{},{}\n", io::format_number(t), io::format_number(w * grid.norm()),
                       io::format_number(w * ref.norm()), io::format_number(dev));
  }
  write(result, dir / "oracle.csv", csv);
  result.exit_code = worst <= config.oracle_tolerance ? kOk : kGatingFailure;
  result.summary = fmt::format("max relative deviation {:.3e} (tolerance {:.1e})", worst, config.oracle_tolerance);
  return result;
}

CommandResult cmd_verify(const RunConfig& config, const Logger& log) {
  CommandResult result;
  const auto rows = acceptance::run({}, [&](const acceptance::Row& row) { emit(log, acceptance::format_row(row)); });
  result.summary = acceptance::format_table(rows);
  std::filesystem::create_directories(config.output);
  write(result, config.output / "verify.txt", result.summary);
  result.exit_code = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.passed; }) ? kOk : kGatingFailure;
  return result;
}

std::pair<int, std::string> describe_failure(const std::exception& e) {
  if (const auto* c = dynamic_cast<const ConfigError*>(&e))
    return {kConfigError, c->line() > 0 ? fmt::format("config error at line {}: {}", c->line(), c->what())
                                        : fmt::format("config error: {}", c->what())};
  if (const auto* w = dynamic_cast<const WellPosednessFailure*>(&e))
    return {kWellPosedness, fmt::format("well-posedness failure (condition number {:.6e}): {}", w->condition(), w->what())};
  if (const auto* i = dynamic_cast<const IllConditionedEigenbasis*>(&e))
    return {kNumerical, fmt::format("numerical failure (eigenvector condition {:.6e}): {}", i->condition(), i->what())};
  if (const auto* s = dynamic_cast<const SingularOperator*>(&e))
    return {kNumerical, fmt::format("numerical failure (grid point {}): {}", s->grid_point(), s->what())};
  if (const auto* d = dynamic_cast<const SubspaceInvarianceError*>(&e))
    return {kNumerical, fmt::format("numerical failure (invariance defect {:.3e}): {}", d->defect(), d->what())};
  if (dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const DimensionMismatch*>(&e))
    return {kConfigError, fmt::format("invalid input: {}", e.what())};
  return {kNumerical, fmt::format("numerical failure: {}", e.what())};
}

}  // namespace diracbvp::cli
