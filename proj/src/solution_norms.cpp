#include <algorithm>
#include <cmath>

#include "diracbvp/bvp_solver.hpp"
#include "diracbvp/errors.hpp"

namespace diracbvp {

namespace {

constexpr BasisIndex kNormal{1u};

/// Trace in eigen-coordinates with |lambda| per mode (zero on the kernel).
struct ModalTrace {
  Vector coeffs;
  Eigen::VectorXd abs_lambda;
  std::vector<bool> kernel;
};

ModalTrace modal(const SolutionField& sol) {
  const SpectralDecomposition& dec = sol.operators().spectral();
  ModalTrace m{dec.eigenvectors_inverse() * sol.trace(), Eigen::VectorXd::Zero(dec.dim()), dec.kernel_mask()};
  for (Eigen::Index j = 0; j < dec.dim(); ++j)
    if (!m.kernel[static_cast<std::size_t>(j)]) m.abs_lambda[j] = sector_abs(dec.eigenvalues()[j]).real();
  return m;
}

/// Columns F_t (derivative_order 0) or t d/dt F_t (order 1) in operator coordinates.
Matrix sampled(const SolutionField& sol, const ModalTrace& m, const std::vector<double>& ts, int derivative_order) {
  const Eigen::Index r = m.coeffs.size();
  Matrix w(r, static_cast<Eigen::Index>(ts.size()));
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double t = ts[k];
    for (Eigen::Index j = 0; j < r; ++j) {
      const double a = m.abs_lambda[j];
      const double decay = std::exp(-t * a);
      w(j, static_cast<Eigen::Index>(k)) = (derivative_order == 0 ? decay : -t * a * decay) * m.coeffs[j];
    }
  }
  return sol.operators().spectral().eigenvectors() * w;
}

Matrix to_ambient(const SubspaceBasis& basis, const Matrix& coords) {
  if (basis.coordinates.empty()) return basis.columns * coords;
  Matrix out = Matrix::Zero(basis.ambient_dim, coords.cols());
  for (Eigen::Index i = 0; i < basis.dim(); ++i) out.row(basis.coordinates[static_cast<std::size_t>(i)]) = coords.row(i);
  return out;
}

Vector normal_rows(const Torus& t, const Eigen::Ref<const Vector>& ambient) {
  Vector u(t.point_count());
  for (int p = 0; p < t.point_count(); ++p) u[p] = ambient[static_cast<Eigen::Index>(p) * t.lambda_dim() + kNormal.bits()];
  return u;
}

double gradient_sq(const Torus& t, const Vector& u) {
  const ScalarField f(t, u);
  double s = 0.0;
  for (int a = 0; a < t.dim_n(); ++a) s += partial(f, a).values().squaredNorm();
  return s;
}

/// Sum over the periodic window of half-width h (in points) along each axis.
class PeriodicBoxSum {
 public:
  explicit PeriodicBoxSum(const Torus& t) : t_(t), n_(t.points_per_axis()) {}

  std::vector<double> operator()(const std::vector<double>& v, int h) const {
    if (2 * h + 1 >= n_) h = -1;  // whole axis
    if (t_.dim_n() == 1) return axis_sum(v, h, 1, 1);
    // axis 0 varies slowest: stride N along axis 0, stride 1 along axis 1.
    return axis_sum(axis_sum(v, h, 1, n_), h, n_, 1);
  }

 private:
  // Windowed sum along one axis; `lines` independent lines of length N with the given stride.
  std::vector<double> axis_sum(const std::vector<double>& v, int h, int stride, int lines_stride) const {
    std::vector<double> out(v.size(), 0.0);
    const int lines = static_cast<int>(v.size()) / n_;
    std::vector<double> prefix(static_cast<std::size_t>(3 * n_ + 1));
    for (int l = 0; l < lines; ++l) {
      const int base = stride == 1 ? l * lines_stride : l;
      prefix[0] = 0.0;
      for (int i = 0; i < 3 * n_; ++i) prefix[static_cast<std::size_t>(i + 1)] = prefix[static_cast<std::size_t>(i)] + v[static_cast<std::size_t>(base + (i % n_) * stride)];
      for (int i = 0; i < n_; ++i) {
        double s;
        if (h < 0) {
          s = prefix[static_cast<std::size_t>(n_)];
        } else {
          const int lo = i - h + n_, hi = i + h + n_ + 1;
          s = prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)];
        }
        out[static_cast<std::size_t>(base + i * stride)] = s;
      }
    }
    return out;
  }

  Torus t_;
  int n_;
};

LogGrid norm_grid(const SolutionField& sol) {
  return quadrature_grid(sol.operators().spectral(), sol.operators().options().sampling);
}

/// The quadrature grid, then t = 0 and any extra sample times not already on it.
std::vector<double> sup_times(const SolutionField& sol, const LogGrid& grid) {
  std::vector<double> ts = grid.t;
  ts.push_back(0.0);
  for (double t : sol.t_samples())
    if (!std::binary_search(grid.t.begin(), grid.t.end(), t)) ts.push_back(t);
  return ts;
}

double sup_from_columns(const SolutionField& sol, const Matrix& cols) {
  return std::sqrt(sol.operators().torus().cell_weight()) * cols.colwise().norm().maxCoeff();
}

double triplebar_dt_from(const SolutionField& sol, const ModalTrace& m, const LogGrid& grid) {
  const Matrix cols = sampled(sol, m, grid.t, 1);
  double total = grid.log_step * cols.colwise().squaredNorm().sum();
  const Vector abs_f = sol.operators().spectral().eigenvectors() * m.abs_lambda.cast<Complex>().cwiseProduct(m.coeffs);
  total += 0.5 * grid.t_lo * grid.t_lo * abs_f.squaredNorm();
  return std::sqrt(sol.operators().torus().cell_weight() * total);
}

}  // namespace

ScalarField normal_component(const BoundaryOperators& ops, const Vector& coords) {
  return ScalarField(ops.torus(), normal_rows(ops.torus(), ops.basis().ambient(coords)));
}

ScalarField dirichlet_value(const SolutionField& sol, double t) { return normal_component(sol.operators(), sol.at(t)); }

double second_order_residual(const SolutionField& sol, double t) {
  const BoundaryOperators& ops = sol.operators();
  if (ops.degree() != 1) throw InvalidArgument("second_order_residual: needs the degree-one boundary space");
  const Torus& tor = ops.torus();
  const int n = tor.dim_n();
  const Vector f = sol.at(t);
  const Vector abs_f = ops.abs_generator(f);
  // d/dt = -side |T| on the trace's Hardy space, d^2/dt^2 = |T|^2.
  const ScalarField u = normal_component(ops, f);
  const ScalarField ut = normal_component(ops, -static_cast<double>(sol.side()) * abs_f);
  const ScalarField utt = normal_component(ops, ops.abs_generator(abs_f));

  std::vector<ScalarField> grad_u, grad_ut;
  for (int a = 0; a < n; ++a) {
    grad_u.push_back(partial(u, a));
    grad_ut.push_back(partial(ut, a));
  }
  const int pts = tor.point_count();
  Vector term_tt(pts), term_cross(pts);
  std::vector<ScalarField> flux_t(n, ScalarField(tor)), flux_x(n, ScalarField(tor));
  for (int p = 0; p < pts; ++p) {
    const Matrix a = ops.coefficient().vector_block(p);
    term_tt[p] = a(0, 0) * utt.values()[p];
    Complex cross = 0.0;
    for (int j = 0; j < n; ++j) cross += a(0, j + 1) * grad_ut[static_cast<std::size_t>(j)].values()[p];
    term_cross[p] = cross;
    for (int i = 0; i < n; ++i) {
      flux_t[static_cast<std::size_t>(i)].values()[p] = a(i + 1, 0) * ut.values()[p];
      Complex s = 0.0;
      for (int j = 0; j < n; ++j) s += a(i + 1, j + 1) * grad_u[static_cast<std::size_t>(j)].values()[p];
      flux_x[static_cast<std::size_t>(i)].values()[p] = s;
    }
  }
  Vector div_t = Vector::Zero(pts), div_x = Vector::Zero(pts);
  for (int i = 0; i < n; ++i) {
    div_t += partial(flux_t[static_cast<std::size_t>(i)], i).values();
    div_x += partial(flux_x[static_cast<std::size_t>(i)], i).values();
  }
  const Vector residual = term_tt + term_cross + div_t + div_x;
  const double scale = term_tt.norm() + term_cross.norm() + div_t.norm() + div_x.norm();
  return scale > 0.0 ? residual.norm() / scale : residual.norm();
}

double norm_sup_t(const SolutionField& sol) {
  const LogGrid grid = norm_grid(sol);
  return sup_from_columns(sol, sampled(sol, modal(sol), sup_times(sol, grid), 0));
}

double norm_triplebar_dt(const SolutionField& sol) { return triplebar_dt_from(sol, modal(sol), norm_grid(sol)); }

double norm_triplebar_gradx(const SolutionField& sol) {
  const BoundaryOperators& ops = sol.operators();
  if (ops.degree() != 1) throw InvalidArgument("norm_triplebar_gradx: needs the degree-one boundary space");
  const Torus& tor = ops.torus();
  const ModalTrace m = modal(sol);
  const LogGrid grid = norm_grid(sol);
  const Matrix f_amb = to_ambient(ops.basis(), sampled(sol, m, grid.t, 0));
  const Matrix df_amb = to_ambient(ops.basis(), sampled(sol, m, grid.t, 1));
  double total = 0.0;
  for (std::size_t k = 0; k < grid.t.size(); ++k) {
    const double t = grid.t[k];
    const auto col = static_cast<Eigen::Index>(k);
    total += grid.log_step *
             (normal_rows(tor, df_amb.col(col)).squaredNorm() + t * t * gradient_sq(tor, normal_rows(tor, f_amb.col(col))));
  }
  const Vector abs_f = ops.abs_generator(sol.trace());
  const Vector u0 = normal_component(ops, sol.trace()).values();
  total += 0.5 * grid.t_lo * grid.t_lo * (normal_component(ops, abs_f).values().squaredNorm() + gradient_sq(tor, u0));
  return std::sqrt(tor.cell_weight() * total);
}

namespace {

// `cols` holds F_t in operator coordinates; its leading columns follow the grid.
double nontangential_from(const SolutionField& sol, const LogGrid& grid, const Matrix& cols, double c0, double c1) {
  const BoundaryOperators& ops = sol.operators();
  const Torus& tor = ops.torus();
  const int pts = tor.point_count();
  const int ld = tor.lambda_dim();
  const std::size_t ns = grid.t.size();
  const Matrix amb = to_ambient(ops.basis(), cols.leftCols(static_cast<Eigen::Index>(ns)));

  // Cumulative (over s) weighted pointwise |F(s, y)|^2 with weight ds = s * log_step.
  std::vector<std::vector<double>> cumulative(ns + 1, std::vector<double>(static_cast<std::size_t>(pts), 0.0));
  std::vector<double> weight_prefix(ns + 1, 0.0);
  for (std::size_t k = 0; k < ns; ++k) {
    const double ds = grid.t[k] * grid.log_step;
    weight_prefix[k + 1] = weight_prefix[k] + ds;
    for (int p = 0; p < pts; ++p) {
      const double v = amb.col(static_cast<Eigen::Index>(k)).segment(static_cast<Eigen::Index>(p) * ld, ld).squaredNorm();
      cumulative[k + 1][static_cast<std::size_t>(p)] = cumulative[k][static_cast<std::size_t>(p)] + ds * v;
    }
  }

  const PeriodicBoxSum box(tor);
  const double dx = tor.spacing();
  std::vector<double> best(static_cast<std::size_t>(pts), 0.0);
  std::vector<double> slab(static_cast<std::size_t>(pts));
  for (std::size_t k = 0; k < ns; ++k) {
    const double t = grid.t[k];
    const auto lo = static_cast<std::size_t>(
        std::upper_bound(grid.t.begin(), grid.t.end(), (1.0 - c0) * t) - grid.t.begin());
    const auto hi = static_cast<std::size_t>(
        std::lower_bound(grid.t.begin(), grid.t.end(), (1.0 + c0) * t) - grid.t.begin());
    const std::size_t j0 = std::min(lo, k), j1 = std::max(hi, k + 1);
    for (int p = 0; p < pts; ++p)
      slab[static_cast<std::size_t>(p)] = cumulative[j1][static_cast<std::size_t>(p)] - cumulative[j0][static_cast<std::size_t>(p)];
    int h = static_cast<int>(std::ceil(c1 * t / dx)) - 1;
    h = std::max(h, 0);
    const int width = 2 * h + 1 >= tor.points_per_axis() ? tor.points_per_axis() : 2 * h + 1;
    const double count = std::pow(static_cast<double>(width), tor.dim_n());
    const double wsum = weight_prefix[j1] - weight_prefix[j0];
    const std::vector<double> sums = box(slab, h);
    for (int p = 0; p < pts; ++p)
      best[static_cast<std::size_t>(p)] = std::max(best[static_cast<std::size_t>(p)], sums[static_cast<std::size_t>(p)] / (wsum * count));
  }
  double total = 0.0;
  for (double b : best) total += b;
  return std::sqrt(tor.cell_weight() * total);
}

}  // namespace

double nontangential_max(const SolutionField& sol, double c0, double c1) {
  if (!(c0 > 0.0 && c0 < 1.0) || !(c1 > 0.0)) throw InvalidArgument("nontangential_max: need 0 < c0 < 1 and c1 > 0");
  const LogGrid grid = norm_grid(sol);
  return nontangential_from(sol, grid, sampled(sol, modal(sol), grid.t, 0), c0, c1);
}

NormSummary all_norms(const SolutionField& sol) {
  const LogGrid grid = norm_grid(sol);
  const ModalTrace m = modal(sol);
  const Matrix cols = sampled(sol, m, sup_times(sol, grid), 0);
  NormSummary out;
  out.trace = sol.operators().field_norm(sol.trace());
  out.sup_t = sup_from_columns(sol, cols);
  out.triplebar_dt = triplebar_dt_from(sol, m, grid);
  out.nontangential = nontangential_from(sol, grid, cols, 0.5, 1.0);
  return out;
}

}  // namespace diracbvp
