#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "diracbvp/acceptance.hpp"
#include "diracbvp/bvp_solver.hpp"
#include "diracbvp/coefficients.hpp"
#include "diracbvp/diagnostics.hpp"
#include "diracbvp/errors.hpp"
#include "diracbvp/oracles.hpp"

namespace py = pybind11;
using namespace diracbvp;

namespace {

ScalarField scalar(const Torus& t, const Vector& v) {
  if (v.size() != t.point_count()) throw DimensionMismatch("expected one value per grid point");
  return ScalarField(t, v);
}

Field field(const Torus& t, const Vector& v) {
  if (v.size() != t.field_dim()) throw DimensionMismatch("expected point-major multivector data");
  return Field(t, v);
}

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["kind"] = to_string(r.kind);
  d["formula"] = r.formula;
  d["condition_numbers"] = r.condition_numbers;
  d["boundary_residual"] = r.boundary_residual;
  d["hardy_residual"] = r.hardy_residual;
  d["projection_loss"] = r.projection_loss;
  d["invariance_defect"] = r.invariance_defect;
  d["second_order_residual"] = r.second_order_residual;
  d["norms"] = py::dict(py::arg("trace") = r.norms.trace, py::arg("sup_t") = r.norms.sup_t,
                        py::arg("triplebar_dt") = r.norms.triplebar_dt, py::arg("nontangential") = r.norms.nontangential);
  d["extra"] = r.extra;
  d["flags"] = r.flags;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dirac-operator solvers for boundary value problems on the periodic upper half-space";

  // Translators run newest first, so the base class is registered before the specific ones.
  const auto& base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());
  py::register_exception<WellPosednessFailure>(m, "WellPosednessFailure", base.ptr());

  py::class_<Torus>(m, "Torus")
      .def(py::init<int, int, double>(), py::arg("n"), py::arg("points"), py::arg("period") = 2.0 * std::numbers::pi)
      .def_property_readonly("n", &Torus::dim_n)
      .def_property_readonly("points", &Torus::points_per_axis)
      .def_property_readonly("period", &Torus::period)
      .def_property_readonly("point_count", &Torus::point_count)
      .def_property_readonly("lambda_dim", &Torus::lambda_dim)
      .def("coordinates", [](const Torus& t, int axis) {
        Eigen::VectorXd x(t.point_count());
        for (int p = 0; p < t.point_count(); ++p) x[p] = t.coordinate(p, axis);
        return x;
      });

  py::class_<CoefficientField>(m, "CoefficientField")
      .def_static("identity", &CoefficientField::identity)
      .def_static("scaled_identity", &CoefficientField::scaled_identity)
      .def_static("constant", &CoefficientField::constant_vector_block, py::arg("torus"), py::arg("matrix"))
      .def_static("kkpt", &families::kkpt, py::arg("torus"), py::arg("k"))
      .def_static("real_symmetric", &families::smooth_real_symmetric, py::arg("torus"), py::arg("seed"),
                  py::arg("kappa_floor") = 0.3)
      .def_static("accretive", &families::smooth_accretive, py::arg("torus"), py::arg("seed"))
      .def_static("block", &families::smooth_block, py::arg("torus"), py::arg("seed"))
      .def("vector_block", &CoefficientField::vector_block)
      .def_property_readonly("kappa", &CoefficientField::kappa)
      .def_property_readonly("sup_norm", &CoefficientField::sup_norm)
      .def("is_hermitian", &CoefficientField::is_hermitian, py::arg("tol") = 1e-14)
      .def("is_block", &CoefficientField::is_block, py::arg("tol") = 1e-14);

  py::class_<BoundaryOperators, std::shared_ptr<BoundaryOperators>>(m, "BoundaryOperators")
      .def(py::init([](const CoefficientField& b, int degree) { return std::make_shared<BoundaryOperators>(b, degree); }),
           py::arg("coefficient"), py::arg("degree") = 1)
      .def_property_readonly("cauchy", &BoundaryOperators::cauchy)
      .def_property_readonly("reflection", &BoundaryOperators::reflection)
      .def_property_readonly("reflection_b", &BoundaryOperators::reflection_b)
      .def_property_readonly("hardy_plus", &BoundaryOperators::hardy_plus)
      .def_property_readonly("generator", [](const BoundaryOperators& o) { return o.generator(); })
      .def_property_readonly("eigenvalues", [](const BoundaryOperators& o) { return o.spectral().eigenvalues(); })
      .def("to_field", [](const BoundaryOperators& o, const Vector& c) { return o.to_field(c).data(); })
      .def("to_coords", [](const BoundaryOperators& o, const Vector& f) { return o.to_coords(field(o.torus(), f)); })
      .def("wellposedness", [](const BoundaryOperators& o) { return wellposedness_report(o).to_text(); });

  py::class_<Solution>(m, "Solution")
      .def_property_readonly("trace", [](const Solution& s) { return s.field.field_at(0.0).data(); })
      .def("field_at", [](const Solution& s, double t) { return s.field.field_at(t).data(); })
      .def("dirichlet_value", [](const Solution& s, double t) { return dirichlet_value(s.field, t).values(); })
      .def("second_order_residual", [](const Solution& s, double t) { return second_order_residual(s.field, t); })
      .def_property_readonly("report", [](const Solution& s) { return report_dict(s.report); });

  const auto ops_of = [](const std::shared_ptr<BoundaryOperators>& o) { return BoundaryOperatorsPtr(o); };
  m.def("solve_neumann", [=](const std::shared_ptr<BoundaryOperators>& o, const Vector& phi) {
    return solve_neumann(ops_of(o), scalar(o->torus(), phi));
  });
  m.def("solve_neu_perp", [=](const std::shared_ptr<BoundaryOperators>& o, const Vector& phi) {
    return solve_neu_perp(ops_of(o), scalar(o->torus(), phi));
  });
  m.def("solve_dirichlet", [=](const std::shared_ptr<BoundaryOperators>& o, const Vector& u) {
    return solve_dirichlet(ops_of(o), scalar(o->torus(), u));
  });
  m.def("solve_regularity_from_potential", [=](const std::shared_ptr<BoundaryOperators>& o, const Vector& psi) {
    return solve_regularity(ops_of(o), BoundaryData::regularity_from_potential(scalar(o->torus(), psi)).field);
  });
  m.def("poisson_extension", [](const Torus& t, const Vector& u, double s) {
    return oracles::poisson_extension(scalar(t, u), s).values();
  });
  m.def("smooth_data", [](const Torus& t, std::uint64_t seed, int k) { return diagnostics::smooth_data(t, seed, k).values(); },
        py::arg("torus"), py::arg("seed"), py::arg("max_wavenumber") = 3);

  py::class_<diagnostics::CampaignResult>(m, "CampaignResult")
      .def_readonly("id", &diagnostics::CampaignResult::id)
      .def_readonly("exploratory", &diagnostics::CampaignResult::exploratory)
      .def_readonly("notes", &diagnostics::CampaignResult::notes)
      .def("passed", &diagnostics::CampaignResult::passed)
      .def("failures", &diagnostics::CampaignResult::failures)
      .def("max_of", &diagnostics::CampaignResult::max_of)
      .def("min_of", &diagnostics::CampaignResult::min_of)
      .def("csv", &diagnostics::CampaignResult::csv)
      .def("summary", &diagnostics::CampaignResult::summary);

  m.def("duality_campaign", &diagnostics::duality_campaign, py::arg("coefficient"), py::arg("tolerance") = 1e-9);
  m.def("hodge_campaign", &diagnostics::hodge_campaign);
  m.def("block_campaign", [](const CoefficientField& b) { return diagnostics::block_campaign(b); });
  m.def("rellich_campaign", [](const CoefficientField& b, int samples, std::uint64_t seed) {
    return diagnostics::rellich_campaign(b, {samples, seed, 1e-7});
  }, py::arg("coefficient"), py::arg("samples") = 100, py::arg("seed") = 1);

  py::class_<acceptance::Row>(m, "AcceptanceRow")
      .def_readonly("id", &acceptance::Row::id)
      .def_readonly("name", &acceptance::Row::name)
      .def_readonly("passed", &acceptance::Row::passed)
      .def_readonly("detail", &acceptance::Row::detail)
      .def_readonly("seconds", &acceptance::Row::seconds)
      .def("__repr__", &acceptance::format_row);
  m.def("run_acceptance", [](std::vector<int> only) {
    acceptance::Options opt;
    opt.only = std::move(only);
    py::gil_scoped_release release;
    return acceptance::run(opt);
  }, py::arg("only") = std::vector<int>{});
}
