#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "ellipnls/commands.hpp"
#include "ellipnls/physicality.hpp"
#include "ellipnls/residuals.hpp"
#include "ellipnls/spectral.hpp"

namespace py = pybind11;
using namespace ellipnls;

namespace {

SolutionParams make_params(double a, double c1, double c2, double c3, double h0, double f0,
                           double phi0) {
    SolutionParams p{a, c1, c2, c3, h0, f0, phi0};
    p.validate();
    return p;
}

py::dict report_dict(const ResidualReport& r) {
    py::dict d;
    d["equation"] = r.equation;
    d["max_abs"] = r.max_abs;
    d["max_rel"] = r.max_rel;
    d["loc_t"] = r.loc_t;
    d["loc_z"] = r.loc_z;
    d["floor"] = r.construction_error_floor;
    d["skipped_cells"] = r.skipped_cells;
    return d;
}

}  // namespace

PYBIND11_MODULE(_ellipnls, m) {
    m.doc() = "Elliptic-function solution family of the cubic NLS equation";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "EllipnlsError");

    py::class_<SolutionParams>(m, "SolutionParams")
        .def(py::init(&make_params), py::arg("a"), py::arg("c1"), py::arg("c2"), py::arg("c3"),
             py::arg("h0") = 0.0, py::arg("f0") = 0.0, py::arg("phi0") = 0.0)
        .def_readonly("a", &SolutionParams::a)
        .def_readonly("c1", &SolutionParams::c1)
        .def_readonly("c2", &SolutionParams::c2)
        .def_readonly("c3", &SolutionParams::c3)
        .def_readonly("h0", &SolutionParams::h0)
        .def_readonly("f0", &SolutionParams::f0)
        .def_readonly("phi0", &SolutionParams::phi0);

    py::class_<QuarticCoefficients>(m, "QuarticCoefficients")
        .def_readonly("alpha", &QuarticCoefficients::alpha)
        .def_readonly("beta", &QuarticCoefficients::beta)
        .def_readonly("gamma", &QuarticCoefficients::gamma)
        .def_readonly("delta", &QuarticCoefficients::delta)
        .def_readonly("epsilon", &QuarticCoefficients::epsilon);

    py::enum_<Gamma2Convention>(m, "Gamma2Convention")
        .value("consistent", Gamma2Convention::consistent)
        .value("as_printed", Gamma2Convention::as_printed);

    m.def("r1_coefficients", &r1_coefficients);
    m.def("r2_coefficients", &r2_coefficients, py::arg("params"), py::arg("h"), py::arg("hz"),
          py::arg("hz_side") = 1.0, py::arg("convention") = Gamma2Convention::consistent);
    m.def("evaluate_quartic", py::overload_cast<const QuarticCoefficients&, double>(&evaluate));

    py::class_<EllipticInvariants>(m, "EllipticInvariants")
        .def_static("from_g2_g3", &EllipticInvariants::from)
        .def_readonly("g2", &EllipticInvariants::g2)
        .def_readonly("g3", &EllipticInvariants::g3)
        .def_readonly("delta", &EllipticInvariants::delta);

    m.def("invariants_from_quartic", &invariants_from_quartic);

    py::class_<LatticeData>(m, "LatticeData")
        .def_readonly("e1", &LatticeData::e1)
        .def_readonly("omega", &LatticeData::omega)
        .def_readonly("eta", &LatticeData::eta)
        .def_property_readonly("e_roots",
                               [](const LatticeData& l) {
                                   return std::vector<Complex>(l.e_roots.begin(),
                                                               l.e_roots.end());
                               })
        .def_property_readonly("invariants", [](const LatticeData& l) { return l.inv; });

    m.def("lattice_from_invariants", &lattice_from_invariants);
    m.def("wp", [](Complex z, const LatticeData& lat) {
        const auto v = wp(z, lat);
        return py::make_tuple(v.p, v.dp);
    });
    m.def("sigma_zeta", [](Complex z, const LatticeData& lat) {
        const auto v = sigma_zeta(z, lat);
        return py::make_tuple(v.sigma, v.zeta);
    });
    m.def("wp_inverse", &wp_inverse);

    py::class_<HSolution, std::shared_ptr<HSolution>>(m, "HSolution")
        .def_static(
            "build",
            [](const SolutionParams& p, double slope) {
                return std::make_shared<HSolution>(HSolution::build(p, slope));
            },
            py::arg("params"), py::arg("slope_sign") = 1.0)
        .def("eval", &HSolution::eval)
        .def("deriv", &HSolution::deriv)
        .def("period", &HSolution::period)
        .def_property_readonly("q1", &HSolution::q1)
        .def_property_readonly("inv_z", &HSolution::inv_z)
        .def("eval_grid", [](const HSolution& hs, py::array_t<double> z) {
            auto zb = z.unchecked<1>();
            py::array_t<double> out(zb.shape(0));
            auto ob = out.mutable_unchecked<1>();
            for (py::ssize_t i = 0; i < zb.shape(0); ++i) ob(i) = hs.eval(zb(i));
            return out;
        });

    py::class_<PhiSolution>(m, "PhiSolution")
        .def_static("build", &PhiSolution::build, py::keep_alive<0, 1>())
        .def("eval", &PhiSolution::eval);

    py::class_<FSolution>(m, "FSolution")
        .def_static("build", &FSolution::build, py::arg("h_solution"),
                    py::arg("slope_sign") = 1.0,
                    py::arg("convention") = Gamma2Convention::consistent)
        .def("eval", &FSolution::eval)
        .def("deriv_t", &FSolution::deriv_t)
        .def("period_t", &FSolution::period_t)
        .def("nearest_pole_t", &FSolution::nearest_pole_t);

    m.def("psi", [](double t, double z, const HSolution& hs, const PhiSolution& ps,
                    const FSolution& fs) {
        const auto v = psi_eval(t, z, hs, ps, fs);
        return py::make_tuple(v.psi, v.intensity);
    });
    m.def(
        "periods",
        [](const HSolution& hs, std::optional<double> z, Gamma2Convention conv) {
            const auto pr = periods(hs, z, conv);
            return py::make_tuple(pr.Lz, pr.Lt);
        },
        py::arg("h_solution"), py::arg("z") = std::nullopt,
        py::arg("convention") = Gamma2Convention::consistent);

    py::enum_<HCase>(m, "HCase")
        .value("interior", HCase::interior)
        .value("zero_root", HCase::zero_root)
        .value("simple_root", HCase::simple_root);
    py::enum_<HBehavior>(m, "HBehavior")
        .value("periodic", HBehavior::periodic)
        .value("solitary_like", HBehavior::solitary_like)
        .value("unclassified", HBehavior::unclassified);

    py::class_<HPhysicalityReport>(m, "HPhysicalityReport")
        .def_readonly("h_case", &HPhysicalityReport::h_case)
        .def_readonly("satisfied", &HPhysicalityReport::satisfied)
        .def_readonly("behavior", &HPhysicalityReport::behavior)
        .def_readonly("e1", &HPhysicalityReport::e1)
        .def_readonly("threshold", &HPhysicalityReport::threshold)
        .def_readonly("detail", &HPhysicalityReport::detail);

    m.def("check_h", &check_h);
    m.def("classify_behavior", &classify_behavior);

    m.def(
        "admissible_region",
        [](const SolutionParams& p, double f0_min, double f0_max, double z_min, double z_max,
           int nf0, int nz, Gamma2Convention conv) {
            const auto reg = admissible_region(p, f0_min, f0_max, z_min, z_max, nf0, nz, conv);
            py::array_t<std::uint8_t> mask({nz, nf0});
            auto mb = mask.mutable_unchecked<2>();
            for (int j = 0; j < nz; ++j)
                for (int i = 0; i < nf0; ++i) mb(j, i) = reg.mask[reg.index(j, i)];
            py::dict d;
            d["f0_grid"] = reg.f0_grid;
            d["z_grid"] = reg.z_grid;
            d["mask"] = mask;
            d["boundary"] = reg.boundary;
            return d;
        },
        py::arg("params"), py::arg("f0_min"), py::arg("f0_max"), py::arg("z_min"),
        py::arg("z_max"), py::arg("nf0"), py::arg("nz"),
        py::arg("convention") = Gamma2Convention::consistent);

    m.def("residual_h", [](const HSolution& hs, double z_lo, double z_hi, int n) {
        return report_dict(residual_h(hs, {z_lo, z_hi, n}));
    });
    m.def("residual_f", [](const FSolution& fs, double z, double t_lo, double t_hi, int n) {
        return report_dict(residual_f(fs, z, {t_lo, t_hi, n}));
    });
    m.def("residual_phase",
          [](const PhiSolution& ps, const HSolution& hs, double z_lo, double z_hi, int n) {
              return report_dict(residual_phase(ps, hs, {z_lo, z_hi, n}));
          });
    m.def(
        "residual_riccati",
        [](const FSolution& fs, const HSolution& hs, double t_lo, double t_hi, int nt,
           double z_lo, double z_hi, int nz, double floor) {
            return report_dict(
                residual_riccati(fs, hs, {t_lo, t_hi, nt}, {z_lo, z_hi, nz}, floor));
        },
        py::arg("fs"), py::arg("hs"), py::arg("t_lo"), py::arg("t_hi"), py::arg("nt"),
        py::arg("z_lo"), py::arg("z_hi"), py::arg("nz"), py::arg("floor") = 0.0);

    py::enum_<OracleKind>(m, "OracleKind")
        .value("h_curve", OracleKind::h_curve)
        .value("phi_curve", OracleKind::phi_curve);
    m.def("ode_oracle", [](const SolutionParams& p, OracleKind kind, double z_max, int n) {
        const auto c = ode_oracle(p, kind, z_max, n);
        py::dict d;
        d["z"] = c.z;
        d["value"] = c.value;
        d["period"] = c.period;
        return d;
    });

    m.def(
        "propagate",
        [](py::array_t<Complex> initial, double window, double dz, double z_span, double a) {
            std::vector<Complex> line(initial.data(), initial.data() + initial.size());
            SpectralConfig cfg{window, static_cast<int>(line.size()), dz, z_span, 0};
            const auto field = propagate(line, cfg, a);
            const auto nt = static_cast<py::ssize_t>(field.t_grid.size());
            const auto nz = static_cast<py::ssize_t>(field.z_grid.size());
            py::array_t<Complex> vals({nz, nt});
            auto vb = vals.mutable_unchecked<2>();
            for (py::ssize_t j = 0; j < nz; ++j)
                for (py::ssize_t i = 0; i < nt; ++i) vb(j, i) = field.at(i, j);
            py::dict d;
            d["t"] = field.t_grid;
            d["z"] = field.z_grid;
            d["psi"] = vals;
            return d;
        },
        py::arg("initial"), py::arg("window"), py::arg("dz"), py::arg("z_span"), py::arg("a"));
    m.def("conserved_quantities", [](py::array_t<Complex> line, double window, double a) {
        std::vector<Complex> v(line.data(), line.data() + line.size());
        const auto c = conserved_quantities(v, window, a);
        return py::make_tuple(c.power, c.hamiltonian);
    });

    m.def(
        "run_command",
        [](const std::string& command, const std::map<std::string, std::string>& overrides,
           const std::string& out_dir) {
            RunConfig cfg;
            for (const auto& [k, v] : overrides) cfg.apply_override(k + "=" + v);
            cfg.out_dir = out_dir;
            std::ostringstream log;
            const int rc = run_command(command, cfg, log);
            return py::make_tuple(rc, log.str());
        },
        py::arg("command"), py::arg("overrides") = std::map<std::string, std::string>{},
        py::arg("out_dir") = ".");
}
