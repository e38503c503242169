#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bandlab/diagrams.hpp"
#include "bandlab/diffusion.hpp"
#include "bandlab/spectral.hpp"

namespace py = pybind11;
using namespace bandlab;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(v.size());
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<std::complex<double>> to_array(const ComplexVector& v) {
  py::array_t<std::complex<double>> out(v.size());
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

ComplexVector from_array(const py::array_t<std::complex<double>>& a) {
  auto buf = a.request();
  const auto* ptr = static_cast<const std::complex<double>*>(buf.ptr);
  return ComplexVector(ptr, ptr + buf.size);
}

py::dict result_dict(const PropagatorResult& r) {
  py::dict d;
  d["t"] = r.t;
  d["psi"] = to_array(r.psi);
  d["truncation"] = r.truncation;
  d["residual_bound"] = r.residual_bound;
  d["rescaled"] = r.rescaled;
  return d;
}

}  // namespace

PYBIND11_MODULE(_bandlab, m) {
  m.doc() = "band-matrix quantum diffusion laboratory";

  py::class_<LatticeConfig>(m, "LatticeConfig")
      .def(py::init<int, int, int>(), py::arg("d"), py::arg("N"), py::arg("W"))
      .def_readonly("d", &LatticeConfig::d)
      .def_readonly("N", &LatticeConfig::N)
      .def_readonly("W", &LatticeConfig::W)
      .def_property_readonly("M", &LatticeConfig::shell_size)
      .def("volume", &LatticeConfig::volume)
      .def("band_shell", [](const LatticeConfig& c) { return c.band_shell(); })
      .def("periodic_distance", &LatticeConfig::periodic_distance)
      .def("site_index", &LatticeConfig::site_index)
      .def("site_of_index", &LatticeConfig::site_of_index);

  py::enum_<EnsembleKind>(m, "EnsembleKind")
      .value("HermitianUnitCircle", EnsembleKind::HermitianUnitCircle)
      .value("SymmetricBernoulli", EnsembleKind::SymmetricBernoulli);

  py::class_<BandMatrix>(m, "BandMatrix")
      .def_static("sample", &BandMatrix::sample, py::arg("cfg"), py::arg("kind"), py::arg("seed"))
      .def_property_readonly("cfg", &BandMatrix::cfg)
      .def_property_readonly("seed", &BandMatrix::seed)
      .def("apply",
           [](const BandMatrix& H, const py::array_t<std::complex<double>>& v) {
             return to_array(H.apply(from_array(v)));
           })
      .def("second_moment", &BandMatrix::second_moment);

  m.def("shell_point_count", &shell_point_count);
  m.def("truncation_index", &truncation_index);
  m.def("bessel_j", &bessel_j);
  m.def("alpha", &alpha);
  m.def("alpha_table", [](double t) {
    ChebCoefficients tab = alpha_table(t);
    return to_array(tab.alphas);
  });
  m.def("a_coeff", &a_coeff, py::arg("m"), py::arg("t"), py::arg("M"), py::arg("tol") = 1e-12);
  m.def("limit_density", &limit_density);
  m.def("limit_cdf", &limit_cdf);
  m.def("empirical_cdf", py::overload_cast<double, double>(&empirical_cdf));
  m.def("empirical_density", py::overload_cast<double, double>(&empirical_density));
  m.def("krasikov_bound_sq", &krasikov_bound_sq);

  m.def("chebyshev_evolve",
        [](const BandMatrix& H, double t, double tol, std::int64_t start) {
          return result_dict(chebyshev_evolve(H, t, tol, start));
        },
        py::arg("H"), py::arg("t"), py::arg("tol") = 1e-10, py::arg("start") = -1);
  m.def("nonbacktracking_evolve",
        [](const BandMatrix& H, double t, double tol, std::int64_t start) {
          return result_dict(nonbacktracking_evolve(H, t, tol, start));
        },
        py::arg("H"), py::arg("t"), py::arg("tol") = 1e-10, py::arg("start") = -1);
  m.def("dense_oracle_evolve",
        [](const BandMatrix& H, double t, std::int64_t start) {
          return result_dict(dense_oracle_evolve(H, t, start));
        },
        py::arg("H"), py::arg("t"), py::arg("start") = -1);
  m.def("nonbacktracking_power_apply",
        [](const BandMatrix& H, int n, const py::array_t<std::complex<double>>& v) {
          return to_array(nonbacktracking_power_apply(H, n, from_array(v)));
        });

  m.def("estimate_rho",
        [](const LatticeConfig& cfg, EnsembleKind kind, double t, int n_samples,
           std::uint64_t seed, int threads) {
          DiffusionProfile p = estimate_rho(cfg, kind, t, n_samples, seed, threads);
          py::dict d;
          d["t"] = p.t;
          d["rho"] = to_array(p.rho);
          d["stderr"] = to_array(p.stderr_);
          d["n_samples"] = p.n_samples;
          return d;
        },
        py::arg("cfg"), py::arg("kind"), py::arg("t"), py::arg("n_samples"), py::arg("seed"),
        py::arg("threads") = 0);
  m.def("path_count",
        [](const LatticeConfig& cfg, int n) { return to_array(path_count(cfg, n)); });
  m.def("ladder_prediction", [](const LatticeConfig& cfg, double t) {
    return to_array(ladder_prediction(cfg, t));
  });
  m.def("d_ell", &d_ell);
  m.def("heat_kernel", &heat_kernel);
  m.def("limit_profile", &limit_profile);
  m.def("limit_profile_integral", [](double T, int d, const std::function<double(std::vector<double>)>& phi) {
    return limit_profile_integral(T, d, phi);
  });
  m.def("theorem1_experiment",
        [](const LatticeConfig& cfg, EnsembleKind kind, double kappa, double T, int n_samples,
           std::uint64_t seed, int threads) {
          Theorem1Report rep =
              theorem1_experiment(cfg, kind, kappa, T, n_samples, seed, named_test_functions(),
                                  threads);
          py::dict d;
          d["eta"] = rep.scaling.eta;
          d["t"] = rep.scaling.t;
          d["space_scale"] = rep.scaling.space_scale;
          d["names"] = rep.names;
          d["lhs"] = to_array(rep.lhs);
          d["lhs_stderr"] = to_array(rep.lhs_stderr);
          d["rhs"] = to_array(rep.rhs);
          d["rho"] = to_array(rep.profile.rho);
          d["rho_stderr"] = to_array(rep.profile.stderr_);
          return d;
        },
        py::arg("cfg"), py::arg("kind"), py::arg("kappa"), py::arg("T"), py::arg("n_samples"),
        py::arg("seed"), py::arg("threads") = 0);

  py::class_<EigenSystem>(m, "EigenSystem")
      .def_property_readonly("eigenvalues",
                             [](const EigenSystem& es) { return to_array(es.eigenvalues); })
      .def("eigenvector",
           [](const EigenSystem& es, int a) { return to_array(es.eigenvectors.at(a)); });
  m.def("dense_eigensystem", &dense_eigensystem);
  m.def("localization_functional",
        [](const py::array_t<std::complex<double>>& psi, double ell, const LatticeConfig& cfg) {
          return localization_functional(from_array(psi), ell, cfg);
        });
  m.def("localized_fraction", [](const EigenSystem& es, double eps, double ell) {
    LocalizationReport rep = localized_fraction(es, eps, ell);
    py::dict d;
    d["eps"] = rep.eps;
    d["ell"] = rep.ell;
    d["members"] = rep.members;
    d["fraction"] = rep.fraction;
    d["functional"] = to_array(rep.functional);
    return d;
  });
  m.def("theorem_scale", &theorem_scale);
  m.def("subexponential_set", [](const EigenSystem& es, double ell, double gamma, double K) {
    SubexpReport rep = subexponential_set(es, ell, gamma, K);
    py::dict d;
    d["members"] = rep.members;
    d["witness"] = rep.witness;
    return d;
  });
  m.def("subexp_inclusion_epsilon", &subexp_inclusion_epsilon);

  auto dg = m.def_submodule("diagrams");
  dg.def("census", [](int n, int nprime) {
    diagrams::Census c = diagrams::census(n, nprime);
    py::dict d;
    d["pairings_total"] = c.pairings_total;
    d["pairings_admissible"] = c.pairings_admissible;
    d["nonladder_admissible"] = c.nonladder_admissible;
    d["skeleton_classes"] = c.skeleton_classes;
    d["orbit_count_histogram"] = c.orbit_count_histogram;
    d["two_thirds_margins"] = to_array(c.two_thirds_margin);
    return d;
  });
  dg.def("critical_skeleton", [](int k) {
    diagrams::Skeleton s = diagrams::critical_skeleton(k);
    diagrams::OrbitMap om = diagrams::orbit_analysis(s);
    py::dict d;
    d["mbar"] = s.loop.total() / 2;
    d["L"] = om.L;
    d["bridges"] = s.bridges();
    return d;
  });
  dg.def("bound_audit", [](int p, const LatticeConfig& cfg) {
    py::list rows;
    for (const auto& r : diagrams::bound_audit(p, cfg)) {
      py::dict d;
      d["n"] = r.n;
      d["nprime"] = r.nprime;
      d["mbar"] = r.mbar;
      d["ell_bar"] = r.ell_bar;
      d["lhs"] = r.lhs;
      d["rhs"] = r.rhs;
      d["pass"] = r.pass;
      rows.append(d);
    }
    return rows;
  });
}
