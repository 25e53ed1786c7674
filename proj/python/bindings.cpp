#include <openbook/blend.hpp>
#include <openbook/geometry.hpp>
#include <openbook/holomorphic.hpp>
#include <openbook/indices.hpp>
#include <openbook/pipeline.hpp>
#include <openbook/profiles.hpp>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <vector>

namespace py = pybind11;
using namespace openbook;

namespace {

ProfileParams make_params(double c, const std::string& kappa, double delta,
                          double delta_prime, double rho1, double rho2) {
  ProfileParams p;
  p.c = c;
  p.kappa = KappaSpec::parse(kappa);
  p.delta = delta;
  p.delta_prime = delta_prime;
  p.rho1 = rho1;
  p.rho2 = rho2;
  return p;
}

py::dict sample_to_dict(const ProfileSample& s) {
  py::dict d;
  d["rho"] = s.rho;
  d["f"] = s.f;
  d["g"] = s.g;
  d["fp"] = s.fp;
  d["gp"] = s.gp;
  d["D"] = s.D;
  d["beta"] = s.beta;
  d["h"] = s.h;
  return d;
}

py::dict report_to_dict(const ProfileReport& rep) {
  py::dict d;
  d["pass"] = rep.pass;
  d["min_D"] = rep.min_D;
  d["max_fp"] = rep.max_fp;
  py::list checks;
  for (const auto& c : rep.checks) {
    py::dict e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["margin"] = c.margin;
    e["witness_rho"] = c.witness;
    checks.append(e);
  }
  d["checks"] = checks;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "open book decompositions: stable Hamiltonian structures, holomorphic "
      "page curves, Conley-Zehnder and Fredholm indices";

  m.def("blend", &blend, py::arg("t"), py::arg("a"), py::arg("b"),
        "flat-ended smooth interpolation from a to b over [0, 1]");

  py::class_<Profile>(m, "Profile")
      .def_property_readonly("kappa", &Profile::kappa)
      .def_property_readonly("epsilon", &Profile::epsilon)
      .def_property_readonly("rho_sup", &Profile::rho_sup)
      .def("f", &Profile::f)
      .def("g", &Profile::g)
      .def("fp", &Profile::fp)
      .def("gp", &Profile::gp)
      .def("beta", &Profile::beta)
      .def("h", &Profile::h)
      .def("eval",
           [](const Profile& p, double rho) { return sample_to_dict(p.eval(rho)); })
      .def("verify",
           [](const Profile& p, int grid_n) {
             return report_to_dict(verify_profile(p, grid_n));
           },
           py::arg("grid_n") = 10000)
      .def("perturb",
           [](const Profile& p, double eps) { return perturb_profile(p, eps); })
      .def("serialize", &Profile::serialize)
      .def_static("parse", &Profile::parse);

  m.def("build_profile", [](double c, const std::string& kappa, double delta,
                            double delta_prime, double rho1, double rho2) {
          return build_profile(
              make_params(c, kappa, delta, delta_prime, rho1, rho2));
        },
        py::arg("c") = 0.1, py::arg("kappa") = "-sqrt2/100",
        py::arg("delta") = 0.05, py::arg("delta_prime") = 0.1,
        py::arg("rho1") = 0.25, py::arg("rho2") = 0.5);

  m.def("kappa_catalogue", [] {
    std::vector<std::string> out;
    for (const auto& ks : KappaSpec::catalogue()) out.push_back(ks.token());
    return out;
  });

  m.def("solve_half_cylinder",
        [](const Profile& p, double a0, double phi0, double s_max, double tol) {
          const HalfCylinderSolution sol =
              solve_half_cylinder(p, a0, phi0, s_max, tol);
          py::dict d;
          d["s"] = sol.s;
          d["a"] = sol.a;
          d["rho"] = sol.rho;
          d["branch"] = sol.branch;
          d["local_error"] = sol.local_error;
          d["fit_exponent"] = sol.fit.exponent;
          d["fit_a_slope"] = sol.fit.a_slope;
          d["kappa"] = sol.kappa;
          return d;
        },
        py::arg("profile"), py::arg("a0") = 0.0, py::arg("phi0") = 0.0,
        py::arg("s_max") = 1500.0, py::arg("tol") = 1e-12);

  m.def("linearized_return_rotation",
        [](const Profile& p, int k) {
          const SymplecticPath path = linearized_return_path(p, k);
          py::list mats;
          for (const Mat2& M : path.Psi) {
            py::list row;
            row.append(py::make_tuple(M.m[0][0], M.m[0][1]));
            row.append(py::make_tuple(M.m[1][0], M.m[1][1]));
            mats.append(row);
          }
          py::dict d;
          d["t"] = path.t;
          d["period"] = path.period;
          d["mu_cz"] = conley_zehnder(path);
          d["matrices"] = mats;
          return d;
        },
        py::arg("profile"), py::arg("k") = 1);

  m.def("conley_zehnder_rotation",
        [](double theta_total, int n) {
          SymplecticPath path;
          path.period = 1.0;
          for (int i = 0; i <= n; ++i) {
            path.t.push_back(static_cast<double>(i) / n);
            path.Psi.push_back(
                i == 0 ? Mat2::identity()
                       : Mat2::rotation(2.0 * 3.14159265358979323846 *
                                        theta_total * i / n));
          }
          return conley_zehnder(path);
        },
        py::arg("theta_total"), py::arg("n") = 4096,
        "Conley-Zehnder index of a rigid rotation path, 2*floor(theta)+1");

  m.def("fredholm_index",
        [](int genus, const std::vector<int>& mu, int c1) {
          CurveTopology top;
          top.genus = genus;
          top.mu = mu;
          top.c1 = c1;
          return fredholm_index(top);
        },
        py::arg("genus"), py::arg("mu"), py::arg("c1") = 0);

  m.def("normal_chern", &normal_chern, py::arg("ind"), py::arg("genus"),
        py::arg("gamma0"));

  m.def("run_pipeline",
        [](const std::string& config_path, const std::string& out_dir) {
          const RunConfig cfg = load_config(config_path);
          const RunReport rep = run_pipeline(cfg, out_dir);
          py::dict d;
          d["pass"] = rep.pass;
          d["report_json"] = rep.json_text;
          return d;
        },
        py::arg("config_path"), py::arg("out_dir"));

  m.attr("__version__") = "1.0.0";
}
