// numpy-facing bindings for the core operations. Scalar fields travel as
// (ny, nx) float64 arrays, symmetric matrix fields as (3, ny, nx) with the
// planes a11, a12, a22.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hiflab/admissibility.hpp"
#include "hiflab/elliptic.hpp"
#include "hiflab/field_io.hpp"
#include "hiflab/internal_data.hpp"
#include "hiflab/norms.hpp"
#include "hiflab/operators.hpp"
#include "hiflab/reconstruction.hpp"
#include "hiflab/stability.hpp"

namespace py = pybind11;
using namespace hiflab;

namespace {

ScalarField scalar_from_array(const py::array_t<double>& arr) {
  if (arr.ndim() != 2) throw ConfigError("expected a 2-D (ny, nx) array");
  const int ny = static_cast<int>(arr.shape(0));
  const int nx = static_cast<int>(arr.shape(1));
  Grid grid(nx, ny);
  ScalarField f(grid);
  auto view = arr.unchecked<2>();
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) f(i, j) = view(j, i);
  }
  return f;
}

py::array_t<double> scalar_to_array(const ScalarField& f) {
  const Grid& g = f.grid();
  py::array_t<double> arr({g.ny(), g.nx()});
  auto view = arr.mutable_unchecked<2>();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) view(j, i) = f(i, j);
  }
  return arr;
}

// 2-D arrays act as isotropic scalar diffusion, 3-D as the full planes.
MatrixField matrix_from_array(const py::array_t<double>& arr) {
  if (arr.ndim() == 2) return MatrixField::isotropic(scalar_from_array(arr));
  if (arr.ndim() != 3 || arr.shape(0) != 3) {
    throw ConfigError("diffusion must be (ny, nx) or (3, ny, nx)");
  }
  const int ny = static_cast<int>(arr.shape(1));
  const int nx = static_cast<int>(arr.shape(2));
  Grid grid(nx, ny);
  MatrixField m(grid);
  auto view = arr.unchecked<3>();
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      m.a11()[grid.node(i, j)] = view(0, j, i);
      m.a12()[grid.node(i, j)] = view(1, j, i);
      m.a22()[grid.node(i, j)] = view(2, j, i);
    }
  }
  return m;
}

py::array_t<double> matrix_to_array(const MatrixField& m) {
  const Grid& g = m.grid();
  py::array_t<double> arr({3, g.ny(), g.nx()});
  auto view = arr.mutable_unchecked<3>();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      view(0, j, i) = m.a11(i, j);
      view(1, j, i) = m.a12(i, j);
      view(2, j, i) = m.a22(i, j);
    }
  }
  return arr;
}

ReconConfig recon_config(double tol, int max_iters, double u_floor,
                         double lambda_reg, double omega_margin) {
  ReconConfig cfg;
  cfg.tol = tol;
  cfg.max_iters = max_iters;
  cfg.u_floor = u_floor;
  cfg.lambda_reg = lambda_reg;
  cfg.omega_margin = omega_margin;
  return cfg;
}

py::dict recon_to_dict(const ReconResult& res) {
  py::dict d;
  d["field"] = scalar_to_array(res.field);
  if (res.field2) d["field2"] = scalar_to_array(*res.field2);
  d["iterations"] = res.iterations;
  d["rho_hat"] = res.rho_hat;
  d["refit_residual"] = res.refit_residual;
  d["refit_residual_omega"] = res.refit_residual_omega;
  d["converged"] = res.converged;
  d["success"] = res.success;
  d["flags"] = res.flags;
  d["history"] = res.history;
  return d;
}

void register_errors(py::module_& m) {
  static py::exception<ConfigError> config_error(m, "ConfigurationError");
  static py::exception<IoError> io_error(m, "FieldFileError");
  static py::exception<SolverError> solver_error(m, "SolverFailure");
  static py::exception<ReconstructionError> recon_error(m, "ReconstructionFailure");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const IoError& e) {
      py::set_error(io_error, e.what());
    } catch (const ReconstructionError& e) {
      py::set_error(recon_error, e.what());
    } catch (const SolverError& e) {
      py::set_error(solver_error, e.what());
    }
  });
}

}  // namespace

PYBIND11_MODULE(_hiflab, m) {
  m.doc() = "Elliptic internal-data forward solves, reconstructions, and "
            "stability experiments on the unit square.";
  m.attr("__version__") = "0.1.0";
  register_errors(m);

  m.def("first_dirichlet_eigenvalue",
        [](int nx, int ny) { return first_dirichlet_eigenvalue(Grid(nx, ny)); },
        py::arg("nx"), py::arg("ny"));
  m.def("dirichlet_eigenvalue_closed_form",
        [](int nx, int ny) {
          return dirichlet_eigenvalue_closed_form(Grid(nx, ny));
        },
        py::arg("nx"), py::arg("ny"));

  m.def("gradient",
        [](const py::array_t<double>& u) {
          const GradientField g = gradient(scalar_from_array(u));
          return py::make_tuple(scalar_to_array(g.dx), scalar_to_array(g.dy));
        },
        py::arg("u"));
  m.def("laplacian",
        [](const py::array_t<double>& u) {
          return scalar_to_array(laplacian(scalar_from_array(u)));
        },
        py::arg("u"));
  m.def("divergence_a_grad",
        [](const py::array_t<double>& a, const py::array_t<double>& u) {
          return scalar_to_array(
              divergence_a_grad(matrix_from_array(a), scalar_from_array(u)));
        },
        py::arg("a"), py::arg("u"));
  m.def("norms",
        [](const py::array_t<double>& u, double beta) {
          const NormBundle nb = norms(scalar_from_array(u), beta);
          py::dict d;
          d["linf"] = nb.linf;
          d["l2"] = nb.l2;
          d["h1"] = nb.h1;
          d["h2"] = nb.h2;
          d["h3"] = nb.h3;
          d["lipschitz"] = nb.lipschitz;
          d["holder"] = nb.holder;
          d["holder_beta"] = nb.holder_beta;
          return d;
        },
        py::arg("u"), py::arg("beta") = 0.5);

  m.def("read_field",
        [](const std::string& path) -> py::object {
          FieldFile f = read_field_file(path);
          if (f.kind == PayloadKind::scalar) return scalar_to_array(*f.scalar);
          return matrix_to_array(*f.matrix);
        },
        py::arg("path"));
  m.def("write_field",
        [](const std::string& path, const py::array_t<double>& arr) {
          if (arr.ndim() == 2) {
            write_field(scalar_from_array(arr), path);
          } else {
            write_field(matrix_from_array(arr), path);
          }
        },
        py::arg("path"), py::arg("field"));

  m.def("manufactured_case",
        [](int nx, int ny, const std::string& name, double c, double alpha,
           double beta, double gamma) {
          ManufacturedParams params{c, alpha, beta, gamma};
          const ManufacturedCase mc = manufactured_case(Grid(nx, ny), name, params);
          py::dict d;
          d["a"] = matrix_to_array(mc.a);
          d["q"] = scalar_to_array(mc.q);
          d["u_exact"] = scalar_to_array(mc.u_exact);
          d["f"] = scalar_to_array(embed_boundary(mc.f));
          return d;
        },
        py::arg("nx"), py::arg("ny"), py::arg("name"), py::arg("c") = 1.0,
        py::arg("alpha") = 1.0, py::arg("beta") = 0.0, py::arg("gamma") = 0.0);

  m.def("sample_coefficient",
        [](int nx, int ny, std::uint64_t seed, double amplitude, int modes,
           double decay, double lo, double hi) {
          SamplerConfig cfg;
          cfg.seed = seed;
          cfg.amplitude = amplitude;
          cfg.modes = modes;
          cfg.decay = decay;
          cfg.clamp_lo = lo;
          cfg.clamp_hi = hi;
          AdmissibleClass cls;
          cls.lambda = lo < 0.0 ? -lo : 0.0;
          return scalar_to_array(
              sample_coefficient(cfg, cls, Grid(nx, ny)).field);
        },
        py::arg("nx"), py::arg("ny"), py::arg("seed"), py::arg("amplitude"),
        py::arg("modes") = 4, py::arg("decay") = 2.0, py::arg("lo") = -1.0,
        py::arg("hi") = 1.0);

  m.def("solve",
        [](const py::array_t<double>& a, const py::array_t<double>& q,
           const py::array_t<double>& f, double tol, bool force) {
          const ScalarField qf = scalar_from_array(q);
          SolveOptions opts;
          opts.tol = tol;
          opts.force = force;
          const auto [u, stats] =
              solve(matrix_from_array(a), qf,
                    BoundaryTrace::trace_of(scalar_from_array(f)), opts);
          py::dict s;
          s["iterations"] = stats.iterations;
          s["residual"] = stats.residual;
          s["method"] = stats.method;
          return py::make_tuple(scalar_to_array(u), s);
        },
        py::arg("a"), py::arg("q"), py::arg("f"), py::arg("tol") = 1e-10,
        py::arg("force") = false);

  m.def("estimate_operator_norm_inverse",
        [](const py::array_t<double>& a, const py::array_t<double>& q) {
          return estimate_operator_norm_inverse(matrix_from_array(a),
                                                scalar_from_array(q));
        },
        py::arg("a"), py::arg("q"));
  m.def("estimate_delta",
        [](const py::array_t<double>& a, const py::array_t<double>& q) {
          return estimate_delta(matrix_from_array(a), scalar_from_array(q));
        },
        py::arg("a"), py::arg("q"));

  m.def("synthesize",
        [](const std::string& kind, const py::array_t<double>& a,
           const py::array_t<double>& q, const py::array_t<double>& u) {
          return scalar_to_array(synthesize(data_kind_from_string(kind),
                                            matrix_from_array(a),
                                            scalar_from_array(q),
                                            scalar_from_array(u)));
        },
        py::arg("kind"), py::arg("a"), py::arg("q"), py::arg("u"));
  m.def("add_noise",
        [](const py::array_t<double>& h, const std::string& model, double level,
           std::uint64_t seed) {
          NoiseSpec spec;
          spec.model = noise_model_from_string(model);
          spec.level = level;
          spec.seed = seed;
          return scalar_to_array(add_noise(scalar_from_array(h), spec));
        },
        py::arg("h"), py::arg("model"), py::arg("level"), py::arg("seed") = 0);
  m.def("quotient_transform",
        [](const py::array_t<double>& u1, const py::array_t<double>& u2,
           const py::array_t<double>& a, double floor) {
          const QuotientData qd = quotient_transform(
              scalar_from_array(u1), scalar_from_array(u2), scalar_from_array(a),
              floor);
          py::dict d;
          d["ratio"] = scalar_to_array(qd.ratio);
          d["sigma"] = scalar_to_array(qd.sigma);
          d["residual_inf"] = qd.residual_inf;
          return d;
        },
        py::arg("u1"), py::arg("u2"), py::arg("a"), py::arg("floor") = 1e-8);

  m.def("recover_q_from_qu",
        [](const py::array_t<double>& h, const py::array_t<double>& a,
           const py::array_t<double>& f, double tol, int max_iters,
           double u_floor) {
          return recon_to_dict(recover_q_from_qu(
              scalar_from_array(h), matrix_from_array(a),
              BoundaryTrace::trace_of(scalar_from_array(f)),
              recon_config(tol, max_iters, u_floor, 1e-6, 0.15)));
        },
        py::arg("h"), py::arg("a"), py::arg("f"), py::arg("tol") = 1e-10,
        py::arg("max_iters") = 200, py::arg("u_floor") = 1e-8);
  m.def("recover_q_from_qu2",
        [](const py::array_t<double>& h, const py::array_t<double>& a,
           const py::array_t<double>& f, double tol, int max_iters,
           double u_floor) {
          return recon_to_dict(recover_q_from_qu2(
              scalar_from_array(h), matrix_from_array(a),
              BoundaryTrace::trace_of(scalar_from_array(f)),
              recon_config(tol, max_iters, u_floor, 1e-6, 0.15)));
        },
        py::arg("h"), py::arg("a"), py::arg("f"), py::arg("tol") = 1e-10,
        py::arg("max_iters") = 200, py::arg("u_floor") = 1e-8);
  m.def("recover_q_direct",
        [](const py::array_t<double>& u, double u_floor) {
          return recon_to_dict(recover_q_direct(
              scalar_from_array(u), recon_config(1e-10, 200, u_floor, 1e-6, 0.15)));
        },
        py::arg("u"), py::arg("u_floor") = 1e-8);
  m.def("recover_a_scalar",
        [](const py::array_t<double>& u, const py::array_t<double>& q,
           const py::array_t<double>& a_boundary, double lambda_reg,
           double omega_margin) {
          return recon_to_dict(recover_a_scalar(
              scalar_from_array(u), scalar_from_array(q),
              BoundaryTrace::trace_of(scalar_from_array(a_boundary)),
              recon_config(1e-10, 200, 1e-8, lambda_reg, omega_margin)));
        },
        py::arg("u"), py::arg("q"), py::arg("a_boundary"),
        py::arg("lambda_reg") = 1e-6, py::arg("omega_margin") = 0.15);
  m.def("recover_aq_two_loads",
        [](const py::array_t<double>& u1, const py::array_t<double>& u2,
           const py::array_t<double>& a_boundary,
           const py::array_t<double>& q_boundary, double lambda_reg,
           double u_floor, double omega_margin) {
          return recon_to_dict(recover_aq_two_loads(
              scalar_from_array(u1), scalar_from_array(u2),
              BoundaryTrace::trace_of(scalar_from_array(a_boundary)),
              BoundaryTrace::trace_of(scalar_from_array(q_boundary)),
              recon_config(1e-10, 200, u_floor, lambda_reg, omega_margin)));
        },
        py::arg("u1"), py::arg("u2"), py::arg("a_boundary"),
        py::arg("q_boundary"), py::arg("lambda_reg") = 1e-6,
        py::arg("u_floor") = 1e-8, py::arg("omega_margin") = 0.15);

  m.def("run_experiment",
        [](const std::string& kind, int grid_n, int samples, std::uint64_t seed,
           int jobs, const py::dict& options) {
          ExperimentPlan plan;
          plan.grid = Grid(grid_n, grid_n);
          plan.samples = samples;
          plan.seed = seed;
          plan.jobs = jobs;
          for (const auto& item : options) {
            const std::string key = py::cast<std::string>(item.first);
            if (key == "illumination") {
              plan.illumination.kind = py::cast<std::string>(item.second);
            } else if (key == "illumination_value") {
              plan.illumination.value = py::cast<double>(item.second);
            } else if (key == "q_low") {
              plan.cls.q_low = py::cast<double>(item.second);
            } else if (key == "q_high") {
              plan.cls.q_high = py::cast<double>(item.second);
            } else if (key == "mu") {
              plan.cls.mu = py::cast<double>(item.second);
            } else if (key == "lambda") {
              plan.cls.lambda = py::cast<double>(item.second);
            } else if (key == "sigma_lo") {
              plan.sigma_lo = py::cast<double>(item.second);
            } else if (key == "sigma_hi") {
              plan.sigma_hi = py::cast<double>(item.second);
            } else if (key == "band_delta") {
              plan.band_delta = py::cast<double>(item.second);
            } else if (key == "ladder_t0") {
              plan.ladder.t0 = py::cast<double>(item.second);
            } else if (key == "ladder_ratio") {
              plan.ladder.ratio = py::cast<double>(item.second);
            } else if (key == "ladder_count") {
              plan.ladder.count = py::cast<int>(item.second);
            } else {
              throw ConfigError("unknown experiment option: " + key);
            }
          }
          const StabilityReport rep = run_experiment(kind, plan);
          py::dict d;
          d["experiment"] = rep.experiment;
          d["pass"] = rep.pass();
          d["samples_csv"] = rep.samples_csv();
          d["criteria_csv"] = rep.criteria_csv();
          d["summary_text"] = rep.summary_text();
          py::dict summary;
          for (const auto& [k, v] : rep.summary) summary[py::str(k)] = v;
          d["summary"] = summary;
          return d;
        },
        py::arg("kind"), py::arg("grid_n") = 33, py::arg("samples") = 3,
        py::arg("seed") = 1, py::arg("jobs") = 1,
        py::arg("options") = py::dict());
}
