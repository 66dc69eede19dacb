// Command-line front end: solve | synth | reconstruct | stability | eig.
// Single JSON config per run; field files in the HIF1 format; CSV reports
// with volatile values (wall time) confined to '#' comment lines.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hiflab/admissibility.hpp"
#include "hiflab/elliptic.hpp"
#include "hiflab/field_io.hpp"
#include "hiflab/internal_data.hpp"
#include "hiflab/norms.hpp"
#include "hiflab/reconstruction.hpp"
#include "hiflab/stability.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hiflab;

namespace {

enum ExitCode {
  kOk = 0,
  kConfig = 2,
  kIo = 3,
  kSolver = 4,
  kReconstruction = 5,
  kStability = 6,
};

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  int jobs = 1;
  bool force = false;
};

json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("io", "cannot open config: " + path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
  }
}

Grid parse_grid(const json& j) {
  if (!j.contains("grid")) throw ConfigError("config requires a grid section");
  const json& g = j.at("grid");
  check_keys(g, {"n", "nx", "ny"}, "grid");
  if (g.contains("n")) return Grid(g.at("n").get<int>(), g.at("n").get<int>());
  return Grid(g.at("nx").get<int>(), g.at("ny").get<int>());
}

IlluminationSpec parse_illumination(const json& j, const std::string& where) {
  check_keys(j, {"kind", "value"}, where);
  IlluminationSpec spec;
  spec.kind = j.value("kind", "const");
  spec.value = j.value("value", 1.0);
  return spec;
}

struct Problem {
  MatrixField a;
  ScalarField q;
  BoundaryTrace f;
  std::optional<ScalarField> u_exact;
};

Problem parse_problem(const json& j, const Grid& grid) {
  if (!j.contains("problem")) throw ConfigError("config requires a problem section");
  const json& p = j.at("problem");
  check_keys(p, {"catalog", "c", "alpha", "beta", "gamma", "a_file", "q_file", "f"},
             "problem");
  if (p.contains("catalog")) {
    ManufacturedParams params;
    params.c = p.value("c", 1.0);
    params.alpha = p.value("alpha", 1.0);
    params.beta = p.value("beta", 0.0);
    params.gamma = p.value("gamma", 0.0);
    ManufacturedCase mc =
        manufactured_case(grid, p.at("catalog").get<std::string>(), params);
    return {std::move(mc.a), std::move(mc.q), std::move(mc.f),
            std::move(mc.u_exact)};
  }
  if (!p.contains("q_file") || !p.contains("f")) {
    throw ConfigError("file-based problem needs q_file and f");
  }
  MatrixField a = p.contains("a_file")
                      ? read_matrix_field(p.at("a_file").get<std::string>())
                      : MatrixField::identity(grid);
  ScalarField q = read_scalar_field(p.at("q_file").get<std::string>());
  require_same_grid(a.grid(), grid, "problem a");
  require_same_grid(q.grid(), grid, "problem q");
  BoundaryTrace f =
      make_illumination(grid, parse_illumination(p.at("f"), "problem.f"));
  return {std::move(a), std::move(q), std::move(f), std::nullopt};
}

fs::path out_path(const CliOptions& cli, const std::string& rel) {
  fs::path p = fs::path(cli.out_dir) / rel;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("io", "cannot open for writing: " + path.string());
  os << text;
}

std::optional<std::uint64_t> env_seed_override() {
  const char* env = std::getenv("HIF_SEED");
  if (!env || !*env) return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0') {
    throw ConfigError("HIF_SEED must be an unsigned integer");
  }
  return static_cast<std::uint64_t>(v);
}

std::string grid_tag(const Grid& g) {
  return std::to_string(g.nx()) + "x" + std::to_string(g.ny());
}

int cmd_solve(const CliOptions& cli) {
  const json cfg = load_config(cli.config_path);
  check_keys(cfg, {"grid", "problem", "tol", "outputs"}, "solve config");
  const Grid grid = parse_grid(cfg);
  const Problem prob = parse_problem(cfg, grid);
  const double tol = cfg.value("tol", 1e-10);
  std::string u_out = "u.hif", stats_out = "solve_stats.csv";
  if (cfg.contains("outputs")) {
    check_keys(cfg.at("outputs"), {"u", "stats"}, "outputs");
    u_out = cfg.at("outputs").value("u", u_out);
    stats_out = cfg.at("outputs").value("stats", stats_out);
  }

  SolveOptions opts;
  opts.tol = tol;
  opts.force = cli.force;
  const auto t0 = std::chrono::steady_clock::now();
  const auto [u, stats] = solve(prob.a, prob.q, prob.f, opts);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  write_field(u, out_path(cli, u_out).string());

  double linf_exact = std::numeric_limits<double>::quiet_NaN();
  if (prob.u_exact) linf_exact = norm_linf_diff(u, *prob.u_exact);
  std::ostringstream os;
  os << "# hiflab solve stats\n";
  os << "# wall_seconds=" << format_double(wall) << "\n";
  os << "command,grid,method,iterations,residual,linf_error_exact\n";
  os << "solve," << grid_tag(grid) << "," << stats.method << ","
     << stats.iterations << "," << format_double(stats.residual) << ","
     << format_double(linf_exact) << "\n";
  write_text(out_path(cli, stats_out), os.str());
  std::cout << "solve: grid " << grid_tag(grid) << ", iterations "
            << stats.iterations << ", residual " << format_double(stats.residual)
            << "\n";
  return kOk;
}

int cmd_synth(const CliOptions& cli) {
  const json cfg = load_config(cli.config_path);
  check_keys(cfg, {"grid", "problem", "data", "noise", "outputs"}, "synth config");
  const Grid grid = parse_grid(cfg);
  const Problem prob = parse_problem(cfg, grid);
  if (!cfg.contains("data")) throw ConfigError("synth needs a data section");
  check_keys(cfg.at("data"), {"kind"}, "data");
  const DataKind kind =
      data_kind_from_string(cfg.at("data").at("kind").get<std::string>());

  NoiseSpec noise;
  if (cfg.contains("noise")) {
    const json& n = cfg.at("noise");
    check_keys(n, {"model", "level", "seed"}, "noise");
    noise.model = noise_model_from_string(n.value("model", "none"));
    noise.level = n.value("level", 0.0);
    noise.seed = n.value("seed", std::uint64_t{0});
  }
  if (const auto seed = env_seed_override()) noise.seed = *seed;

  std::string h_out = "h.hif";
  std::optional<std::string> u_out;
  if (cfg.contains("outputs")) {
    check_keys(cfg.at("outputs"), {"h", "u"}, "outputs");
    h_out = cfg.at("outputs").value("h", h_out);
    if (cfg.at("outputs").contains("u")) {
      u_out = cfg.at("outputs").at("u").get<std::string>();
    }
  }

  SolveOptions opts;
  opts.tol = 1e-12;
  opts.force = cli.force;
  const auto [u, stats] = solve(prob.a, prob.q, prob.f, opts);
  const ScalarField h = add_noise(synthesize(kind, prob.a, prob.q, u), noise);
  write_field(h, out_path(cli, h_out).string());
  if (u_out) write_field(u, out_path(cli, *u_out).string());
  std::cout << "synth: kind " << to_string(kind) << ", grid " << grid_tag(grid)
            << "\n";
  return kOk;
}

BoundaryTrace parse_boundary(const json& j, const Grid& grid,
                             const std::string& where) {
  check_keys(j, {"value", "field_file"}, where);
  if (j.contains("value")) return BoundaryTrace(grid, j.at("value").get<double>());
  const ScalarField f = read_scalar_field(j.at("field_file").get<std::string>());
  require_same_grid(f.grid(), grid, where.c_str());
  return BoundaryTrace::trace_of(f);
}

int cmd_reconstruct(const CliOptions& cli) {
  const json cfg = load_config(cli.config_path);
  check_keys(cfg, {"grid", "method", "inputs", "f", "recon", "outputs"},
             "reconstruct config");
  const Grid grid = parse_grid(cfg);
  const std::string method = cfg.at("method").get<std::string>();

  ReconConfig rcfg;
  if (cfg.contains("recon")) {
    const json& r = cfg.at("recon");
    check_keys(r,
               {"tol", "max_iters", "u_floor", "lambda_reg", "omega_margin",
                "smooth_passes"},
               "recon");
    rcfg.tol = r.value("tol", rcfg.tol);
    rcfg.max_iters = r.value("max_iters", rcfg.max_iters);
    rcfg.u_floor = r.value("u_floor", rcfg.u_floor);
    rcfg.lambda_reg = r.value("lambda_reg", rcfg.lambda_reg);
    rcfg.omega_margin = r.value("omega_margin", rcfg.omega_margin);
    rcfg.smooth_passes = r.value("smooth_passes", rcfg.smooth_passes);
  }
  rcfg.force = cli.force;

  const json inputs = cfg.value("inputs", json::object());
  auto input_field = [&](const char* key) {
    if (!inputs.contains(key)) {
      throw ConfigError(std::string("reconstruct inputs need ") + key);
    }
    ScalarField f = read_scalar_field(inputs.at(key).get<std::string>());
    require_same_grid(f.grid(), grid, key);
    return f;
  };

  ReconResult res{ScalarField(grid), std::nullopt, 0, {}, 0, 0, 0, false, false, {}};
  if (method == "qu" || method == "qu2") {
    check_keys(inputs, {"h_file", "a_file"}, "inputs");
    const ScalarField h = input_field("h_file");
    MatrixField a0 = inputs.contains("a_file")
                         ? read_matrix_field(inputs.at("a_file").get<std::string>())
                         : MatrixField::identity(grid);
    if (!cfg.contains("f")) throw ConfigError("picard reconstruction needs f");
    const BoundaryTrace f =
        make_illumination(grid, parse_illumination(cfg.at("f"), "f"));
    res = method == "qu" ? recover_q_from_qu(h, a0, f, rcfg)
                         : recover_q_from_qu2(h, a0, f, rcfg);
  } else if (method == "direct_q") {
    check_keys(inputs, {"u_file"}, "inputs");
    res = recover_q_direct(input_field("u_file"), rcfg);
  } else if (method == "a_scalar") {
    check_keys(inputs, {"u_file", "q_file", "q_value", "a_boundary"}, "inputs");
    const ScalarField u = input_field("u_file");
    ScalarField q = inputs.contains("q_file")
                        ? input_field("q_file")
                        : ScalarField(grid, inputs.value("q_value", 0.0));
    if (!inputs.contains("a_boundary")) {
      throw ConfigError("a_scalar needs a_boundary");
    }
    res = recover_a_scalar(u, q,
                           parse_boundary(inputs.at("a_boundary"), grid,
                                          "a_boundary"),
                           rcfg);
  } else if (method == "two_loads") {
    check_keys(inputs, {"u1_file", "u2_file", "a_boundary", "q_boundary"},
               "inputs");
    if (!inputs.contains("a_boundary") || !inputs.contains("q_boundary")) {
      throw ConfigError("two_loads needs a_boundary and q_boundary");
    }
    res = recover_aq_two_loads(
        input_field("u1_file"), input_field("u2_file"),
        parse_boundary(inputs.at("a_boundary"), grid, "a_boundary"),
        parse_boundary(inputs.at("q_boundary"), grid, "q_boundary"), rcfg);
  } else {
    throw ConfigError("unknown reconstruction method: " + method);
  }

  std::string field_out = "recovered.hif", field2_out = "recovered2.hif",
              stats_out = "recon_result.csv";
  if (cfg.contains("outputs")) {
    check_keys(cfg.at("outputs"), {"field", "field2", "stats"}, "outputs");
    field_out = cfg.at("outputs").value("field", field_out);
    field2_out = cfg.at("outputs").value("field2", field2_out);
    stats_out = cfg.at("outputs").value("stats", stats_out);
  }
  write_field(res.field, out_path(cli, field_out).string());
  if (res.field2) write_field(*res.field2, out_path(cli, field2_out).string());

  std::string flags;
  for (std::size_t k = 0; k < res.flags.size(); ++k) {
    flags += res.flags[k];
    if (k + 1 < res.flags.size()) flags += ';';
  }
  std::ostringstream os;
  os << "# hiflab reconstruct result\n";
  os << "method,grid,iterations,converged,success,rho_hat,refit_residual,"
        "refit_residual_omega,flags\n";
  os << method << "," << grid_tag(grid) << "," << res.iterations << ","
     << (res.converged ? 1 : 0) << "," << (res.success ? 1 : 0) << ","
     << format_double(res.rho_hat) << "," << format_double(res.refit_residual)
     << "," << format_double(res.refit_residual_omega) << "," << flags << "\n";
  write_text(out_path(cli, stats_out), os.str());
  std::cout << "reconstruct " << method << ": iterations " << res.iterations
            << ", refit " << format_double(res.refit_residual) << "\n";

  if (!res.success) {
    std::cerr << "error: reconstruction did not certify\nreason="
              << (res.converged ? "refit" : "max_iters") << "\n";
    return kReconstruction;
  }
  return kOk;
}

int cmd_stability(const CliOptions& cli) {
  const json cfg = load_config(cli.config_path);
  check_keys(cfg, {"grid", "experiment", "plan", "outputs"}, "stability config");
  const std::string kind = cfg.at("experiment").get<std::string>();

  ExperimentPlan plan;
  plan.grid = parse_grid(cfg);
  plan.jobs = cli.jobs;
  if (cfg.contains("plan")) {
    const json& p = cfg.at("plan");
    check_keys(p,
               {"samples", "seed", "ladder", "class", "illumination",
                "illumination2", "noise", "sigma_lo", "sigma_hi", "eta_min",
                "band_delta", "omega_margin", "centers", "radii", "magnitudes",
                "include_out_of_hypothesis", "grid2", "include_reference"},
               "plan");
    plan.samples = p.value("samples", plan.samples);
    plan.seed = p.value("seed", plan.seed);
    if (p.contains("ladder")) {
      check_keys(p.at("ladder"), {"t0", "ratio", "count"}, "ladder");
      plan.ladder.t0 = p.at("ladder").value("t0", plan.ladder.t0);
      plan.ladder.ratio = p.at("ladder").value("ratio", plan.ladder.ratio);
      plan.ladder.count = p.at("ladder").value("count", plan.ladder.count);
    }
    if (p.contains("class")) {
      const json& c = p.at("class");
      check_keys(c,
                 {"mu", "lambda", "nonpositive_q", "q_minus", "q_plus", "q_low",
                  "q_high", "m", "lipschitz_bound", "kappa", "Lambda", "beta"},
                 "class");
      plan.cls.mu = c.value("mu", plan.cls.mu);
      plan.cls.lambda = c.value("lambda", plan.cls.lambda);
      plan.cls.nonpositive_q = c.value("nonpositive_q", false);
      if (c.contains("q_minus")) plan.cls.q_minus = c.at("q_minus").get<double>();
      if (c.contains("q_plus")) plan.cls.q_plus = c.at("q_plus").get<double>();
      if (c.contains("q_low")) plan.cls.q_low = c.at("q_low").get<double>();
      if (c.contains("q_high")) plan.cls.q_high = c.at("q_high").get<double>();
      if (c.contains("m")) plan.cls.min_illumination = c.at("m").get<double>();
      if (c.contains("lipschitz_bound")) {
        plan.cls.lipschitz_bound = c.at("lipschitz_bound").get<double>();
      }
      if (c.contains("kappa")) plan.cls.coeff_floor = c.at("kappa").get<double>();
      if (c.contains("Lambda")) plan.cls.norm_budget = c.at("Lambda").get<double>();
      if (c.contains("beta")) plan.cls.holder_beta = c.at("beta").get<double>();
    }
    if (p.contains("illumination")) {
      plan.illumination = parse_illumination(p.at("illumination"), "illumination");
    }
    if (p.contains("illumination2")) {
      plan.illumination2 =
          parse_illumination(p.at("illumination2"), "illumination2");
    }
    if (p.contains("noise")) {
      const json& n = p.at("noise");
      check_keys(n, {"model", "level", "seed"}, "plan.noise");
      plan.noise.model = noise_model_from_string(n.value("model", "none"));
      plan.noise.level = n.value("level", 0.0);
      plan.noise.seed = n.value("seed", std::uint64_t{0});
    }
    plan.sigma_lo = p.value("sigma_lo", plan.sigma_lo);
    plan.sigma_hi = p.value("sigma_hi", plan.sigma_hi);
    plan.eta_min = p.value("eta_min", plan.eta_min);
    plan.band_delta = p.value("band_delta", plan.band_delta);
    plan.omega_margin = p.value("omega_margin", plan.omega_margin);
    plan.include_out_of_hypothesis =
        p.value("include_out_of_hypothesis", plan.include_out_of_hypothesis);
    plan.include_reference = p.value("include_reference", plan.include_reference);
    plan.grid2 = p.value("grid2", plan.grid2);
    if (p.contains("centers")) {
      for (const auto& c : p.at("centers")) {
        plan.centers.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
      }
    }
    if (p.contains("radii")) {
      plan.radii = p.at("radii").get<std::vector<double>>();
    }
    if (p.contains("magnitudes")) {
      plan.magnitudes = p.at("magnitudes").get<std::vector<double>>();
    }
  }
  if (const auto seed = env_seed_override()) plan.seed = *seed;

  std::string samples_out = kind + "_samples.csv";
  std::string criteria_out = kind + "_criteria.csv";
  if (cfg.contains("outputs")) {
    check_keys(cfg.at("outputs"), {"samples", "criteria"}, "outputs");
    samples_out = cfg.at("outputs").value("samples", samples_out);
    criteria_out = cfg.at("outputs").value("criteria", criteria_out);
  }

  const StabilityReport rep = run_experiment(kind, plan);
  write_text(out_path(cli, samples_out), rep.samples_csv());
  write_text(out_path(cli, criteria_out), rep.criteria_csv());
  std::cout << rep.summary_text();
  return rep.pass() ? kOk : kStability;
}

int cmd_eig(const CliOptions& cli) {
  const json cfg = load_config(cli.config_path);
  check_keys(cfg, {"grid"}, "eig config");
  const Grid grid = parse_grid(cfg);
  const double lam = first_dirichlet_eigenvalue(grid);
  std::cout << "lambda1_discrete=" << format_double(lam) << "\n";
  std::cout << "closed_form=" << format_double(dirichlet_eigenvalue_closed_form(grid))
            << "\n";
  return kOk;
}

const char* kCsvHelp =
    "CSV outputs\n"
    "  solve stats:       command,grid,method,iterations,residual,linf_error_exact\n"
    "  reconstruct result: method,grid,iterations,converged,success,rho_hat,\n"
    "                      refit_residual,refit_residual_omega,flags\n"
    "  stability samples:  per-experiment columns --\n"
    "    lip_j1/lip_j2: sample,scale_index,t,num_linf,den_linf,ratio\n"
    "    mt3:    pair,K_theory,l2_q_diff,l2_data_diff,l2_u_diff,\n"
    "            l2_sqrtv_diff,l2_sqrtq_diff,bound_main,bound_link5,\n"
    "            bound_link6,ok_main,ok_link5,ok_link6,identity_lhs,\n"
    "            identity_rhs,identity_gap\n"
    "    hs1:    sample,scale_index,t,u_diff_l2,q_diff_linf,weighted_diff_l2\n"
    "    hs3:    sample,scale_index,t,u_diff_l2,a_diff_c_omega,identity_lhs,\n"
    "            identity_rhs,identity_gap\n"
    "    glb:    sample,eta            (sample -1 is the sigma==1 reference)\n"
    "    pos:    case,eps_hat,band_min,harnack_ratio\n"
    "    interp: section,sample,grid_n,mu,l2_norm,h2_norm,h3_norm,\n"
    "            sobolev_ratio,linf,holder_norm,weighted_l1,weighted_ratio\n"
    "    vanish: center,center_x,center_y,rho,energy,clipped\n"
    "    contract: magnitude_frac,profile,max_rho,iterations,converged,\n"
    "              inv_norm_ratio,in_hypothesis\n"
    "  stability criteria: criterion,value,relation,threshold,hard,pass\n"
    "Values are shortest-round-trip decimals; '#' lines carry volatile\n"
    "metadata (wall time) and are not part of the reproducible body.\n";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hiflab: elliptic internal-data experiments"};
  app.footer(kCsvHelp);
  app.fallthrough();

  CliOptions cli;
  app.add_option("--out", cli.out_dir, "output directory (default .)");
  app.add_option("--jobs", cli.jobs, "worker threads for plan samples");
  app.add_flag("--force", cli.force, "override admissibility prechecks");

  std::string command;
  const std::pair<const char*, const char*> subs[] = {
      {"solve", "solve the Dirichlet problem and write the solution field"},
      {"synth", "synthesize an internal energy density from a problem"},
      {"reconstruct", "recover coefficients from internal data"},
      {"stability", "run a stability experiment and write its report"},
      {"eig", "print the discrete first Dirichlet eigenvalue"},
  };
  for (const auto& [name, desc] : subs) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", cli.config_path, "JSON config path")->required();
    sub->callback([&command, n = name] { command = n; });
  }
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (command == "solve") return cmd_solve(cli);
    if (command == "synth") return cmd_synth(cli);
    if (command == "reconstruct") return cmd_reconstruct(cli);
    if (command == "stability") return cmd_stability(cli);
    if (command == "eig") return cmd_eig(cli);
    std::cerr << "error: no command\n";
    return kConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\nreason=" << e.reason() << "\n";
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\nreason=" << e.reason() << "\n";
    return kIo;
  } catch (const ReconstructionError& e) {
    std::cerr << "error: " << e.what() << "\nreason=" << e.reason() << "\n";
    return kReconstruction;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\nreason=" << e.reason() << "\n";
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
}
