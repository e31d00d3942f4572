#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <boost/version.hpp>
#include <json.hpp>

#include "transmute/alt_representations.hpp"
#include "transmute/cli/bench.hpp"
#include "transmute/cli/expression.hpp"
#include "transmute/cli/job.hpp"
#include "transmute/csv.hpp"
#include "transmute/kernel_legendre.hpp"
#include "transmute/ode.hpp"
#include "transmute/pde_families.hpp"
#include "transmute/spectral.hpp"

#ifndef TRANSMUTE_VERSION
#define TRANSMUTE_VERSION "unknown"
#endif

namespace transmute::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// an error tagged with the pipeline stage that raised it
struct StageFailure {
  std::string stage;
  std::string message;
};

class Run {
 public:
  explicit Run(const JobConfig& c) : cfg(c) {}

  template <class F>
  auto stage(const std::string& name, F f) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(f())>) {
        f();
        timings[name] = elapsed(t0);
      } else {
        auto r = f();
        timings[name] = elapsed(t0);
        return r;
      }
    } catch (const StageFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw StageFailure{name, e.what()};
    }
  }

  std::ofstream output(const std::string& name) {
    const auto path = fs::path(cfg.out) / name;
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path.string());
    outputs.push_back(name);
    return f;
  }

  void absorb(const Diagnostics& d) { diag.merge(d); }

  const JobConfig& cfg;
  json timings = json::object();
  json certificates = json::object();
  std::vector<std::string> outputs;
  Diagnostics diag;

 private:
  static double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

Potential load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read potential samples " + path);
  const auto t = csv::read(in);
  const auto cx = t.column("x"), cq = t.column("q");
  std::size_t ci = t.header.size();
  for (std::size_t j = 0; j < t.header.size(); ++j)
    if (t.header[j] == "q_im") ci = j;
  std::vector<double> xs;
  std::vector<cplx> qs;
  for (const auto& row : t.rows) {
    xs.push_back(csv::to_double(row[cx]));
    qs.emplace_back(csv::to_double(row[cq]), ci < row.size() ? csv::to_double(row[ci]) : 0.0);
  }
  return Potential::from_samples(std::move(xs), std::move(qs), path);
}

Potential with_shift(const Potential& q, double s) {
  if (s == 0.0) return q;
  return Potential::from_function([q, s](double x) { return q(x) + s; }, q.is_real(), q.label() + " + shift",
                                  q.breakpoints());
}

std::vector<double> eval_points(const JobConfig& c) {
  if (!c.x.empty()) {
    for (double x : c.x)
      if (std::abs(x) > c.b * (1 + 1e-12)) throw DomainError("x = " + csv::format(x) + " lies outside [-b, b]");
    return c.x;
  }
  std::vector<double> xs(c.x_count);
  for (std::size_t i = 0; i < c.x_count; ++i)
    xs[i] = c.x_count == 1 ? c.b : c.b * static_cast<double>(i) / static_cast<double>(c.x_count - 1);
  return xs;
}

void write_complex_list(std::ostream& out, const char* name, std::span<const cplx> v) {
  csv::write_row(out, {"index", std::string(name) + "_re", std::string(name) + "_im"});
  for (std::size_t i = 0; i < v.size(); ++i)
    csv::write_row(out, {std::to_string(i), csv::format(v[i].real()), csv::format(v[i].imag())});
}

// --- tasks -----------------------------------------------------------------

struct Kernels {
  std::optional<LegendreKernel> legendre;
  std::optional<LaguerreKernel> laguerre;
  std::optional<HermiteKernel> hermite;
};

Kernels build_kernels(Run& run, const FormalPowersTable& powers, bool all) {
  const auto& c = run.cfg;
  Kernels k;
  if (all || c.rep == Representation::legendre) {
    k.legendre = run.stage("kernel", [&] { return build_beta(powers, c.N); });
    run.absorb(k.legendre->diagnostics);
  }
  if (all || c.rep == Representation::laguerre) {
    k.laguerre = run.stage("kernel_laguerre", [&] { return build_a(powers, c.N); });
    run.absorb(k.laguerre->diagnostics);
  }
  if (all || c.rep == Representation::hermite) {
    k.hermite = run.stage("kernel_hermite", [&] { return build_c(powers, c.N); });
    run.absorb(k.hermite->diagnostics);
  }
  return k;
}

struct Evaluated {
  cplx u;
  double eps;
};

Evaluated evaluate(const Kernels& k, Representation r, cplx w, double x, Diagnostics* diag) {
  switch (r) {
    case Representation::legendre: {
      const auto c = solve_u_nsbf_certified(*k.legendre, w, x);
      return {c.value, c.bound};
    }
    case Representation::laguerre:
      return {solve_u_laguerre(*k.laguerre, w, x), laguerre_bound(*k.laguerre, w, x)};
    case Representation::hermite:
      return {solve_u_hermite(*k.hermite, w, x, diag), hermite_bound(*k.hermite, w, x)};
  }
  return {};
}

void task_solve(Run& run, const FormalPowersTable& powers) {
  const auto k = build_kernels(run, powers, false);
  const auto xs = eval_points(run.cfg);
  std::vector<SolutionRow> rows;
  run.stage("solve", [&] {
    for (const cplx w : run.cfg.omega)
      for (double x : xs) {
        const auto e = evaluate(k, run.cfg.rep, w, x, &run.diag);
        rows.push_back({w, x, e.u, e.eps});
      }
  });
  double worst = 0;
  for (const auto& r : rows) worst = std::max(worst, r.eps);
  run.certificates["max_tail_bound"] = worst;
  auto f = run.output("solve.csv");
  write_solution_csv(f, rows, to_string(run.cfg.rep));
}

void task_kernel(Run& run, const FormalPowersTable& powers) {
  const auto k = build_kernels(run, powers, false);
  {
    auto f = run.output("formal_powers.csv");
    write_formal_powers_csv(f, powers);
  }
  auto f = run.output("kernel.csv");
  switch (run.cfg.rep) {
    case Representation::legendre: {
      write_kernel_csv(f, *k.legendre);
      auto t = run.output("tail.csv");
      csv::write_row(t, {"x", "eps_hat"});
      double worst = 0;
      for (std::size_t i = 0; i < k.legendre->grid.size(); ++i) {
        csv::write_row(t, {csv::format(k.legendre->grid[i]), csv::format(k.legendre->tail[i])});
        worst = std::max(worst, k.legendre->tail[i]);
      }
      run.certificates["max_eps_hat"] = worst;
      break;
    }
    case Representation::laguerre: write_laguerre_csv(f, *k.laguerre); break;
    case Representation::hermite: write_hermite_csv(f, *k.hermite); break;
  }
}

void task_compare(Run& run, const FormalPowersTable& powers, const Potential& q) {
  const auto k = build_kernels(run, powers, true);
  const auto xs = eval_points(run.cfg);
  auto f = run.output("compare.csv");
  csv::write_row(f, {"omega_re", "omega_im", "x", "legendre_re", "legendre_im", "laguerre_re", "laguerre_im",
                     "hermite_re", "hermite_im", "oracle_re", "oracle_im", "max_pairwise_delta", "legendre_eps",
                     "laguerre_eps", "hermite_eps"});
  json deltas = json::array();
  const Representation reps[] = {Representation::legendre, Representation::laguerre, Representation::hermite};
  run.stage("compare", [&] {
    for (const cplx w : run.cfg.omega) {
      const auto oracle = ode_oracle(q, w, xs);
      double pair[3] = {0, 0, 0}, vs_oracle[3] = {0, 0, 0};  // pairs: L-La, L-H, La-H
      for (std::size_t i = 0; i < xs.size(); ++i) {
        Evaluated e[3];
        for (int r = 0; r < 3; ++r) {
          e[r] = evaluate(k, reps[r], w, xs[i], &run.diag);
          vs_oracle[r] = std::max(vs_oracle[r], std::abs(e[r].u - oracle[i].u));
        }
        const double d[3] = {std::abs(e[0].u - e[1].u), std::abs(e[0].u - e[2].u), std::abs(e[1].u - e[2].u)};
        for (int j = 0; j < 3; ++j) pair[j] = std::max(pair[j], d[j]);
        std::vector<std::string> row{csv::format(w.real()), csv::format(w.imag()), csv::format(xs[i])};
        for (const auto& v : e) {
          row.push_back(csv::format(v.u.real()));
          row.push_back(csv::format(v.u.imag()));
        }
        row.push_back(csv::format(oracle[i].u.real()));
        row.push_back(csv::format(oracle[i].u.imag()));
        row.push_back(csv::format(std::max({d[0], d[1], d[2]})));
        for (const auto& v : e) row.push_back(csv::format(v.eps));
        csv::write_row(f, row);
      }
      deltas.push_back({{"omega", {w.real(), w.imag()}},
                        {"legendre_laguerre", pair[0]},
                        {"legendre_hermite", pair[1]},
                        {"laguerre_hermite", pair[2]},
                        {"legendre_oracle", vs_oracle[0]},
                        {"laguerre_oracle", vs_oracle[1]},
                        {"hermite_oracle", vs_oracle[2]}});
    }
  });
  run.certificates["compare"] = deltas;
}

void task_eigen(Run& run, const Potential& q, const LegendreKernel& kern) {
  const auto& e = run.cfg.eigen;
  SpectralProblem prob;
  prob.q = q;
  prob.b = run.cfg.b;
  prob.left = e.left;
  prob.right = e.right;
  prob.shift = e.shift;
  prob.scan_density = e.scan_density;
  EigenOptions opt;
  opt.eigenfunctions = e.eigenfunctions;
  EigenResult res;
  if (e.range) {
    prob.omega_min = e.range->first;
    prob.omega_max = e.range->second;
    res = run.stage("eigen", [&] { return find_eigenvalues_in_range(prob, kern, opt); });
  } else {
    res = run.stage("eigen", [&] { return find_eigenvalues(prob, kern, e.count, opt); });
  }
  run.absorb(res.diagnostics);
  double resid = 0, cert = 0;
  for (const auto& p : res.pairs) {
    resid = std::max(resid, p.residual);
    cert = std::max(cert, p.certificate);
  }
  run.certificates["eigenvalues"] = res.pairs.size();
  run.certificates["max_residual"] = resid;
  run.certificates["max_certificate"] = cert;
  {
    auto f = run.output("eigen.csv");
    write_eigen_csv(f, res.pairs);
  }
  if (e.eigenfunctions) {
    auto f = run.output("eigenfunctions.csv");
    write_eigenfunction_csv(f, eigenfunction_nodes(prob, kern), res.pairs);
  }
}

PlanarDomain make_domain(const PdeSpec& d) {
  return d.shape == PdeSpec::Shape::rectangle ? PlanarDomain::rectangle(d.x0, d.x1, d.y0, d.y1)
                                              : PlanarDomain::disk({d.cx, d.cy}, d.radius);
}

void task_pde(Run& run, const FormalPowersTable& powers) {
  const auto& d = run.cfg.pde;
  const auto data_expr = parse_expression(d.data, Variables::xy);
  const Field data = [data_expr](double x, double y) { return cplx(data_expr(x, y)); };
  const auto domain = make_domain(d);
  CollocationReport rep;
  if (d.method == PdeSpec::Method::family) {
    CollocationOptions opt;
    opt.pivoted_fallback = d.pivoted_fallback;
    rep = run.stage("pde", [&] {
      if (d.points == 0) return solve_dirichlet(powers, domain, data, d.basis, opt);
      std::vector<cplx> v;
      for (const auto p : domain.boundary(d.points)) v.push_back(data(p.x, p.y));
      return solve_dirichlet(powers, domain, v, d.basis, opt);
    });
  } else {
    const auto kern = build_kernels(run, powers, false);
    if (!kern.legendre) throw StageFailure{"pde", "the MFS image needs the legendre representation"};
    MfsOptions opt;
    opt.pivoted_fallback = d.pivoted_fallback;
    opt.constant_term = d.constant_term;
    const auto src = d.source_list.empty() ? source_circle(domain, d.sources, d.source_factor) : d.source_list;
    rep = run.stage("pde", [&] {
      if (d.points == 0) return mfs_solve(*kern.legendre, domain, data, src, opt);
      std::vector<cplx> v;
      for (const auto p : domain.boundary(d.points)) v.push_back(data(p.x, p.y));
      return mfs_solve(*kern.legendre, domain, v, src, opt);
    });
    auto f = run.output("pde_sources.csv");
    write_complex_list(f, "source", src);
  }
  run.absorb(rep.diagnostics);
  run.certificates["boundary_residual"] = rep.boundary_residual;
  run.certificates["condition_estimate"] = rep.condition_estimate;
  run.certificates["dropped_columns"] = rep.dropped_columns;
  if (!d.exact.empty()) {
    const auto exact = parse_expression(d.exact, Variables::xy);
    double worst = 0;
    for (const auto p : domain.interior(15)) worst = std::max(worst, std::abs(rep.evaluate(p.x, p.y) - exact(p.x, p.y)));
    run.certificates["interior_error"] = worst;
  }
  {
    auto f = run.output("pde_coefficients.csv");
    write_complex_list(f, "c", rep.coefficients);
  }
  auto f = run.output("pde_field.csv");
  write_field_csv(f, domain, rep.evaluate, d.field_grid);
}

void task_bench(Run& run, const Potential& q, std::optional<double> constant, std::ostream& log) {
  const auto r = run.stage("bench", [&] { return run_bench(run.cfg, q, constant); });
  {
    auto f = run.output("bench_orders.csv");
    write_bench_orders_csv(f, r);
  }
  {
    auto f = run.output("bench_omega.csv");
    write_bench_omega_csv(f, r);
  }
  {
    auto f = run.output("bench_grid.csv");
    write_bench_grid_csv(f, r);
  }
  {
    auto f = run.output("bench_eigen.csv");
    write_bench_eigen_csv(f, r);
  }
  run.certificates["eval_time_ratio"] = r.eval_ratio;
  run.certificates["build_time_ratio"] = r.build_ratio;
  print_bench_summary(log, r);
}

}  // namespace

int run_job(const JobConfig& config, std::ostream& log) {
  Run run(config);
  json manifest;
  manifest["config"] = json::parse(job_config_json(config));
  manifest["version"] = {{"transmute", TRANSMUTE_VERSION},
                         {"compiler", __VERSION__},
                         {"boost", BOOST_LIB_VERSION},
                         {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                               std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                               std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  int code = kExitOk;
  try {
    std::error_code ec;
    fs::create_directories(config.out, ec);
    if (ec) throw StageFailure{"output", "cannot create " + config.out + ": " + ec.message()};

    const bool eigen_grid = config.task == Task::eigen || config.task == Task::bench;
    const Grid grid = eigen_grid ? Grid::half(config.b, config.M) : Grid::symmetric(config.b, config.M);
    std::optional<double> constant;
    Potential q = run.stage("potential", [&] {
      if (!config.potential.samples.empty()) return load_samples(config.potential.samples);
      const auto e = parse_expression(config.potential.expression);
      if (!e.depends_on_x()) constant = e(0.0);
      return make_potential(e, config.potential.principal_value_ok, grid.step());
    });
    if (config.task == Task::eigen) q = with_shift(q, config.eigen.shift);

    if (config.task == Task::bench) {
      task_bench(run, q, constant, log);
    } else {
      // the family needs phi up to the degree of its last member; Legendre only phi_1
      std::size_t k_max = config.K_max;
      if (config.task == Task::pde && config.pde.method == PdeSpec::Method::family)
        k_max = std::max(k_max, family_degree(config.pde.basis - 1));
      if ((config.task == Task::compare || config.rep != Representation::legendre) && config.N > k_max)
        throw StageFailure{"formal_powers", "N = " + std::to_string(config.N) + " exceeds K_max = " + std::to_string(k_max)};
      Grid g = grid;
      g.set_breaks(q.breakpoints());
      const auto seed = run.stage("seed", [&] { return solve_seed(q, g); });
      const auto powers = run.stage("formal_powers", [&] { return build_formal_powers(g, seed.f, seed.f_prime, k_max); });
      switch (config.task) {
        case Task::solve: task_solve(run, powers); break;
        case Task::kernel: task_kernel(run, powers); break;
        case Task::compare: task_compare(run, powers, q); break;
        case Task::pde: task_pde(run, powers); break;
        case Task::eigen: {
          if (config.rep != Representation::legendre)
            throw StageFailure{"eigen", "eigenvalues use the legendre representation"};
          const auto k = build_kernels(run, powers, false);
          task_eigen(run, q, *k.legendre);
          break;
        }
        case Task::bench: break;
      }
    }
    manifest["status"] = "ok";
  } catch (const StageFailure& f) {
    log << "error in stage '" << f.stage << "': " << f.message << '\n';
    manifest["status"] = "error";
    manifest["error"] = {{"stage", f.stage}, {"message", f.message}};
    code = kExitError;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    manifest["status"] = "error";
    manifest["error"] = {{"stage", "setup"}, {"message", e.what()}};
    code = kExitError;
  }

  json warnings = json::array();
  for (const auto& w : run.diag.items()) {
    log << "warning [" << to_string(w.code) << "]: " << w.message << '\n';
    warnings.push_back({{"code", to_string(w.code)}, {"message", w.message}});
  }
  if (code == kExitOk && config.strict && !run.diag.empty()) {
    log << "strict mode: " << run.diag.items().size() << " numerical warning(s)\n";
    code = kExitWarnings;
  }
  manifest["timings_seconds"] = run.timings;
  manifest["certificates"] = run.certificates;
  manifest["warnings"] = warnings;
  manifest["outputs"] = run.outputs;
  manifest["exit_code"] = code;
  std::error_code ec;
  if (fs::is_directory(config.out, ec)) {
    std::ofstream m(fs::path(config.out) / "manifest.json");
    m << manifest.dump(2) << '\n';
  }
  if (code == kExitOk) {
    log << to_string(config.task) << ": wrote";
    for (const auto& o : run.outputs) log << ' ' << o;
    log << " to " << config.out << '\n';
  }
  return code;
}

}  // namespace transmute::cli
