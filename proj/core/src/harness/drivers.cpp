#include "sbdf/harness/drivers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sbdf/coupled.hpp"
#include "sbdf/energy.hpp"
#include "sbdf/errors.hpp"
#include "sbdf/etd.hpp"
#include "sbdf/field_io.hpp"
#include "sbdf/harness/output.hpp"
#include "sbdf/parallel.hpp"

namespace sbdf::harness {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int whole_steps(double T, double dt, const std::string& key) {
  const double n = T / dt;
  const double r = std::round(n);
  if (r < 1.0 || std::abs(n - r) > 1e-9 * std::max(1.0, r))
    throw ConfigError(key, "T = " + format_double(T) + " is not a whole multiple of dt = " + format_double(dt));
  return static_cast<int>(r);
}

std::filesystem::path prepare_dir(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw ConfigError("output.dir", "cannot create " + cfg.out_dir.string() + ": " + ec.message());
  set_thread_count(cfg.threads);
  return cfg.out_dir;
}

Manifest start_manifest(const std::string& command, const RunConfig& cfg) {
  Manifest m(command);
  m.set_config(cfg.echo);
  m.set("grid.h", cfg.grid.h);
  const BoundarySpec& bc = cfg.grid.bc;
  m.set("grid.boundary", std::string(to_string(bc.left)) + "," + std::string(to_string(bc.right)) + "," +
                             std::string(to_string(bc.bottom)) + "," + std::string(to_string(bc.top)));
  return m;
}

void note_desk_scale(Manifest& m, const std::string& text) { m.set("desk_scale", text); }

NonlinearModel ac_model(const RunConfig& cfg) {
  if (cfg.model != ModelId::AllenCahn) throw ConfigError("model.id", "this command needs model.id = allen_cahn");
  return cfg.allen_cahn_model();
}

double reference_dt(const RunConfig& cfg, const std::vector<double>& dts) {
  if (cfg.reference_dt > 0.0) return cfg.reference_dt;
  return *std::min_element(dts.begin(), dts.end()) / 16.0;
}

}  // namespace

StepConfig step_config(const RunConfig& cfg) {
  StepConfig s;
  s.tol_const = cfg.tol_const;
  s.max_iters = cfg.max_iters;
  s.cutoff_enabled = cfg.cutoff;
  return s;
}

Trajectory simulate(const NonlinearModel& model, const Field& u0, int k, double dt, int steps,
                    const StepConfig& cfg, const LevelCallback& on_level) {
  Trajectory tr;
  tr.steps = steps;
  const auto t0 = Clock::now();
  std::optional<Integrator> integ;
  try {
    integ.emplace(model, u0, k, dt, cfg);
  } catch (const SolverError& e) {
    throw SolverError(std::string("bootstrap: ") + e.what(), e.last_increment(), e.rho());
  }
  tr.boot = integ->bootstrap_report();
  const auto& start = integ->start_levels();
  const int n0 = std::min(k - 1, steps);
  for (int n = 0; n <= n0; ++n) {
    tr.max_linf = std::max(tr.max_linf, linf_norm(start[n]));
    if (on_level) on_level(n, n * dt, start[n]);
  }
  if (steps < k) {
    tr.final_field = start[steps];
    tr.seconds = seconds_since(t0);
    return tr;
  }
  for (int n = k; n <= steps; ++n) {
    StepResult res;
    try {
      res = integ->advance();
    } catch (const SolverError& e) {
      throw SolverError("step " + std::to_string(n) + ": " + e.what(), e.last_increment(), e.rho());
    }
    tr.iterations += res.report.iters;
    tr.max_linf = std::max(tr.max_linf, res.report.linf);
    if (on_level) on_level(n, n * dt, integ->current());
  }
  tr.final_field = integ->current();
  tr.seconds = seconds_since(t0);
  return tr;
}

RunSummary run(const RunConfig& cfg) {
  const auto dir = prepare_dir(cfg);
  const NonlinearModel model = ac_model(cfg);
  const int steps = whole_steps(cfg.T, cfg.dt, "scheme.T");
  const StepConfig scfg = step_config(cfg);
  const Field u0 = cfg.initial_field();

  Manifest manifest = start_manifest("run", cfg);
  RunSummary sum;
  sum.steps = steps;

  std::optional<CsvWriter> energy;
  std::optional<CsvWriter> mbp;
  if (cfg.trace_energy) energy.emplace(dir / "energy_trace.csv", std::vector<std::string>{"t", "E_h", "H_k", "augmented", "linf"});
  if (cfg.trace_mbp) mbp.emplace(dir / "mbp_trace.csv", std::vector<std::string>{"t", "linf"});

  const auto t0 = Clock::now();
  std::optional<Integrator> integ;
  try {
    integ.emplace(model, u0, cfg.k, cfg.dt, scfg);
  } catch (const SolverError& e) {
    throw SolverError(std::string("bootstrap: ") + e.what(), e.last_increment(), e.rho());
  }
  const SchemeCoeffs c = integ->coeffs();

  auto energy_row = [&](double t, const Field& u, const Field& H) {
    const EnergyRecord r = make_energy_record(t, u, H, c, model.alpha, model.B, cfg.dt);
    energy->cell(r.t).cell(r.E_h).cell(r.H_k).cell(r.augmented).cell(r.linf).end_row();
  };

  // Bootstrap levels: energy rows use the history of the first main step.
  {
    const auto& start = integ->start_levels();
    const int n0 = std::min(cfg.k - 1, steps);
    Field H0;
    if (energy) H0 = history_term(c, integ->history(), model.B);
    for (int n = 0; n <= n0; ++n) {
      const double t = n * cfg.dt;
      sum.max_linf = std::max(sum.max_linf, linf_norm(start[n]));
      if (energy) energy_row(t, start[n], H0);
      if (mbp) mbp->cell(t).cell(linf_norm(start[n])).end_row();
    }
    if (steps < cfg.k) sum.final_field = start[steps];
  }

  std::vector<StepEnergy> step_energy;
  for (int n = cfg.k; n <= steps; ++n) {
    const double t = n * cfg.dt;
    std::optional<IterationEnergyTracker> tracker;
    if (energy) tracker.emplace(c, integ->history(), model);
    IterateObserver obs;
    if (tracker || (mbp && cfg.trace_iterates)) {
      IterateObserver inner = tracker ? tracker->observer() : IterateObserver{};
      obs = [&, inner](const IterateEvent& ev) {
        if (inner) inner(ev);
        if (!cfg.trace_iterates) return;
        if (energy) energy_row(t, ev.next, tracker->hist_term());
        if (mbp) mbp->cell(t).cell(linf_norm(ev.next)).end_row();
      };
    }
    StepResult res;
    try {
      res = integ->advance(obs);
    } catch (const SolverError& e) {
      throw SolverError("step " + std::to_string(n) + ": " + e.what(), e.last_increment(), e.rho());
    }
    sum.iterations += res.report.iters;
    sum.max_linf = std::max(sum.max_linf, res.report.linf);
    if (tracker) {
      const DissipationReport rep = tracker->check();
      sum.iteration_checks += rep.checked;
      sum.iteration_violations += rep.violations.size();
      sum.iteration_violations_algorithmic += tracker->check_algorithmic().violations.size();
      step_energy.push_back({t, tracker->augmented().front(), tracker->augmented().back()});
      if (!cfg.trace_iterates) energy_row(t, integ->current(), tracker->hist_term());
    }
    if (mbp && !cfg.trace_iterates) mbp->cell(t).cell(res.report.linf).end_row();
  }
  if (steps >= cfg.k) sum.final_field = integ->current();
  sum.seconds = seconds_since(t0);
  sum.step_violations = check_step_dissipation(step_energy).violations.size();

  if (energy) {
    energy->close();
    manifest.add_output(energy->path());
  }
  if (mbp) {
    mbp->close();
    manifest.add_output(mbp->path());
  }
  const auto snap = dir / snapshot_name(cfg.T);
  write_snapshot(snap, sum.final_field);
  manifest.add_output(snap);
  if (cfg.snapshot_csv) {
    auto csv = snap;
    csv.replace_extension(".csv");
    write_csv(csv, sum.final_field);
    manifest.add_output(csv);
  }

  const BootstrapReport& boot = integ->bootstrap_report();
  manifest.set("steps", std::to_string(steps));
  manifest.set("iterations", std::to_string(sum.iterations));
  manifest.set("bootstrap.substeps_per_step", std::to_string(boot.substeps_per_step));
  manifest.set("bootstrap.fine_steps", std::to_string(boot.fine_steps));
  manifest.set("bootstrap.fine_iterations", std::to_string(boot.fine_iterations));
  manifest.set("max_linf", sum.max_linf);
  if (energy) {
    manifest.set("energy.iteration_checks", std::to_string(sum.iteration_checks));
    manifest.set("energy.iteration_violations", std::to_string(sum.iteration_violations));
    manifest.set("energy.iteration_violations_algorithmic", std::to_string(sum.iteration_violations_algorithmic));
    manifest.set("energy.step_violations", std::to_string(sum.step_violations));
  }
  if (cfg.timing) manifest.set("seconds", sum.seconds);
  sum.outputs = manifest.outputs();
  sum.outputs.push_back(manifest.write(dir));
  return sum;
}

void fill_orders(std::vector<ConvergenceRow>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].order.reset();
    if (i == 0) continue;
    const auto& a = rows[i - 1];
    const auto& b = rows[i];
    if (a.error > 0.0 && b.error > 0.0 && a.dt != b.dt)
      rows[i].order = std::log(a.error / b.error) / std::log(a.dt / b.dt);
  }
}

namespace {

void write_table(const std::filesystem::path& path, const std::vector<ConvergenceRow>& rows, bool timing) {
  CsvWriter w(path, {"dt", "error", "order", "iters", "seconds"});
  for (const auto& r : rows) {
    w.cell(r.dt).cell(r.error);
    if (r.order)
      w.cell(*r.order);
    else
      w.empty();
    w.cell(r.iters).cell(timing ? r.seconds : 0.0).end_row();
  }
  w.close();
}

}  // namespace

ConvergenceResult converge(const RunConfig& cfg) {
  const auto dir = prepare_dir(cfg);
  const NonlinearModel model = ac_model(cfg);
  const StepConfig scfg = step_config(cfg);
  const Field u0 = cfg.initial_field();
  for (double dt : cfg.converge_dts) whole_steps(cfg.T, dt, "converge.dt_list");

  ConvergenceResult out;
  out.reference_dt = reference_dt(cfg, cfg.converge_dts);
  const int ref_steps = whole_steps(cfg.T, out.reference_dt, "converge.reference_dt");
  const Trajectory ref = simulate(model, u0, 4, out.reference_dt, ref_steps, scfg);

  Manifest manifest = start_manifest("converge", cfg);
  note_desk_scale(manifest, "temporal study on the configured grid (128^2 by default) with an sBDF4 reference");
  manifest.set("reference.dt", out.reference_dt);
  manifest.set("reference.steps", std::to_string(ref_steps));
  manifest.set("reference.iterations", std::to_string(ref.iterations));
  manifest.set("reference.bootstrap_substeps", std::to_string(ref.boot.substeps_per_step));

  for (int k : cfg.converge_orders) {
    ConvergenceTable table;
    table.k = k;
    for (double dt : cfg.converge_dts) {
      const Trajectory tr = simulate(model, u0, k, dt, whole_steps(cfg.T, dt, "converge.dt_list"), scfg);
      table.rows.push_back({dt, l2_distance(tr.final_field, ref.final_field), std::nullopt, tr.iterations, tr.seconds});
    }
    fill_orders(table.rows);
    const auto name = cfg.converge_orders.size() == 1 ? std::string("convergence.csv")
                                                      : "convergence_k" + std::to_string(k) + ".csv";
    write_table(dir / name, table.rows, cfg.timing);
    manifest.add_output(dir / name);
    out.tables.push_back(std::move(table));
  }
  out.outputs = manifest.outputs();
  out.outputs.push_back(manifest.write(dir));
  return out;
}

ComparisonResult compare_etd(const RunConfig& cfg) {
  const NonlinearModel model = ac_model(cfg);
  std::optional<etd::DenseOperator> op;
  try {
    op.emplace(etd::assemble_operator(cfg.grid, model.alpha, model.B));
  } catch (const std::length_error& e) {
    throw ConfigError("grid.n", std::string("too large for the dense ETD oracle: ") + e.what());
  }
  const auto dir = prepare_dir(cfg);
  const StepConfig scfg = step_config(cfg);
  const Field u0 = cfg.initial_field();
  for (double dt : cfg.compare_dts) whole_steps(cfg.T, dt, "compare.dt_list");

  ComparisonResult out;
  out.reference_dt = reference_dt(cfg, cfg.compare_dts);
  const Trajectory ref =
      simulate(model, u0, 4, out.reference_dt, whole_steps(cfg.T, out.reference_dt, "converge.reference_dt"), scfg);

  auto t0 = Clock::now();
  const etd::ExponentialPropagator prop(*op);
  out.setup_seconds = seconds_since(t0);
  const etd::VectorMap N = etd::modified_nonlinearity(model);

  auto run_method = [&](int m, double dt) -> ConvergenceRow {
    const int steps = whole_steps(cfg.T, dt, "compare.dt_list");
    ConvergenceRow row;
    row.dt = dt;
    Field final_field;
    if (m == 1 || m == 3) {
      const Trajectory tr = simulate(model, u0, m == 1 ? 1 : 2, dt, steps, scfg);
      final_field = tr.final_field;
      row.iters = tr.iterations;
      row.seconds = tr.seconds;
    } else {
      const auto s0 = Clock::now();
      Eigen::VectorXd v = op->to_vector(u0);
      for (int n = 0; n < steps; ++n) v = m == 0 ? etd::etd1_step(v, dt, prop, N) : etd::etdrk2_step(v, dt, prop, N);
      row.seconds = seconds_since(s0);
      final_field = op->to_field(v);
      require_finite(final_field, "ETD solution");
    }
    row.error = l2_distance(final_field, ref.final_field);
    return row;
  };

  for (int m = 0; m < 4; ++m) {
    run_method(m, cfg.compare_dts.front());  // warm-up, discarded
    for (double dt : cfg.compare_dts) out.methods[m].push_back(run_method(m, dt));
    fill_orders(out.methods[m]);
  }

  std::vector<std::string> header{"dt"};
  for (const char* name : ComparisonResult::kMethods)
    for (const char* col : {"_error", "_order", "_seconds"}) header.push_back(std::string(name) + col);
  CsvWriter w(dir / "comparison.csv", header);
  for (std::size_t i = 0; i < cfg.compare_dts.size(); ++i) {
    w.cell(cfg.compare_dts[i]);
    for (int m = 0; m < 4; ++m) {
      const auto& r = out.methods[m][i];
      w.cell(r.error);
      if (r.order)
        w.cell(*r.order);
      else
        w.empty();
      w.cell(cfg.timing ? r.seconds : 0.0);
    }
    w.end_row();
  }
  w.close();

  Manifest manifest = start_manifest("compare-etd", cfg);
  note_desk_scale(manifest, "dense eigendecomposition ETD on the configured grid (64^2 by default)");
  manifest.set("reference.dt", out.reference_dt);
  manifest.set("etd.unknowns", std::to_string(op->unknowns()));
  if (cfg.timing) manifest.set("etd.setup_seconds", out.setup_seconds);
  manifest.add_output(w.path());
  out.outputs = manifest.outputs();
  out.outputs.push_back(manifest.write(dir));
  return out;
}

MbpResult mbp_longrun(const RunConfig& cfg) {
  const auto dir = prepare_dir(cfg);
  const NonlinearModel model = ac_model(cfg);
  const Field u0 = cfg.initial_field();
  for (double dt : cfg.mbp_dts) whole_steps(cfg.mbp_T, dt, "mbp.dt_list");
  const bool single = cfg.mbp_orders.size() == 1 && cfg.mbp_dts.size() == 1;

  Manifest manifest = start_manifest("mbp-longrun", cfg);
  note_desk_scale(manifest, "long-time maximum-norm runs on the configured grid (128^2 by default)");
  MbpResult out;
  for (int k : cfg.mbp_orders) {
    StepConfig scfg = step_config(cfg);
    scfg.cutoff_enabled = k > 1 || cfg.mbp_cutoff_k1;
    for (double dt : cfg.mbp_dts) {
      const int steps = whole_steps(cfg.mbp_T, dt, "mbp.dt_list");
      const auto name =
          single ? std::string("mbp_trace.csv") : "mbp_trace_k" + std::to_string(k) + "_dt" + format_double(dt) + ".csv";
      CsvWriter w(dir / name, {"t", "linf"});
      MbpRun r;
      r.k = k;
      r.dt = dt;
      r.steps = steps;
      const Trajectory tr = simulate(model, u0, k, dt, steps, scfg, [&](int n, double t, const Field& u) {
        const double linf = linf_norm(u);
        if (n == 0) r.linf0 = linf;
        r.max_linf = std::max(r.max_linf, linf);
        w.cell(t).cell(linf).end_row();
      });
      w.close();
      r.trace = w.path();
      manifest.add_output(w.path());
      out.runs.push_back(r);
    }
  }
  CsvWriter s(dir / "mbp_summary.csv", {"k", "dt", "steps", "linf0", "max_linf"});
  for (const auto& r : out.runs) s.cell(r.k).cell(r.dt).cell(r.steps).cell(r.linf0).cell(r.max_linf).end_row();
  s.close();
  manifest.add_output(s.path());
  out.outputs = manifest.outputs();
  out.outputs.push_back(manifest.write(dir));
  return out;
}

ProstateSummary prostate_run(const RunConfig& cfg) {
  if (cfg.model != ModelId::Prostate) throw ConfigError("model.id", "this command needs model.id = prostate");
  const auto dir = prepare_dir(cfg);
  const int steps = whole_steps(cfg.T, cfg.dt, "scheme.T");
  std::vector<int> snap_steps;
  for (double t : cfg.prostate.snapshot_times) {
    const double n = t / cfg.dt;
    if (n > steps + 1e-9) continue;  // past the end of this run
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n))
      throw ConfigError("prostate.snapshot_times", "time " + format_double(t) + " is not a multiple of scheme.dt");
    snap_steps.push_back(static_cast<int>(std::round(n)));
  }

  const int n = cfg.grid.nx;
  const double h = cfg.grid.h;
  ProstateFields init = prostate_initials(n, h, cfg.prostate.initial);

  Manifest manifest = start_manifest("prostate", cfg);
  note_desk_scale(manifest, "prostate system on the configured grid (256^2 by default), illustrative parameters");
  ProstateSummary sum;
  sum.steps = steps;
  sum.phi_min = std::numeric_limits<double>::infinity();
  sum.phi_max = -std::numeric_limits<double>::infinity();

  CsvWriter trace(dir / "prostate_trace.csv", {"t", "phi_min", "phi_max", "sigma_min", "sigma_max", "p_min", "p_max",
                                                "phi_mass", "grad_phi_sq", "iters"});
  std::optional<CsvWriter> mbp;
  if (cfg.trace_mbp) mbp.emplace(dir / "mbp_trace.csv", std::vector<std::string>{"t", "linf"});

  auto record = [&](int step, const ProstateFields& f, int iters) {
    const double t = step * cfg.dt;
    auto range = [](const Field& u) {
      const auto v = u.values();
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      return std::pair<double, double>{*lo, *hi};
    };
    const auto [plo, phi] = range(f.phi);
    const auto [slo, shi] = range(f.sigma);
    const auto [qlo, qhi] = range(f.p);
    const bool finite = f.phi.all_finite() && f.sigma.all_finite() && f.p.all_finite();
    sum.all_finite = sum.all_finite && finite;
    sum.phi_min = std::min(sum.phi_min, plo);
    sum.phi_max = std::max(sum.phi_max, phi);
    const double g = grad_norm_sq(f.phi);
    sum.grad_phi_sq.push_back(g);
    const double mass = inner(f.phi, Field(f.phi.grid(), 1.0));
    trace.cell(t).cell(plo).cell(phi).cell(slo).cell(shi).cell(qlo).cell(qhi).cell(mass).cell(g).cell(iters).end_row();
    if (mbp) mbp->cell(t).cell(linf_norm(f.phi)).end_row();
    for (int s : snap_steps) {
      if (s != step) continue;
      const std::pair<const char*, const Field*> parts[] = {{"phi", &f.phi}, {"sigma", &f.sigma}, {"p", &f.p}};
      for (const auto& [name, field] : parts) {
        const auto path = dir / snapshot_name(t, name);
        write_snapshot(path, *field);
        manifest.add_output(path);
      }
    }
    if (!finite) throw SolverError("step " + std::to_string(step) + ": non-finite prostate state", 0.0, 0.0);
  };

  const auto t0 = Clock::now();
  std::optional<ProstateIntegrator> integ;
  try {
    integ.emplace(cfg.prostate.params, std::move(init), cfg.k, cfg.dt, step_config(cfg));
  } catch (const SolverError& e) {
    throw SolverError(std::string("bootstrap: ") + e.what(), e.last_increment(), e.rho());
  } catch (const NonFiniteError& e) {
    throw SolverError(std::string("bootstrap: ") + e.what(), 0.0, 0.0);
  }
  const auto& start = integ->start_levels();
  const int n0 = std::min(cfg.k - 1, steps);
  for (int s = 0; s <= n0; ++s) record(s, start[s], 0);
  for (int s = cfg.k; s <= steps; ++s) {
    CoupledStepReport rep;
    try {
      rep = integ->advance();
    } catch (const SolverError& e) {
      throw SolverError("step " + std::to_string(s) + ": " + e.what(), e.last_increment(), e.rho());
    } catch (const NonFiniteError& e) {
      throw SolverError("step " + std::to_string(s) + ": " + e.what(), 0.0, 0.0);
    }
    sum.iterations += rep.iters;
    record(s, integ->current(), rep.iters);
  }
  sum.seconds = seconds_since(t0);
  sum.B_phi = integ->B_phi();
  sum.lipschitz_warning = integ->lipschitz_warning();

  trace.close();
  manifest.add_output(trace.path());
  if (mbp) {
    mbp->close();
    manifest.add_output(mbp->path());
  }
  manifest.set("steps", std::to_string(steps));
  manifest.set("iterations", std::to_string(sum.iterations));
  manifest.set("bootstrap.substeps_per_step", std::to_string(integ->bootstrap_report().substeps_per_step));
  manifest.set("B_phi", sum.B_phi);
  manifest.set("B_sigma", integ->B_sigma());
  manifest.set("B_p", integ->B_p());
  manifest.set("lipschitz_warning", sum.lipschitz_warning ? "true" : "false");
  manifest.set("phi_min", sum.phi_min);
  manifest.set("phi_max", sum.phi_max);
  if (cfg.timing) manifest.set("seconds", sum.seconds);
  sum.outputs = manifest.outputs();
  sum.outputs.push_back(manifest.write(dir));
  return sum;
}

}  // namespace sbdf::harness
