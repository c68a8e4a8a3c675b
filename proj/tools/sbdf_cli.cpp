// sbdf: command-line harness for the stabilised BDF solver kit.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "sbdf/errors.hpp"
#include "sbdf/field_io.hpp"
#include "sbdf/harness/config.hpp"
#include "sbdf/harness/drivers.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct Options {
  std::string config;
  std::vector<std::string> sets;
  int threads = 0;
};

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config,-c", opt.config, "config file (section.key = value)");
  cmd->add_option("--set,-s", opt.sets, "override, e.g. --set scheme.k=3")->take_all();
  cmd->add_option("--threads,-j", opt.threads, "worker threads (overrides run.threads)")->check(CLI::Range(1, 256));
}

sbdf::harness::RunConfig load(const Options& opt, const std::string& model_hint) {
  sbdf::harness::KeyValues kv;
  if (!opt.config.empty()) kv = sbdf::harness::KeyValues::load(opt.config);
  if (!model_hint.empty() && !kv.values().count("model.id")) kv.set("model.id", model_hint);
  for (const auto& s : opt.sets) kv.set(s);
  if (opt.threads > 0) kv.set("run.threads", std::to_string(opt.threads));
  return sbdf::harness::resolve(kv);
}

void print_rows(const std::vector<sbdf::harness::ConvergenceRow>& rows) {
  for (const auto& r : rows) {
    std::cout << "  dt=" << sbdf::format_double(r.dt) << "  error=" << sbdf::format_double(r.error);
    if (r.order) std::cout << "  order=" << sbdf::format_double(*r.order);
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sbdf - stabilised BDF integrators for semilinear parabolic problems"};
  app.require_subcommand(1);
  Options opt;
  auto* run = app.add_subcommand("run", "single Allen-Cahn run: snapshot, traces, manifest");
  auto* conv = app.add_subcommand("converge", "temporal convergence table against an sBDF4 reference");
  auto* cmp = app.add_subcommand("compare-etd", "sBDF1/2 against dense ETD1/ETDRK2");
  auto* mbp = app.add_subcommand("mbp-longrun", "long-time maximum-norm traces");
  auto* pro = app.add_subcommand("prostate", "three-field prostate tumour run");
  for (auto* c : {run, conv, cmp, mbp, pro}) add_common(c, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    namespace H = sbdf::harness;
    if (run->parsed()) {
      const auto cfg = load(opt, "");
      if (cfg.model == H::ModelId::Prostate) {
        const auto s = H::prostate_run(cfg);
        std::cout << "prostate: " << s.steps << " steps, phi in [" << sbdf::format_double(s.phi_min) << ", "
                  << sbdf::format_double(s.phi_max) << "]\n";
      } else {
        const auto s = H::run(cfg);
        std::cout << "run: " << s.steps << " steps, " << s.iterations << " iterations, max linf "
                  << sbdf::format_double(s.max_linf) << '\n';
        if (cfg.trace_energy)
          std::cout << "energy: " << s.iteration_violations << " iteration and " << s.step_violations
                    << " step violations\n";
      }
    } else if (conv->parsed()) {
      const auto res = H::converge(load(opt, "allen_cahn"));
      for (const auto& t : res.tables) {
        std::cout << "sBDF" << t.k << ":\n";
        print_rows(t.rows);
      }
    } else if (cmp->parsed()) {
      auto cfg = load(opt, "allen_cahn");
      const auto res = H::compare_etd(cfg);
      for (int m = 0; m < 4; ++m) {
        std::cout << H::ComparisonResult::kMethods[m] << ":\n";
        print_rows(res.methods[m]);
      }
    } else if (mbp->parsed()) {
      const auto res = H::mbp_longrun(load(opt, "allen_cahn"));
      for (const auto& r : res.runs)
        std::cout << "k=" << r.k << " dt=" << sbdf::format_double(r.dt) << " max linf "
                  << sbdf::format_double(r.max_linf) << '\n';
    } else if (pro->parsed()) {
      const auto s = H::prostate_run(load(opt, "prostate"));
      std::cout << "prostate: " << s.steps << " steps, phi in [" << sbdf::format_double(s.phi_min) << ", "
                << sbdf::format_double(s.phi_max) << "], B_phi " << sbdf::format_double(s.B_phi) << '\n';
    }
  } catch (const sbdf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const sbdf::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const sbdf::NonFiniteError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
