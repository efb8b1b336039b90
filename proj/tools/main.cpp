#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "chemtau/analysis.hpp"
#include "chemtau/network.hpp"
#include "chemtau/stability.hpp"
#include "chemtau/steppers.hpp"

namespace {

using namespace chemtau;

constexpr int kExitOk = 0;
constexpr int kExitToleranceFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Model resolve_model(const std::string& name) {
  if (auto builtin = builtin_model_by_name(name)) return builtin_model(*builtin);
  if (std::filesystem::exists(name)) return load_model(name);
  std::string names;
  for (const std::string& n : builtin_model_names()) names += "\n  " + n;
  throw UsageError("unknown model '" + name + "'; built-in models are:" + names +
                   "\nor pass a path to a model file");
}

MethodConfig resolve_method(const std::string& method, double tau, double eps, int stages) {
  const std::optional<Method> m = method_by_name(method);
  if (!m) {
    std::string names;
    for (int i = 0; i < 7; ++i) names += (i ? ", " : "") + method_name(static_cast<Method>(i));
    throw UsageError("unknown method '" + method + "'; available: " + names);
  }
  MethodConfig cfg;
  cfg.method = *m;
  cfg.tau = tau;
  cfg.eps = eps;
  cfg.fixed_stages = stages;
  if (cfg.method != Method::ssa && !(tau > 0.0))
    throw UsageError("method '" + method + "' needs --tau > 0");
  return cfg;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open output file " + path);
  return file;
}

int default_workers() {
  if (const char* env = std::getenv("CHEMTAU_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

int run(int argc, char** argv) {
  CLI::App app{"stochastic chemical kinetics: exact SSA, tau-leaping and "
               "stabilized Chebyshev leap methods"};
  app.require_subcommand(1);

  // --- simulate ---------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "write a single trajectory as CSV");
  std::string sim_model, sim_method = "ssa", sim_output;
  double sim_tau = 0.0, sim_t_end = 0.0, sim_eps = kDefaultDamping;
  int sim_stages = 0;
  long sim_stride = 1;
  std::uint64_t sim_seed = 0;
  simulate->add_option("--model", sim_model, "built-in model name or model file")->required();
  simulate->add_option("--method", sim_method, "stepper (default ssa)");
  simulate->add_option("--tau", sim_tau, "leap step size");
  simulate->add_option("--t-end", sim_t_end, "final time")->required();
  simulate->add_option("--seed", sim_seed, "RNG seed");
  simulate->add_option("--eps", sim_eps, "damping of the stabilized methods");
  simulate->add_option("--stages", sim_stages, "pin the stage count (0 = automatic)");
  simulate->add_option("--stride", sim_stride, "record every k-th step")->check(CLI::PositiveNumber);
  simulate->add_option("--output,-o", sim_output, "output file (default stdout)");

  // --- stability --------------------------------------------------------
  auto* stability = app.add_subcommand("stability", "dump the stability curves as CSV");
  int stab_s = 5, stab_grid = 2000;
  double stab_eps = kDefaultDamping;
  std::string stab_output;
  stability->add_option("--stages,-s", stab_s, "stage count")->required();
  stability->add_option("--eps", stab_eps, "damping");
  stability->add_option("--grid", stab_grid, "number of grid points")->check(CLI::PositiveNumber);
  stability->add_option("--output,-o", stab_output, "output file (default stdout)");

  // --- mc -----------------------------------------------------------------
  auto* mc = app.add_subcommand("mc", "Monte-Carlo ensemble statistics");
  std::string mc_model, mc_method = "psk_tau_rock", mc_output, mc_pdf_out;
  double mc_tau = 0.0, mc_t_end = 0.0, mc_eps = kDefaultDamping;
  int mc_stages = 0, mc_workers = default_workers(), mc_pdf_species = 0;
  long mc_samples = 1000;
  std::uint64_t mc_seed = 0;
  bool mc_timing = false;
  mc->add_option("--model", mc_model)->required();
  mc->add_option("--method", mc_method);
  mc->add_option("--tau", mc_tau);
  mc->add_option("--t-end", mc_t_end)->required();
  mc->add_option("--samples", mc_samples)->check(CLI::PositiveNumber);
  mc->add_option("--seed", mc_seed);
  mc->add_option("--eps", mc_eps);
  mc->add_option("--stages", mc_stages);
  mc->add_option("--workers", mc_workers, "ensemble parallelism (CHEMTAU_WORKERS)");
  mc->add_option("--output,-o", mc_output);
  mc->add_option("--pdf-out", mc_pdf_out, "also write the empirical pdf of one species");
  mc->add_option("--pdf-species", mc_pdf_species, "species index for --pdf-out");
  mc->add_flag("--timing", mc_timing, "fill the cpu_seconds column (not reproducible)");

  // --- table --------------------------------------------------------------
  auto* table = app.add_subcommand("table", "reproduce a published experiment at desk scale");
  std::string table_id, table_output, table_data_dir = "data";
  long table_scale = 100;
  int table_workers = default_workers();
  std::uint64_t table_seed = 0;
  bool table_check = false, table_csv = false, table_timing = false;
  table->add_option("id", table_id, "one of mm_stat, nlrev, genloop, schlogl_dda")->required();
  table->add_option("--scale", table_scale, "sample-count divisor vs the published run")
      ->check(CLI::PositiveNumber);
  table->add_option("--seed", table_seed);
  table->add_option("--workers", table_workers);
  table->add_option("--data-dir", table_data_dir, "directory of cached reference data");
  table->add_option("--output,-o", table_output);
  table->add_flag("--check", table_check, "exit nonzero when a tolerance check fails");
  table->add_flag("--csv", table_csv, "emit CSV instead of the text report");
  table->add_flag("--timing", table_timing, "include wall-clock comments (not reproducible)");

  // --- dda ----------------------------------------------------------------
  auto* dda_cmd = app.add_subcommand("dda", "density distance area between two pdf files");
  std::string dda_p, dda_q;
  dda_cmd->add_option("--p", dda_p, "first pdf CSV")->required();
  dda_cmd->add_option("--q", dda_q, "second pdf CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse diagnostic
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (simulate->parsed()) {
    const Model model = resolve_model(sim_model);
    const MethodConfig cfg = resolve_method(sim_method, sim_tau, sim_eps, sim_stages);
    std::ofstream file;
    std::ostream& out = open_output(sim_output, file);
    out << "t";
    for (int i = 0; i < model.network.n_species(); ++i)
      out << ',' << model.network.species(i).name;
    out << '\n';
    RunHooks hooks;
    hooks.stride = sim_stride;
    char buf[64];
    hooks.on_step = [&](double t, const StateVec& x) {
      std::snprintf(buf, sizeof(buf), "%.10g", t);
      out << buf;
      for (double v : x) {
        std::snprintf(buf, sizeof(buf), ",%.10g", v);
        out << buf;
      }
      out << '\n';
    };
    run_trajectory(model.network, cfg, model.x0, sim_t_end, RngStream(sim_seed, 0), hooks);
    return kExitOk;
  }

  if (stability->parsed()) {
    const StabilityCurve curve = sample_stability_curve(stab_s, stab_eps, stab_grid);
    std::ofstream file;
    std::ostream& out = open_output(stab_output, file);
    write_stability_curve_csv(curve, out);
    return kExitOk;
  }

  if (mc->parsed()) {
    const Model model = resolve_model(mc_model);
    const MethodConfig cfg = resolve_method(mc_method, mc_tau, mc_eps, mc_stages);
    EnsembleOptions opts;
    opts.n_samples = mc_samples;
    opts.seed = mc_seed;
    opts.workers = mc_workers;
    opts.observe_at = {mc_t_end};
    opts.collect_pdf = !mc_pdf_out.empty();
    const EnsembleResult ens = run_ensemble(model.network, cfg, model.x0, opts);
    std::ofstream file;
    std::ostream& out = open_output(mc_output, file);
    out << ensemble_report_csv(model.network, mc_method, ens.observations[0], mc_samples,
                               mc_timing ? ens.wall_seconds : -1.0);
    if (!mc_pdf_out.empty()) {
      if (mc_pdf_species < 0 || mc_pdf_species >= model.network.n_species())
        throw UsageError("--pdf-species out of range");
      write_pdf_csv(ens.observations[0].pdfs[mc_pdf_species], mc_pdf_out,
                    "model=" + mc_model + " method=" + mc_method + " t_end=" +
                        std::to_string(mc_t_end) + " samples=" + std::to_string(mc_samples) +
                        " seed=" + std::to_string(mc_seed));
    }
    return kExitOk;
  }

  if (table->parsed()) {
    const std::optional<TableId> id = table_by_name(table_id);
    if (!id) throw UsageError("unknown table '" + table_id +
                              "'; available: mm_stat, nlrev, genloop, schlogl_dda");
    const TableReport report =
        reproduce_table(*id, table_scale, table_seed, table_workers, table_data_dir);
    std::ofstream file;
    std::ostream& out = open_output(table_output, file);
    out << (table_csv ? report.render_csv(table_timing) : report.render_text(table_timing));
    if (table_check && !report.all_pass()) return kExitToleranceFailure;
    return kExitOk;
  }

  if (dda_cmd->parsed()) {
    const double value = dda(load_pdf_csv(dda_p), load_pdf_csv(dda_q));
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g\n", value);
    std::cout << buf;
    return kExitOk;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
