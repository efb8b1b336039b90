#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chemtau/network.hpp"
#include "chemtau/stability.hpp"
#include "chemtau/steppers.hpp"

namespace chemtau {

struct EnsembleStats {
  long n_samples = 0;
  std::vector<double> mean, variance, std_error_mean;
};

// Probability mass on unit integer bins starting at k_min.
struct EmpiricalPdf {
  long k_min = 0;
  std::vector<double> prob;
};

// Histogram of samples rounded to the nearest integer (counts are integer
// states; real-valued observations are binned by rounding).
EmpiricalPdf make_pdf(const std::vector<double>& samples);

// Density distance area: sum_k |p(k) - q(k)| over the union support; lies
// in [0, 2]. Throws when either input is not normalized to 1e-9.
double dda(const EmpiricalPdf& p, const EmpiricalPdf& q);

EmpiricalPdf load_pdf_csv(const std::string& path);
void write_pdf_csv(const EmpiricalPdf& pdf, const std::string& path, const std::string& header);

struct EnsembleOptions {
  long n_samples = 1;
  std::uint64_t seed = 0;
  int workers = 1;                 // <= 0 uses hardware concurrency
  std::vector<double> observe_at;  // ascending, nonempty
  bool collect_pdf = false;
  double max_fail_fraction = 1e-3;
};

struct EnsembleObservation {
  double t = 0.0;
  EnsembleStats stats;
  std::vector<EmpiricalPdf> pdfs;  // per species when collect_pdf is set
};

struct EnsembleResult {
  std::vector<EnsembleObservation> observations;
  long n_failed = 0;
  double wall_seconds = 0.0;
};

// Independent trajectories on streams keyed (seed, index), merged in index
// order, so the statistics are identical for any worker count. Trajectory
// failures (Newton breakdown) are tolerated up to max_fail_fraction.
EnsembleResult run_ensemble(const ReactionNetwork& net, const MethodConfig& cfg,
                            const StateVec& x0, const EnsembleOptions& opts);

// CSV rows `method,species,mean,std,se,n,cpu_seconds` for one observation
// time; cpu_seconds stays empty unless wall_seconds >= 0 is passed, keeping
// seeded reports byte-identical.
std::string ensemble_report_csv(const ReactionNetwork& net, const std::string& method,
                                const EnsembleObservation& obs, long n_samples,
                                double wall_seconds = -1.0);

struct VarianceRatioCheck {
  double empirical_mean = 0.0;
  double mean_std_error = 0.0;
  double empirical_variance = 0.0;
  double predicted_ratio = 0.0;
  double empirical_ratio = 0.0;
  double z_score = 0.0;  // chi-squared sampling law of the variance
  long burn_in_steps = 0;
  bool unstable = false;
};

// Stationary-variance law check on the reversible isomerization problem:
// ensemble variance after burn-in against c_s(z) (sk) or c_bar_s(z) (psk)
// times the exact binomial variance. burn_in 0 derives the smallest n with
// |A_s(z)|^(2n) < 1e-6 from the stability polynomial.
VarianceRatioCheck variance_ratio_check(Method method, const TestProblem& problem, int s,
                                        double eps, double tau, long n_samples, long burn_in,
                                        std::uint64_t seed, int workers = 1);

struct GofResult {
  double statistic = 0.0;
  long dof = 0;
  double p_value = 1.0;
};

// Pearson chi-squared against a discrete pmf on [support_lo, support_hi];
// adjacent cells are pooled until each expected count reaches min_expected.
GofResult chi_squared_gof(const std::vector<double>& samples,
                          const std::function<double(long)>& pmf, long support_lo,
                          long support_hi, double min_expected = 5.0);

double binomial_pmf(long n, double p, long k);

// Upper regularized incomplete gamma Q(a, x); Q(dof/2, stat/2) is the
// chi-squared tail probability.
double regularized_gamma_q(double a, double x);

enum class TableId { mm_stat, nlrev, genloop, schlogl_dda };

const std::string& table_name(TableId id);
std::optional<TableId> table_by_name(std::string_view name);

struct TableRow {
  std::string method;
  std::string quantity;
  double value = 0.0;
  double std_error = 0.0;
};

struct TableCheck {
  std::string label;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

struct TableReport {
  std::string table_id;
  long n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<TableRow> rows;
  std::vector<TableCheck> checks;
  std::vector<std::pair<std::string, double>> timings;  // per-method wall seconds

  bool all_pass() const;
  // Deterministic for a fixed seed; timings are emitted as comments only
  // when with_timings is set.
  std::string render_csv(bool with_timings = false) const;
  std::string render_text(bool with_timings = true) const;
};

// Re-run one of the published experiments at sample count = paper count /
// scale, with the published step sizes and constants, and evaluate the
// desk-scale tolerance checks. reference_dir holds (or receives) the cached
// Schloegl SSA reference pdf.
TableReport reproduce_table(TableId id, long scale, std::uint64_t seed, int workers,
                            const std::string& reference_dir);

// Cached 10^6-sample SSA reference for the Schloegl model at T = 50;
// generated into reference_dir when absent.
EmpiricalPdf schlogl_ssa_reference(const std::string& reference_dir, int workers);

}  // namespace chemtau
