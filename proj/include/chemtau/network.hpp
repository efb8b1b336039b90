#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chemtau/rng.hpp"

namespace chemtau {

// Molecule counts. SSA and the plain leap keep the entries integral;
// stabilized and implicit methods march real values through the same type.
using StateVec = std::vector<double>;

struct Species {
  std::string name;
  bool buffered = false;  // population pinned; stoichiometry row forced to zero
};

struct Reaction {
  double rate = 0.0;            // c_j, combinatorial scaling included
  std::map<int, int> reactants; // species index -> order, total order <= 3
  std::map<int, int> products;  // species index -> count

  // Reduced models recover an eliminated species from a conservation law:
  // the propensity becomes rate * (total - x[species]) / divisor instead
  // of the mass-action product, clamped at zero like every propensity.
  struct Complement {
    int species = 0;
    double total = 0.0;
    double divisor = 1.0;
  };
  std::optional<Complement> complement;

  bool operator==(const Reaction& other) const;
};

// Immutable well-stirred reaction system. Propensity and drift evaluation
// are pure; noise_q mutates only the supplied RNG stream, so a network can
// be shared across concurrent trajectories.
class ReactionNetwork {
 public:
  ReactionNetwork(std::vector<Species> species, std::vector<Reaction> reactions);

  int n_species() const { return static_cast<int>(species_.size()); }
  int n_reactions() const { return static_cast<int>(reactions_.size()); }
  const Species& species(int i) const { return species_[i]; }
  const Reaction& reaction(int j) const { return reactions_[j]; }
  int species_index(std::string_view name) const;  // -1 when absent

  // Column j of the stoichiometric matrix (length n_species).
  const std::vector<int>& stoich_column(int j) const { return nu_[j]; }
  int stoich(int i, int j) const { return nu_[j][i]; }

  // Mass-action propensities a_j(x) >= 0; clamped to zero whenever a
  // combinatorial count factor is negative.
  void propensities(const StateVec& x, std::vector<double>& a) const;
  std::vector<double> propensities(const StateVec& x) const;

  // Drift f(x) = sum_j nu_j a_j(x), evaluated on the raw state with the
  // signed mass-action polynomials (no clamping), so stiff restoring terms
  // survive at the transiently negative real states of leap stages.
  // Coincides with stoich * propensities on nonnegative integer states.
  void drift(const StateVec& x, StateVec& f) const;
  StateVec drift(const StateVec& x) const;

  // Compensated Poisson noise Q(|x|, tau) = sum_j nu_j (P_j - a_j(|x|) tau).
  // The componentwise absolute value keeps every Poisson mean nonnegative
  // when a leap has overshot into negative populations.
  void noise_q(const StateVec& x, double tau, RngStream& rng, StateVec& q) const;
  StateVec noise_q(const StateVec& x, double tau, RngStream& rng) const;

  // Propensity gradient rows: da_j/dx_i for all j into an M x N row-major
  // buffer. Clamped reactions contribute zero rows.
  void propensity_gradients(const StateVec& x, std::vector<double>& grad) const;

  bool operator==(const ReactionNetwork& other) const;

 private:
  // Flattened reaction terms for the evaluation hot path.
  struct Compiled {
    double rate = 0.0;
    int n_terms = 0;
    int term_species[3] = {0, 0, 0};
    int term_order[3] = {0, 0, 0};
    bool has_complement = false;
    int comp_species = 0;
    double comp_total = 0.0;
    double comp_scale = 0.0;  // rate / divisor
  };

  void check_invariants() const;

  std::vector<Species> species_;
  std::vector<Reaction> reactions_;
  std::vector<std::vector<int>> nu_;  // per-reaction stoichiometry columns
  std::vector<Compiled> compiled_;
};

struct Model {
  ReactionNetwork network;
  StateVec x0;
};

enum class BuiltinModel {
  reversible_isomerization,
  schlogl,
  michaelis_menten,
  nonlinear_reversible,
  genetic_loop,
};

// Built-in benchmark systems with their published constants. Overrides are
// keyed "c1".."c9" for rate constants, "x0_<i>" (1-based) for initial
// counts, plus "x_total" (reversible isomerization) and "x_c" (nonlinear
// reversible). Unknown keys are rejected.
Model builtin_model(BuiltinModel which, const std::map<std::string, double>& overrides = {});

std::optional<BuiltinModel> builtin_model_by_name(std::string_view name);
std::vector<std::string> builtin_model_names();

// Two-species form of the nonlinear reversible reaction, for SSA
// cross-checks of the reduced representation.
Model nonlinear_reversible_full();

// Parse a model document (JSON: species + reactions as documented in the
// README). Throws std::runtime_error with field diagnostics.
Model load_model(const std::string& path);
Model parse_model(const std::string& text, const std::string& origin);

}  // namespace chemtau
