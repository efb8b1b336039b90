#include "chemtau/network.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace chemtau {

namespace {

// Combinatorial count factor for one reactant of the given order:
// x, x(x-1)/2, x(x-1)(x-2)/6.
inline double count_factor(double x, int order) {
  switch (order) {
    case 1: return x;
    case 2: return 0.5 * x * (x - 1.0);
    case 3: return x * (x - 1.0) * (x - 2.0) / 6.0;
    default: return 1.0;
  }
}

inline double count_factor_prime(double x, int order) {
  switch (order) {
    case 1: return 1.0;
    case 2: return x - 0.5;
    case 3: return (3.0 * x * x - 6.0 * x + 2.0) / 6.0;
    default: return 0.0;
  }
}

thread_local std::vector<double> tls_prop;
thread_local StateVec tls_abs;

}  // namespace

bool Reaction::operator==(const Reaction& other) const {
  const bool comp_equal =
      complement.has_value() == other.complement.has_value() &&
      (!complement || (complement->species == other.complement->species &&
                       complement->total == other.complement->total &&
                       complement->divisor == other.complement->divisor));
  return rate == other.rate && reactants == other.reactants && products == other.products &&
         comp_equal;
}

ReactionNetwork::ReactionNetwork(std::vector<Species> species, std::vector<Reaction> reactions)
    : species_(std::move(species)), reactions_(std::move(reactions)) {
  check_invariants();
  nu_.resize(reactions_.size());
  for (std::size_t j = 0; j < reactions_.size(); ++j) {
    std::vector<int>& col = nu_[j];
    col.assign(species_.size(), 0);
    for (const auto& [idx, order] : reactions_[j].reactants) col[idx] -= order;
    for (const auto& [idx, count] : reactions_[j].products) col[idx] += count;
    for (std::size_t i = 0; i < species_.size(); ++i)
      if (species_[i].buffered) col[i] = 0;
  }
  compiled_.resize(reactions_.size());
  for (std::size_t j = 0; j < reactions_.size(); ++j) {
    const Reaction& r = reactions_[j];
    Compiled& c = compiled_[j];
    c.rate = r.rate;
    if (r.complement) {
      c.has_complement = true;
      c.comp_species = r.complement->species;
      c.comp_total = r.complement->total;
      c.comp_scale = r.rate / r.complement->divisor;
    } else {
      for (const auto& [idx, order] : r.reactants) {
        if (order == 0) continue;
        c.term_species[c.n_terms] = idx;
        c.term_order[c.n_terms] = order;
        ++c.n_terms;
      }
    }
  }

  // A reaction that changes nothing must at least touch a buffered pool.
  for (std::size_t j = 0; j < reactions_.size(); ++j) {
    bool moves = false;
    for (int v : nu_[j])
      if (v != 0) moves = true;
    if (moves) continue;
    bool touches_buffered = false;
    for (const auto& [idx, order] : reactions_[j].reactants)
      if (species_[idx].buffered && order > 0) touches_buffered = true;
    for (const auto& [idx, count] : reactions_[j].products)
      if (species_[idx].buffered && count > 0) touches_buffered = true;
    if (!touches_buffered)
      throw std::invalid_argument("reaction " + std::to_string(j + 1) +
                                  " has a zero state-change vector");
  }
}

void ReactionNetwork::check_invariants() const {
  if (species_.empty()) throw std::invalid_argument("network needs at least one species");
  if (reactions_.empty()) throw std::invalid_argument("network needs at least one reaction");
  std::set<std::string> names;
  for (const Species& sp : species_) {
    if (sp.name.empty()) throw std::invalid_argument("species name must not be empty");
    if (!names.insert(sp.name).second)
      throw std::invalid_argument("duplicate species name: " + sp.name);
  }
  const int n = static_cast<int>(species_.size());
  for (std::size_t j = 0; j < reactions_.size(); ++j) {
    const Reaction& r = reactions_[j];
    const std::string where = "reaction " + std::to_string(j + 1);
    if (!(r.rate >= 0.0)) throw std::invalid_argument(where + ": rate must be nonnegative");
    int total_order = 0;
    for (const auto& [idx, order] : r.reactants) {
      if (idx < 0 || idx >= n) throw std::invalid_argument(where + ": bad reactant index");
      if (order < 0) throw std::invalid_argument(where + ": negative reactant order");
      total_order += order;
    }
    if (total_order > 3)
      throw std::invalid_argument(where + ": total reactant order exceeds 3");
    for (const auto& [idx, count] : r.products) {
      if (idx < 0 || idx >= n) throw std::invalid_argument(where + ": bad product index");
      if (count < 0) throw std::invalid_argument(where + ": negative product count");
    }
    if (r.complement && (r.complement->species < 0 || r.complement->species >= n))
      throw std::invalid_argument(where + ": bad complement species index");
    if (r.complement && !(r.complement->divisor > 0.0))
      throw std::invalid_argument(where + ": complement divisor must be positive");
  }
}

int ReactionNetwork::species_index(std::string_view name) const {
  for (std::size_t i = 0; i < species_.size(); ++i)
    if (species_[i].name == name) return static_cast<int>(i);
  return -1;
}

void ReactionNetwork::propensities(const StateVec& x, std::vector<double>& a) const {
  if (x.size() != species_.size())
    throw std::invalid_argument("state dimension does not match the network");
  a.resize(reactions_.size());
  for (std::size_t j = 0; j < reactions_.size(); ++j) {
    const Compiled& c = compiled_[j];
    if (c.has_complement) {
      const double value = c.comp_scale * (c.comp_total - x[c.comp_species]);
      a[j] = value > 0.0 ? value : 0.0;
      continue;
    }
    double aj = c.rate;
    for (int t = 0; t < c.n_terms; ++t) {
      const double factor = count_factor(x[c.term_species[t]], c.term_order[t]);
      if (factor <= 0.0) {
        aj = 0.0;
        break;
      }
      aj *= factor;
    }
    a[j] = aj;
  }
}

std::vector<double> ReactionNetwork::propensities(const StateVec& x) const {
  std::vector<double> a;
  propensities(x, a);
  return a;
}

void ReactionNetwork::drift(const StateVec& x, StateVec& f) const {
  if (x.size() != species_.size())
    throw std::invalid_argument("state dimension does not match the network");
  // The drift keeps the signed mass-action polynomial: at the transiently
  // negative real states reached inside leap stages the linear restoring
  // terms must survive, otherwise stiff components lose their damping. On
  // nonnegative integer states this coincides with the clamped propensities
  // term by term.
  f.assign(species_.size(), 0.0);
  for (std::size_t j = 0; j < reactions_.size(); ++j) {
    const Compiled& c = compiled_[j];
    double aj;
    if (c.has_complement) {
      aj = c.comp_scale * (c.comp_total - x[c.comp_species]);
    } else {
      aj = c.rate;
      for (int t = 0; t < c.n_terms; ++t) aj *= count_factor(x[c.term_species[t]], c.term_order[t]);
    }
    if (aj == 0.0) continue;
    const std::vector<int>& col = nu_[j];
    for (std::size_t i = 0; i < col.size(); ++i)
      if (col[i] != 0) f[i] += col[i] * aj;
  }
}

StateVec ReactionNetwork::drift(const StateVec& x) const {
  StateVec f;
  drift(x, f);
  return f;
}

void ReactionNetwork::noise_q(const StateVec& x, double tau, RngStream& rng, StateVec& q) const {
  if (!(tau > 0.0)) throw std::invalid_argument("noise_q: tau must be positive");
  tls_abs.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) tls_abs[i] = std::fabs(x[i]);
  propensities(tls_abs, tls_prop);
  q.assign(species_.size(), 0.0);
  for (std::size_t j = 0; j < reactions_.size(); ++j) {
    const double mean = tls_prop[j] * tau;
    if (mean == 0.0) continue;
    const double centered = static_cast<double>(rng.poisson(mean)) - mean;
    const std::vector<int>& col = nu_[j];
    for (std::size_t i = 0; i < col.size(); ++i)
      if (col[i] != 0) q[i] += col[i] * centered;
  }
}

StateVec ReactionNetwork::noise_q(const StateVec& x, double tau, RngStream& rng) const {
  StateVec q;
  noise_q(x, tau, rng, q);
  return q;
}

void ReactionNetwork::propensity_gradients(const StateVec& x, std::vector<double>& grad) const {
  const int n = n_species();
  const int m = n_reactions();
  grad.assign(static_cast<std::size_t>(m) * n, 0.0);
  for (int j = 0; j < m; ++j) {
    const Compiled& c = compiled_[j];
    double* row = grad.data() + static_cast<std::size_t>(j) * n;
    if (c.has_complement) {
      row[c.comp_species] = -c.comp_scale;
      continue;
    }
    // smooth polynomial derivatives, consistent with drift()
    for (int t = 0; t < c.n_terms; ++t) {
      double d = c.rate * count_factor_prime(x[c.term_species[t]], c.term_order[t]);
      for (int u = 0; u < c.n_terms; ++u)
        if (u != t) d *= count_factor(x[c.term_species[u]], c.term_order[u]);
      row[c.term_species[t]] += d;
    }
  }
}

bool ReactionNetwork::operator==(const ReactionNetwork& other) const {
  if (species_.size() != other.species_.size() || reactions_.size() != other.reactions_.size())
    return false;
  for (std::size_t i = 0; i < species_.size(); ++i)
    if (species_[i].name != other.species_[i].name ||
        species_[i].buffered != other.species_[i].buffered)
      return false;
  for (std::size_t j = 0; j < reactions_.size(); ++j)
    if (!(reactions_[j] == other.reactions_[j])) return false;
  return true;
}

namespace {

double take(std::map<std::string, double>& overrides, const std::string& key, double fallback) {
  auto it = overrides.find(key);
  if (it == overrides.end()) return fallback;
  const double v = it->second;
  overrides.erase(it);
  return v;
}

void apply_x0(std::map<std::string, double>& overrides, StateVec& x0) {
  for (std::size_t i = 0; i < x0.size(); ++i)
    x0[i] = take(overrides, "x0_" + std::to_string(i + 1), x0[i]);
}

void reject_leftovers(const std::map<std::string, double>& overrides) {
  if (overrides.empty()) return;
  std::string keys;
  for (const auto& [k, v] : overrides) keys += (keys.empty() ? "" : ", ") + k;
  throw std::invalid_argument("unknown model override(s): " + keys);
}

Model make_reversible_isomerization(std::map<std::string, double> o) {
  const double c1 = take(o, "c1", 1.0);
  const double c2 = take(o, "c2", 1.0);
  const double x_total = take(o, "x_total", 100.0);
  Reaction decay{c1, {{0, 1}}, {}, {}};
  Reaction back{c2, {}, {{0, 1}}, Reaction::Complement{0, x_total, 1.0}};
  StateVec x0{std::round(c2 * x_total / (c1 + c2))};
  apply_x0(o, x0);
  reject_leftovers(o);
  return {ReactionNetwork({{"X"}}, {decay, back}), x0};
}

Model make_schlogl(std::map<std::string, double> o) {
  const double c1 = take(o, "c1", 3e-7);
  const double c2 = take(o, "c2", 1e-4);
  const double c3 = take(o, "c3", 1e-3);
  const double c4 = take(o, "c4", 3.5);
  // S is index 0; B1, B2 are buffered pools entering the propensities only.
  Reaction r1{c1, {{1, 1}, {0, 2}}, {{1, 1}, {0, 3}}, {}};
  Reaction r2{c2, {{0, 3}}, {{1, 1}, {0, 2}}, {}};
  Reaction r3{c3, {{2, 1}}, {{2, 1}, {0, 1}}, {}};
  Reaction r4{c4, {{0, 1}}, {{2, 1}}, {}};
  StateVec x0{250.0, 1e5, 2e5};
  apply_x0(o, x0);
  reject_leftovers(o);
  return {ReactionNetwork({{"S"}, {"B1", true}, {"B2", true}}, {r1, r2, r3, r4}), x0};
}

Model make_michaelis_menten(std::map<std::string, double> o) {
  const double c1 = take(o, "c1", 1.66e-3);
  const double c2 = take(o, "c2", 1e-4);
  const double c3 = take(o, "c3", 1e3);
  Reaction bind{c1, {{0, 1}, {1, 1}}, {{2, 1}}, {}};
  Reaction unbind{c2, {{2, 1}}, {{0, 1}, {1, 1}}, {}};
  Reaction convert{c3, {{2, 1}}, {{3, 1}, {1, 1}}, {}};
  StateVec x0{3000.0, 120.0, 0.0, 0.0};
  apply_x0(o, x0);
  reject_leftovers(o);
  return {ReactionNetwork({{"S1"}, {"S2"}, {"S3"}, {"S4"}}, {bind, unbind, convert}), x0};
}

Model make_nonlinear_reversible(std::map<std::string, double> o) {
  const double c1 = take(o, "c1", 50.0);
  const double c2 = take(o, "c2", 1e3);
  const double x_c = take(o, "x_c", 400.0 + 2.0 * 3990.0);
  Reaction fwd{c1, {{0, 2}}, {}, {}};
  Reaction back{c2, {}, {{0, 2}}, Reaction::Complement{0, x_c, 2.0}};
  StateVec x0{400.0};
  apply_x0(o, x0);
  reject_leftovers(o);
  return {ReactionNetwork({{"X"}}, {fwd, back}), x0};
}

Model make_genetic_loop(std::map<std::string, double> o) {
  const double c1 = take(o, "c1", 50.0);
  const double c2 = take(o, "c2", 1e3);
  const double c3 = take(o, "c3", 50.0);
  const double c4 = take(o, "c4", 1e3);
  const double c5 = take(o, "c5", 1.0);
  const double c6 = take(o, "c6", 10.0);
  const double c7 = take(o, "c7", 3.0);
  const double c8 = take(o, "c8", 1.0);
  const double c9 = take(o, "c9", 6.0);
  std::vector<Reaction> reactions{
      {c1, {{0, 2}}, {{1, 1}}, {}},          // 2 S1 -> S2
      {c2, {{1, 1}}, {{0, 2}}, {}},          // S2 -> 2 S1
      {c3, {{1, 1}, {2, 1}}, {{3, 1}}, {}},  // S2 + S3 -> S4
      {c4, {{3, 1}}, {{1, 1}, {2, 1}}, {}},  // S4 -> S2 + S3
      {c5, {{2, 1}}, {{2, 1}, {4, 1}}, {}},  // S3 -> S3 + S5
      {c6, {{3, 1}}, {{3, 1}, {4, 1}}, {}},  // S4 -> S4 + S5
      {c7, {{4, 1}}, {{4, 1}, {0, 1}}, {}},  // S5 -> S5 + S1
      {c8, {{0, 1}}, {}, {}},                // S1 -> 0
      {c9, {{4, 1}}, {}, {}},                // S5 -> 0
  };
  StateVec x0{10.0, 0.0, 20.0, 0.0, 0.0};
  apply_x0(o, x0);
  reject_leftovers(o);
  return {ReactionNetwork({{"S1"}, {"S2"}, {"S3"}, {"S4"}, {"S5"}}, std::move(reactions)), x0};
}

}  // namespace

Model builtin_model(BuiltinModel which, const std::map<std::string, double>& overrides) {
  switch (which) {
    case BuiltinModel::reversible_isomerization: return make_reversible_isomerization(overrides);
    case BuiltinModel::schlogl: return make_schlogl(overrides);
    case BuiltinModel::michaelis_menten: return make_michaelis_menten(overrides);
    case BuiltinModel::nonlinear_reversible: return make_nonlinear_reversible(overrides);
    case BuiltinModel::genetic_loop: return make_genetic_loop(overrides);
  }
  throw std::invalid_argument("unknown builtin model");
}

std::optional<BuiltinModel> builtin_model_by_name(std::string_view name) {
  if (name == "reversible_isomerization") return BuiltinModel::reversible_isomerization;
  if (name == "schlogl") return BuiltinModel::schlogl;
  if (name == "michaelis_menten") return BuiltinModel::michaelis_menten;
  if (name == "nonlinear_reversible") return BuiltinModel::nonlinear_reversible;
  if (name == "genetic_loop") return BuiltinModel::genetic_loop;
  return std::nullopt;
}

std::vector<std::string> builtin_model_names() {
  return {"reversible_isomerization", "schlogl", "michaelis_menten", "nonlinear_reversible",
          "genetic_loop"};
}

Model nonlinear_reversible_full() {
  Reaction fwd{50.0, {{0, 2}}, {{1, 1}}, {}};
  Reaction back{1e3, {{1, 1}}, {{0, 2}}, {}};
  return {ReactionNetwork({{"X1"}, {"X2"}}, {fwd, back}), StateVec{400.0, 3990.0}};
}

}  // namespace chemtau
