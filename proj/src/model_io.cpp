#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "chemtau/network.hpp"

namespace chemtau {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw std::runtime_error(origin + ": " + what);
}

double require_number(const json& obj, const std::string& key, const std::string& where,
                      const std::string& origin) {
  if (!obj.contains(key)) fail(origin, where + " is missing field '" + key + "'");
  if (!obj[key].is_number()) fail(origin, where + "." + key + " must be a number");
  return obj[key].get<double>();
}

}  // namespace

Model parse_model(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(origin, e.what());
  }

  if (!doc.is_object() || !doc.contains("species") || !doc.contains("reactions"))
    fail(origin, "model document needs 'species' and 'reactions' arrays");
  if (!doc["species"].is_array() || doc["species"].empty())
    fail(origin, "'species' must be a non-empty array");
  if (!doc["reactions"].is_array() || doc["reactions"].empty())
    fail(origin, "'reactions' must be a non-empty array");

  std::vector<Species> species;
  StateVec x0;
  for (std::size_t i = 0; i < doc["species"].size(); ++i) {
    const json& sp = doc["species"][i];
    const std::string where = "species[" + std::to_string(i) + "]";
    if (!sp.is_object() || !sp.contains("name") || !sp["name"].is_string())
      fail(origin, where + " needs a string field 'name'");
    Species s;
    s.name = sp["name"].get<std::string>();
    if (sp.contains("buffered")) {
      if (!sp["buffered"].is_boolean()) fail(origin, where + ".buffered must be a boolean");
      s.buffered = sp["buffered"].get<bool>();
    }
    x0.push_back(require_number(sp, "initial", where, origin));
    species.push_back(std::move(s));
    for (const auto& [key, value] : sp.items())
      if (key != "name" && key != "buffered" && key != "initial")
        fail(origin, where + " has unknown field '" + key + "'");
  }

  auto species_index = [&](const std::string& name, const std::string& where) {
    for (std::size_t i = 0; i < species.size(); ++i)
      if (species[i].name == name) return static_cast<int>(i);
    fail(origin, where + " references unknown species '" + name + "'");
  };

  std::vector<Reaction> reactions;
  for (std::size_t j = 0; j < doc["reactions"].size(); ++j) {
    const json& rj = doc["reactions"][j];
    const std::string where = "reactions[" + std::to_string(j) + "]";
    if (!rj.is_object()) fail(origin, where + " must be an object");
    Reaction r;
    r.rate = require_number(rj, "rate", where, origin);
    if (r.rate < 0.0) fail(origin, where + ".rate must be nonnegative");
    int total_order = 0;
    if (rj.contains("reactants")) {
      if (!rj["reactants"].is_object()) fail(origin, where + ".reactants must be a map");
      for (const auto& [name, order] : rj["reactants"].items()) {
        if (!order.is_number_integer() || order.get<int>() < 1)
          fail(origin, where + ".reactants." + name + " must be a positive integer order");
        total_order += order.get<int>();
        r.reactants[species_index(name, where)] = order.get<int>();
      }
    }
    if (total_order > 3) fail(origin, where + " has total reactant order " +
                                          std::to_string(total_order) + "; at most 3 is supported");
    if (rj.contains("products")) {
      if (!rj["products"].is_object()) fail(origin, where + ".products must be a map");
      for (const auto& [name, count] : rj["products"].items()) {
        if (!count.is_number_integer() || count.get<int>() < 1)
          fail(origin, where + ".products." + name + " must be a positive integer count");
        r.products[species_index(name, where)] = count.get<int>();
      }
    }
    if (rj.contains("complement")) {
      const json& cj = rj["complement"];
      const std::string cwhere = where + ".complement";
      if (!cj.is_object() || !cj.contains("species") || !cj["species"].is_string())
        fail(origin, cwhere + " needs a string field 'species'");
      Reaction::Complement c;
      c.species = species_index(cj["species"].get<std::string>(), cwhere);
      c.total = require_number(cj, "total", cwhere, origin);
      c.divisor = cj.contains("divisor") ? require_number(cj, "divisor", cwhere, origin) : 1.0;
      r.complement = c;
    }
    for (const auto& [key, value] : rj.items())
      if (key != "rate" && key != "reactants" && key != "products" && key != "complement")
        fail(origin, where + " has unknown field '" + key + "'");
    reactions.push_back(std::move(r));
  }

  try {
    return {ReactionNetwork(std::move(species), std::move(reactions)), std::move(x0)};
  } catch (const std::invalid_argument& e) {
    fail(origin, e.what());
  }
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open model file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str(), path);
}

}  // namespace chemtau
