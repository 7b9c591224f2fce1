#include "prefstab/scenario.hpp"

#include <fstream>
#include <sstream>

#include "prefstab/version.hpp"

namespace prefstab {

namespace {

std::string profile_key(const Game& g, const PureProfile& a) {
  std::string key;
  for (int i = 0; i < g.players(); ++i) {
    if (i) key += ",";
    key += g.action_labels(i)[a[i]];
  }
  return key;
}

PureProfile profile_from_key(const Game& g, const std::string& key) {
  PureProfile a;
  std::stringstream ss(key);
  std::string label;
  int i = 0;
  while (std::getline(ss, label, ',')) {
    if (i >= g.players()) throw StructuralError("profile key too long: " + key);
    const auto& labels = g.action_labels(i);
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw StructuralError("unknown action label '" + label + "' in key " + key);
    a.push_back(static_cast<int>(it - labels.begin()));
    ++i;
  }
  if (i != g.players()) throw StructuralError("profile key too short: " + key);
  return a;
}

Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(static_cast<long long>(j.get<long long>()));
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw StructuralError("rationals must be integers or \"p/q\" strings");
}

Json strategy_to_json(const MixedStrategy& s) {
  Json out = Json::array();
  for (auto& w : s) out.push_back(format_rational(w));
  return out;
}

MixedStrategy strategy_from_json(const Json& j) {
  MixedStrategy s;
  for (auto& w : j) s.push_back(rational_from_json(w));
  return s;
}

Json profile_strategies_to_json(const MixedProfile& p) {
  Json out = Json::array();
  for (auto& s : p.strategies) out.push_back(strategy_to_json(s));
  return out;
}

MixedProfile profile_strategies_from_json(const Json& j) {
  MixedProfile p;
  for (auto& s : j) p.strategies.push_back(strategy_from_json(s));
  return p;
}

}  // namespace

Json game_to_json(const Game& g) {
  Json out;
  out["players"] = g.players();
  Json actions = Json::array();
  for (int i = 0; i < g.players(); ++i) actions.push_back(g.action_labels(i));
  out["actions"] = actions;
  Json payoffs = Json::object();
  for (int f = 0; f < g.profile_count(); ++f) {
    Json v = Json::array();
    for (int i = 0; i < g.players(); ++i) v.push_back(format_rational(g.payoff_flat(f)[i]));
    payoffs[profile_key(g, g.profile_at(f))] = v;
  }
  out["payoffs"] = payoffs;
  return out;
}

Game game_from_json(const Json& j, const GameLimits& limits) {
  if (!j.contains("players") || !j.contains("actions") || !j.contains("payoffs"))
    throw StructuralError("game needs players, actions, payoffs");
  int n = j.at("players").get<int>();
  std::vector<std::vector<std::string>> labels;
  for (auto& arr : j.at("actions")) labels.push_back(arr.get<std::vector<std::string>>());
  if (static_cast<int>(labels.size()) != n) throw StructuralError("actions must list one set per player");
  Game shape(labels, std::vector<std::vector<Rational>>(
                         [&] {
                           int total = 1;
                           for (auto& l : labels) total *= static_cast<int>(l.size());
                           return total;
                         }(),
                         std::vector<Rational>(n, Rational(0))),
             limits);
  std::vector<std::vector<Rational>> payoffs(shape.profile_count());
  int seen = 0;
  for (auto& [key, value] : j.at("payoffs").items()) {
    PureProfile a = profile_from_key(shape, key);
    std::vector<Rational> v;
    for (auto& x : value) v.push_back(rational_from_json(x));
    if (static_cast<int>(v.size()) != n) throw StructuralError("payoff vector length mismatch at " + key);
    payoffs[shape.flat_index(a)] = v;
    ++seen;
  }
  if (seen != shape.profile_count())
    throw StructuralError("payoffs must cover the full cross product exactly once");
  return Game(labels, payoffs, limits);
}

Json scenario_to_json(const Configuration& c) {
  Json out;
  out["game"] = game_to_json(c.game);
  Json pops = Json::array();
  for (int i = 0; i < c.mu.populations(); ++i) {
    Json pop;
    Json types = Json::array();
    for (auto& t : c.mu.pops[i].types) {
      Json tj;
      if (!t.name.empty()) tj["name"] = t.name;
      Json utilities = Json::object();
      for (int f = 0; f < c.game.profile_count(); ++f)
        utilities[profile_key(c.game, c.game.profile_at(f))] = format_rational(t.utilities[f]);
      tj["utilities"] = utilities;
      Json tags = Json::array();
      if (t.materialist_tag) tags.push_back("materialist");
      if (t.indifferent_tag) tags.push_back("indifferent");
      if (!tags.empty()) tj["tags"] = tags;
      types.push_back(tj);
    }
    pop["types"] = types;
    Json shares = Json::array();
    for (auto& sh : c.mu.pops[i].shares) shares.push_back(format_rational(sh));
    pop["shares"] = shares;
    pops.push_back(pop);
  }
  out["populations"] = pops;
  Json regime;
  regime["mode"] = c.regime == Regime::kP1 ? "p1" : (c.regime == Regime::kP0 ? "p0" : "partial");
  if (c.regime == Regime::kPartial) regime["p"] = format_rational(c.p);
  if (c.b) {
    Json b = Json::object();
    auto idx = c.indexer();
    for (int f = 0; f < idx.total(); ++f) {
      auto tp = idx.at(f);
      std::string key;
      for (size_t i = 0; i < tp.size(); ++i) key += (i ? "," : "") + std::to_string(tp[i]);
      b[key] = profile_strategies_to_json(c.b->by_type_profile[f]);
    }
    regime["b"] = b;
  }
  if (c.s) {
    Json s = Json::array();
    for (auto& pop : c.s->by_pop_type) {
      Json per_type = Json::array();
      for (auto& st : pop) per_type.push_back(strategy_to_json(st));
      s.push_back(per_type);
    }
    regime["s"] = s;
  }
  out["regime"] = regime;
  return out;
}

Configuration scenario_from_json(const Json& j, const GameLimits& limits) {
  Configuration c;
  c.game = game_from_json(j.at("game"), limits);
  for (auto& [pi, pj] : j.at("populations").items()) {
    Population pop;
    int role = static_cast<int>(c.mu.pops.size());
    for (auto& tj : pj.at("types")) {
      PreferenceType t;
      t.role = role;
      t.utilities.assign(c.game.profile_count(), Rational(0));
      int seen = 0;
      for (auto& [key, value] : tj.at("utilities").items()) {
        t.utilities[c.game.flat_index(profile_from_key(c.game, key))] = rational_from_json(value);
        ++seen;
      }
      if (seen != c.game.profile_count())
        throw StructuralError("type utilities must cover every pure profile");
      if (tj.contains("name")) t.name = tj.at("name").get<std::string>();
      if (tj.contains("tags"))
        for (auto& tag : tj.at("tags")) {
          if (tag == "materialist") t.materialist_tag = true;
          else if (tag == "indifferent") t.indifferent_tag = true;
          else throw StructuralError("unknown tag");
        }
      pop.types.push_back(std::move(t));
    }
    for (auto& sh : pj.at("shares")) pop.shares.push_back(rational_from_json(sh));
    c.mu.pops.push_back(std::move(pop));
  }
  auto& regime = j.at("regime");
  std::string mode = regime.at("mode").get<std::string>();
  if (mode == "p1") c.regime = Regime::kP1;
  else if (mode == "p0") c.regime = Regime::kP0;
  else if (mode == "partial") c.regime = Regime::kPartial;
  else throw StructuralError("regime mode must be p1, p0, or partial");
  if (c.regime == Regime::kPartial) c.p = rational_from_json(regime.at("p"));
  if (regime.contains("b")) {
    auto idx = c.indexer();
    StrategyFunctionObservable b;
    b.by_type_profile.resize(idx.total());
    std::vector<bool> filled(idx.total(), false);
    for (auto& [key, value] : regime.at("b").items()) {
      std::vector<int> tp;
      std::stringstream ss(key);
      std::string part;
      while (std::getline(ss, part, ',')) tp.push_back(std::stoi(part));
      int f = idx.flat(tp);
      b.by_type_profile[f] = profile_strategies_from_json(value);
      filled[f] = true;
    }
    for (bool ok : filled)
      if (!ok) throw StructuralError("b must cover every matched type profile");
    c.b = std::move(b);
  }
  if (regime.contains("s")) {
    StrategyFunctionUnobservable s;
    for (auto& pop : regime.at("s")) {
      std::vector<MixedStrategy> per_type;
      for (auto& st : pop) per_type.push_back(strategy_from_json(st));
      s.by_pop_type.push_back(std::move(per_type));
    }
    c.s = std::move(s);
  }
  if (c.regime != Regime::kP0 && !c.b) throw StructuralError("regime requires b");
  if (c.regime != Regime::kP1 && !c.s) throw StructuralError("regime requires s");
  return c;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    int line = 1, col = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(path + ": " + e.what(), line, col);
  }
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot write " + path);
  out << j.dump(2) << "\n";
}

Json poly_to_json(const Poly& p, const std::vector<std::string>& names) {
  Json out = Json::object();
  for (auto& [mono, coeff] : p.terms()) {
    std::string key;
    for (size_t i = 0; i < mono.size(); ++i) {
      if (mono[i] == 0) continue;
      if (!key.empty()) key += "*";
      key += names[i];
      if (mono[i] > 1) key += "^" + std::to_string(mono[i]);
    }
    if (key.empty()) key = "1";
    out[key] = format_rational(coeff);
  }
  return out;
}

std::string verdict_kind_name(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::kStable: return "stable";
    case VerdictKind::kUnstable: return "unstable";
    case VerdictKind::kUnknown: return "unknown";
  }
  return "unknown";
}

Json validation_to_json(const ValidationReport& report) {
  Json out;
  out["ok"] = report.ok;
  Json items = Json::array();
  for (auto& v : report.violations) {
    Json item;
    item["type_profile"] = v.type_profile;
    item["population"] = v.population;
    item["deviation"] = v.deviation;
    item["message"] = v.message;
    items.push_back(item);
  }
  out["violations"] = items;
  return out;
}

Json verdict_to_json(const Configuration& c, const StabilityVerdict& v, const StabilityOptions& options) {
  const int n = c.game.players();
  std::vector<std::string> eps_names;
  for (int i = 0; i < n; ++i) eps_names.push_back("e" + std::to_string(i + 1));

  Json out;
  out["tool"] = "prefstab";
  out["version"] = kVersion;
  Json opts;
  opts["grid_resolution"] = options.grid_resolution;
  opts["support_limit"] = options.support_limit;
  opts["max_assignments"] = options.max_assignments;
  out["options"] = opts;
  out["regime"] = c.regime == Regime::kP1 ? "p1" : (c.regime == Regime::kP0 ? "p0" : "partial");
  if (c.regime == Regime::kPartial) out["p"] = format_rational(c.p);
  out["verdict"] = verdict_kind_name(v.kind);
  if (!v.route.empty()) out["route"] = v.route;
  if (!v.premises.empty()) out["premises"] = v.premises;
  if (!v.reason.empty()) out["reason"] = v.reason;
  if (v.uniform_barrier) out["uniform_barrier"] = format_rational(*v.uniform_barrier);
  if (!v.balance_violations.empty()) {
    Json items = Json::array();
    for (auto& bv : v.balance_violations) {
      Json item;
      item["population"] = bv.population;
      item["message"] = bv.message;
      items.push_back(item);
    }
    out["balance_violations"] = items;
  }
  if (v.certificate) {
    const auto& cert = *v.certificate;
    Json cj;
    cj["route"] = cert.route;
    cj["coalition"] = cert.mutants.coalition;
    Json mutant_types = Json::object();
    for (auto& [j, t] : cert.mutants.types)
      mutant_types[std::to_string(j + 1)] = t.name.empty() ? "custom" : t.name;
    cj["mutant_types"] = mutant_types;
    Json assignment;
    if (!cert.assignment.b_entries.empty()) {
      Json b = Json::object();
      for (auto& [mp, prof] : cert.assignment.b_entries) {
        std::string key;
        for (size_t i = 0; i < mp.size(); ++i) {
          bool mutant = mp[i] == c.mu.type_count(static_cast<int>(i));
          key += (i ? "," : "");
          key += mutant ? "m" : std::to_string(mp[i]);
        }
        b[key] = profile_strategies_to_json(prof);
      }
      assignment["b"] = b;
    }
    if (!cert.assignment.s_mutant.empty()) {
      Json s = Json::object();
      for (auto& [j, st] : cert.assignment.s_mutant) s[std::to_string(j + 1)] = strategy_to_json(st);
      assignment["s_mutant"] = s;
    }
    if (!cert.assignment.s_incumbent.empty()) {
      Json s = Json::object();
      for (auto& [key, st] : cert.assignment.s_incumbent)
        s[std::to_string(key.first + 1) + ":" + std::to_string(key.second)] = strategy_to_json(st);
      assignment["s_incumbent"] = s;
    }
    cj["assignment"] = assignment;
    Json polys = Json::array();
    for (auto& d : cert.diffs) {
      Json pj;
      pj["population"] = d.population + 1;
      pj["vs_incumbent_type"] = d.incumbent_type;
      pj["poly"] = poly_to_json(d.diff, eps_names);
      polys.push_back(pj);
    }
    cj["fitness_advantage"] = polys;
    Json region;
    region["kind"] = cert.region.kind == ValidityRegion::kBox ? "box" : "diagonal";
    region["bound"] = format_rational(cert.region.bound);
    cj["region"] = region;
    out["certificate"] = cj;
  }
  if (v.bounds) {
    const auto& b = *v.bounds;
    Json bj;
    bj["defended_population"] = b.defended + 1;
    bj["incumbent_floor"] = poly_to_json(b.incumbent_floor, eps_names);
    Json grid = Json::array();
    for (auto& pt : b.grid) {
      Json gj;
      gj["sigma"] = strategy_to_json(pt.sigma);
      gj["per_match_value"] = format_rational(pt.per_match_value);
      gj["ceiling"] = poly_to_json(pt.ceiling, eps_names);
      if (pt.threshold) gj["threshold"] = format_rational(*pt.threshold);
      grid.push_back(gj);
    }
    bj["grid"] = grid;
    bj["barrier_nonmimic"] = format_rational(b.barrier_nonmimic);
    bj["barrier_mimic_branch"] = format_rational(b.barrier_mimic_branch);
    bj["barrier"] = format_rational(b.barrier);
    bj["premises"] = b.premises;
    out["bounds"] = bj;
  }
  return out;
}

}  // namespace prefstab
