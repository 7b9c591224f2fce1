#include "prefstab/game.hpp"

#include <algorithm>

namespace prefstab {

Game::Game(std::vector<std::vector<std::string>> action_labels,
           std::vector<std::vector<Rational>> payoffs, const GameLimits& limits)
    : n_(static_cast<int>(action_labels.size())), labels_(std::move(action_labels)), payoffs_(std::move(payoffs)) {
  if (n_ < 2) throw StructuralError("a game needs at least two players");
  if (n_ > limits.max_players)
    throw StructuralError("player count " + std::to_string(n_) + " exceeds cap " +
                          std::to_string(limits.max_players));
  int total = 1;
  for (auto& labels : labels_) {
    if (labels.empty()) throw StructuralError("empty action set");
    if (static_cast<int>(labels.size()) > limits.max_actions)
      throw StructuralError("action set size exceeds cap " + std::to_string(limits.max_actions));
    for (size_t i = 0; i < labels.size(); ++i)
      for (size_t j = i + 1; j < labels.size(); ++j)
        if (labels[i] == labels[j]) throw StructuralError("duplicate action label: " + labels[i]);
    total *= static_cast<int>(labels.size());
  }
  if (static_cast<int>(payoffs_.size()) != total)
    throw StructuralError("payoff tensor must cover the full cross product of action sets");
  for (auto& v : payoffs_)
    if (static_cast<int>(v.size()) != n_) throw StructuralError("payoff vector length must equal player count");
  stride_.assign(n_, 1);
  for (int i = n_ - 2; i >= 0; --i) stride_[i] = stride_[i + 1] * actions(i + 1);
}

int Game::flat_index(const PureProfile& a) const {
  if (static_cast<int>(a.size()) != n_) throw StructuralError("profile length mismatch");
  int idx = 0;
  for (int i = 0; i < n_; ++i) {
    if (a[i] < 0 || a[i] >= actions(i)) throw StructuralError("action index out of range");
    idx += a[i] * stride_[i];
  }
  return idx;
}

PureProfile Game::profile_at(int flat) const {
  PureProfile a(n_);
  for (int i = 0; i < n_; ++i) {
    a[i] = flat / stride_[i];
    flat %= stride_[i];
  }
  return a;
}

Rational Game::min_payoff(int player) const {
  Rational m = payoffs_[0][player];
  for (auto& v : payoffs_) m = std::min(m, v[player]);
  return m;
}

Rational Game::max_payoff(int player) const {
  Rational m = payoffs_[0][player];
  for (auto& v : payoffs_) m = std::max(m, v[player]);
  return m;
}

std::vector<PureProfile> Game::all_profiles() const {
  std::vector<PureProfile> out;
  out.reserve(payoffs_.size());
  for (int f = 0; f < profile_count(); ++f) out.push_back(profile_at(f));
  return out;
}

MixedProfile MixedProfile::pure(const Game& g, const PureProfile& a) {
  MixedProfile p;
  for (int i = 0; i < g.players(); ++i) {
    MixedStrategy s(g.actions(i), Rational(0));
    s[a[i]] = 1;
    p.strategies.push_back(std::move(s));
  }
  return p;
}

bool MixedProfile::is_pure() const {
  for (auto& s : strategies)
    for (auto& w : s)
      if (w != 0 && w != 1) return false;
  return true;
}

PureProfile MixedProfile::as_pure() const {
  PureProfile a;
  for (auto& s : strategies) {
    int hit = -1;
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] == 1) hit = static_cast<int>(i);
      else if (s[i] != 0) throw StructuralError("profile is not pure");
    }
    if (hit < 0) throw StructuralError("profile is not pure");
    a.push_back(hit);
  }
  return a;
}

void check_mixed_strategy(const MixedStrategy& s) {
  Rational total = 0;
  for (auto& w : s) {
    if (w < 0) throw StructuralError("negative strategy weight");
    total += w;
  }
  if (total != 1) throw StructuralError("strategy weights must sum to 1");
}

void check_profile_shape(const Game& g, const MixedProfile& p) {
  if (static_cast<int>(p.strategies.size()) != g.players()) throw StructuralError("profile length mismatch");
  for (int i = 0; i < g.players(); ++i) {
    if (static_cast<int>(p.strategies[i].size()) != g.actions(i))
      throw StructuralError("strategy dimension mismatch for player " + std::to_string(i));
    check_mixed_strategy(p.strategies[i]);
  }
}

void check_correlated_shape(const Game& g, const CorrelatedStrategy& c) {
  if (static_cast<int>(c.weights.size()) != g.profile_count())
    throw StructuralError("correlated strategy dimension mismatch");
  Rational total = 0;
  for (auto& w : c.weights) {
    if (w < 0) throw StructuralError("negative correlated weight");
    total += w;
  }
  if (total != 1) throw StructuralError("correlated weights must sum to 1");
}

Rational tensor_value(const Game& g, const std::vector<Rational>& tensor, const MixedProfile& p) {
  Rational total = 0;
  for (int f = 0; f < g.profile_count(); ++f) {
    PureProfile a = g.profile_at(f);
    Rational w = 1;
    for (int i = 0; i < g.players() && w != 0; ++i) w *= p.strategies[i][a[i]];
    if (w != 0) total += w * tensor[f];
  }
  return total;
}

std::vector<Rational> expected_payoff(const Game& g, const MixedProfile& p) {
  check_profile_shape(g, p);
  std::vector<Rational> out(g.players(), Rational(0));
  for (int f = 0; f < g.profile_count(); ++f) {
    PureProfile a = g.profile_at(f);
    Rational w = 1;
    for (int i = 0; i < g.players() && w != 0; ++i) w *= p.strategies[i][a[i]];
    if (w == 0) continue;
    for (int i = 0; i < g.players(); ++i) out[i] += w * g.payoff_flat(f)[i];
  }
  return out;
}

Rational expected_payoff(const Game& g, int player, const MixedProfile& p) {
  return expected_payoff(g, p)[player];
}

std::vector<Rational> expected_payoff(const Game& g, const CorrelatedStrategy& c) {
  check_correlated_shape(g, c);
  std::vector<Rational> out(g.players(), Rational(0));
  for (int f = 0; f < g.profile_count(); ++f) {
    if (c.weights[f] == 0) continue;
    for (int i = 0; i < g.players(); ++i) out[i] += c.weights[f] * g.payoff_flat(f)[i];
  }
  return out;
}

CorrelatedStrategy induced_correlated(const Game& g, const MixedProfile& p) {
  check_profile_shape(g, p);
  CorrelatedStrategy c;
  c.weights.assign(g.profile_count(), Rational(0));
  for (int f = 0; f < g.profile_count(); ++f) {
    PureProfile a = g.profile_at(f);
    Rational w = 1;
    for (int i = 0; i < g.players() && w != 0; ++i) w *= p.strategies[i][a[i]];
    c.weights[f] = w;
  }
  return c;
}

Rational coalition_payoff_sum(const Game& g, const std::vector<int>& coalition, const MixedProfile& p) {
  if (coalition.empty()) throw StructuralError("empty coalition");
  auto values = expected_payoff(g, p);
  Rational total = 0;
  for (int j : coalition) {
    if (j < 0 || j >= g.players()) throw StructuralError("coalition member out of range");
    total += values[j];
  }
  return total;
}

Rational unilateral_payoff(const Game& g, int player, const MixedStrategy& strategy, const MixedProfile& p) {
  MixedProfile q = p;
  q.strategies[player] = strategy;
  return expected_payoff(g, q)[player];
}

Rational unilateral_payoff(const Game& g, int player, int action, const MixedProfile& p) {
  MixedStrategy s(g.actions(player), Rational(0));
  s[action] = 1;
  return unilateral_payoff(g, player, s, p);
}

Rational tensor_value_unilateral(const Game& g, const std::vector<Rational>& tensor, int player, int action,
                                 const MixedProfile& p) {
  MixedProfile q = p;
  MixedStrategy s(g.actions(player), Rational(0));
  s[action] = 1;
  q.strategies[player] = s;
  return tensor_value(g, tensor, q);
}

}  // namespace prefstab
