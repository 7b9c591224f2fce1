#pragma once

#include <functional>
#include <string>
#include <vector>

#include "prefstab/configuration.hpp"
#include "prefstab/game.hpp"

namespace prefstab::corpus {

// Built-in desk-scale games and configurations used by the regression
// corpus and the CLI `examples` command.

Game battle_of_sexes();        // ex1: V=15, C=10, c=3
Game coordination_2x2();       // ex2: (a11,a21) vs Pareto-dominant (a12,a22)
Game three_player_3x3();       // ex3
Game three_player_2x2();       // ex4
Game coordination_3x3();       // ex5 objective game
Game prisoners_dilemma();      // ex6
Game nongeneric_2x3();         // the non-generic two-player game

Configuration ex1_configuration();                       // P1, (Faithful, Fast)
Configuration ex2_configuration_low(Regime regime, const Rational& p = Rational(1, 2));   // outcome (a11,a21)
Configuration ex2_configuration_high(Regime regime, const Rational& p = Rational(1, 2));  // outcome (a12,a22)
Configuration ex3_configuration();                       // P1, (a11,a21,a31)
Configuration ex4_configuration();                       // P1, (a11,a21,a31)
Configuration ex5_configuration();                       // P0, ((1/2,1/2,0),(1/2,1/2,0))
Configuration ex6_configuration(Regime regime, const Rational& p = Rational(1, 2));       // (D1,D2)
Configuration nongeneric_materialist();                  // P0, (a11,a21)
Configuration nongeneric_dominant();                     // P0, (a11,a21), dominant types

// The mutant types from the no-observability example that support the
// far-from-original equilibrium (incumbents on (1,0,0)).
PreferenceType ex5_divergence_mutant(int role);

struct CorpusCheck {
  std::string example;  // "ex1".."ex6", "nongeneric"
  std::string name;
  std::function<bool(std::string& detail)> run;
};

// Every quoted numeric fact replayed by the `examples` CLI command.
std::vector<CorpusCheck> corpus_checks();

}  // namespace prefstab::corpus
