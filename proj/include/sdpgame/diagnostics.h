#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sdpgame/grammar.h"
#include "sdpgame/state.h"

namespace sdpgame {

// Reduced monomials attributed to prior constructions.
struct ReferenceSet {
  std::set<Monomial> monomials;

  void add(const Monomial& m) { monomials.insert(reduce_constant_factors(m)); }
  bool contains(const Monomial& m) const {
    return monomials.count(reduce_constant_factors(m)) > 0;
  }
};

// One rendered monomial per line ("P1 <*> P3"); blank lines and lines starting
// with '#' are skipped. Throws ParseError with the line number in the message.
ReferenceSet parse_reference_set(const std::string& text);
ReferenceSet load_reference_set(const std::string& path);

// Percentage of the sentence's reduced monomials missing from ref, rounded to
// one decimal half away from zero. Zero for an empty sentence.
double novelty_fraction(const Sentence& s, const ReferenceSet& ref);

// Per degree, the number of converged rounds containing each monomial of that
// degree, summed over monomials. Sorted by degree.
std::vector<std::pair<int, int>> degree_histogram(const std::vector<GameState>& states);

struct TraceRow {
  int round = 0;
  double r = 0, R = 0;
  double bound = 0;
  bool converged = false;
};

std::vector<TraceRow> exploration_trace(const GameState& state);

std::string novelty_csv(const GameState& state, const ReferenceSet& ref);
std::string degrees_csv(const std::vector<GameState>& states);
std::string trace_csv(const GameState& state);
// Best round, counts and totals as a JSON document.
std::string summary_json(const GameState& state, const ReferenceSet& ref);

// Writes novelty.csv, degrees.csv, trace.csv and summary.json into dir.
void write_reports(const GameState& state, const ReferenceSet& ref, const std::string& dir);

}  // namespace sdpgame
