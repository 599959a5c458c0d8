#include "sdpgame/diagnostics.h"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sdpgame {

namespace {
std::string shortest(double x) {
  if (!std::isfinite(x)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string one_decimal(double x) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(1);
  out << x;
  return out.str();
}

// Sentences of converged rounds; rounds whose text does not parse are skipped.
std::vector<Sentence> converged_sentences(const GameState& st) {
  std::vector<Sentence> out;
  for (const auto& r : st.rounds) {
    if (!r.converged() || r.sentence.empty()) continue;
    try {
      out.push_back(reduce_sentence(tokenize_and_parse(r.sentence)));
    } catch (const ParseError&) {
    }
  }
  return out;
}

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("cannot write " + p.string());
}
}  // namespace

ReferenceSet parse_reference_set(const std::string& text) {
  ReferenceSet ref;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    try {
      ref.add(parse_monomial(line.substr(first, last - first + 1)));
    } catch (const ParseError& e) {
      throw ParseError("reference set line " + std::to_string(number) + ": " + e.what(),
                       e.offset());
    }
  }
  return ref;
}

ReferenceSet load_reference_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read reference set " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_reference_set(ss.str());
}

double novelty_fraction(const Sentence& s, const ReferenceSet& ref) {
  const Sentence reduced = reduce_sentence(s);
  const long total = static_cast<long>(reduced.length());
  if (total == 0) return 0.0;
  long novel = 0;
  for (const auto& m : reduced.monomials) novel += ref.contains(m) ? 0 : 1;
  // Tenths of a percent, rounded half away from zero in integers.
  const long tenths = (2000 * novel + total) / (2 * total);
  return static_cast<double>(tenths) / 10.0;
}

std::vector<std::pair<int, int>> degree_histogram(const std::vector<GameState>& states) {
  std::map<int, int> by_degree;
  for (const auto& st : states) {
    for (const auto& s : converged_sentences(st)) {
      for (const auto& m : s.monomials) by_degree[m.degree()] += 1;
    }
  }
  return {by_degree.begin(), by_degree.end()};
}

std::vector<TraceRow> exploration_trace(const GameState& state) {
  std::vector<TraceRow> out;
  for (const auto& r : state.rounds) out.push_back({r.round, r.r, r.R, r.bound, r.converged()});
  return out;
}

std::string novelty_csv(const GameState& state, const ReferenceSet& ref) {
  std::ostringstream out;
  out << "round,sentence,monomials,novel,novelty_percent\n";
  for (const auto& r : state.rounds) {
    if (!r.converged() || r.sentence.empty()) continue;
    Sentence s;
    try {
      s = reduce_sentence(tokenize_and_parse(r.sentence));
    } catch (const ParseError&) {
      continue;
    }
    int novel = 0;
    for (const auto& m : s.monomials) novel += ref.contains(m) ? 0 : 1;
    out << r.round << ',' << csv_text(render(s)) << ',' << s.length() << ',' << novel << ','
        << one_decimal(novelty_fraction(s, ref)) << '\n';
  }
  return out.str();
}

std::string degrees_csv(const std::vector<GameState>& states) {
  std::ostringstream out;
  out << "degree,count\n";
  for (const auto& [d, c] : degree_histogram(states)) out << d << ',' << c << '\n';
  return out.str();
}

std::string trace_csv(const GameState& state) {
  std::ostringstream out;
  out << "round,r,R,bound,converged\n";
  for (const auto& t : exploration_trace(state)) {
    out << t.round << ',' << shortest(t.r) << ',' << shortest(t.R) << ','
        << (t.converged ? shortest(t.bound) : "") << ',' << (t.converged ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string summary_json(const GameState& state, const ReferenceSet& ref) {
  nlohmann::ordered_json j;
  int converged = 0;
  for (const auto& r : state.rounds) converged += r.converged() ? 1 : 0;
  j["rounds"] = state.rounds.size();
  j["converged_rounds"] = converged;
  if (const RoundRecord* b = state.best_round()) {
    j["best_round"] = b->round;
    j["best_bound"] = b->bound;
    j["best_objective"] = b->objective;
    j["best_r"] = b->r;
    j["best_R"] = b->R;
    j["best_sentence"] = b->sentence;
    try {
      j["best_novelty_percent"] = novelty_fraction(tokenize_and_parse(b->sentence), ref);
    } catch (const ParseError&) {
      j["best_novelty_percent"] = nullptr;
    }
  } else {
    j["best_round"] = nullptr;
    j["best_bound"] = nullptr;
  }
  return j.dump(2) + "\n";
}

void write_reports(const GameState& state, const ReferenceSet& ref, const std::string& dir) {
  const std::filesystem::path d(dir);
  std::filesystem::create_directories(d);
  write_file(d / "novelty.csv", novelty_csv(state, ref));
  write_file(d / "degrees.csv", degrees_csv({state}));
  write_file(d / "trace.csv", trace_csv(state));
  write_file(d / "summary.json", summary_json(state, ref));
}

}  // namespace sdpgame
