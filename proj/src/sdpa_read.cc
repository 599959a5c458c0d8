#include <cctype>
#include <map>
#include <sstream>

#include "sdpgame/solver.h"

namespace sdpgame {

FormatError::FormatError(const std::string& what, int line)
    : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kMaxIterations: return "max_iterations";
    case SolveStatus::kInfeasible: return "infeasible-detected";
    case SolveStatus::kNumericFailure: return "numeric-failure";
  }
  return "numeric-failure";
}

SolveStatus status_from_name(const std::string& s) {
  if (s == "converged") return SolveStatus::kConverged;
  if (s == "max_iterations") return SolveStatus::kMaxIterations;
  if (s == "infeasible-detected") return SolveStatus::kInfeasible;
  if (s == "numeric-failure") return SolveStatus::kNumericFailure;
  throw std::invalid_argument("unknown solver status '" + s + "'");
}

namespace {
std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

// Numbers in a line, treating SDPA punctuation {},() as separators.
std::vector<std::string> number_fields(const std::string& line) {
  std::string s = line;
  for (char& c : s) {
    if (c == '{' || c == '}' || c == ',' || c == '(' || c == ')') c = ' ';
  }
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string f;
  while (is >> f) out.push_back(f);
  return out;
}

Real parse_real(const std::string& s, int line) {
  std::string t = s;
  if (!t.empty() && t[0] == '+') t = t.substr(1);
  try {
    size_t pos = 0;
    (void)std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw FormatError("expected a number, got '" + s + "'", line);
  }
  return Real(t);
}

int parse_int(const std::string& s, int line) {
  try {
    size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw FormatError("expected an integer, got '" + s + "'", line);
  }
}
}  // namespace

SdpInstance read_sdpa(const std::string& text) {
  const auto lines = split_lines(text);
  size_t li = 0;
  auto skip_comments = [&]() {
    while (li < lines.size()) {
      const auto& l = lines[li];
      const auto first = l.find_first_not_of(" \t");
      if (first == std::string::npos || l[first] == '"' || l[first] == '*') {
        ++li;
      } else {
        break;
      }
    }
  };
  // Header values may span lines; gather them field by field.
  std::vector<std::string> pending;
  auto next_field = [&]() -> std::pair<std::string, int> {
    while (pending.empty()) {
      skip_comments();
      if (li >= lines.size()) {
        throw FormatError("unexpected end of SDPA header", static_cast<int>(li) + 1);
      }
      auto f = number_fields(lines[li]);
      ++li;
      for (auto it = f.rbegin(); it != f.rend(); ++it) pending.push_back(*it);
    }
    auto v = pending.back();
    pending.pop_back();
    return {v, static_cast<int>(li)};
  };

  auto [mtext, mline] = next_field();
  pending.clear();
  const int m = parse_int(mtext, mline);
  auto [btext, bline] = next_field();
  pending.clear();
  const int nb = parse_int(btext, bline);
  if (m < 1 || nb < 1) throw FormatError("row and block counts must be positive", bline);

  SdpInstance inst;
  for (int b = 0; b < nb; ++b) {
    auto [t, l] = next_field();
    const int d = parse_int(t, l);
    if (d == 0) throw FormatError("zero block size", l);
    inst.blocks.push_back({d < 0 ? -d : d, BlockRole::kSentence, -1});
  }
  pending.clear();
  std::vector<Real> rhs;
  for (int k = 0; k < m; ++k) {
    auto [t, l] = next_field();
    rhs.push_back(parse_real(t, l));
  }
  pending.clear();

  std::vector<SymMatrix> obj;
  std::vector<std::vector<SymMatrix>> mats(m, std::vector<SymMatrix>(nb));
  for (int b = 0; b < nb; ++b) obj.emplace_back(inst.blocks[b].dim);
  for (; li < lines.size(); ++li) {
    const auto f = number_fields(lines[li]);
    if (f.empty()) continue;
    const int line = static_cast<int>(li) + 1;
    if (f.size() != 5) throw FormatError("expected 'row block i j value'", line);
    const int k = parse_int(f[0], line), b = parse_int(f[1], line) - 1;
    const int i = parse_int(f[2], line) - 1, j = parse_int(f[3], line) - 1;
    if (k < 0 || k > m || b < 0 || b >= nb) throw FormatError("index out of range", line);
    const int d = inst.blocks[b].dim;
    if (i < 0 || j < 0 || i >= d || j >= d) throw FormatError("entry outside block", line);
    const Real v = parse_real(f[4], line);
    if (k == 0) {
      obj[b].set(i, j, -v);
    } else {
      auto& mat = mats[k - 1][b];
      if (mat.dim() == 0) mat = SymMatrix(d);
      mat.set(i, j, v);
    }
  }
  for (int k = 0; k < m; ++k) {
    ConstraintRow row{k + 1 == m ? RowKind::kNormalization : RowKind::kPivot, {}, rhs[k]};
    for (int b = 0; b < nb; ++b) {
      if (mats[k][b].dim() == 0) continue;
      BlockTerm t;
      t.block = b;
      t.dense_matrix = mats[k][b];
      row.terms.push_back(std::move(t));
    }
    if (k + 1 == m) {
      inst.normalization = std::move(row);
    } else {
      inst.rows.push_back(std::move(row));
    }
  }
  for (int b = 0; b < nb; ++b) {
    inst.objective.push_back(obj[b].is_zero() ? SymMatrix() : obj[b]);
  }
  inst.meta.builder = "sdpa";
  inst.meta.K = static_cast<int>(inst.rows.size());
  inst.validate();
  return inst;
}

namespace {
SolveStatus map_phase(const std::string& phase) {
  if (phase == "pdOPT") return SolveStatus::kConverged;
  static const char* infeasible[] = {"pdINF", "pINF", "dINF", "pFEAS_dINF",
                                     "pINF_dFEAS", "pUNBD", "dUNBD"};
  for (const char* p : infeasible) {
    if (phase == p) return SolveStatus::kInfeasible;
  }
  static const char* unfinished[] = {"noINFO", "pFEAS", "dFEAS", "pdFEAS"};
  for (const char* p : unfinished) {
    if (phase == p) return SolveStatus::kMaxIterations;
  }
  return SolveStatus::kNumericFailure;
}

// Value after "key =" on a line, if the line carries that key.
bool keyed_value(const std::string& line, const std::string& key, std::string& out) {
  const auto pos = line.find(key);
  if (pos == std::string::npos) return false;
  const auto eq = line.find('=', pos + key.size());
  if (eq == std::string::npos) return false;
  if (line.find_first_not_of(" \t", pos + key.size()) != eq) return false;
  std::istringstream is(line.substr(eq + 1));
  return static_cast<bool>(is >> out);
}

// Parses a brace-nested matrix list starting at lines[li] (the "{" after
// "yMat ="). Returns the blocks; diagonal blocks come as flat lists.
std::vector<SymMatrix> parse_matrix_list(const std::vector<std::string>& lines,
                                        size_t& li) {
  // Tokenize braces and numbers across lines.
  struct Tok {
    char kind;  // '{', '}', 'n'
    std::string text;
    int line;
  };
  std::vector<Tok> toks;
  int depth = 0;
  bool started = false;
  for (; li < lines.size(); ++li) {
    const std::string& l = lines[li];
    std::string num;
    auto flush = [&]() {
      if (!num.empty()) toks.push_back({'n', num, static_cast<int>(li) + 1});
      num.clear();
    };
    for (char c : l) {
      if (c == '{') {
        flush();
        toks.push_back({'{', "", static_cast<int>(li) + 1});
        ++depth;
        started = true;
      } else if (c == '}') {
        flush();
        toks.push_back({'}', "", static_cast<int>(li) + 1});
        --depth;
      } else if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
        flush();
      } else {
        num += c;
      }
    }
    flush();
    if (started && depth == 0) {
      ++li;
      break;
    }
  }
  if (!started || depth != 0) {
    throw FormatError("unterminated matrix list", static_cast<int>(li));
  }
  std::vector<SymMatrix> blocks;
  size_t t = 1;  // skip outer '{'
  while (t < toks.size() && toks[t].kind != '}') {
    if (toks[t].kind == 'n') {
      // A bare number at top level is a 1x1 diagonal entry list.
      SymMatrix m(1);
      m.set(0, 0, parse_real(toks[t].text, toks[t].line));
      blocks.push_back(std::move(m));
      ++t;
      continue;
    }
    ++t;  // block '{'
    std::vector<std::vector<Real>> rows;
    std::vector<Real> flat;
    while (t < toks.size() && toks[t].kind != '}') {
      if (toks[t].kind == '{') {
        ++t;
        std::vector<Real> row;
        while (t < toks.size() && toks[t].kind == 'n') {
          row.push_back(parse_real(toks[t].text, toks[t].line));
          ++t;
        }
        if (t >= toks.size() || toks[t].kind != '}') {
          throw FormatError("malformed matrix row", toks[std::min(t, toks.size() - 1)].line);
        }
        ++t;
        rows.push_back(std::move(row));
      } else {
        flat.push_back(parse_real(toks[t].text, toks[t].line));
        ++t;
      }
    }
    ++t;  // block '}'
    if (!rows.empty()) {
      const int n = static_cast<int>(rows.size());
      SymMatrix m(n);
      for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n) {
          throw FormatError("non-square matrix block", toks[t - 1].line);
        }
        for (int j = i; j < n; ++j) m.set(i, j, (rows[i][j] + rows[j][i]) / 2);
      }
      blocks.push_back(std::move(m));
    } else {
      const int n = static_cast<int>(flat.size());
      SymMatrix m(n);
      for (int i = 0; i < n; ++i) m.set(i, i, flat[i]);
      blocks.push_back(std::move(m));
    }
  }
  return blocks;
}
}  // namespace

SolverResult parse_external_output(const std::string& text) {
  const auto lines = split_lines(text);
  SolverResult res;
  std::string phase, pobj, dobj, iters, gap;
  int pobj_line = 0;
  for (size_t i = 0; i < lines.size(); ++i) {
    const auto& l = lines[i];
    std::string v;
    if (keyed_value(l, "phase.value", v)) phase = v;
    if (keyed_value(l, "objValPrimal", v)) {
      pobj = v;
      pobj_line = static_cast<int>(i) + 1;
    }
    if (keyed_value(l, "objValDual", v)) dobj = v;
    if (keyed_value(l, "Iteration", v)) iters = v;
    if (keyed_value(l, "relative gap", v)) gap = v;
    if (l.find("yMat") != std::string::npos && l.find('=') != std::string::npos) {
      size_t j = i + 1;
      while (j < lines.size() && lines[j].find('{') == std::string::npos) ++j;
      res.primal_blocks = parse_matrix_list(lines, j);
      i = j - 1;
    }
  }
  const int last = static_cast<int>(lines.size());
  if (phase.empty()) throw FormatError("missing phase.value", last);
  if (pobj.empty()) throw FormatError("missing objValPrimal", last);
  // Our objective is the negated SDPA objective (row 0 carries -C).
  res.objective_value = -parse_real(pobj, pobj_line);
  res.dual_objective = dobj.empty() ? res.objective_value : Real(-parse_real(dobj, last));
  if (!iters.empty()) res.iterations = parse_int(iters, last);
  if (!gap.empty()) res.relative_gap = to_double(parse_real(gap, last));
  res.status = map_phase(phase);
  res.message = "external phase " + phase;
  return res;
}

}  // namespace sdpgame
