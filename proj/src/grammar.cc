#include "sdpgame/grammar.h"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace sdpgame {

namespace {
const std::array<const char*, kNumTokens> kTokenText = {
    "P1", "P2", "P3", "P4", "P5", "P6", "P7", "<*>", "<ES>", "<EOS>"};
}

std::string token_text(Token t) { return kTokenText[static_cast<int>(t)]; }

std::optional<Token> token_from_text(const std::string& s) {
  for (int i = 0; i < kNumTokens; ++i) {
    if (s == kTokenText[i]) return static_cast<Token>(i);
  }
  return std::nullopt;
}

bool is_base_token(Token t) { return static_cast<int>(t) < kNumBase; }

int base_index(Token t) {
  if (!is_base_token(t)) throw std::invalid_argument("not a P token");
  return static_cast<int>(t) + 1;
}

Token base_token(int index) {
  if (index < 1 || index > kNumBase) {
    throw std::invalid_argument("base index out of range");
  }
  return static_cast<Token>(index - 1);
}

int Monomial::degree() const {
  int d = 0;
  for (int k = 0; k < kNumBase; ++k) d += alpha[k] * kBaseDegrees[k];
  return d;
}

bool Monomial::is_constant() const {
  for (int k = 0; k < kNumBase - 1; ++k) {
    if (alpha[k]) return false;
  }
  return true;
}

int monomial_degree(const Monomial& m) { return m.degree(); }

bool monomial_less(const Monomial& a, const Monomial& b) {
  int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  return a.alpha < b.alpha;
}

Monomial reduce_constant_factors(const Monomial& m) {
  Monomial out = m;
  out.alpha[kNumBase - 1] = m.is_constant() ? 1 : 0;
  return out;
}

Polynomial expand_monomial(const Monomial& m, const GeometricParams& params) {
  Polynomial out = Polynomial::constant(Real(1));
  for (int k = 0; k < kNumBase - 1; ++k) {
    if (m.alpha[k]) out = out * make_base_polynomial(k + 1, params).pow(m.alpha[k]);
  }
  return out;
}

Real evaluate_monomial(const Monomial& m,
                       const std::array<Real, kNumBase>& base_values) {
  Real out = 1;
  for (int k = 0; k < kNumBase - 1; ++k) {
    if (m.alpha[k]) out *= boost::multiprecision::pow(base_values[k], m.alpha[k]);
  }
  return out;
}

Sentence canonicalize(Sentence s) {
  std::sort(s.monomials.begin(), s.monomials.end(), monomial_less);
  s.monomials.erase(std::unique(s.monomials.begin(), s.monomials.end()),
                    s.monomials.end());
  return s;
}

Sentence reduce_sentence(const Sentence& s) {
  Sentence out;
  for (const auto& m : s.monomials) {
    out.monomials.push_back(reduce_constant_factors(m));
  }
  return canonicalize(std::move(out));
}

bool sentence_less(const Sentence& a, const Sentence& b) {
  return std::lexicographical_compare(a.monomials.begin(), a.monomials.end(),
                                      b.monomials.begin(), b.monomials.end(),
                                      monomial_less);
}

ParseError::ParseError(const std::string& what, size_t offset)
    : std::runtime_error(what + " at offset " + std::to_string(offset)),
      offset_(offset) {}

namespace {
struct Lexeme {
  Token token;
  size_t offset;
};

std::vector<Lexeme> lex(const std::string& text) {
  std::vector<Lexeme> out;
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' ||
        text[i] == '\r') {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t' &&
           text[j] != '\n' && text[j] != '\r') {
      ++j;
    }
    auto t = token_from_text(text.substr(i, j - i));
    if (!t) throw ParseError("unknown token '" + text.substr(i, j - i) + "'", i);
    out.push_back({*t, i});
    i = j;
  }
  return out;
}

Sentence parse_lexemes(const std::vector<Lexeme>& lx, size_t text_size) {
  Sentence s;
  Monomial cur;
  bool expect_base = true;
  bool done = false;
  for (const auto& [t, off] : lx) {
    if (done) throw ParseError("token after <EOS>", off);
    if (expect_base) {
      if (!is_base_token(t)) {
        throw ParseError(t == Token::EOS || t == Token::ES
                             ? "empty segment"
                             : "expected a base polynomial token",
                         off);
      }
      cur.alpha[base_index(t) - 1] += 1;
      expect_base = false;
      continue;
    }
    switch (t) {
      case Token::STAR:
        expect_base = true;
        break;
      case Token::ES:
        s.monomials.push_back(cur);
        cur = Monomial{};
        expect_base = true;
        break;
      case Token::EOS:
        s.monomials.push_back(cur);
        done = true;
        break;
      default:
        throw ParseError("base polynomial must be followed by <*>, <ES> or <EOS>",
                         off);
    }
  }
  if (!done) {
    throw ParseError(expect_base && !lx.empty() &&
                             lx.back().token == Token::STAR
                         ? "dangling <*>"
                         : "missing <EOS>",
                     text_size);
  }
  return canonicalize(std::move(s));
}
}  // namespace

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  for (const auto& l : lex(text)) out.push_back(l.token);
  return out;
}

Sentence tokenize_and_parse(const std::string& text) {
  return parse_lexemes(lex(text), text.size());
}

Sentence sentence_from_tokens(const std::vector<Token>& tokens) {
  std::vector<Lexeme> lx;
  for (size_t i = 0; i < tokens.size(); ++i) lx.push_back({tokens[i], i});
  return parse_lexemes(lx, tokens.size());
}

namespace {
void append_monomial_tokens(const Monomial& m, std::vector<Token>& out) {
  bool first = true;
  for (int k = 0; k < kNumBase; ++k) {
    for (int j = 0; j < m.alpha[k]; ++j) {
      if (!first) out.push_back(Token::STAR);
      out.push_back(base_token(k + 1));
      first = false;
    }
  }
  if (first) throw std::invalid_argument("cannot render an empty monomial");
}
}  // namespace

std::vector<Token> sentence_tokens(const Sentence& s) {
  if (s.monomials.empty()) {
    throw std::invalid_argument("cannot render an empty sentence");
  }
  std::vector<Token> out;
  for (size_t i = 0; i < s.monomials.size(); ++i) {
    if (i) out.push_back(Token::ES);
    append_monomial_tokens(s.monomials[i], out);
  }
  out.push_back(Token::EOS);
  return out;
}

std::string render_tokens(const std::vector<Token>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += token_text(tokens[i]);
  }
  return out;
}

std::string render_monomial(const Monomial& m) {
  std::vector<Token> t;
  append_monomial_tokens(m, t);
  return render_tokens(t);
}

Monomial parse_monomial(const std::string& text) {
  Sentence s = tokenize_and_parse(text + " <EOS>");
  if (s.monomials.size() != 1) {
    throw ParseError("expected a single monomial", 0);
  }
  return s.monomials[0];
}

std::string render(const Sentence& s) {
  return render_tokens(sentence_tokens(canonicalize(s)));
}

namespace {
struct PrefixState {
  bool complete = false;
  bool expect_base = true;
  int monomials = 0;  // including the one in progress
  int degree = 0;     // of the monomial in progress
  bool has_p7 = false;
  bool has_other = false;
  int last_index = 0;
};

bool fits(const PrefixState& st, int k, int degree_cap, bool fresh,
          TokenOrder order) {
  const int deg = kBaseDegrees[k - 1];
  if ((fresh ? 0 : st.degree) + deg > degree_cap) return false;
  if (fresh) return true;
  if (order == TokenOrder::kCanonical) {
    return k != kNumBase && !st.has_p7 && k >= st.last_index;
  }
  return k != kNumBase || !st.has_p7;
}

PrefixState scan(const std::vector<Token>& prefix, int degree_cap,
                 int max_monomials, TokenOrder order) {
  PrefixState st;
  for (size_t i = 0; i < prefix.size(); ++i) {
    Token t = prefix[i];
    auto bad = [&](const std::string& why) {
      return std::invalid_argument("illegal prefix at token " +
                                   std::to_string(i) + ": " + why);
    };
    if (st.complete) throw bad("token after <EOS>");
    if (st.expect_base) {
      if (!is_base_token(t)) throw bad("expected a base polynomial token");
      const int k = base_index(t);
      const bool fresh = i == 0 || prefix[i - 1] != Token::STAR;
      if (!fits(st, k, degree_cap, fresh, order)) {
        throw bad("factor violates the degree cap or factor order");
      }
      if (fresh) {
        st = PrefixState{false, false, st.monomials + 1, 0, false, false, 0};
        if (st.monomials > max_monomials) throw bad("too many monomials");
      }
      st.degree += kBaseDegrees[k - 1];
      (k == kNumBase ? st.has_p7 : st.has_other) = true;
      st.last_index = k;
      st.expect_base = false;
    } else {
      if (t == Token::EOS) {
        st.complete = true;
      } else if (t == Token::STAR || t == Token::ES) {
        st.expect_base = true;
      } else {
        throw bad("expected <*>, <ES> or <EOS>");
      }
    }
  }
  return st;
}
}  // namespace

bool is_complete(const std::vector<Token>& prefix) {
  return !prefix.empty() && prefix.back() == Token::EOS;
}

std::vector<Token> legal_next_tokens(const std::vector<Token>& prefix,
                                     int degree_cap, int max_monomials,
                                     TokenOrder order) {
  if (degree_cap < 0 || max_monomials < 1) {
    throw std::invalid_argument("caps must satisfy degree_cap >= 0, max_monomials >= 1");
  }
  const PrefixState st = scan(prefix, degree_cap, max_monomials, order);
  std::vector<Token> out;
  if (st.complete) return out;
  if (st.expect_base) {
    const bool fresh = prefix.empty() || prefix.back() == Token::ES;
    for (int k = 1; k <= kNumBase; ++k) {
      if (fits(st, k, degree_cap, fresh, order)) out.push_back(base_token(k));
    }
    return out;
  }
  for (int k = 1; k <= kNumBase; ++k) {
    if (fits(st, k, degree_cap, false, order)) {
      out.push_back(Token::STAR);
      break;
    }
  }
  if (st.monomials < max_monomials) out.push_back(Token::ES);
  out.push_back(Token::EOS);
  return out;
}

std::vector<Monomial> enumerate_monomials(int degree_cap) {
  std::vector<Monomial> out;
  Monomial m;
  std::function<void(int, int)> rec = [&](int k, int budget) {
    if (k == kNumBase - 1) {
      out.push_back(reduce_constant_factors(m));
      return;
    }
    for (int e = 0; e * kBaseDegrees[k] <= budget; ++e) {
      m.alpha[k] = e;
      rec(k + 1, budget - e * kBaseDegrees[k]);
    }
    m.alpha[k] = 0;
  };
  rec(0, degree_cap);
  std::sort(out.begin(), out.end(), monomial_less);
  return out;
}

std::vector<Sentence> enumerate_sentences(int degree_cap, int max_monomials) {
  if (degree_cap < 0 || max_monomials < 1) {
    throw std::invalid_argument("caps must satisfy degree_cap >= 0, max_monomials >= 1");
  }
  if (degree_cap > 6 || max_monomials > 3) {
    throw std::invalid_argument(
        "enumeration refused: degree_cap must be <= 6 and max_monomials <= 3 "
        "to keep the sentence count tractable");
  }
  const std::vector<Monomial> mons = enumerate_monomials(degree_cap);
  std::vector<Sentence> out;
  std::vector<Monomial> pick;
  std::function<void(size_t)> rec = [&](size_t start) {
    if (!pick.empty()) out.push_back(Sentence{pick});
    if (static_cast<int>(pick.size()) == max_monomials) return;
    for (size_t i = start; i < mons.size(); ++i) {
      pick.push_back(mons[i]);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return out;
}

}  // namespace sdpgame
