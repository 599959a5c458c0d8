#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdpgame/poly.h"

namespace sdpgame {

// Declaration order is the tie-breaking order used by tree search.
enum class Token { P1, P2, P3, P4, P5, P6, P7, STAR, ES, EOS };

constexpr int kNumTokens = 10;

std::string token_text(Token t);
std::optional<Token> token_from_text(const std::string& s);
bool is_base_token(Token t);
// 1..7 for P tokens.
int base_index(Token t);
Token base_token(int index);

struct Monomial {
  std::array<int, kNumBase> alpha{};

  int degree() const;
  bool is_constant() const;  // only P7 factors
  auto operator<=>(const Monomial&) const = default;
};

int monomial_degree(const Monomial& m);
// Canonical order: degree first, then alpha lexicographically.
bool monomial_less(const Monomial& a, const Monomial& b);

// Constant-factor normal form: P7 factors are dropped from monomials that
// contain another factor, and a purely constant monomial becomes P7^1.
Monomial reduce_constant_factors(const Monomial& m);

Polynomial expand_monomial(const Monomial& m, const GeometricParams& params);
Real evaluate_monomial(const Monomial& m,
                       const std::array<Real, kNumBase>& base_values);

struct Sentence {
  std::vector<Monomial> monomials;

  size_t length() const { return monomials.size(); }
  bool operator==(const Sentence&) const = default;
};

// Sort by (degree, alpha) and drop exact duplicates.
Sentence canonicalize(Sentence s);
// reduce_constant_factors on every monomial, then canonicalize.
Sentence reduce_sentence(const Sentence& s);
bool sentence_less(const Sentence& a, const Sentence& b);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, size_t offset);
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

std::vector<Token> tokenize(const std::string& text);
Sentence tokenize_and_parse(const std::string& text);
Sentence sentence_from_tokens(const std::vector<Token>& tokens);
std::vector<Token> sentence_tokens(const Sentence& s);

std::string render_monomial(const Monomial& m);
Monomial parse_monomial(const std::string& text);
std::string render(const Sentence& s);
std::string render_tokens(const std::vector<Token>& tokens);

enum class TokenOrder {
  // Any factor order; P7 at most once inside a monomial.
  kFree,
  // Factors of a monomial in non-decreasing P index, P7 only alone. Every
  // reduced monomial is reachable by exactly one token path.
  kCanonical,
};

// Tokens that extend `prefix` to another legal prefix under the caps. A
// complete sentence has no successors. Throws std::invalid_argument if the
// prefix itself is illegal.
std::vector<Token> legal_next_tokens(const std::vector<Token>& prefix,
                                     int degree_cap, int max_monomials,
                                     TokenOrder order = TokenOrder::kFree);

bool is_complete(const std::vector<Token>& prefix);

// Every reduced canonical sentence whose monomials have degree <= degree_cap
// and whose length is <= max_monomials. Refuses caps above 6 / 3.
std::vector<Sentence> enumerate_sentences(int degree_cap, int max_monomials);

// Reduced monomials of degree <= cap, sorted by (degree, alpha).
std::vector<Monomial> enumerate_monomials(int degree_cap);

}  // namespace sdpgame
