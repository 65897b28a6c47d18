// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cctype>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "speceval/errors.hpp"
#include "speceval/smiles.hpp"

namespace speceval {

enum class TokenScheme { Character, SmilesAtoms };

struct TokenSequence {
  std::vector<std::string> tokens;
  std::string raw;
};

namespace seq_detail {

// One UTF-8 encoded scalar value starting at `i`; invalid bytes come back as
// single-byte tokens rather than failing, since model output is arbitrary.
inline std::size_t utf8_len(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xe) return 3;
  if ((lead >> 3) == 0x1e) return 4;
  return 1;
}

}  // namespace seq_detail

// Character scheme: unicode scalar values. SmilesAtoms scheme: bracket atoms
// [...], two-letter elements Cl/Br, and %nn ring closures are single tokens.
inline TokenSequence tokenize(std::string_view text, TokenScheme scheme) {
  TokenSequence seq;
  seq.raw = std::string(text);
  if (scheme == TokenScheme::Character) {
    std::size_t i = 0;
    while (i < text.size()) {
      std::size_t len = seq_detail::utf8_len(static_cast<unsigned char>(text[i]));
      len = std::min(len, text.size() - i);
      seq.tokens.emplace_back(text.substr(i, len));
      i += len;
    }
    return seq;
  }
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '[') {
      std::size_t close = text.find(']', i);
      if (close == std::string_view::npos)
        throw Error(errc::unterminated_bracket, "unterminated '[' in SMILES tokenization",
                    static_cast<long>(i + 1));
      seq.tokens.emplace_back(text.substr(i, close - i + 1));
      i = close + 1;
    } else if ((c == 'C' || c == 'B') && i + 1 < text.size() &&
               ((c == 'C' && text[i + 1] == 'l') || (c == 'B' && text[i + 1] == 'r'))) {
      seq.tokens.emplace_back(text.substr(i, 2));
      i += 2;
    } else if (c == '%' && i + 2 < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[i + 1])) &&
               std::isdigit(static_cast<unsigned char>(text[i + 2]))) {
      seq.tokens.emplace_back(text.substr(i, 3));
      i += 3;
    } else {
      seq.tokens.emplace_back(text.substr(i, 1));
      i += 1;
    }
  }
  return seq;
}

// Per-sample token accuracy: fraction of ground-truth positions whose
// predicted token matches; positions past the prediction's end are
// mismatches.
inline double token_accuracy(const TokenSequence& truth, const TokenSequence& pred) {
  if (truth.tokens.empty()) throw Error(errc::empty_truth, "empty ground-truth sequence");
  std::size_t correct = 0;
  for (std::size_t j = 0; j < truth.tokens.size(); ++j)
    if (j < pred.tokens.size() && pred.tokens[j] == truth.tokens[j]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(truth.tokens.size());
}

// A canonicalizer maps a whole sequence to its canonical form; nullopt means
// the input does not canonicalize (counts as a non-match).
using Canonicalizer = std::function<std::optional<std::string>(const std::string&)>;

inline Canonicalizer trim_canonicalizer() {
  return [](const std::string& s) -> std::optional<std::string> {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return std::string();
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  };
}

inline Canonicalizer smiles_canonicalizer() {
  return [](const std::string& s) -> std::optional<std::string> {
    try {
      return canonical_smiles(parse_smiles(s));
    } catch (const Error&) {
      return std::nullopt;
    }
  };
}

inline double sequence_accuracy(const std::vector<std::pair<std::string, std::string>>& pairs,
                                const Canonicalizer& canon = trim_canonicalizer()) {
  if (pairs.empty()) throw Error(errc::empty_list, "no sequence pairs");
  std::size_t matches = 0;
  for (const auto& [truth, pred] : pairs) {
    auto ct = canon(truth);
    auto cp = canon(pred);
    if (ct && cp && *ct == *cp) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(pairs.size());
}

struct AccuracyReport {
  double token_accuracy = 0.0;
  double sequence_accuracy = 0.0;
  std::size_t n_samples = 0;
};

// Token accuracy runs on the raw token sequences; sequence accuracy compares
// canonicalized whole strings. When SMILES tokenization fails on a prediction
// the character scheme stands in for that record, keeping both metrics total.
inline AccuracyReport evaluate_sequences(
    const std::vector<std::pair<std::string, std::string>>& pairs, TokenScheme scheme,
    const Canonicalizer& canon = trim_canonicalizer()) {
  if (pairs.empty()) throw Error(errc::empty_list, "no sequence pairs");
  AccuracyReport report;
  report.n_samples = pairs.size();
  double acc_sum = 0.0;
  std::size_t seq_matches = 0;
  for (const auto& [truth, pred] : pairs) {
    TokenSequence ts, ps;
    try {
      ts = tokenize(truth, scheme);
      ps = tokenize(pred, scheme);
    } catch (const Error&) {
      ts = tokenize(truth, TokenScheme::Character);
      ps = tokenize(pred, TokenScheme::Character);
    }
    acc_sum += token_accuracy(ts, ps);
    auto ct = canon(truth);
    auto cp = canon(pred);
    if (ct && cp && *ct == *cp) ++seq_matches;
  }
  report.token_accuracy = acc_sum / static_cast<double>(pairs.size());
  report.sequence_accuracy =
      static_cast<double>(seq_matches) / static_cast<double>(pairs.size());
  return report;
}

}  // namespace speceval
