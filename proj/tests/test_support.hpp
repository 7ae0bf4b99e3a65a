#pragma once

// Shared generators and reference implementations for the test suites. The
// reference metric implementations follow the formulas literally and stay
// independent of the library code paths they check.

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "arplab/markov.hpp"

namespace test_support {

// Sub-stochastic model with rows drawn from a symmetric simplex distribution
// and scaled by a random factor below max_scale.
inline arplab::TransitionModel random_substochastic_model(std::mt19937_64& rng,
                                                          std::size_t max_n,
                                                          double max_scale) {
  const std::size_t n = 1 + rng() % max_n;
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unif(0.0, max_scale);
  arplab::Matrix b(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      b(i, j) = expo(rng);
      sum += b(i, j);
    }
    const double scale = unif(rng) / sum;
    for (std::size_t j = 0; j < n; ++j) b(i, j) *= scale;
  }
  return arplab::model_from_matrix(std::move(b));
}

inline std::vector<std::vector<std::string>> random_corpus(std::mt19937_64& rng,
                                                           std::size_t sequences,
                                                           std::size_t alphabet,
                                                           std::size_t max_len) {
  std::vector<std::vector<std::string>> corpus;
  for (std::size_t s = 0; s < sequences; ++s) {
    const std::size_t len = 1 + rng() % max_len;
    std::vector<std::string> seq;
    for (std::size_t t = 0; t < len; ++t) {
      seq.push_back(std::string(1, static_cast<char>('a' + rng() % alphabet)));
    }
    corpus.push_back(std::move(seq));
  }
  return corpus;
}

inline std::vector<std::string> random_sequence(std::mt19937_64& rng,
                                                std::size_t alphabet,
                                                std::size_t max_len) {
  const std::size_t len = 1 + rng() % max_len;
  std::vector<std::string> s;
  for (std::size_t t = 0; t < len; ++t) {
    s.push_back(std::string(1, static_cast<char>('a' + rng() % alphabet)));
  }
  return s;
}

// ---- literal reference implementations of the repetition metrics ----

inline double ref_rep_w(const std::vector<std::string>& s, std::size_t w) {
  std::size_t hits = 0;
  for (std::size_t t = 2; t <= s.size(); ++t) {  // 1-based; t = 1 contributes 0
    const std::size_t lo = t > w ? t - w : 1;    // previous min(w, t-1) tokens
    for (std::size_t j = lo; j <= t - 1; ++j) {
      if (s[j - 1] == s[t - 1]) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(s.size());
}

inline double ref_rep_n(const std::vector<std::string>& s, std::size_t n) {
  std::set<std::vector<std::string>> grams;
  const std::size_t total = s.size() - n + 1;
  for (std::size_t i = 0; i + n <= s.size(); ++i) {
    grams.insert(std::vector<std::string>(s.begin() + i, s.begin() + i + n));
  }
  return 1.0 - static_cast<double>(grams.size()) / static_cast<double>(total);
}

inline double ref_rep_r(const std::vector<std::string>& s) {
  const std::size_t len = s.size();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < len; ++i) {
    bool forward = false;
    bool backward = false;
    for (std::size_t j = 0; j < len; ++j) {
      if (j == i) continue;
      if (i + 1 < len && j + 1 < len && s[i] == s[j] && s[i + 1] == s[j + 1]) {
        forward = true;
      }
      if (i >= 1 && j >= 1 && s[i] == s[j] && s[i - 1] == s[j - 1]) {
        backward = true;
      }
    }
    hits += (forward || backward) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(len);
}

// Adjacent identical loops: exists r < t < u with s[r..t] == s[t..u].
inline bool ref_has_adjacent_identical_loops(const std::vector<std::string>& s) {
  const std::size_t len = s.size();
  for (std::size_t r = 0; r < len; ++r) {
    for (std::size_t t = r + 1; t < len; ++t) {
      const std::size_t u = 2 * t - r;
      if (u >= len) break;
      bool equal = true;
      for (std::size_t k = 0; k <= t - r; ++k) {
        if (s[r + k] != s[t + k]) {
          equal = false;
          break;
        }
      }
      if (equal) return true;
    }
  }
  return false;
}

}  // namespace test_support
