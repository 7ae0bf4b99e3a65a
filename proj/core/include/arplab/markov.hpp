#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "arplab/matrix.hpp"

namespace arplab {

// Token inventory. Ids run 0..n-1; the end-of-sentence outcome is not a
// corpus token and takes the reserved id n.
struct Vocabulary {
  std::vector<std::string> tokens;
  std::unordered_map<std::string, std::size_t> index;

  std::size_t size() const { return tokens.size(); }
  std::size_t eos_id() const { return tokens.size(); }

  bool contains(const std::string& tok) const { return index.count(tok) != 0; }

  std::size_t id_of(const std::string& tok) const;

  // Builds a vocabulary from explicit distinct tokens, preserving order.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  // Distinct corpus tokens in lexicographic order.
  static Vocabulary collect(const std::vector<std::vector<std::string>>& corpus);
};

// One raw bigram observation; to == vocab size means the successor was EOS.
struct BigramCount {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  std::uint64_t count = 0;

  friend bool operator==(const BigramCount&, const BigramCount&) = default;
};

// Markov generation model: sub-transition matrix B over the vocabulary, the
// EOS column b, and the sparsity zeta of B. The implied full matrix
// [[B, b], [0, 1]] is stochastic with EOS absorbing.
struct TransitionModel {
  Vocabulary vocab;
  Matrix b;
  std::vector<double> eos;
  double zeta = 0.0;
  std::vector<BigramCount> counts;

  std::size_t n() const { return vocab.size(); }
  double zeta_n() const { return zeta * static_cast<double>(vocab.size()); }

  // Next-token distribution of row i over n+1 outcomes (EOS last).
  std::vector<double> row_distribution(std::size_t i) const;
};

// Counts bigrams per sentence, one EOS event per sequence end. Rows of
// tokens never observed get B row = 0 and b_i = 1, which keeps the full
// matrix stochastic.
TransitionModel build_model(const std::vector<std::vector<std::string>>& corpus,
                            const Vocabulary& vocab);

// Wraps an explicit sub-stochastic matrix as a model; b is set to the row
// deficit 1 - sum_j B_ij. Used by synthetic chains and tests.
TransitionModel model_from_matrix(Vocabulary vocab, Matrix b);

// Convenience: vocabulary w0..w{n-1} around an explicit matrix.
TransitionModel model_from_matrix(Matrix b);

// Fraction of strictly positive entries of B.
double sparsity(const Matrix& b);

struct ArpSeries {
  double value = 0.0;
  bool converged = false;
  std::size_t terms_used = 0;
};

// Partial sums of sum_k tr(B^{2k}) / (zeta n)^k, advancing by one
// multiplication with B^2/(zeta n) per term. Stops at the first term below
// eps; zeta == 0 returns 0 by convention.
ArpSeries arp_series(const TransitionModel& model, std::size_t k_max = 10000,
                     double eps = 1e-12);

// Closed form tr(B^2 (zeta n I - B^2)^{-1}). Requires zeta n > rho(B^2);
// throws PreconditionViolated otherwise, carrying both quantities.
double arp_closed_form(const TransitionModel& model);

}  // namespace arplab
