#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arplab/markov.hpp"

namespace arplab {

using TokenSeq = std::vector<std::string>;

// All index pairs (r, t), r < t, with w_r = w_t, 1-based, lexicographic order.
std::vector<std::pair<std::size_t, std::size_t>> find_loops(const TokenSeq& s);

// Literal check of the repetition-subsequence condition: exists 1 <= p < q
// <= |s| - q + p with w_{i+q-p} = w_i for all i in [p, q]. The witness is the
// lexicographically smallest (p, q), 1-based.
struct RepetitionWitness {
  bool found = false;
  std::size_t p = 0;
  std::size_t q = 0;
};
RepetitionWitness has_repetition_subsequence(const TokenSeq& s);

// Fraction of positions whose token already occurs among the previous
// min(w, t-1) tokens; the first position contributes 0.
double rep_w_single(const TokenSeq& s, std::size_t w);

// Mean of rep_w_single over the sequence set.
double rep_w(const std::vector<TokenSeq>& seqs, std::size_t w);

// 1 - (distinct n-grams) / (|s| - n + 1). Requires |s| >= n.
double rep_n(const TokenSeq& s, std::size_t n);

// Corpus-level rep-n. Macro: mean of per-sequence values over sequences with
// |s| >= n (shorter ones are skipped and counted). Micro: pooled n-gram
// counts across the corpus.
struct CorpusRepN {
  double value = 0.0;
  std::size_t used = 0;
  std::size_t skipped = 0;
};
CorpusRepN rep_n_corpus(const std::vector<TokenSeq>& seqs, std::size_t n,
                        bool micro = false);

// Fraction of positions covered by a bigram that occurs elsewhere in the
// sequence, looking one step forward or backward.
double rep_r(const TokenSeq& s);

double rep_r_mean(const std::vector<TokenSeq>& seqs);

// Transition-level perplexity of a sequence set under the model, EOS scored
// at every sequence end. Zero-probability transitions are floored at 1e-10
// and counted.
struct Perplexity {
  double value = 0.0;
  std::size_t transitions = 0;
  std::size_t floored = 0;
};
Perplexity sequence_perplexity(const TransitionModel& model,
                               const std::vector<TokenSeq>& seqs);

// ppl-c analog: perplexity(generated) / perplexity(reference).
struct PplC {
  double ratio = 0.0;
  Perplexity generated;
  Perplexity reference;
};
PplC ppl_c_markov(const TransitionModel& model, const std::vector<TokenSeq>& generated,
                  const std::vector<TokenSeq>& reference);

// Corpus-level repetition summary as emitted by the scoring front-end.
struct SequenceMetrics {
  std::size_t length = 0;
  double rep_w = 0.0;
  std::map<std::size_t, std::optional<double>> rep_n;  // nullopt: too short
  double rep_r = 0.0;
};

struct RepetitionReport {
  double rep_w = 0.0;
  std::map<std::size_t, CorpusRepN> rep_n;
  double rep_r = 0.0;
  std::optional<PplC> ppl_c;
  std::size_t sequences = 0;
  std::vector<SequenceMetrics> per_sequence;
};

RepetitionReport score_sequences(const std::vector<TokenSeq>& seqs, std::size_t w,
                                 const std::vector<std::size_t>& ngram_orders);

}  // namespace arplab
