#include "arplab/metrics.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace arplab {

namespace {

constexpr double kProbFloor = 1e-10;

// Joins an n-gram into a single key; '\x1f' cannot occur in tokens.
std::string ngram_key(const TokenSeq& s, std::size_t start, std::size_t n) {
  std::string key;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) key += '\x1f';
    key += s[start + i];
  }
  return key;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> find_loops(const TokenSeq& s) {
  if (s.empty()) throw InvalidArgument("find_loops: empty sequence");
  std::vector<std::pair<std::size_t, std::size_t>> loops;
  for (std::size_t r = 0; r < s.size(); ++r) {
    for (std::size_t t = r + 1; t < s.size(); ++t) {
      if (s[r] == s[t]) loops.emplace_back(r + 1, t + 1);
    }
  }
  return loops;
}

RepetitionWitness has_repetition_subsequence(const TokenSeq& s) {
  if (s.empty()) throw InvalidArgument("has_repetition_subsequence: empty sequence");
  const std::size_t len = s.size();
  // 1-based condition: q <= |s| - q + p, w_{i+q-p} = w_i for all i in [p, q].
  for (std::size_t p = 1; p < len; ++p) {
    for (std::size_t q = p + 1; 2 * q - p <= len; ++q) {
      const std::size_t shift = q - p;
      bool match = true;
      for (std::size_t i = p; i <= q; ++i) {
        if (s[i - 1] != s[i + shift - 1]) {
          match = false;
          break;
        }
      }
      if (match) return {true, p, q};
    }
  }
  return {false, 0, 0};
}

double rep_w_single(const TokenSeq& s, std::size_t w) {
  if (w < 1) throw InvalidArgument("rep_w: window must be >= 1");
  if (s.empty()) throw InvalidArgument("rep_w: empty sequence");
  std::size_t hits = 0;
  for (std::size_t t = 1; t < s.size(); ++t) {
    const std::size_t lo = t > w ? t - w : 0;
    for (std::size_t j = lo; j < t; ++j) {
      if (s[j] == s[t]) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(s.size());
}

double rep_w(const std::vector<TokenSeq>& seqs, std::size_t w) {
  if (seqs.empty()) throw EmptySequenceSet("rep_w: no sequences");
  double sum = 0.0;
  for (const TokenSeq& s : seqs) sum += rep_w_single(s, w);
  return sum / static_cast<double>(seqs.size());
}

double rep_n(const TokenSeq& s, std::size_t n) {
  if (n < 1) throw InvalidArgument("rep_n: order must be >= 1");
  if (s.size() < n) {
    throw SequenceTooShort("rep_n: sequence of length " + std::to_string(s.size()) +
                           " has no " + std::to_string(n) + "-grams");
  }
  const std::size_t total = s.size() - n + 1;
  std::unordered_set<std::string> distinct;
  distinct.reserve(total * 2);
  for (std::size_t i = 0; i < total; ++i) distinct.insert(ngram_key(s, i, n));
  return 1.0 - static_cast<double>(distinct.size()) / static_cast<double>(total);
}

CorpusRepN rep_n_corpus(const std::vector<TokenSeq>& seqs, std::size_t n, bool micro) {
  if (seqs.empty()) throw EmptySequenceSet("rep_n_corpus: no sequences");
  CorpusRepN out;
  if (micro) {
    std::unordered_set<std::string> distinct;
    std::size_t total = 0;
    for (const TokenSeq& s : seqs) {
      if (s.size() < n) {
        ++out.skipped;
        continue;
      }
      ++out.used;
      for (std::size_t i = 0; i + n <= s.size(); ++i) {
        distinct.insert(ngram_key(s, i, n));
        ++total;
      }
    }
    out.value = total == 0
                    ? 0.0
                    : 1.0 - static_cast<double>(distinct.size()) / static_cast<double>(total);
    return out;
  }
  double sum = 0.0;
  for (const TokenSeq& s : seqs) {
    if (s.size() < n) {
      ++out.skipped;
      continue;
    }
    ++out.used;
    sum += rep_n(s, n);
  }
  out.value = out.used == 0 ? 0.0 : sum / static_cast<double>(out.used);
  return out;
}

double rep_r(const TokenSeq& s) {
  if (s.empty()) throw InvalidArgument("rep_r: empty sequence");
  const std::size_t len = s.size();
  if (len == 1) return 0.0;

  // Positions starting a bigram that occurs at least twice qualify, as does
  // the position one past such a start.
  std::unordered_map<std::string, std::size_t> bigram_count;
  for (std::size_t i = 0; i + 1 < len; ++i) ++bigram_count[ngram_key(s, i, 2)];

  std::vector<bool> covered(len, false);
  for (std::size_t i = 0; i + 1 < len; ++i) {
    if (bigram_count[ngram_key(s, i, 2)] >= 2) {
      covered[i] = true;
      covered[i + 1] = true;
    }
  }
  std::size_t hits = 0;
  for (bool c : covered) hits += c ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(len);
}

double rep_r_mean(const std::vector<TokenSeq>& seqs) {
  if (seqs.empty()) throw EmptySequenceSet("rep_r_mean: no sequences");
  double sum = 0.0;
  for (const TokenSeq& s : seqs) sum += rep_r(s);
  return sum / static_cast<double>(seqs.size());
}

Perplexity sequence_perplexity(const TransitionModel& model,
                               const std::vector<TokenSeq>& seqs) {
  if (seqs.empty()) throw EmptyInput("sequence_perplexity: no sequences");
  Perplexity out;
  double log_sum = 0.0;
  const std::size_t n = model.n();
  for (const TokenSeq& s : seqs) {
    if (s.empty()) throw InvalidArgument("sequence_perplexity: empty sequence");
    std::size_t prev = model.vocab.id_of(s[0]);
    for (std::size_t t = 1; t <= s.size(); ++t) {
      const std::size_t cur = t < s.size() ? model.vocab.id_of(s[t]) : n;
      double p = cur == n ? model.eos[prev] : model.b(prev, cur);
      if (p < kProbFloor) {
        p = kProbFloor;
        ++out.floored;
      }
      log_sum += std::log(p);
      ++out.transitions;
      prev = cur == n ? prev : cur;
    }
  }
  out.value = std::exp(-log_sum / static_cast<double>(out.transitions));
  return out;
}

PplC ppl_c_markov(const TransitionModel& model, const std::vector<TokenSeq>& generated,
                  const std::vector<TokenSeq>& reference) {
  if (generated.empty() || reference.empty()) {
    throw EmptyInput("ppl_c_markov: generated and reference must be non-empty");
  }
  PplC out;
  out.generated = sequence_perplexity(model, generated);
  out.reference = sequence_perplexity(model, reference);
  out.ratio = out.generated.value / out.reference.value;
  return out;
}

RepetitionReport score_sequences(const std::vector<TokenSeq>& seqs, std::size_t w,
                                 const std::vector<std::size_t>& ngram_orders) {
  if (seqs.empty()) throw EmptySequenceSet("score_sequences: no sequences");
  RepetitionReport report;
  report.sequences = seqs.size();
  report.rep_w = rep_w(seqs, w);
  report.rep_r = rep_r_mean(seqs);
  for (std::size_t n : ngram_orders) report.rep_n[n] = rep_n_corpus(seqs, n);

  report.per_sequence.reserve(seqs.size());
  for (const TokenSeq& s : seqs) {
    SequenceMetrics m;
    m.length = s.size();
    m.rep_w = rep_w_single(s, w);
    m.rep_r = rep_r(s);
    for (std::size_t n : ngram_orders) {
      m.rep_n[n] = s.size() >= n ? std::optional<double>(rep_n(s, n)) : std::nullopt;
    }
    report.per_sequence.push_back(std::move(m));
  }
  return report;
}

}  // namespace arplab
