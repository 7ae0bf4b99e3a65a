#include "arplab/markov.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace arplab {

std::size_t Vocabulary::id_of(const std::string& tok) const {
  auto it = index.find(tok);
  if (it == index.end()) {
    throw UnknownToken("unknown token: '" + tok + "'");
  }
  return it->second;
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  Vocabulary v;
  v.tokens = std::move(tokens);
  for (std::size_t i = 0; i < v.tokens.size(); ++i) {
    auto [it, inserted] = v.index.emplace(v.tokens[i], i);
    if (!inserted) {
      throw InvalidArgument("duplicate token in vocabulary: '" + v.tokens[i] + "'");
    }
  }
  return v;
}

Vocabulary Vocabulary::collect(const std::vector<std::vector<std::string>>& corpus) {
  std::set<std::string> distinct;
  for (const auto& seq : corpus) {
    distinct.insert(seq.begin(), seq.end());
  }
  return from_tokens(std::vector<std::string>(distinct.begin(), distinct.end()));
}

std::vector<double> TransitionModel::row_distribution(std::size_t i) const {
  const std::size_t nn = n();
  std::vector<double> d(nn + 1, 0.0);
  const double* r = b.row(i);
  std::copy(r, r + nn, d.begin());
  d[nn] = eos[i];
  return d;
}

double sparsity(const Matrix& b) {
  if (!b.all_nonnegative()) {
    throw InvalidArgument("sparsity: matrix has negative entries");
  }
  std::size_t nnz = 0;
  for (double v : b.data()) {
    if (v > 0.0) ++nnz;
  }
  return static_cast<double>(nnz) /
         (static_cast<double>(b.rows()) * static_cast<double>(b.cols()));
}

TransitionModel build_model(const std::vector<std::vector<std::string>>& corpus,
                            const Vocabulary& vocab) {
  if (corpus.empty()) throw EmptyCorpus("build_model: corpus has no sequences");
  const std::size_t n = vocab.size();
  if (n == 0) throw EmptyCorpus("build_model: empty vocabulary");

  std::unordered_map<std::uint64_t, std::uint64_t> tally;
  const std::uint64_t stride = n + 1;
  for (const auto& seq : corpus) {
    if (seq.empty()) throw InvalidArgument("build_model: empty sequence");
    std::size_t prev = vocab.id_of(seq[0]);
    for (std::size_t t = 1; t < seq.size(); ++t) {
      const std::size_t cur = vocab.id_of(seq[t]);
      ++tally[prev * stride + cur];
      prev = cur;
    }
    ++tally[prev * stride + n];  // one EOS event per sequence end
  }

  TransitionModel m{vocab, Matrix(n, n, 0.0), std::vector<double>(n, 0.0), 0.0, {}};
  m.counts.reserve(tally.size());
  std::vector<std::uint64_t> row_total(n, 0);
  for (const auto& [key, cnt] : tally) {
    const auto from = static_cast<std::uint32_t>(key / stride);
    const auto to = static_cast<std::uint32_t>(key % stride);
    m.counts.push_back({from, to, cnt});
    row_total[from] += cnt;
  }
  std::sort(m.counts.begin(), m.counts.end(), [](const BigramCount& a, const BigramCount& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });

  for (const auto& c : m.counts) {
    const double p = static_cast<double>(c.count) / static_cast<double>(row_total[c.from]);
    if (c.to == n) {
      m.eos[c.from] = p;
    } else {
      m.b(c.from, c.to) = p;
    }
  }
  // Tokens never observed: keep B row zero and send all mass to EOS.
  for (std::size_t i = 0; i < n; ++i) {
    if (row_total[i] == 0) m.eos[i] = 1.0;
  }
  m.zeta = sparsity(m.b);
  return m;
}

TransitionModel model_from_matrix(Vocabulary vocab, Matrix b) {
  const std::size_t n = vocab.size();
  if (!b.is_square() || b.rows() != n) {
    throw InvalidArgument("model_from_matrix: matrix shape does not match vocabulary");
  }
  if (!b.all_finite() || !b.all_nonnegative()) {
    throw InvalidArgument("model_from_matrix: entries must be finite and nonnegative");
  }
  TransitionModel m{std::move(vocab), std::move(b), std::vector<double>(n, 0.0), 0.0, {}};
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const double* r = m.b.row(i);
    for (std::size_t j = 0; j < n; ++j) s += r[j];
    if (s > 1.0 + 1e-9) {
      throw InvalidArgument("model_from_matrix: row " + std::to_string(i) +
                            " sums to " + std::to_string(s) + " > 1");
    }
    m.eos[i] = std::max(0.0, 1.0 - s);
  }
  m.zeta = sparsity(m.b);
  return m;
}

TransitionModel model_from_matrix(Matrix b) {
  const std::size_t n = b.rows();
  std::vector<std::string> tokens(n);
  for (std::size_t i = 0; i < n; ++i) tokens[i] = "w" + std::to_string(i);
  return model_from_matrix(Vocabulary::from_tokens(std::move(tokens)), std::move(b));
}

ArpSeries arp_series(const TransitionModel& model, std::size_t k_max, double eps) {
  if (k_max < 1) throw InvalidArgument("arp_series: k_max must be >= 1");
  if (model.zeta == 0.0) return {0.0, true, 0};  // no transitions, no loops

  const double zn = model.zeta_n();
  Matrix step = multiply(model.b, model.b);
  for (double& v : step.data()) v /= zn;

  Matrix acc = step;
  double value = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double term = trace(acc);
    value += term;
    if (term < eps) return {value, true, k};
    if (k == k_max) break;
    acc = multiply(acc, step);
  }
  return {value, false, k_max};
}

double arp_closed_form(const TransitionModel& model) {
  if (model.zeta == 0.0) return 0.0;

  const std::size_t n = model.n();
  const double zn = model.zeta_n();
  const Matrix b2 = multiply(model.b, model.b);

  // The gate zeta*n > rho(B^2) is usually decided by the rigorous enclosure
  // long before the power iteration itself settles.
  const SpectralBounds rho = spectral_radius_bounds(b2, 1e-10, 2000);
  const bool holds = rho.upper < zn || (rho.converged && zn > rho.estimate);
  if (rho.lower >= zn || (rho.converged && !holds)) {
    throw PreconditionViolated(
        "arp_closed_form: requires zeta*n > rho(B^2), got zeta*n = " +
            std::to_string(zn) + ", rho = " + std::to_string(rho.estimate),
        zn, rho.estimate);
  }
  if (!holds) {
    throw PreconditionViolated(
        "arp_closed_form: spectral radius enclosure [" + std::to_string(rho.lower) +
            ", " + std::to_string(rho.upper) +
            "] did not settle; precondition zeta*n > rho(B^2) is unverifiable",
        zn, rho.estimate);
  }

  Matrix lhs(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) lhs(i, j) = -b2(i, j);
    lhs(i, i) += zn;
  }
  const Matrix x = solve_linear(lhs, b2);
  return trace(x);
}

}  // namespace arplab
