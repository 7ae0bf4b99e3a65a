#include "arplab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace arplab {

namespace {

constexpr double kSumTol = 1e-9;

void validate_dist(const Dist& d) {
  if (d.empty()) throw InvalidDistribution("distribution is empty");
  double sum = 0.0;
  for (double v : d) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidDistribution("distribution entries must be finite and >= 0");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTol) {
    throw InvalidDistribution("distribution sums to " + std::to_string(sum));
  }
}

std::size_t argmax_lowest(const Dist& d) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (d[i] > d[best]) best = i;
  }
  return best;
}

// Indices ordered by probability descending, ties by lower index first.
std::vector<std::size_t> descending_order(const Dist& d) {
  std::vector<std::size_t> idx(d.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&d](std::size_t a, std::size_t b) { return d[a] > d[b]; });
  return idx;
}

Dist renormalize_kept(const Dist& d, const std::vector<std::size_t>& kept) {
  double sum = 0.0;
  for (std::size_t i : kept) sum += d[i];
  if (!(sum > 0.0)) throw DegenerateSupport("all probability mass removed");
  Dist out(d.size(), 0.0);
  for (std::size_t i : kept) out[i] = d[i] / sum;
  return out;
}

Dist apply_one(const Dist& d, const Transform& t) {
  switch (t.kind) {
    case TransformKind::Stochastic:
      return d;

    case TransformKind::Greedy: {
      Dist out(d.size(), 0.0);
      out[argmax_lowest(d)] = 1.0;
      return out;
    }

    case TransformKind::TopK: {
      const auto k = static_cast<std::size_t>(t.param);
      const std::vector<std::size_t> order = descending_order(d);
      std::vector<std::size_t> kept(order.begin(),
                                    order.begin() + std::min(k, order.size()));
      return renormalize_kept(d, kept);
    }

    case TransformKind::Nucleus: {
      const double p = t.param;
      const std::vector<std::size_t> order = descending_order(d);
      std::vector<std::size_t> kept;
      double cum = 0.0;
      for (std::size_t i : order) {
        if (cum >= p - 1e-12) break;
        if (d[i] <= 0.0) break;  // remaining mass is zero, stop extending
        kept.push_back(i);
        cum += d[i];
      }
      if (kept.empty()) throw DegenerateSupport("nucleus kept no outcome");
      return renormalize_kept(d, kept);
    }

    case TransformKind::Temperature: {
      const double inv_t = 1.0 / t.param;
      // softmax(log(p)/t) computed with the max-log shift
      double max_log = -std::numeric_limits<double>::infinity();
      for (double v : d) {
        if (v > 0.0) max_log = std::max(max_log, std::log(v) * inv_t);
      }
      if (max_log == -std::numeric_limits<double>::infinity()) {
        throw DegenerateSupport("temperature: empty support");
      }
      Dist out(d.size(), 0.0);
      double sum = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] > 0.0) {
          out[i] = std::exp(std::log(d[i]) * inv_t - max_log);
          sum += out[i];
        }
      }
      for (double& v : out) v /= sum;
      return out;
    }

    case TransformKind::LengthPenalty: {
      // Adds beta to the EOS logit, i.e. multiplies the EOS probability by
      // exp(beta) before renormalizing. Zero EOS mass stays zero.
      Dist out = d;
      out.back() *= std::exp(t.param);
      const double sum = std::accumulate(out.begin(), out.end(), 0.0);
      if (!(sum > 0.0) || !std::isfinite(sum)) {
        throw DegenerateSupport("length penalty removed all mass");
      }
      for (double& v : out) v /= sum;
      return out;
    }
  }
  throw InvalidArgument("unknown transform kind");
}

}  // namespace

TransformSpec TransformSpec::then(const TransformSpec& next) const {
  TransformSpec out = *this;
  out.chain.insert(out.chain.end(), next.chain.begin(), next.chain.end());
  return out;
}

void TransformSpec::validate() const {
  if (chain.empty()) throw InvalidArgument("transform chain is empty");
  for (const Transform& t : chain) {
    switch (t.kind) {
      case TransformKind::Stochastic:
      case TransformKind::Greedy:
        break;
      case TransformKind::TopK:
        if (t.param < 1.0 || t.param != std::floor(t.param)) {
          throw InvalidArgument("topk requires an integer k >= 1");
        }
        break;
      case TransformKind::Nucleus:
        if (!(t.param > 0.0 && t.param <= 1.0)) {
          throw InvalidArgument("nucleus requires 0 < p <= 1");
        }
        break;
      case TransformKind::Temperature:
        if (!(t.param > 0.0) || !std::isfinite(t.param)) {
          throw InvalidArgument("temperature requires t > 0");
        }
        break;
      case TransformKind::LengthPenalty:
        if (!std::isfinite(t.param)) {
          throw InvalidArgument("length penalty requires a finite beta");
        }
        break;
    }
  }
}

TransformSpec TransformSpec::parse(const std::string& text) {
  TransformSpec spec;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, '+')) {
    if (part.empty()) throw InvalidArgument("empty transform in '" + text + "'");
    std::string kind = part;
    std::string param;
    if (const auto colon = part.find(':'); colon != std::string::npos) {
      kind = part.substr(0, colon);
      param = part.substr(colon + 1);
    }
    auto need_param = [&](TransformKind k) {
      if (param.empty()) {
        throw InvalidArgument("transform '" + kind + "' requires a parameter");
      }
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(param, &used);
      } catch (const std::exception&) {
        throw InvalidArgument("bad parameter '" + param + "' for '" + kind + "'");
      }
      if (used != param.size()) {
        throw InvalidArgument("bad parameter '" + param + "' for '" + kind + "'");
      }
      spec.chain.push_back({k, value});
    };
    if (kind == "stochastic") {
      spec.chain.push_back({TransformKind::Stochastic, 0.0});
    } else if (kind == "greedy") {
      spec.chain.push_back({TransformKind::Greedy, 0.0});
    } else if (kind == "topk") {
      need_param(TransformKind::TopK);
    } else if (kind == "nucleus") {
      need_param(TransformKind::Nucleus);
    } else if (kind == "temp") {
      need_param(TransformKind::Temperature);
    } else if (kind == "lp") {
      need_param(TransformKind::LengthPenalty);
    } else {
      throw InvalidArgument("unknown transform kind '" + kind + "'");
    }
  }
  spec.validate();
  return spec;
}

std::string TransformSpec::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (i) out += '+';
    const Transform& t = chain[i];
    char buf[64];
    switch (t.kind) {
      case TransformKind::Stochastic:
        out += "stochastic";
        break;
      case TransformKind::Greedy:
        out += "greedy";
        break;
      case TransformKind::TopK:
        std::snprintf(buf, sizeof buf, "topk:%zu", static_cast<std::size_t>(t.param));
        out += buf;
        break;
      case TransformKind::Nucleus:
        std::snprintf(buf, sizeof buf, "nucleus:%g", t.param);
        out += buf;
        break;
      case TransformKind::Temperature:
        std::snprintf(buf, sizeof buf, "temp:%g", t.param);
        out += buf;
        break;
      case TransformKind::LengthPenalty:
        std::snprintf(buf, sizeof buf, "lp:%g", t.param);
        out += buf;
        break;
    }
  }
  return out;
}

Dist apply_transform(const Dist& d, const TransformSpec& spec) {
  spec.validate();
  validate_dist(d);
  Dist cur = d;
  for (const Transform& t : spec.chain) cur = apply_one(cur, t);
  return cur;
}

TransitionModel transform_model(const TransitionModel& model, const TransformSpec& spec) {
  spec.validate();
  const std::size_t n = model.n();
  TransitionModel out{model.vocab, Matrix(n, n, 0.0), std::vector<double>(n, 0.0), 0.0,
                      model.counts};
  for (std::size_t i = 0; i < n; ++i) {
    Dist row;
    try {
      row = apply_transform(model.row_distribution(i), spec);
    } catch (const InvalidDistribution& e) {
      throw InvalidDistribution(std::string(e.what()) + " (row token '" +
                                model.vocab.tokens[i] + "')");
    } catch (const DegenerateSupport& e) {
      throw DegenerateSupport(std::string(e.what()) + " (row token '" +
                              model.vocab.tokens[i] + "')");
    }
    for (std::size_t j = 0; j < n; ++j) out.b(i, j) = row[j];
    out.eos[i] = row[n];
  }
  out.zeta = sparsity(out.b);
  return out;
}

std::vector<std::string> generate(const TransitionModel& model, const TransformSpec& spec,
                                  const std::string& start, std::size_t max_len,
                                  std::uint64_t seed) {
  if (max_len < 1) throw InvalidArgument("generate: max_len must be >= 1");
  spec.validate();
  const std::size_t n = model.n();
  std::size_t cur = model.vocab.id_of(start);

  std::mt19937_64 rng(seed);
  auto uniform01 = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };

  std::vector<std::string> seq;
  seq.reserve(std::min<std::size_t>(max_len, 4096));
  seq.push_back(model.vocab.tokens[cur]);

  while (seq.size() < max_len) {
    const Dist d = apply_transform(model.row_distribution(cur), spec);
    const double u = uniform01();
    double cum = 0.0;
    std::size_t next = n;  // fall through to EOS if rounding leaves a gap
    bool chosen = false;
    std::size_t last_positive = n;
    for (std::size_t j = 0; j <= n; ++j) {
      if (d[j] <= 0.0) continue;
      cum += d[j];
      last_positive = j;
      if (u < cum) {
        next = j;
        chosen = true;
        break;
      }
    }
    if (!chosen) next = last_positive;
    if (next == n) break;  // EOS
    seq.push_back(model.vocab.tokens[next]);
    cur = next;
  }
  return seq;
}

}  // namespace arplab
