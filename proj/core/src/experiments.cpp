#include "arplab/experiments.hpp"

#include <cstdio>
#include <string>

namespace arplab {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::vector<TokenSeq> generate_round_robin(const TransitionModel& model,
                                           const TransformSpec& spec,
                                           std::size_t budget, std::size_t max_len,
                                           std::uint64_t seed) {
  if (budget == 0) throw InvalidArgument("generate_round_robin: budget must be >= 1");
  const std::size_t n = model.n();
  std::vector<TokenSeq> seqs;
  seqs.reserve(budget);
  for (std::size_t k = 0; k < budget; ++k) {
    const std::string& start = model.vocab.tokens[k % n];
    seqs.push_back(generate(model, spec, start, max_len, seed + k));
  }
  return seqs;
}

std::vector<CorrelationRow> correlation_experiment(const TransitionModel& model,
                                                   const CorrelationConfig& config) {
  if (config.temperatures.empty()) {
    throw InvalidArgument("correlation_experiment: no temperatures");
  }
  std::vector<CorrelationRow> rows;
  rows.reserve(config.temperatures.size());
  const TransformSpec sample_spec = TransformSpec::stochastic();
  for (double t : config.temperatures) {
    const TransitionModel transformed =
        transform_model(model, TransformSpec::temperature(t));
    CorrelationRow row;
    row.t = t;
    try {
      row.arp = arp_closed_form(transformed);
    } catch (const PreconditionViolated&) {
      row.diverged = true;
    }
    const std::vector<TokenSeq> seqs = generate_round_robin(
        transformed, sample_spec, config.budget, config.max_len, config.seed);
    row.rep_w = rep_w(seqs, config.rep_w_window);
    row.rep_2 = rep_n_corpus(seqs, 2).value;
    row.rep_3 = rep_n_corpus(seqs, 3).value;
    row.rep_r = rep_r_mean(seqs);
    rows.push_back(row);
  }
  return rows;
}

std::vector<InflowRow> inflow_experiment(const TransitionModel& model, double gamma,
                                         const std::vector<TokenSeq>& sequences,
                                         std::size_t rep_w_window,
                                         std::size_t rep_n_order) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw InvalidGamma("inflow_experiment: gamma must lie in (0, 1]");
  }
  if (sequences.empty()) throw EmptyInput("inflow_experiment: no sequences");

  std::vector<InflowRow> rows;
  rows.reserve(sequences.size());
  for (const TokenSeq& s : sequences) {
    InflowRow row;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const std::size_t u = model.vocab.id_of(s[i]);
      const std::size_t v = model.vocab.id_of(s[i + 1]);
      if (model.b(u, v) > gamma) ++row.pair_count;
    }
    row.rep_w = rep_w_single(s, rep_w_window);
    row.rep_n = s.size() >= rep_n_order ? rep_n(s, rep_n_order) : 0.0;
    row.rep_r = rep_r(s);
    rows.push_back(row);
  }
  return rows;
}

TransitionModel make_synthetic_chain(std::size_t n, std::size_t branching,
                                     double row_mass) {
  if (n == 0) throw InvalidArgument("make_synthetic_chain: n must be >= 1");
  if (branching < 1 || branching > n) {
    throw InvalidArgument("make_synthetic_chain: branching must lie in [1, n]");
  }
  if (!(row_mass > 0.0 && row_mass < 1.0)) {
    throw InvalidArgument("make_synthetic_chain: row_mass must lie in (0, 1)");
  }
  Matrix b(n, n, 0.0);
  const double p = row_mass / static_cast<double>(branching);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 1; k <= branching; ++k) {
      b(i, (i + k) % n) = p;
    }
  }
  return model_from_matrix(std::move(b));
}

std::string correlation_csv(const std::vector<CorrelationRow>& rows) {
  std::string out = "t,arp,rep_w,rep_2,rep_3,rep_r,diverged\n";
  for (const CorrelationRow& r : rows) {
    out += fmt(r.t);
    out += ',';
    out += r.arp ? fmt(*r.arp) : std::string();
    out += ',';
    out += fmt(r.rep_w);
    out += ',';
    out += fmt(r.rep_2);
    out += ',';
    out += fmt(r.rep_3);
    out += ',';
    out += fmt(r.rep_r);
    out += ',';
    out += r.diverged ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string inflow_csv(const std::vector<InflowRow>& rows) {
  std::string out = "pair_count,rep_w,rep_n,rep_r\n";
  for (const InflowRow& r : rows) {
    out += std::to_string(r.pair_count);
    out += ',';
    out += fmt(r.rep_w);
    out += ',';
    out += fmt(r.rep_n);
    out += ',';
    out += fmt(r.rep_r);
    out += '\n';
  }
  return out;
}

std::string concentration_csv(const ConcentrationResult& result) {
  std::string out = "a,empirical_prob,theory_bound,trials\n";
  for (std::size_t k = 0; k < result.a_grid.size(); ++k) {
    out += fmt(result.a_grid[k]);
    out += ',';
    out += fmt(result.empirical_prob[k]);
    out += ',';
    out += fmt(result.theory_bound[k]);
    out += ',';
    out += std::to_string(result.trials);
    out += '\n';
  }
  return out;
}

}  // namespace arplab
