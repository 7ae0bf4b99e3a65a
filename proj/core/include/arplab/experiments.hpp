#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arplab/bounds.hpp"
#include "arplab/metrics.hpp"
#include "arplab/perturb.hpp"
#include "arplab/sampling.hpp"

namespace arplab {

// Generates `budget` sequences, cycling the start token over ascending
// vocabulary ids; sequence k uses seed + k.
std::vector<TokenSeq> generate_round_robin(const TransitionModel& model,
                                           const TransformSpec& spec,
                                           std::size_t budget, std::size_t max_len,
                                           std::uint64_t seed);

// Temperature sweep: per setting, transform the model, compute the exact ARP
// (divergence recorded, not thrown) and repetition metrics of sequences
// sampled from the transformed chain.
struct CorrelationConfig {
  std::vector<double> temperatures;
  std::size_t budget = 500;
  std::size_t max_len = 200;
  std::size_t rep_w_window = 16;
  std::uint64_t seed = 1;
};

struct CorrelationRow {
  double t = 0.0;
  std::optional<double> arp;
  bool diverged = false;
  double rep_w = 0.0;
  double rep_2 = 0.0;
  double rep_3 = 0.0;
  double rep_r = 0.0;
};

std::vector<CorrelationRow> correlation_experiment(const TransitionModel& model,
                                                   const CorrelationConfig& config);

// Per-sequence high-inflow-pair counts (adjacent pairs with B_uv > gamma)
// joined with repetition metrics.
struct InflowRow {
  std::size_t pair_count = 0;
  double rep_w = 0.0;
  double rep_n = 0.0;
  double rep_r = 0.0;
};

std::vector<InflowRow> inflow_experiment(const TransitionModel& model, double gamma,
                                         const std::vector<TokenSeq>& sequences,
                                         std::size_t rep_w_window = 16,
                                         std::size_t rep_n_order = 2);

// Ring-structured chain with exactly `branching` successors per word, each
// carrying row_mass / branching probability; zeta * n equals branching.
TransitionModel make_synthetic_chain(std::size_t n, std::size_t branching,
                                     double row_mass = 0.6);

std::string correlation_csv(const std::vector<CorrelationRow>& rows);
std::string inflow_csv(const std::vector<InflowRow>& rows);
std::string concentration_csv(const ConcentrationResult& result);

}  // namespace arplab
