#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "arplab/markov.hpp"

namespace arplab {

// Upper bound ||B^2||_* / sigma_min(zeta n I - B^2). Requires zeta n > rho(B^2).
double bound_spectral(const TransitionModel& model);

// Upper bound sqrt(r) * (sum_ij (B_ij - mu_i)^2 + sum_i (1 - b_i)^2) / sigma_min,
// with mu_i the row mean of B and r the numerical rank of B^2 (singular values
// above rank_tol times the largest). Requires sigma_min(zeta n I - B^2) > 0.
double bound_variance(const TransitionModel& model, double rank_tol = 1e-10);

// Variant with the mean term scaled by 1/n instead of 1; tighter but still
// above the spectral bound. Kept out of BoundReport.
double bound_variance_tight(const TransitionModel& model, double rank_tol = 1e-10);

// Upper bound ||B^2||_* / min_i { (zeta n - outflow_i)/2 + (zeta n - inflow_i)/2 }
// over B^2. Requires zeta n I - B^2 diagonally dominant in both row and column
// form and a positive denominator.
double bound_inflow_outflow(const TransitionModel& model);

// Gershgorin-type lower bound on the smallest singular value:
// min_i { |a_ii| - (sum_{j != i} |a_ij| + sum_{j != i} |a_ji|) / 2 }.
// May be negative, in which case it carries no information.
double sigma_min_lower_bound(const Matrix& a);

// Row sums (outflow) and column sums (inflow) of B^2 per word.
struct WordFlow {
  std::vector<double> inflow;
  std::vector<double> outflow;
};
WordFlow word_flow(const TransitionModel& model);

// First-order pairs (u, v) with B_uv > gamma, in ascending (u, v) id order.
struct HighInflowPair {
  std::size_t from = 0;
  std::size_t to = 0;
  double prob = 0.0;
};
std::vector<HighInflowPair> high_inflow_pairs(const TransitionModel& model, double gamma);

struct BoundPreconditions {
  double zeta_n = 0.0;
  double rho_b2 = 0.0;
  bool rho_converged = false;
  bool spectral_ok = false;       // zeta n > rho(B^2)
  bool diag_dominant = false;     // joint row + column form
  std::optional<std::size_t> dominance_failure_row;
  bool sigma_min_positive = false;
};

// Exact ARP plus the three upper bounds with precondition diagnostics.
// Divergence (zeta n <= rho(B^2)) is recorded, not thrown; a short series
// partial sum is attached in that case.
struct BoundReport {
  std::optional<double> arp_exact;
  bool arp_diverged = false;
  std::optional<ArpSeries> series_fallback;
  std::optional<double> spectral;
  std::optional<double> variance;
  std::optional<double> inflow_outflow;
  double nuclear_b2 = 0.0;
  double sigma_min_used = 0.0;
  double sigma_min_gershgorin = 0.0;
  std::size_t rank_b2 = 0;
  BoundPreconditions pre;
};

BoundReport make_bound_report(const TransitionModel& model, double rank_tol = 1e-10);

}  // namespace arplab
