#pragma once

#include <cstdint>
#include <vector>

#include "arplab/matrix.hpp"

namespace arplab {

enum class PerturbationDist { UniformSymmetric, TwoPoint };
enum class PerturbationMode { Unconstrained, Projected };

// Zero-mean entrywise perturbation with per-entry variance delta^2. The
// variance must satisfy delta^2 < 1/n. Projected mode clips B + T back into
// [0, 1] and reports the realized moments; its draws are no longer exactly
// zero-mean, so concentration checks reject it.
struct PerturbationSpec {
  double delta = 0.0;
  PerturbationDist dist = PerturbationDist::UniformSymmetric;
  PerturbationMode mode = PerturbationMode::Unconstrained;
};

struct PerturbationDraw {
  Matrix t;
  double realized_mean = 0.0;
  double realized_var = 0.0;
};

// Draws one perturbation matrix. Projected mode requires the base matrix.
PerturbationDraw sample_perturbation(std::size_t n, const PerturbationSpec& spec,
                                     std::uint64_t seed, const Matrix* base = nullptr);

// General-model ARP truncated at r_max:
//   sum_{r=1..r_max} tr(prod_{k=1..2r} (B + T_k)) / (zeta n)^r.
// ts must hold exactly 2*r_max matrices. Requires zeta n > rho(B^2).
double general_arp(const Matrix& b, double zeta, const std::vector<Matrix>& ts,
                   std::size_t r_max);

// Markov ARP truncated at the same depth, for exact comparison with
// general_arp on zero perturbations.
double truncated_arp(const Matrix& b, double zeta, std::size_t r_max);

struct ConcentrationResult {
  std::vector<double> a_grid;
  std::vector<double> empirical_prob;  // per a: freq of |R - R'| >= a
  std::vector<double> theory_bound;    // per a: 3 zeta n delta^2 / (a^2 (zn-4)(zn-1))
  std::size_t trials = 0;
  double r_exact = 0.0;  // truncated Markov ARP used as R
  std::size_t r_max = 0;
  double diff_mean = 0.0;  // empirical mean of R' - R
  double diff_var = 0.0;   // empirical variance of R' - R
  double variance_bound = 0.0;
};

// Monte Carlo check of the concentration bound. Requires zeta n > 4, column
// square sums of B below 1, and unconstrained perturbations. Per-trial seeds
// are seed + trial index. r_max == 0 picks the smallest depth whose
// unperturbed tail is below 1e-10, capped at 50.
ConcentrationResult concentration_experiment(const Matrix& b, double zeta,
                                             const PerturbationSpec& spec,
                                             std::vector<double> a_grid,
                                             std::size_t trials, std::size_t r_max,
                                             std::uint64_t seed);

// Empirical means and variances of sampled entries of T_p B, B T_p and
// T_p T_q: means should vanish and variances stay below delta^2.
struct MomentEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  double mean = 0.0;
  double variance = 0.0;
  double mean_tol = 0.0;  // 4 * std / sqrt(trials)
  bool mean_ok = false;
  bool var_ok = false;
};

struct MomentReport {
  std::vector<MomentEntry> tb;  // entries of T_p B
  std::vector<MomentEntry> bt;  // entries of B T_p
  std::vector<MomentEntry> tt;  // entries of T_p T_q
  double delta2 = 0.0;
  std::size_t trials = 0;
  bool all_ok = false;
};

MomentReport moment_check(const Matrix& b, const PerturbationSpec& spec,
                          std::size_t trials, std::uint64_t seed);

}  // namespace arplab
