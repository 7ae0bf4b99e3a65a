#include "arplab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace arplab {

namespace {

Matrix shifted_identity_minus(const Matrix& b2, double zn) {
  const std::size_t n = b2.rows();
  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = -b2(i, j);
    m(i, i) += zn;
  }
  return m;
}

double nuclear_norm(const std::vector<double>& sv) {
  return std::accumulate(sv.begin(), sv.end(), 0.0);
}

double variance_numerator(const TransitionModel& model, double mean_term_scale,
                          double rank_tol, const std::vector<double>& sv_b2) {
  const std::size_t n = model.n();
  const double nd = static_cast<double>(n);

  std::size_t rank = 0;
  for (double s : sv_b2) {
    if (s > rank_tol * sv_b2.front()) ++rank;
  }

  double var_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = model.b.row(i);
    double mu = 0.0;
    for (std::size_t j = 0; j < n; ++j) mu += row[j];
    mu /= nd;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = row[j] - mu;
      var_sum += d * d;
    }
  }
  double mean_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = 1.0 - model.eos[i];
    mean_sum += d * d;
  }
  return std::sqrt(static_cast<double>(rank)) * (var_sum + mean_term_scale * mean_sum);
}

double variance_bound_impl(const TransitionModel& model, double rank_tol,
                           double mean_term_scale) {
  const Matrix b2 = multiply(model.b, model.b);
  const std::vector<double> sv = singular_values(b2);
  if (sv.front() == 0.0) return 0.0;  // B^2 = 0: rank 0, numerator 0

  const std::vector<double> sv_res = singular_values(shifted_identity_minus(b2, model.zeta_n()));
  const double sigma_min = sv_res.back();
  if (!(sigma_min > 0.0)) {
    throw PreconditionViolated(
        "bound_variance: sigma_min(zeta n I - B^2) is not positive", sigma_min, 0.0);
  }
  return variance_numerator(model, mean_term_scale, rank_tol, sv) / sigma_min;
}

}  // namespace

double bound_spectral(const TransitionModel& model) {
  const Matrix b2 = multiply(model.b, model.b);
  const std::vector<double> sv = singular_values(b2);
  const double nuc = nuclear_norm(sv);
  if (nuc == 0.0) return 0.0;

  const double zn = model.zeta_n();
  const SpectralBounds rho = spectral_radius_bounds(b2, 1e-10, 2000);
  const bool holds = rho.upper < zn || (rho.converged && zn > rho.estimate);
  if (!holds) {
    throw PreconditionViolated("bound_spectral: requires zeta*n > rho(B^2)", zn,
                               rho.estimate);
  }
  const std::vector<double> sv_res = singular_values(shifted_identity_minus(b2, zn));
  const double sigma_min = sv_res.back();
  if (!(sigma_min > 0.0)) {
    throw PreconditionViolated("bound_spectral: sigma_min is not positive", sigma_min, 0.0);
  }
  return nuc / sigma_min;
}

double bound_variance(const TransitionModel& model, double rank_tol) {
  return variance_bound_impl(model, rank_tol, 1.0);
}

double bound_variance_tight(const TransitionModel& model, double rank_tol) {
  return variance_bound_impl(model, rank_tol, 1.0 / static_cast<double>(model.n()));
}

double bound_inflow_outflow(const TransitionModel& model) {
  const std::size_t n = model.n();
  const Matrix b2 = multiply(model.b, model.b);
  const std::vector<double> sv = singular_values(b2);
  const double nuc = nuclear_norm(sv);
  if (nuc == 0.0) return 0.0;

  const double zn = model.zeta_n();
  double denom = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double outflow = 0.0;
    double inflow = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      outflow += b2(i, j);
      inflow += b2(j, i);
    }
    // Row/column diagonal dominance of zeta n I - B^2 reduces to
    // zeta n >= outflow_i and zeta n >= inflow_i.
    if (outflow > zn || inflow > zn) {
      throw PreconditionViolated(
          "bound_inflow_outflow: zeta n I - B^2 not diagonally dominant at row " +
              std::to_string(i),
          zn, std::max(outflow, inflow));
    }
    denom = std::min(denom, 0.5 * (zn - outflow) + 0.5 * (zn - inflow));
  }
  if (!(denom > 0.0)) {
    throw PreconditionViolated("bound_inflow_outflow: denominator is not positive",
                               denom, 0.0);
  }
  return nuc / denom;
}

double sigma_min_lower_bound(const Matrix& a) {
  if (!a.is_square()) throw InvalidArgument("sigma_min_lower_bound: not square");
  if (!a.all_finite()) throw InvalidArgument("sigma_min_lower_bound: non-finite entries");
  const std::size_t n = a.rows();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      off += std::abs(a(i, j)) + std::abs(a(j, i));
    }
    best = std::min(best, std::abs(a(i, i)) - 0.5 * off);
  }
  return best;
}

WordFlow word_flow(const TransitionModel& model) {
  const std::size_t n = model.n();
  const Matrix b2 = multiply(model.b, model.b);
  WordFlow f{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = b2.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      f.outflow[i] += row[j];
      f.inflow[j] += row[j];
    }
  }
  return f;
}

std::vector<HighInflowPair> high_inflow_pairs(const TransitionModel& model, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw InvalidArgument("high_inflow_pairs: gamma must lie in (0, 1]");
  }
  std::vector<HighInflowPair> pairs;
  const std::size_t n = model.n();
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = model.b.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (row[j] > gamma) pairs.push_back({i, j, row[j]});
    }
  }
  return pairs;
}

BoundReport make_bound_report(const TransitionModel& model, double rank_tol) {
  BoundReport r;
  const std::size_t n = model.n();
  const double zn = model.zeta_n();
  r.pre.zeta_n = zn;

  const Matrix b2 = multiply(model.b, model.b);
  const std::vector<double> sv_b2 = singular_values(b2);
  r.nuclear_b2 = nuclear_norm(sv_b2);
  r.rank_b2 = 0;
  if (sv_b2.front() > 0.0) {
    for (double s : sv_b2) {
      if (s > rank_tol * sv_b2.front()) ++r.rank_b2;
    }
  }

  const SpectralBounds rho = spectral_radius_bounds(b2, 1e-10, 2000);
  r.pre.rho_b2 = rho.estimate;
  r.pre.rho_converged = rho.converged;
  r.pre.spectral_ok = rho.upper < zn || (rho.converged && zn > rho.estimate);

  const Matrix resolvent = shifted_identity_minus(b2, zn);
  const std::vector<double> sv_res = singular_values(resolvent);
  r.sigma_min_used = sv_res.back();
  r.sigma_min_gershgorin = sigma_min_lower_bound(resolvent);
  r.pre.sigma_min_positive = r.sigma_min_used > 0.0;

  // Exact ARP: closed form under the spectral precondition, otherwise a short
  // truncated series as a divergence diagnostic.
  if (model.zeta == 0.0) {
    r.arp_exact = 0.0;
  } else if (r.pre.spectral_ok) {
    const Matrix x = solve_linear(resolvent, b2);
    r.arp_exact = trace(x);
  } else {
    r.arp_diverged = true;
    r.series_fallback = arp_series(model, 25, 1e-12);
  }

  // Spectral bound.
  if (r.nuclear_b2 == 0.0) {
    r.spectral = 0.0;
  } else if (r.pre.spectral_ok && r.pre.sigma_min_positive) {
    r.spectral = r.nuclear_b2 / r.sigma_min_used;
  }

  // Variance bound.
  if (sv_b2.front() == 0.0) {
    r.variance = 0.0;
  } else if (r.pre.sigma_min_positive) {
    r.variance = variance_numerator(model, 1.0, rank_tol, sv_b2) / r.sigma_min_used;
  }

  // Inflow/outflow bound, gated by joint row + column dominance.
  const WordFlow flow = word_flow(model);
  r.pre.diag_dominant = true;
  double denom = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (flow.outflow[i] > zn || flow.inflow[i] > zn) {
      r.pre.diag_dominant = false;
      if (!r.pre.dominance_failure_row) r.pre.dominance_failure_row = i;
    }
    denom = std::min(denom, 0.5 * (zn - flow.outflow[i]) + 0.5 * (zn - flow.inflow[i]));
  }
  if (r.nuclear_b2 == 0.0) {
    r.inflow_outflow = 0.0;
  } else if (r.pre.diag_dominant && denom > 0.0) {
    r.inflow_outflow = r.nuclear_b2 / denom;
  }
  return r;
}

}  // namespace arplab
