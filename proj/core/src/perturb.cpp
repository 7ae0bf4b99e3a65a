#include "arplab/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace arplab {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void validate_spec(std::size_t n, const PerturbationSpec& spec) {
  if (n == 0) throw InvalidArgument("perturbation: n must be >= 1");
  if (!(spec.delta >= 0.0) || !std::isfinite(spec.delta)) {
    throw InvalidDelta("perturbation: delta must be finite and >= 0");
  }
  if (spec.delta * spec.delta >= 1.0 / static_cast<double>(n)) {
    throw InvalidDelta("perturbation: requires delta^2 < 1/n");
  }
}

// Entries drawn row-major from a single stream.
Matrix draw_unconstrained(std::size_t n, const PerturbationSpec& spec,
                          std::mt19937_64& rng) {
  Matrix t(n, n, 0.0);
  if (spec.delta == 0.0) return t;
  if (spec.dist == PerturbationDist::UniformSymmetric) {
    const double half_width = std::sqrt(3.0) * spec.delta;
    for (double& v : t.data()) v = (2.0 * uniform01(rng) - 1.0) * half_width;
  } else {
    for (double& v : t.data()) v = (rng() & 1u) ? spec.delta : -spec.delta;
  }
  return t;
}

PerturbationDraw finish_draw(Matrix t, const PerturbationSpec& spec, const Matrix* base) {
  const std::size_t n = t.rows();
  if (spec.mode == PerturbationMode::Projected) {
    if (base == nullptr) {
      throw InvalidArgument("projected perturbation requires the base matrix");
    }
    if (!base->is_square() || base->rows() != n) {
      throw InvalidArgument("projected perturbation: base shape mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double clipped = std::clamp((*base)(i, j) + t(i, j), 0.0, 1.0);
        t(i, j) = clipped - (*base)(i, j);
      }
    }
  }
  PerturbationDraw d{std::move(t), 0.0, 0.0};
  const double count = static_cast<double>(n) * static_cast<double>(n);
  for (double v : d.t.data()) d.realized_mean += v;
  d.realized_mean /= count;
  for (double v : d.t.data()) {
    const double c = v - d.realized_mean;
    d.realized_var += c * c;
  }
  d.realized_var /= count;
  return d;
}

void check_column_square_sums(const Matrix& b) {
  const std::size_t n = b.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += b(i, j) * b(i, j);
    if (!(s < 1.0)) {
      throw PreconditionViolated(
          "requires sum_i B_ij^2 < 1 for every column; column " + std::to_string(j) +
              " has " + std::to_string(s),
          s, 1.0);
    }
  }
}

// Returns a safe upper estimate of rho(B^2) after certifying zeta*n > rho.
double checked_rho_b2(const Matrix& b, double zn) {
  const Matrix b2 = multiply(b, b);
  const SpectralBounds rho = spectral_radius_bounds(b2, 1e-10, 2000);
  const bool holds = rho.upper < zn || (rho.converged && zn > rho.estimate);
  if (!holds) {
    throw PreconditionViolated("requires zeta*n > rho(B^2)", zn, rho.estimate);
  }
  return std::min(rho.upper, zn);
}

}  // namespace

PerturbationDraw sample_perturbation(std::size_t n, const PerturbationSpec& spec,
                                     std::uint64_t seed, const Matrix* base) {
  validate_spec(n, spec);
  std::mt19937_64 rng(seed);
  return finish_draw(draw_unconstrained(n, spec, rng), spec, base);
}

double truncated_arp(const Matrix& b, double zeta, std::size_t r_max) {
  if (r_max < 1) throw InvalidArgument("truncated_arp: r_max must be >= 1");
  const double zn = zeta * static_cast<double>(b.rows());
  const Matrix b2 = multiply(b, b);
  Matrix acc = b2;
  double value = trace(acc) / zn;
  double denom = zn;
  for (std::size_t r = 2; r <= r_max; ++r) {
    acc = multiply(acc, b2);
    denom *= zn;
    value += trace(acc) / denom;
  }
  return value;
}

double general_arp(const Matrix& b, double zeta, const std::vector<Matrix>& ts,
                   std::size_t r_max) {
  if (!b.is_square()) throw InvalidArgument("general_arp: B not square");
  if (r_max < 1) throw InvalidArgument("general_arp: r_max must be >= 1");
  if (ts.size() != 2 * r_max) {
    throw InvalidArgument("general_arp: need exactly 2*r_max perturbation matrices");
  }
  const std::size_t n = b.rows();
  for (const Matrix& t : ts) {
    if (!t.is_square() || t.rows() != n) {
      throw InvalidArgument("general_arp: perturbation shape mismatch");
    }
  }
  if (!(zeta > 0.0)) throw InvalidArgument("general_arp: zeta must be positive");
  const double zn = zeta * static_cast<double>(n);
  checked_rho_b2(b, zn);

  // Running product over per-step matrices B'_k = B + T_k; every even k
  // contributes one trace term.
  Matrix prod(n, n, 0.0);
  double value = 0.0;
  double denom = 1.0;
  for (std::size_t k = 0; k < 2 * r_max; ++k) {
    Matrix bk = b;
    for (std::size_t idx = 0; idx < bk.data().size(); ++idx) {
      bk.data()[idx] += ts[k].data()[idx];
    }
    prod = (k == 0) ? std::move(bk) : multiply(prod, bk);
    if (k % 2 == 1) {
      denom *= zn;
      value += trace(prod) / denom;
    }
  }
  return value;
}

ConcentrationResult concentration_experiment(const Matrix& b, double zeta,
                                             const PerturbationSpec& spec,
                                             std::vector<double> a_grid,
                                             std::size_t trials, std::size_t r_max,
                                             std::uint64_t seed) {
  if (!b.is_square()) throw InvalidArgument("concentration: B not square");
  const std::size_t n = b.rows();
  validate_spec(n, spec);
  if (spec.mode != PerturbationMode::Unconstrained) {
    throw InvalidArgument(
        "concentration: projected perturbations distort the moments; "
        "use unconstrained mode");
  }
  if (trials == 0) throw InvalidArgument("concentration: trials must be >= 1");
  if (a_grid.empty()) throw InvalidArgument("concentration: a grid is empty");
  for (double a : a_grid) {
    if (!(a > 0.0)) throw InvalidArgument("concentration: thresholds must be > 0");
  }

  const double zn = zeta * static_cast<double>(n);
  if (!(zn > 4.0)) {
    throw PreconditionViolated("concentration: requires zeta*n > 4", zn, 4.0);
  }
  check_column_square_sums(b);
  const double rho = checked_rho_b2(b, zn);

  if (r_max == 0) {
    // Smallest depth whose unperturbed tail term n*(rho/zn)^r drops below 1e-10.
    const double ratio = rho / zn;
    r_max = 1;
    double tail = static_cast<double>(n) * ratio;
    while (tail >= 1e-10 && r_max < 50) {
      tail *= ratio;
      ++r_max;
    }
  }

  ConcentrationResult res;
  res.a_grid = std::move(a_grid);
  res.trials = trials;
  res.r_max = r_max;
  res.r_exact = truncated_arp(b, zeta, r_max);

  const double delta2 = spec.delta * spec.delta;
  res.variance_bound = 3.0 * zn * delta2 / ((zn - 4.0) * (zn - 1.0));
  res.theory_bound.resize(res.a_grid.size());
  for (std::size_t k = 0; k < res.a_grid.size(); ++k) {
    res.theory_bound[k] = res.variance_bound / (res.a_grid[k] * res.a_grid[k]);
  }

  std::vector<std::size_t> exceed(res.a_grid.size(), 0);
  double sum = 0.0;
  double sum_sq = 0.0;
  std::vector<Matrix> ts;
  ts.reserve(2 * r_max);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(seed + trial);
    ts.clear();
    for (std::size_t k = 0; k < 2 * r_max; ++k) {
      ts.push_back(draw_unconstrained(n, spec, rng));
    }
    // Inline product accumulation; preconditions were checked once above.
    Matrix prod(n, n, 0.0);
    double r_prime = 0.0;
    double denom = 1.0;
    for (std::size_t k = 0; k < 2 * r_max; ++k) {
      Matrix bk = b;
      for (std::size_t idx = 0; idx < bk.data().size(); ++idx) {
        bk.data()[idx] += ts[k].data()[idx];
      }
      prod = (k == 0) ? std::move(bk) : multiply(prod, bk);
      if (k % 2 == 1) {
        denom *= zn;
        r_prime += trace(prod) / denom;
      }
    }
    const double diff = r_prime - res.r_exact;
    sum += diff;
    sum_sq += diff * diff;
    for (std::size_t k = 0; k < res.a_grid.size(); ++k) {
      if (std::abs(diff) >= res.a_grid[k]) ++exceed[k];
    }
  }

  res.empirical_prob.resize(res.a_grid.size());
  for (std::size_t k = 0; k < res.a_grid.size(); ++k) {
    res.empirical_prob[k] =
        static_cast<double>(exceed[k]) / static_cast<double>(trials);
  }
  res.diff_mean = sum / static_cast<double>(trials);
  res.diff_var = sum_sq / static_cast<double>(trials) - res.diff_mean * res.diff_mean;
  return res;
}

MomentReport moment_check(const Matrix& b, const PerturbationSpec& spec,
                          std::size_t trials, std::uint64_t seed) {
  if (!b.is_square()) throw InvalidArgument("moment_check: B not square");
  const std::size_t n = b.rows();
  validate_spec(n, spec);
  if (trials < 2) throw InvalidArgument("moment_check: trials must be >= 2");
  check_column_square_sums(b);

  // A fixed handful of probe entries; corners plus the middle.
  std::vector<std::pair<std::size_t, std::size_t>> probes{
      {0, 0}, {0, n - 1}, {n / 2, n / 2}, {n - 1, 0}, {n - 1, n - 1}};
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

  const std::size_t np = probes.size();
  std::vector<double> sum(3 * np, 0.0);
  std::vector<double> sum_sq(3 * np, 0.0);

  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(seed + trial);
    const Matrix tp = draw_unconstrained(n, spec, rng);
    const Matrix tq = draw_unconstrained(n, spec, rng);
    for (std::size_t e = 0; e < np; ++e) {
      const auto [i, j] = probes[e];
      double tb = 0.0;
      double bt = 0.0;
      double tt = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        tb += tp(i, k) * b(k, j);
        bt += b(i, k) * tp(k, j);
        tt += tp(i, k) * tq(k, j);
      }
      const double vals[3] = {tb, bt, tt};
      for (std::size_t which = 0; which < 3; ++which) {
        sum[which * np + e] += vals[which];
        sum_sq[which * np + e] += vals[which] * vals[which];
      }
    }
  }

  MomentReport report;
  report.delta2 = spec.delta * spec.delta;
  report.trials = trials;
  report.all_ok = true;
  const double tn = static_cast<double>(trials);
  for (std::size_t which = 0; which < 3; ++which) {
    std::vector<MomentEntry>& dest =
        which == 0 ? report.tb : (which == 1 ? report.bt : report.tt);
    for (std::size_t e = 0; e < np; ++e) {
      MomentEntry m;
      m.i = probes[e].first;
      m.j = probes[e].second;
      m.mean = sum[which * np + e] / tn;
      m.variance = sum_sq[which * np + e] / tn - m.mean * m.mean;
      m.mean_tol = 4.0 * std::sqrt(std::max(0.0, m.variance)) / std::sqrt(tn);
      m.mean_ok = std::abs(m.mean) <= m.mean_tol;
      m.var_ok = m.variance <= report.delta2 * 1.1;
      report.all_ok = report.all_ok && m.mean_ok && m.var_ok;
      dest.push_back(m);
    }
  }
  return report;
}

}  // namespace arplab
