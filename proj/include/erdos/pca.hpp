#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "erdos/error.hpp"
#include "erdos/format.hpp"
#include "erdos/matrix.hpp"

namespace erdos {

struct ZScored {
  Matrix values;                   ///< rows × kept columns
  std::vector<std::size_t> kept;   ///< original column index of each kept column
  std::vector<std::size_t> dropped;
  std::vector<double> mean;        ///< per kept column
  std::vector<double> stddev;      ///< population deviation, per kept column
};

/// Column-wise z-scores with population statistics. Constant columns (zero
/// deviation up to rounding) are dropped and reported.
inline ZScored zscore(const Matrix& x) {
  if (x.rows() < 2) throw ContractError("zscore needs at least 2 rows");
  const double n = static_cast<double>(x.rows());
  ZScored out;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double mu = 0;
    double scale = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      mu += x(i, j);
      scale = std::max(scale, std::abs(x(i, j)));
    }
    mu /= n;
    double ss = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) ss += (x(i, j) - mu) * (x(i, j) - mu);
    const double sd = std::sqrt(ss / n);
    if (!(sd > 1e-12 * std::max(1.0, scale))) {
      out.dropped.push_back(j);
      continue;
    }
    out.kept.push_back(j);
    out.mean.push_back(mu);
    out.stddev.push_back(sd);
  }
  if (out.kept.empty()) throw ContractError("zscore: every column is constant");
  out.values = Matrix(x.rows(), out.kept.size());
  for (std::size_t c = 0; c < out.kept.size(); ++c)
    for (std::size_t i = 0; i < x.rows(); ++i)
      out.values(i, c) = (x(i, out.kept[c]) - out.mean[c]) / out.stddev[c];
  return out;
}

struct SymmetricEigen {
  std::vector<double> values;  ///< descending
  Matrix vectors;              ///< one unit eigenvector per column
  int sweeps = 0;
};

/// Cyclic Jacobi rotations for a small symmetric matrix. Stops when the
/// off-diagonal Frobenius norm falls to `tol` times the matrix norm; throws
/// NumericalError after `max_sweeps` sweeps without convergence. Eigenpairs
/// come back sorted by descending eigenvalue, each vector's largest-magnitude
/// entry made positive.
inline SymmetricEigen jacobi_eigen(Matrix a, double tol = 1e-12, int max_sweeps = 100) {
  const auto n = a.rows();
  if (a.cols() != n) throw ContractError("jacobi_eigen needs a square matrix");
  Matrix v = Matrix::identity(n);

  double norm = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) norm += a(i, j) * a(i, j);
  norm = std::sqrt(norm);
  const auto off_norm = [&] {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  SymmetricEigen out;
  while (off_norm() > tol * std::max(norm, 1e-300)) {
    if (out.sweeps == max_sweeps)
      throw NumericalError("jacobi_eigen: no convergence after " + std::to_string(max_sweeps) +
                           " sweeps");
    ++out.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto src = order[c];
    out.values[c] = a(src, src);
    double peak = 0;
    for (std::size_t r = 0; r < n; ++r) peak = std::max(peak, std::abs(v(r, src)));
    std::size_t lead = 0;
    while (std::abs(v(lead, src)) < peak - 1e-12) ++lead;
    const double sign = v(lead, src) < 0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = sign * v(r, src);
  }
  return out;
}

struct PcaResult {
  std::vector<std::size_t> kept_columns;
  Matrix correlation;
  std::vector<double> eigenvalues;  ///< descending
  Matrix eigenvectors;              ///< column k pairs with eigenvalues[k]
  Matrix loadings_percent;          ///< V'[j,k] = 100 |V[j,k]| / Σ_j' |V[j',k]|
  std::vector<double> variance_percent;  ///< D'[k] = 100 D[k] / Σ D
};

inline PcaResult correlation_eig(const ZScored& z) {
  const auto& x = z.values;
  const auto J = x.cols();
  const double rows = static_cast<double>(x.rows());
  PcaResult r;
  r.kept_columns = z.kept;
  r.correlation = Matrix(J, J);
  for (std::size_t a = 0; a < J; ++a) {
    for (std::size_t b = a; b < J; ++b) {
      double s = 0;
      for (std::size_t i = 0; i < x.rows(); ++i) s += x(i, a) * x(i, b);
      r.correlation(a, b) = r.correlation(b, a) = s / rows;
    }
  }
  auto eig = jacobi_eigen(r.correlation);
  r.eigenvalues = std::move(eig.values);
  r.eigenvectors = std::move(eig.vectors);

  r.loadings_percent = Matrix(J, J);
  for (std::size_t k = 0; k < J; ++k) {
    double col = 0;
    for (std::size_t j = 0; j < J; ++j) col += std::abs(r.eigenvectors(j, k));
    for (std::size_t j = 0; j < J; ++j)
      r.loadings_percent(j, k) = 100.0 * std::abs(r.eigenvectors(j, k)) / col;
  }
  const double trace = std::accumulate(r.eigenvalues.begin(), r.eigenvalues.end(), 0.0);
  for (const double d : r.eigenvalues) r.variance_percent.push_back(100.0 * d / trace);
  return r;
}

inline PcaResult pca(const Matrix& x) { return correlation_eig(zscore(x)); }

struct PcaAggregate {
  std::vector<std::size_t> kept_columns;
  std::size_t n_components = 0;
  std::size_t n_snapshots = 0;          ///< L
  std::vector<std::size_t> excluded;    ///< input positions left out
  Matrix loading_mean;                  ///< kept columns × components
  Matrix loading_stddev;
  std::vector<double> variance_mean;    ///< per component
  std::vector<double> variance_stddev;
};

/// Means and population deviations of V' and D' across snapshots. Only the
/// results sharing the most common kept-column set take part; the rest are
/// listed in `excluded`.
inline PcaAggregate aggregate(std::span<const PcaResult> results, std::size_t n_components = 3) {
  if (results.empty()) throw ContractError("aggregate needs at least one PCA result");
  std::map<std::vector<std::size_t>, std::size_t> freq;
  for (const auto& r : results) ++freq[r.kept_columns];
  // Most frequent set; ties go to the set seen first.
  const std::vector<std::size_t>* best = nullptr;
  std::size_t best_count = 0;
  for (const auto& r : results) {
    const auto c = freq[r.kept_columns];
    if (c > best_count) {
      best = &r.kept_columns;
      best_count = c;
    }
  }
  PcaAggregate agg;
  agg.kept_columns = *best;
  const auto J = best->size();
  agg.n_components = std::min(n_components, J);
  const auto K = agg.n_components;

  std::vector<const PcaResult*> used;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].kept_columns == *best) used.push_back(&results[i]);
    else agg.excluded.push_back(i);
  }
  const double L = static_cast<double>(used.size());
  agg.n_snapshots = used.size();
  agg.loading_mean = Matrix(J, K);
  agg.loading_stddev = Matrix(J, K);
  agg.variance_mean.assign(K, 0.0);
  agg.variance_stddev.assign(K, 0.0);
  for (const auto* r : used) {
    for (std::size_t k = 0; k < K; ++k) {
      agg.variance_mean[k] += r->variance_percent[k] / L;
      for (std::size_t j = 0; j < J; ++j) agg.loading_mean(j, k) += r->loadings_percent(j, k) / L;
    }
  }
  for (const auto* r : used) {
    for (std::size_t k = 0; k < K; ++k) {
      const double dv = agg.variance_mean[k] - r->variance_percent[k];
      agg.variance_stddev[k] += dv * dv / L;
      for (std::size_t j = 0; j < J; ++j) {
        const double d = agg.loading_mean(j, k) - r->loadings_percent(j, k);
        agg.loading_stddev(j, k) += d * d / L;
      }
    }
  }
  for (auto& v : agg.variance_stddev) v = std::sqrt(v);
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t k = 0; k < K; ++k) agg.loading_stddev(j, k) = std::sqrt(agg.loading_stddev(j, k));
  return agg;
}

/// Table layout: one row per metric name (NA for columns not kept), a
/// (mean, deviation) pair per component, then the variance percentages.
inline void write_loadings_csv(const PcaAggregate& agg, std::span<const std::string_view> names,
                               std::ostream& out) {
  out << "metric";
  for (std::size_t k = 0; k < agg.n_components; ++k)
    out << ",pc" << k + 1 << "_mean,pc" << k + 1 << "_std";
  out << '\n';
  for (std::size_t j = 0; j < names.size(); ++j) {
    out << names[j];
    const auto it = std::find(agg.kept_columns.begin(), agg.kept_columns.end(), j);
    for (std::size_t k = 0; k < agg.n_components; ++k) {
      if (it == agg.kept_columns.end()) {
        out << ",NA,NA";
      } else {
        const auto r = static_cast<std::size_t>(it - agg.kept_columns.begin());
        out << ',' << fmt_double(agg.loading_mean(r, k)) << ','
            << fmt_double(agg.loading_stddev(r, k));
      }
    }
    out << '\n';
  }
  out << "lambda";
  for (std::size_t k = 0; k < agg.n_components; ++k)
    out << ',' << fmt_double(agg.variance_mean[k]) << ',' << fmt_double(agg.variance_stddev[k]);
  out << '\n';
}

// ---------------------------------------------------------------------------
// Correlation coefficients
// ---------------------------------------------------------------------------

struct RankCorrelation {
  double pearson = 0;
  double spearman = 0;
};

namespace detail {

inline double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) throw ContractError("correlation of a constant vector");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// 1-based ranks, ties sharing their mean rank.
inline std::vector<double> mid_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[idx[t]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace detail

inline RankCorrelation rank_correlations(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractError("rank_correlations: length mismatch");
  if (x.size() < 3) throw ContractError("rank_correlations needs at least 3 points");
  RankCorrelation r;
  r.pearson = detail::pearson(x, y);
  const auto rx = detail::mid_ranks(x);
  const auto ry = detail::mid_ranks(y);
  r.spearman = detail::pearson(rx, ry);
  return r;
}

}  // namespace erdos
