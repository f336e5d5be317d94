#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "erdos/metrics.hpp"
#include "erdos/pca.hpp"

using namespace erdos;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> g;
  Matrix x(rows, cols);
  // Shared latent factor so the correlation matrix is far from identity.
  for (std::size_t i = 0; i < rows; ++i) {
    const double f = g(rng);
    for (std::size_t j = 0; j < cols; ++j) x(i, j) = (j % 3 == 0 ? f : 0.0) + g(rng) * (1.0 + j);
  }
  return x;
}

double max_abs(const Matrix& a, const Matrix& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

void expect_near(const PcaResult& a, const PcaResult& b, double tol) {
  ASSERT_EQ(a.kept_columns, b.kept_columns);
  EXPECT_LE(max_abs(a.correlation, b.correlation), tol);
  EXPECT_LE(max_abs(a.loadings_percent, b.loadings_percent), tol);
  for (std::size_t k = 0; k < a.eigenvalues.size(); ++k) {
    EXPECT_NEAR(a.eigenvalues[k], b.eigenvalues[k], tol);
    EXPECT_NEAR(a.variance_percent[k], b.variance_percent[k], tol);
  }
}

}  // namespace

TEST(ZScore, TwoPointColumn) {
  Matrix x(2, 2);
  x(0, 0) = 1;
  x(1, 0) = 3;
  x(0, 1) = x(1, 1) = 7;
  const auto z = zscore(x);
  EXPECT_EQ(z.kept, (std::vector<std::size_t>{0}));
  EXPECT_EQ(z.dropped, (std::vector<std::size_t>{1}));
  EXPECT_EQ(z.values(0, 0), -1.0);
  EXPECT_EQ(z.values(1, 0), 1.0);
}

TEST(ZScore, KeptColumnsAreStandard) {
  std::mt19937_64 rng(1);
  const auto z = zscore(random_matrix(rng, 200, 14));
  for (std::size_t j = 0; j < z.kept.size(); ++j) {
    double mu = 0, ss = 0;
    for (std::size_t i = 0; i < 200; ++i) mu += z.values(i, j) / 200;
    for (std::size_t i = 0; i < 200; ++i) ss += (z.values(i, j) - mu) * (z.values(i, j) - mu) / 200;
    EXPECT_LE(std::abs(mu), 1e-12);
    EXPECT_LE(std::abs(std::sqrt(ss) - 1), 1e-12);
  }
}

TEST(ZScore, Errors) {
  EXPECT_THROW(zscore(Matrix(1, 3)), ContractError);
  EXPECT_THROW(zscore(Matrix(4, 3, 2.0)), ContractError);
}

TEST(Jacobi, ResidualsOrthonormalityAndReconstruction) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto r = pca(random_matrix(rng, 200, 14));
    const auto J = r.eigenvalues.size();
    const auto& C = r.correlation;
    const auto& V = r.eigenvectors;
    double trace = 0;
    for (std::size_t k = 0; k < J; ++k) {
      trace += r.eigenvalues[k];
      if (k > 0) {
        EXPECT_GE(r.eigenvalues[k - 1], r.eigenvalues[k]);
      }
      double res = 0;
      for (std::size_t i = 0; i < J; ++i) {
        double cv = 0;
        for (std::size_t j = 0; j < J; ++j) cv += C(i, j) * V(j, k);
        res += (cv - r.eigenvalues[k] * V(i, k)) * (cv - r.eigenvalues[k] * V(i, k));
      }
      EXPECT_LE(std::sqrt(res), 1e-8);
      for (std::size_t l = 0; l < J; ++l) {
        double dot = 0;
        for (std::size_t i = 0; i < J; ++i) dot += V(i, k) * V(i, l);
        EXPECT_NEAR(dot, k == l ? 1.0 : 0.0, 1e-9);
      }
    }
    EXPECT_NEAR(trace, static_cast<double>(J), 1e-9);
    for (std::size_t i = 0; i < J; ++i) {
      EXPECT_NEAR(C(i, i), 1.0, 1e-12);
      for (std::size_t j = 0; j < J; ++j) {
        EXPECT_EQ(C(i, j), C(j, i));
        double rec = 0;
        for (std::size_t k = 0; k < J; ++k) rec += V(i, k) * r.eigenvalues[k] * V(j, k);
        EXPECT_NEAR(rec, C(i, j), 1e-8);
      }
    }
  }
}

TEST(Jacobi, SignConvention) {
  std::mt19937_64 rng(3);
  const auto r = pca(random_matrix(rng, 50, 6));
  for (std::size_t k = 0; k < 6; ++k) {
    double peak = 0, at = 0;
    for (std::size_t j = 0; j < 6; ++j)
      if (std::abs(r.eigenvectors(j, k)) > peak) {
        peak = std::abs(r.eigenvectors(j, k));
        at = r.eigenvectors(j, k);
      }
    EXPECT_GT(at, 0.0);
  }
}

TEST(Jacobi, NoConvergenceThrows) {
  Matrix a(3, 3, 1.0);
  a(0, 1) = a(1, 0) = 0.3;
  EXPECT_THROW(jacobi_eigen(a, 1e-12, 0), NumericalError);
}

TEST(Pca, PerfectlyCorrelatedPair) {
  Matrix x(5, 2);
  for (std::size_t i = 0; i < 5; ++i) {
    x(i, 0) = static_cast<double>(i * i);
    x(i, 1) = 3.0 * x(i, 0) + 1.0;
  }
  const auto r = pca(x);
  EXPECT_NEAR(r.variance_percent[0], 100.0, 1e-9);
  EXPECT_NEAR(r.variance_percent[1], 0.0, 1e-9);
  EXPECT_NEAR(r.loadings_percent(0, 0), 50.0, 1e-9);
  EXPECT_NEAR(r.loadings_percent(1, 0), 50.0, 1e-9);
}

TEST(Pca, UncorrelatedColumnsShareVarianceEqually) {
  // Rows of a 4-point two-factor design: columns have zero correlation.
  Matrix x(4, 2);
  const double v[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 2; ++j) x(i, j) = v[i][j];
  const auto r = pca(x);
  EXPECT_NEAR(r.variance_percent[0], 50.0, 1e-12);
  EXPECT_NEAR(r.variance_percent[1], 50.0, 1e-12);
}

TEST(Pca, PercentagesScaleAndRowOrderInvariance) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_matrix(rng, 120, 14);
    const auto r = pca(x);
    for (std::size_t k = 0; k < 14; ++k) {
      double col = 0;
      for (std::size_t j = 0; j < 14; ++j) col += r.loadings_percent(j, k);
      EXPECT_NEAR(col, 100.0, 1e-9);
    }
    EXPECT_NEAR(std::accumulate(r.variance_percent.begin(), r.variance_percent.end(), 0.0), 100.0, 1e-9);
    auto scaled = x;
    for (std::size_t j = 0; j < 14; ++j) {
      const double c = scale(rng);
      for (std::size_t i = 0; i < 120; ++i) scaled(i, j) *= c;
    }
    expect_near(pca(scaled), r, 1e-9);
    Matrix reversed(120, 14);
    for (std::size_t i = 0; i < 120; ++i)
      for (std::size_t j = 0; j < 14; ++j) reversed(i, j) = x(119 - i, j);
    expect_near(pca(reversed), r, 1e-9);
  }
}

TEST(Aggregate, SingleResult) {
  std::mt19937_64 rng(5);
  const std::vector<PcaResult> one = {pca(random_matrix(rng, 40, 5))};
  const auto agg = aggregate(one);
  EXPECT_EQ(agg.n_snapshots, 1u);
  EXPECT_EQ(agg.n_components, 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(agg.variance_mean[k], one[0].variance_percent[k]);
    EXPECT_EQ(agg.variance_stddev[k], 0.0);
    for (std::size_t j = 0; j < 5; ++j) {
      EXPECT_EQ(agg.loading_mean(j, k), one[0].loadings_percent(j, k));
      EXPECT_EQ(agg.loading_stddev(j, k), 0.0);
    }
  }
  EXPECT_THROW(aggregate(std::vector<PcaResult>{}), ContractError);
}

TEST(Aggregate, MeansDeviationsAndExclusion) {
  PcaResult a, b, c;
  a.kept_columns = b.kept_columns = {0, 1};
  c.kept_columns = {1};
  a.loadings_percent = Matrix(2, 2, 50.0);
  b.loadings_percent = Matrix(2, 2, 50.0);
  a.loadings_percent(0, 0) = 70;
  a.loadings_percent(1, 0) = 30;
  a.variance_percent = {80, 20};
  b.variance_percent = {60, 40};
  c.loadings_percent = Matrix(1, 1, 100.0);
  c.variance_percent = {100};
  const std::vector<PcaResult> all = {a, c, b};
  const auto agg = aggregate(all);
  EXPECT_EQ(agg.excluded, (std::vector<std::size_t>{1}));
  EXPECT_EQ(agg.n_snapshots, 2u);
  EXPECT_EQ(agg.n_components, 2u);
  EXPECT_DOUBLE_EQ(agg.variance_mean[0], 70.0);
  EXPECT_DOUBLE_EQ(agg.variance_stddev[0], 10.0);
  EXPECT_DOUBLE_EQ(agg.loading_mean(0, 0), 60.0);
  EXPECT_DOUBLE_EQ(agg.loading_stddev(0, 0), 10.0);
  EXPECT_DOUBLE_EQ(agg.loading_stddev(0, 1), 0.0);

  const std::vector<std::string_view> names = {"x", "y", "w"};
  std::ostringstream out;
  write_loadings_csv(agg, names, out);
  EXPECT_EQ(out.str(),
            "metric,pc1_mean,pc1_std,pc2_mean,pc2_std\n"
            "x,60,10,50,0\n"
            "y,40,10,50,0\n"
            "w,NA,NA,NA,NA\n"
            "lambda,70,10,30,10\n");
}

TEST(RankCorrelations, LinearReversedAndTies) {
  const std::vector<double> x = {1, 4, 2, 8, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(2 * v + 1);
  auto r = rank_correlations(x, y);
  EXPECT_NEAR(r.pearson, 1.0, 1e-15);
  EXPECT_NEAR(r.spearman, 1.0, 1e-15);
  std::vector<double> neg;
  for (double v : x) neg.push_back(-v * v);
  EXPECT_NEAR(rank_correlations(x, neg).spearman, -1.0, 1e-15);
  // Mid ranks 1, 2.5, 2.5, 4 against 1..4: 4.5 / sqrt(4.5 * 5).
  r = rank_correlations(std::vector<double>{1, 2, 2, 3}, std::vector<double>{1, 2, 3, 4});
  EXPECT_NEAR(r.spearman, 4.5 / std::sqrt(22.5), 1e-15);
  EXPECT_THROW(rank_correlations(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), ContractError);
  EXPECT_THROW(rank_correlations(std::vector<double>{1, 2}, std::vector<double>{1, 2}), ContractError);
}

TEST(Pca, MetricsMatrixOfRing) {
  // A directed ring plus chords: every centrality column varies.
  std::vector<std::tuple<std::string, std::string, std::uint64_t>> e;
  for (int i = 0; i < 12; ++i) e.emplace_back("v" + std::to_string(i), "v" + std::to_string((i + 1) % 12), 1 + i % 3);
  for (int i = 0; i < 12; i += 3) e.emplace_back("v" + std::to_string(i), "v" + std::to_string((i + 5) % 12), 2);
  const auto r = pca(metrics_matrix(InteractionNetwork::from_edges({}, e)));
  EXPECT_NEAR(std::accumulate(r.variance_percent.begin(), r.variance_percent.end(), 0.0), 100.0, 1e-9);
  EXPECT_LE(r.kept_columns.size(), 14u);
}
