// Copyright 2026 The shotcost Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

namespace shotcost {
namespace {

// Random symmetric PSD matrix with entries bounded like a Fisher matrix.
Matrix random_psd(Eigen::Index nu, std::mt19937_64& rng) {
  const Matrix x = Matrix::NullaryExpr(nu, nu, [&] { return std::normal_distribution<double>()(rng); });
  Matrix f = x * x.transpose();
  return f / f.cwiseAbs().maxCoeff();
}

// v(F, g) = (F + eta Id)^-1 g with a dense LU solve.
Vector solve(const Matrix& f, const Vector& g, double eta) {
  return (f + eta * Matrix::Identity(f.rows(), f.cols())).partialPivLu().solve(g);
}

TEST(RegularizedInverse, MatchesDenseInverse) {
  std::mt19937_64 rng(1);
  for (double eta : {1e-1, 1e-3}) {
    const Matrix f = random_psd(5, rng);
    const auto inv = regularized_inverse(f, eta);
    const Matrix dense = (f + eta * Matrix::Identity(5, 5)).inverse();
    EXPECT_LT((inv.matrix - dense).cwiseAbs().maxCoeff(), 1e-9 / eta);
    EXPECT_NEAR(inv.sigma_max(), Eigen::JacobiSVD<Matrix>(dense).singularValues()[0], 1e-8 / eta);
  }
}

TEST(RegularizedInverse, Rejections) {
  Matrix f = Matrix::Identity(2, 2);
  EXPECT_THROW(regularized_inverse(f, -0.1), InvariantError);
  f(0, 1) = 0.5;
  EXPECT_THROW(regularized_inverse(f, 0.1), InvariantError);
  EXPECT_THROW(regularized_inverse(Matrix::Zero(2, 2), 0.0), SingularityError);
  EXPECT_THROW(regularized_inverse(Matrix::Zero(2, 3), 0.1), DimensionError);
}

TEST(RegularizedInverse, SpectralBoundsOnFisherMatrices) {
  std::mt19937_64 rng(2);
  const auto c = build_layered_ansatz(3, "B1B2");
  for (double eta : {1e-1, 1e-3, 1e-5}) {
    for (int t = 0; t < 20; ++t) {
      const Vector th = oracle::random_vector(c.parameter_count(), rng, -3.14, 3.14);
      const auto inv = regularized_inverse(fisher_abc(c, th).fisher, eta);
      const auto check = check_spectral_bounds(inv);
      EXPECT_TRUE(check.ok()) << "eta=" << eta << " smax=" << inv.sigma_max() << " smin=" << inv.sigma_min();
      EXPECT_LE(inv.sigma_max(), 1.0 / eta * (1 + 1e-9));
      EXPECT_GE(inv.sigma_min(), 1.0 / (c.parameter_count() + eta) * (1 - 1e-9));
    }
  }
}

TEST(MatrixMeasures, SpcAndCnd) {
  Matrix m(2, 2);
  m << 3, 0, 0, 1;
  EXPECT_DOUBLE_EQ(spc(m), 5.0);
  EXPECT_DOUBLE_EQ(cnd(m), 3.0);
  EXPECT_TRUE(std::isinf(cnd(Matrix::Zero(2, 2))));
  // Spc is the mean squared singular value.
  std::mt19937_64 rng(3);
  const Matrix r = Matrix::NullaryExpr(4, 4, [&] { return std::normal_distribution<double>()(rng); });
  const Vector s = Eigen::JacobiSVD<Matrix>(r).singularValues();
  EXPECT_NEAR(spc(r), s.squaredNorm() / 4, 1e-12);
}

// The coefficients are squared norms of the first-order response of v to
// each measured input. Finite differences of v give that response directly.
TEST(PropagationCoefficients, MatchFiniteDifferenceResponse) {
  std::mt19937_64 rng(4);
  const Eigen::Index nu = 4;
  const double eta = 0.2, h = 1e-6;
  const Matrix f = random_psd(nu, rng);
  const Vector g = oracle::random_vector(nu, rng, -1, 1);
  const auto pc = propagation_coefficients(regularized_inverse(f, eta), g);
  const Vector v = solve(f, g, eta);
  EXPECT_LT((pc.v - v).norm(), 1e-12);

  auto response_f = [&](Eigen::Index k, Eigen::Index l, bool pair) {
    Matrix fp = f, fm = f;
    fp(k, l) += h;
    fm(k, l) -= h;
    if (pair && k != l) {
      fp(l, k) += h;
      fm(l, k) -= h;
    }
    return Vector((solve(fp, g, eta) - solve(fm, g, eta)) / (2 * h));
  };
  for (Eigen::Index k = 0; k < nu; ++k) {
    Vector gp = g, gm = g;
    gp[k] += h;
    gm[k] -= h;
    const Vector dg = (solve(f, gp, eta) - solve(f, gm, eta)) / (2 * h);
    EXPECT_NEAR(pc.b[k], dg.squaredNorm(), 1e-6 * pc.b[k]);
    for (Eigen::Index l = 0; l < nu; ++l) {
      EXPECT_NEAR(pc.a(k, l), response_f(k, l, false).squaredNorm(), 1e-6 * (1 + pc.a(k, l)));
      if (l < k) {
        EXPECT_NEAR(pc.a_sym(k, l), response_f(k, l, true).squaredNorm(), 1e-6 * (1 + pc.a_sym(k, l)));
      } else if (l > k) {
        EXPECT_EQ(pc.a_sym(k, l), 0.0);
      }
    }
    EXPECT_EQ(pc.a_sym(k, k), pc.a(k, k));
  }
}

// Small Gaussian noise on every entry: Monte-Carlo mean of ||dv||^2 against
// the first-order prediction, for independent and for shared pairs.
TEST(PropagationCoefficients, MatchGaussianMonteCarlo) {
  std::mt19937_64 rng(5);
  const Eigen::Index nu = 3;
  const double eta = 0.3;
  const Matrix f = random_psd(nu, rng);
  const Vector g = oracle::random_vector(nu, rng, -1, 1);
  const auto pc = propagation_coefficients(regularized_inverse(f, eta), g);
  Matrix var_f = Matrix::NullaryExpr(nu, nu, [&] { return 1e-6 * (0.5 + std::uniform_real_distribution<double>()(rng)); });
  var_f = (0.5 * (var_f + var_f.transpose())).eval();
  const Vector var_g = oracle::random_vector(nu, rng, 0.5e-6, 1.5e-6);

  const double independent = predicted_epsilon2(pc, var_f, var_g);
  const auto [mi, si] = oracle::gaussian_propagation(f, g, eta, var_f, var_g, false, 40000, 11);
  EXPECT_NEAR(mi, independent, std::max(5 * si, 0.02 * independent));

  const Matrix ones = Matrix::Ones(nu, nu);
  const double shared = predicted_epsilon2(pc, var_f, var_g, ones, Vector::Ones(nu), true);
  const auto [ms, ss] = oracle::gaussian_propagation(f, g, eta, var_f, var_g, true, 40000, 12);
  EXPECT_NEAR(ms, shared, std::max(5 * ss, 0.02 * shared));
}

TEST(PredictedEpsilon, ShotsScaleInversely) {
  std::mt19937_64 rng(6);
  const Matrix f = random_psd(3, rng);
  const Vector g = oracle::random_vector(3, rng, -1, 1);
  const auto pc = propagation_coefficients(regularized_inverse(f, 0.1), g);
  const Matrix var_f = Matrix::Constant(3, 3, 0.7);
  const Vector var_g = Vector::Constant(3, 0.4);
  const double one = predicted_epsilon2(pc, var_f, var_g, Matrix::Ones(3, 3), Vector::Ones(3), false);
  EXPECT_NEAR(one, predicted_epsilon2(pc, var_f, var_g), 1e-12 * one);
  const double hundred =
      predicted_epsilon2(pc, var_f, var_g, Matrix::Constant(3, 3, 100), Vector::Constant(3, 100), false);
  EXPECT_NEAR(hundred, one / 100, 1e-12 * one);
  EXPECT_THROW(predicted_epsilon2(pc, var_f, var_g, Matrix::Zero(3, 3), Vector::Ones(3), false), PlanError);
  // Zero variance needs no shots.
  EXPECT_EQ(predicted_epsilon2(pc, Matrix::Zero(3, 3), Vector::Zero(3), Matrix::Zero(3, 3), Vector::Zero(3), false),
            0.0);
}

}  // namespace
}  // namespace shotcost
