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

TEST(Gradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(17);
  for (int n : {2, 3}) {
    const auto c = build_layered_ansatz(n, "B1B2B2");
    const auto h = build_hamiltonian(HamiltonianKind::chain, n, 1.0, std::uint64_t{4});
    for (int t = 0; t < 5; ++t) {
      const Vector th = oracle::random_vector(c.parameter_count(), rng, -3.14, 3.14);
      const auto m = estimate_metric(c, th, h);
      const Vector fd = oracle::fd_gradient(c, th, h);
      EXPECT_LT((m.grad - fd).cwiseAbs().maxCoeff(), 1e-6);
      EXPECT_LT((exact_gradient(c, th, h) - m.grad).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_NEAR(m.energy, oracle::energy(c, th, h), 1e-12);
    }
  }
}

TEST(Gradient, VarianceIsSumOfSingleTermVariances) {
  std::mt19937_64 rng(2);
  const auto c = build_layered_ansatz(3, "B1B2");
  const auto h = build_hamiltonian(HamiltonianKind::quadratic, 3, 0.6, std::uint64_t{9});
  const Vector th = oracle::random_vector(c.parameter_count(), rng, -3.14, 3.14);
  const Matrix mel = gradient_matrix_elements(c, th, h);
  ASSERT_EQ(mel.cols(), static_cast<Eigen::Index>(h.size()));
  EXPECT_LE(mel.cwiseAbs().maxCoeff(), 1.0 + 1e-12);
  const auto [g, var] = gradient_with_variance(mel, h);
  for (Eigen::Index k = 0; k < mel.rows(); ++k) {
    double gk = 0, vk = 0;
    for (std::size_t l = 0; l < h.size(); ++l) {
      const double hl = h[l].coefficient, x = mel(k, static_cast<Eigen::Index>(l));
      gk -= hl * x;
      vk += hl * hl * (1 - x * x);
    }
    EXPECT_NEAR(g[k], gk, 1e-14);
    EXPECT_NEAR(var[k], vk, 1e-14);
  }
}

TEST(Fisher, MatchesFiniteDifferenceStateProducts) {
  std::mt19937_64 rng(23);
  for (int n : {2, 3}) {
    const auto c = build_layered_ansatz(n, "B1B2");
    const Vector th = oracle::random_vector(c.parameter_count(), rng, -3.14, 3.14);
    const auto comp = fisher_abc(c, th);
    EXPECT_LT((comp.fisher - oracle::fd_fisher(c, th)).cwiseAbs().maxCoeff(), 1e-6) << n;
  }
}

TEST(Fisher, MatchesFidelitySecondDerivative) {
  std::mt19937_64 rng(29);
  const auto c = build_layered_ansatz(2, "B1B2");
  const Vector th = oracle::random_vector(c.parameter_count(), rng, -3.14, 3.14);
  const auto comp = fisher_abc(c, th);
  // O(step^2) truncation; step 1e-4 leaves ~1e-8.
  EXPECT_LT((comp.fisher - oracle::fidelity_fisher(c, th)).cwiseAbs().maxCoeff(), 1e-5);
}

// Frozen oracle values: 2-qubit B1B2 circuit at theta = (0.1, 0.2, ..., 0.8),
// computed once from dense matrices and finite differences.
TEST(Fisher, FrozenTwoQubitValues) {
  const auto c = build_layered_ansatz(2, "B1B2");
  Vector th(8);
  th << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8;
  const auto comp = fisher_abc(c, th);
  // clang-format off
  const Matrix expected = (Matrix(8, 8) <<
      1.000000000012, -0.000000000003, 0.000000000002, 0.0, 0.631376224123, 0.000000000013, 0.671212166157, 0.000000000004,
      -0.000000000003, 0.999999999985, 0.000000000001, 0.000000000005, -0.000000000013, 0.640999282147, -0.000000000001, 0.631251496936,
      0.000000000002, 0.000000000001, 0.049042832944, 0.049042832945, 0.074460894172, 0.148177799708, -0.049259644558, -0.080319414669,
      0.0, 0.000000000005, 0.049042832945, 0.049042832946, 0.074460894178, 0.148177799712, -0.049259644565, -0.080319414666,
      0.631376224123, -0.000000000013, 0.074460894172, 0.074460894178, 0.994169637748, 0.008231368644, 0.040648286233, 0.008025400740,
      0.000000000013, 0.640999282147, 0.148177799708, 0.148177799712, 0.008231368644, 0.976910989169, 0.008405330735, 0.100058181244,
      0.671212166157, -0.000000000001, -0.049259644558, -0.049259644565, 0.040648286233, 0.008405330735, 0.716607115574, -0.004051349739,
      0.000000000004, 0.631251496936, -0.080319414669, -0.080319414666, 0.008025400740, 0.100058181244, -0.004051349739, 0.566389408877).finished();
  // clang-format on
  EXPECT_LT((comp.fisher - expected).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Fisher, StructuralProperties) {
  std::mt19937_64 rng(31);
  const auto c = build_layered_ansatz(3, "B1B2B2");
  for (int t = 0; t < 20; ++t) {
    const Vector th = oracle::random_vector(c.parameter_count(), rng, -3.14, 3.14);
    const auto comp = fisher_abc(c, th);
    const Matrix& f = comp.fisher;
    EXPECT_LT((f - f.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE(f.cwiseAbs().maxCoeff(), 1.0 + 1e-12);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(f).eigenvalues().minCoeff(), -1e-12);
    // Pauli generators: D_k^dag D_k = Id and <D_k|psi> is real.
    for (Eigen::Index k = 0; k < f.rows(); ++k) EXPECT_NEAR(comp.a(k, k), 1.0, 1e-13);
    EXPECT_LT(comp.c.cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(FisherVariance, PureAbcFormula) {
  Matrix a(2, 2);
  a << 1.0, 0.3, 0.3, 1.0;
  Vector b(2), cc(2);
  b << 0.5, -0.2;
  cc << 0.0, 0.0;
  const Matrix v = fisher_variance(a, b, cc);
  EXPECT_NEAR(v(0, 0), 0.0 + 2 * (1 - 0.25) * 0.25, 1e-15);
  EXPECT_NEAR(v(0, 1), (1 - 0.09) + (1 - 0.25) * 0.04 + (1 - 0.04) * 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(v(0, 1), v(1, 0));
}

TEST(FisherVariance, SwapTestIsBinomial) {
  Matrix f(2, 2);
  f << 0.9, -0.4, -0.4, 0.5;
  const Matrix v = fisher_swap_variance(f);
  EXPECT_NEAR(v(0, 1), 1 - 0.16, 1e-15);
  EXPECT_NEAR(v(1, 1), 1 - 0.25, 1e-15);
  f(0, 0) = 1.1;
  EXPECT_THROW(fisher_swap_variance(f), Error);
}

TEST(EstimateMetric, ProtocolSelectsVariance) {
  std::mt19937_64 rng(3);
  const auto c = build_layered_ansatz(2, "B2");
  const auto h = build_hamiltonian(HamiltonianKind::chain, 2, 1.0, std::uint64_t{1});
  const Vector th = oracle::random_vector(6, rng, -3.14, 3.14);
  const auto pure = estimate_metric(c, th, h, FisherProtocol::pure_abc);
  const auto swap = estimate_metric(c, th, h, FisherProtocol::swap_test);
  EXPECT_EQ(pure.fisher, swap.fisher);
  EXPECT_LT((swap.var_fisher - fisher_swap_variance(swap.fisher)).cwiseAbs().maxCoeff(), 1e-15);
  const auto& k = pure.components;
  EXPECT_LT((pure.var_fisher - fisher_variance(k.a, k.b, k.c)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(pure.parameter_count(), 6);
  EXPECT_THROW(estimate_metric(c, th, build_hamiltonian(HamiltonianKind::chain, 3, 1.0, std::uint64_t{1})),
               DimensionError);
}

TEST(EstimateMetric, WorkerCountDoesNotChangeResult) {
  std::mt19937_64 rng(6);
  const auto c = build_layered_ansatz(4, "B1B2B2");
  const auto h = build_hamiltonian(HamiltonianKind::chain, 4, 1.0, std::uint64_t{1});
  const Vector th = oracle::random_vector(c.parameter_count(), rng, -3.14, 3.14);
  const auto one = estimate_metric(c, th, h, FisherProtocol::pure_abc, 1);
  const auto many = estimate_metric(c, th, h, FisherProtocol::pure_abc, 5);
  EXPECT_EQ(one.fisher, many.fisher);
  EXPECT_EQ(one.grad, many.grad);
  EXPECT_EQ(one.var_fisher, many.var_fisher);
  EXPECT_EQ(one.var_grad, many.var_grad);
}

}  // namespace
}  // namespace shotcost
