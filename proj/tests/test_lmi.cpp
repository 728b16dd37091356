#include <doctest.h>

#include <random>

#include "delaysync/lmi_builder.hpp"
#include "test_support.hpp"

using delaysync::Complex;

namespace {

Eigen::MatrixXd random_spd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  Eigen::MatrixXd M(n, n);
  for (auto& v : M.reshaped()) v = N(rng);
  return M * M.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
}

Eigen::MatrixXd random_matrix(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  Eigen::MatrixXd M(r, c);
  for (auto& v : M.reshaped()) v = N(rng);
  return M;
}

}  // namespace

TEST_CASE("realification preserves definiteness and doubles eigenvalues") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 6;
    Eigen::MatrixXcd H = testing::random_hermitian(n, rng);
    if (trial % 3 == 0) {
      const double shift = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(H).eigenvalues().maxCoeff();
      H -= (shift + 0.5) * Eigen::MatrixXcd::Identity(n, n);
    }
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(H).eigenvalues();
    const Eigen::MatrixXd R = delaysync::realify(H);
    REQUIRE(R.rows() == 2 * n);
    CHECK((R - R.transpose()).norm() < 1e-14);
    const Eigen::VectorXd er = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(R).eigenvalues();
    for (int k = 0; k < n; ++k) {
      CHECK(er(2 * k) == doctest::Approx(ev(k)).epsilon(1e-10));
      CHECK(er(2 * k + 1) == doctest::Approx(ev(k)).epsilon(1e-10));
    }
    CHECK((ev.maxCoeff() < 0) == (er.maxCoeff() < 0));
  }
}

TEST_CASE("realification of a small Hermitian example") {
  Eigen::MatrixXcd H(2, 2);
  H << Complex(-2, 0), Complex(0, 1), Complex(0, -1), Complex(-2, 0);
  const Eigen::VectorXd er =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(delaysync::realify(H)).eigenvalues();
  CHECK(er(0) == doctest::Approx(-3.0));
  CHECK(er(1) == doctest::Approx(-3.0));
  CHECK(er(2) == doctest::Approx(-1.0));
  CHECK(er(3) == doctest::Approx(-1.0));
}

TEST_CASE("stability matrix layout") {
  const auto model = testing::oscillator();
  const Eigen::MatrixXd Ad = model.delay_matrix(testing::reference_gain());
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd P = random_spd(2, rng), S = random_spd(2, rng), R = random_spd(2, rng);
  const Complex s(2.5, 0.866);
  const double h = 0.4;
  const Eigen::MatrixXcd M = delaysync::stability_matrix(model, Ad, s, h, P, S, R);
  REQUIRE(M.rows() == 6);
  CHECK((M - M.adjoint()).norm() < 1e-13);
  const Eigen::MatrixXd& A = model.A;
  CHECK((M.block(0, 0, 2, 2).real() - (A.transpose() * P + P * A + S - R)).norm() < 1e-13);
  CHECK((M.block(0, 2, 2, 2) - (s * (P * Ad).cast<Complex>() + R.cast<Complex>())).norm() < 1e-13);
  CHECK((M.block(0, 4, 2, 2).real() - h * A.transpose() * R).norm() < 1e-13);
  CHECK((M.block(2, 2, 2, 2).real() + S + R).norm() < 1e-13);
  CHECK((M.block(2, 4, 2, 2) - std::conj(s) * h * (Ad.transpose() * R).cast<Complex>()).norm() <
        1e-13);
  CHECK((M.block(4, 4, 2, 2).real() + R).norm() < 1e-13);

  // Schur complement with respect to -R gives the familiar delay-free
  // Lyapunov form at h = 0.
  const Eigen::MatrixXcd M0 = delaysync::stability_matrix(model, Ad, s, 0.0, P, S, R);
  CHECK(M0.block(0, 4, 4, 2).norm() == 0.0);
}

TEST_CASE("extracted affine forms reproduce the builders") {
  const auto model = testing::oscillator();
  const Eigen::MatrixXd Ad = model.delay_matrix(testing::reference_gain());
  std::mt19937_64 rng(13);
  const Complex s(1.2, -0.7);

  const auto lmi = delaysync::stability_lmi(model, Ad, s, 0.3);
  CHECK(lmi.num_variables() == 9);
  CHECK(lmi.constraint.dim() == 12);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Eigen::MatrixXd> v{random_spd(2, rng), random_spd(2, rng), random_spd(2, rng)};
    const Eigen::VectorXd x = lmi.pack(v);
    const auto back = lmi.unpack(x);
    for (int b = 0; b < 3; ++b) CHECK((back[b] - v[b]).norm() < 1e-15);
    const Eigen::MatrixXd ref =
        delaysync::realify(delaysync::stability_matrix(model, Ad, s, 0.3, v[0], v[1], v[2]));
    CHECK((lmi.constraint.evaluate(x) - ref).norm() < 1e-11 * (1.0 + ref.norm()));
    CHECK((lmi.constraint_at(v) - ref).norm() < 1e-11 * (1.0 + ref.norm()));
  }

  const auto des = delaysync::descriptor_design_lmi(model, s, 0.6, 0.1);
  CHECK(des.num_variables() == 3 * 3 + 3 + 2);
  CHECK(des.blocks[des.block_index("Xbar")].kind == delaysync::BlockKind::kRectangular);
  CHECK(des.blocks[des.block_index("Ybar")].kind == delaysync::BlockKind::kSymmetric);
  CHECK_THROWS_AS(des.block_index("nope"), std::out_of_range);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd Y = random_matrix(2, 2, rng);
    Y = (Y + Y.transpose()).eval();
    std::vector<Eigen::MatrixXd> v{random_spd(2, rng), random_spd(2, rng), random_spd(2, rng), Y,
                                   random_matrix(1, 2, rng)};
    const Eigen::MatrixXd ref = delaysync::realify(
        delaysync::descriptor_matrix(model, s, 0.6, 0.1, v[0], v[1], v[2], v[3], v[4]));
    CHECK((des.constraint.evaluate(des.pack(v)) - ref).norm() < 1e-11 * (1.0 + ref.norm()));
  }
}

TEST_CASE("descriptor matrix is Hermitian and reduces to a Lyapunov block") {
  const auto model = testing::oscillator();
  std::mt19937_64 rng(17);
  const Eigen::MatrixXd Pb = random_spd(2, rng), Sb = random_spd(2, rng), Rb = random_spd(2, rng);
  Eigen::MatrixXd Yb = random_spd(2, rng);
  const Eigen::MatrixXd Xb = random_matrix(1, 2, rng);
  const Complex s(0.8, 0.3);
  const auto M = delaysync::descriptor_matrix(model, s, 0.5, 0.2, Pb, Sb, Rb, Yb, Xb);
  CHECK((M - M.adjoint()).norm() < 1e-13);
  const Eigen::MatrixXd& A = model.A;
  CHECK((M.block(0, 0, 2, 2).real() - (Yb * A.transpose() + A * Yb + Sb - Rb)).norm() < 1e-13);
  CHECK((M.block(4, 4, 2, 2).real() - (-0.4 * Yb + 0.25 * Rb)).norm() < 1e-13);
  CHECK_THROWS_AS(delaysync::descriptor_design_lmi(model, s, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(delaysync::descriptor_design_lmi(model, s, -1.0, 0.1), std::invalid_argument);
}

TEST_CASE("common-block stacking") {
  const auto model = testing::oscillator();
  const std::vector<delaysync::LmiProblem> parts{
      delaysync::descriptor_design_lmi(model, {1.0, 0.0}, 0.6, 0.1),
      delaysync::descriptor_design_lmi(model, {2.0, 0.5}, 0.6, 0.1)};
  const auto stacked = delaysync::common_blocks_problem(parts);
  CHECK(stacked.num_variables() == parts[0].num_variables());
  CHECK(stacked.constraint.dim() == 2 * parts[0].constraint.dim());
  std::mt19937_64 rng(19);
  const Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(stacked.num_variables(), [&] {
    return std::normal_distribution<double>()(rng);
  });
  const Eigen::MatrixXd F = stacked.constraint.evaluate(x);
  const int d = parts[0].constraint.dim();
  CHECK((F.topLeftCorner(d, d) - parts[0].constraint.evaluate(x)).norm() < 1e-12);
  CHECK((F.bottomRightCorner(d, d) - parts[1].constraint.evaluate(x)).norm() < 1e-12);
  CHECK(F.topRightCorner(d, d).norm() == 0.0);

  const std::vector<delaysync::LmiProblem> mixed{
      parts[0], delaysync::stability_lmi(model, model.delay_matrix(testing::reference_gain()),
                                         {1.0, 0.0}, 0.6)};
  CHECK_THROWS_AS(delaysync::common_blocks_problem(mixed), std::invalid_argument);
  CHECK_THROWS_AS(delaysync::common_blocks_problem(std::span<const delaysync::LmiProblem>{}),
                  std::invalid_argument);
}

TEST_CASE("model validation and margin") {
  CHECK_THROWS_AS(delaysync::AgentModel::make(Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Zero(2, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(delaysync::AgentModel::make(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(3, 1)),
                  std::invalid_argument);
  const auto model = testing::oscillator();
  CHECK(delaysync::feasibility_margin(model) == doctest::Approx(1e-7));
  const auto big = delaysync::AgentModel::make(50.0 * model.A, model.B);
  CHECK(delaysync::feasibility_margin(big) == doctest::Approx(5e-6));
  CHECK_THROWS_AS(delaysync::stability_lmi(model, Eigen::MatrixXd::Zero(3, 3), {1, 0}, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(delaysync::stability_lmi(model, Eigen::MatrixXd::Zero(2, 2), {1, 0}, -0.1),
                  std::invalid_argument);
}

TEST_CASE("real Hermitian input realifies to a block diagonal") {
  std::mt19937_64 rng(43);
  const Eigen::MatrixXd S = random_spd(3, rng);
  const Eigen::MatrixXd R = delaysync::realify(Eigen::MatrixXcd(S.cast<Complex>()));
  CHECK((R.topLeftCorner(3, 3) - S).norm() == 0.0);
  CHECK((R.bottomRightCorner(3, 3) - S).norm() == 0.0);
  CHECK(R.topRightCorner(3, 3).norm() == 0.0);
}

TEST_CASE("singleton stacking returns the same problem") {
  const auto model = testing::oscillator();
  const std::vector<delaysync::LmiProblem> one{
      delaysync::descriptor_design_lmi(model, {1.5, 0.0}, 0.6, 0.1)};
  const auto s = delaysync::common_blocks_problem(one);
  CHECK(s.num_variables() == one[0].num_variables());
  CHECK((s.constraint.constant - one[0].constraint.constant).norm() == 0.0);
  for (std::size_t k = 0; k < s.constraint.coefficients.size(); ++k) {
    CHECK((s.constraint.coefficients[k] - one[0].constraint.coefficients[k]).norm() == 0.0);
  }
}

TEST_CASE("expanded real form agrees with the embedding up to congruence") {
  const auto model = testing::oscillator();
  const Eigen::MatrixXd& A = model.A;
  const Eigen::MatrixXd Ad = model.delay_matrix(testing::reference_gain());
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd P = random_spd(2, rng), S = random_spd(2, rng), R = random_spd(2, rng);
    const double g = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
    const double b = std::uniform_real_distribution<double>(-1.5, 1.5)(rng);
    const double h = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(2, 2);

    // Real part and the beta-dependent coupling written out block by block.
    Eigen::MatrixXd Re(6, 6), Im(6, 6);
    Re << A.transpose() * P + P * A + S - R, g * P * Ad + R, h * A.transpose() * R,
        (g * P * Ad + R).transpose(), -S - R, g * h * Ad.transpose() * R,
        (h * A.transpose() * R).transpose(), (g * h * Ad.transpose() * R).transpose(), -R;
    Im << Z, b * P * Ad, Z,
        -b * Ad.transpose() * P, Z, -b * h * Ad.transpose() * R,
        Z, b * h * R * Ad, Z;
    Eigen::MatrixXd expanded(12, 12);
    expanded << Re, Im, Im.transpose(), Re;
    CHECK((expanded - expanded.transpose()).norm() < 1e-12);

    Eigen::VectorXd j(12);
    j << Eigen::VectorXd::Ones(6), -Eigen::VectorXd::Ones(6);
    const Eigen::MatrixXd J = j.asDiagonal();
    const Eigen::MatrixXd embedded =
        delaysync::realify(delaysync::stability_matrix(model, Ad, {g, b}, h, P, S, R));
    CHECK((J * embedded * J - expanded).norm() < 1e-12 * (1.0 + expanded.norm()));
    const Eigen::VectorXd e1 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(embedded).eigenvalues();
    const Eigen::VectorXd e2 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(expanded).eigenvalues();
    CHECK((e1 - e2).norm() < 1e-10 * (1.0 + e1.norm()));
  }
}
