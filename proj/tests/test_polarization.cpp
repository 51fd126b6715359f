#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "ghostpol/polarization.hpp"

using namespace ghostpol;
using cd = std::complex<double>;

namespace {

// Independent contraction oracle: density matrices as plain 16-element arrays,
// projections as explicit index sums. Shares nothing with the Eigen path.
using Raw = std::array<cd, 16>;

Raw raw_werner(double v) {
  Raw r{};
  for (int i = 0; i < 4; ++i) r[i * 4 + i] = (1.0 - v) / 4.0;
  r[0 * 4 + 0] += 0.5 * v;
  r[0 * 4 + 3] += 0.5 * v;
  r[3 * 4 + 0] += 0.5 * v;
  r[3 * 4 + 3] += 0.5 * v;
  return r;
}

Raw raw_of(const DensityMatrix& m) {
  Raw r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i * 4 + j] = m.matrix()(i, j);
  return r;
}

double oracle_coincidence(const Raw& rho, double ts, double tr) {
  const double u[2] = {std::cos(ts), std::sin(ts)};
  const double v[2] = {std::cos(tr), std::sin(tr)};
  cd p = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) p += u[a] * v[b] * rho[(2 * a + b) * 4 + (2 * c + d)] * u[c] * v[d];
  return p.real();
}

double oracle_singles_sample(const Raw& rho, double ts) {
  const double u[2] = {std::cos(ts), std::sin(ts)};
  cd p = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c)
      for (int k = 0; k < 2; ++k) p += u[a] * rho[(2 * a + k) * 4 + (2 * c + k)] * u[c];
  return p.real();
}

double oracle_E(const Raw& rho, double ts, double tr) {
  const double h = std::numbers::pi / 2.0;
  const double pp = oracle_coincidence(rho, ts, tr), qq = oracle_coincidence(rho, ts + h, tr + h),
               qp = oracle_coincidence(rho, ts + h, tr), pq = oracle_coincidence(rho, ts, tr + h);
  return (pp + qq - qp - pq) / (pp + qq + qp + pq);
}

constexpr double kPi = std::numbers::pi;
double rad(double deg) { return deg * kPi / 180.0; }

// Frozen from the oracle above (not from the library):
constexpr double kWernerAlignedCoinc = 0.46125;           // (1 + 0.845) / 4
constexpr double kWernerE_22_5 = 0.5975052301026327;  // 0.845 cos 45 deg

DensityMatrix random_state(std::mt19937_64& gen) {
  std::normal_distribution<double> n;
  Eigen::Matrix4cd a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = cd(n(gen), n(gen));
  Eigen::Matrix4cd rho = a * a.adjoint();
  rho /= rho.trace();
  return DensityMatrix(rho);
}

}  // namespace

TEST_CASE("oracle self-check against the frozen constants") {
  CHECK(oracle_coincidence(raw_werner(0.845), 0.3, 0.3) == doctest::Approx(kWernerAlignedCoinc).epsilon(1e-14));
  CHECK(oracle_E(raw_werner(0.845), rad(22.5), 0.0) == doctest::Approx(kWernerE_22_5).epsilon(1e-14));
}

TEST_CASE("bell_phi_plus") {
  const auto rho = bell_phi_plus();
  CHECK(rho(Basis::HH, Basis::HH).real() == 0.5);
  CHECK(rho(Basis::HH, Basis::VV).real() == 0.5);
  CHECK(std::abs(rho(Basis::HV, Basis::HV)) == 0.0);
  CHECK(rho.purity() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rho.is_physical());
  for (Arm arm : {Arm::sample, Arm::reference}) {
    const auto red = rho.reduced(arm);
    CHECK(std::abs(red(0, 0) - 0.5) < 1e-15);
    CHECK(std::abs(red(1, 1) - 0.5) < 1e-15);
    CHECK(std::abs(red(0, 1)) < 1e-15);
  }
}

TEST_CASE("werner_like") {
  CHECK((werner_like(1.0).matrix() - bell_phi_plus().matrix()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((werner_like(0.0).matrix() - 0.25 * Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(correlation_E(werner_like(0.845), Angle::degrees(22.5), Angle::degrees(0)) ==
        doctest::Approx(kWernerE_22_5).epsilon(1e-12));
  CHECK_THROWS_AS(werner_like(1.3), DomainError);
  CHECK_THROWS_AS(werner_like(-0.1), DomainError);
  CHECK_THROWS_AS(werner_like(std::nan("")), DomainError);

  for (double v = 0.0; v <= 1.0; v += 0.05) {
    const auto rho = werner_like(v);
    CHECK(rho.is_physical());
    CHECK(rho.hermiticity_error() <= 1e-12);
  }
}

TEST_CASE("werner_like also works in long double") {
  const auto rho = werner_like<long double>(0.5L);
  CHECK(std::abs(rho.trace() - 1.0L) < 1e-18L);
  CHECK(std::abs(coincidence_probability(rho, Angle::degrees(0), Angle::degrees(0)) - 0.375L) < 1e-18L);
}

TEST_CASE("polarizer and rotator matrices") {
  auto near = [](const JonesElement::Matrix& m, std::array<double, 4> e) {
    return std::abs(m(0, 0) - e[0]) < 1e-15 && std::abs(m(0, 1) - e[1]) < 1e-15 &&
           std::abs(m(1, 0) - e[2]) < 1e-15 && std::abs(m(1, 1) - e[3]) < 1e-15;
  };
  CHECK(near(polarizer(Angle::degrees(0)).matrix, {1, 0, 0, 0}));
  CHECK(near(polarizer(Angle::degrees(90)).matrix, {0, 0, 0, 1}));
  CHECK(near(polarizer(Angle::degrees(45)).matrix, {0.5, 0.5, 0.5, 0.5}));
  CHECK(polarizer(Angle::degrees(10)).kind == ElementKind::polarizer);

  CHECK(near(rotator(Angle::degrees(0)).matrix, {1, 0, 0, 1}));
  const Eigen::Vector2cd h(1.0, 0.0);
  const Eigen::Vector2cd turned = rotator(Angle::degrees(90)).matrix * h;
  CHECK(std::abs(turned(0)) < 1e-15);
  CHECK(std::abs(turned(1) - 1.0) < 1e-15);

  for (double t = -180.0; t <= 180.0; t += 17.0) {
    const auto p = polarizer(Angle::degrees(t)).matrix;
    CHECK((p * p - p).cwiseAbs().maxCoeff() <= 1e-12);
    const auto r = rotator(Angle::degrees(t)).matrix;
    CHECK((r * r.adjoint() - JonesElement::Matrix::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
    const JonesElement::Matrix composed = rotator(Angle::degrees(t)).matrix * rotator(Angle::degrees(33.0)).matrix;
    CHECK((composed - rotator(Angle::degrees(t + 33.0)).matrix).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("apply_local") {
  const auto phi = bell_phi_plus();
  CHECK((apply_local(phi, Arm::sample, identity_element()).matrix() - phi.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(apply_local(phi, Arm::sample, polarizer(Angle::degrees(0))).trace() == doctest::Approx(0.5));

  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> ang(-180.0, 180.0);
  for (int i = 0; i < 50; ++i) {
    const auto rho = random_state(gen);
    const Angle d = Angle::degrees(ang(gen));
    for (Arm arm : {Arm::sample, Arm::reference}) {
      auto back = apply_local(apply_local(rho, arm, rotator(d)), arm, rotator(-d));
      CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() <= 1e-12);

      const auto projected = apply_local(rho, arm, polarizer(d));
      CHECK(projected.hermiticity_error() <= 1e-12);
      CHECK(projected.min_eigenvalue() >= -1e-10);
      CHECK(projected.trace() <= 1.0 + 1e-12);
      const auto turned = apply_local(rho, arm, rotator(d));
      CHECK(turned.is_physical());
    }
  }
}

TEST_CASE("coincidence_probability") {
  const auto phi = bell_phi_plus();
  CHECK(coincidence_probability(phi, Angle::degrees(0), Angle::degrees(0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(coincidence_probability(phi, Angle::degrees(45), Angle::degrees(0)) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(coincidence_probability(werner_like(0.845), Angle::degrees(30), Angle::degrees(30)) ==
        doctest::Approx(kWernerAlignedCoinc).epsilon(1e-12));

  SUBCASE("Phi+ depends only on the angle difference (20x20 grid)") {
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        const double a = -90.0 + 9.3 * i, b = -90.0 + 9.1 * j;
        const double p = coincidence_probability(phi, Angle::degrees(a), Angle::degrees(b));
        const double shifted = coincidence_probability(phi, Angle::degrees(a - b), Angle::degrees(0));
        CHECK(std::abs(p - shifted) <= 1e-12);
        CHECK(std::abs(p - 0.5 * std::pow(std::cos(rad(a - b)), 2)) <= 1e-12);
        // fringe identity
        CHECK(std::abs(p - 0.25 * (1.0 + std::cos(2.0 * rad(a) - 2.0 * rad(b)))) <= 1e-12);
      }
  }

  SUBCASE("matches the contraction oracle for random states") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> ang(-180.0, 180.0);
    for (int i = 0; i < 100; ++i) {
      const auto rho = random_state(gen);
      const double a = ang(gen), b = ang(gen);
      CHECK(std::abs(coincidence_probability(rho, Angle::degrees(a), Angle::degrees(b)) -
                     oracle_coincidence(raw_of(rho), rad(a), rad(b))) <= 1e-12);
      CHECK(std::abs(singles_probability(rho, Arm::sample, Angle::degrees(a)) -
                     oracle_singles_sample(raw_of(rho), rad(a))) <= 1e-12);
    }
  }
}

TEST_CASE("rotator before the sample polarizer advances the fringe phase by 2 delta") {
  const auto phi = werner_like(0.9);
  for (double delta : {12.4, 24.8, 62.0, -30.0}) {
    const auto rho = apply_local(phi, Arm::sample, rotator(Angle::degrees(delta)));
    for (double x = -90.0; x < 90.0; x += 7.5) {
      const double p = coincidence_probability(rho, Angle::degrees(x), Angle::degrees(0));
      const double expected = 0.25 * (1.0 + 0.9 * std::cos(2.0 * rad(x) - 2.0 * rad(delta)));
      CHECK(std::abs(p - expected) <= 1e-12);
    }
  }
}

TEST_CASE("singles_probability") {
  for (double t : {0.0, 13.0, 45.0, 90.0, 171.0}) {
    CHECK(singles_probability(bell_phi_plus(), Arm::sample, Angle::degrees(t)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(singles_probability(bell_phi_plus(), Arm::reference, Angle::degrees(t)) == doctest::Approx(0.5).epsilon(1e-15));
    for (double v : {0.0, 0.3, 0.845, 1.0}) {
      CHECK(std::abs(singles_probability(werner_like(v), Arm::reference, Angle::degrees(t)) - 0.5) < 1e-12);
      CHECK(std::abs(oracle_singles_sample(raw_werner(v), rad(t)) - 0.5) < 1e-12);
    }
  }
  CHECK(singles_probability(bell_phi_plus(), Arm::sample, std::nullopt) == doctest::Approx(1.0));
}

TEST_CASE("correlation_E") {
  const auto phi = bell_phi_plus();
  CHECK(correlation_E(phi, Angle::degrees(22.5), Angle::degrees(0)) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::abs(correlation_E(werner_like(0.6), Angle::degrees(45), Angle::degrees(0))) < 1e-12);
  CHECK(correlation_E(werner_like(0.845), Angle::degrees(0), Angle::degrees(0)) == doctest::Approx(0.845).epsilon(1e-12));

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> ang(-180.0, 180.0), vis(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double a = ang(gen), b = ang(gen), v = vis(gen);
    const double e_v = correlation_E(werner_like(v), Angle::degrees(a), Angle::degrees(b));
    const double e_1 = correlation_E(phi, Angle::degrees(a), Angle::degrees(b));
    CHECK(std::abs(e_v - v * e_1) <= 1e-12);
    CHECK(std::abs(e_v - v * std::cos(2.0 * rad(a - b))) <= 1e-12);
    CHECK(std::abs(e_v - oracle_E(raw_werner(v), rad(a), rad(b))) <= 1e-12);
  }
}

TEST_CASE("joint outcome probabilities are non-negative and sum to at most one") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> ang(-180.0, 180.0);
  for (int i = 0; i < 100; ++i) {
    const auto rho = random_state(gen);
    const Angle a = Angle::degrees(ang(gen)), b = Angle::degrees(ang(gen));
    const Angle q = Angle::degrees(90);
    const double p[4] = {coincidence_probability(rho, a, b), coincidence_probability(rho, a + q, b + q),
                         coincidence_probability(rho, a + q, b), coincidence_probability(rho, a, b + q)};
    double sum = 0.0;
    for (double x : p) {
      CHECK(x >= -1e-12);
      sum += x;
    }
    CHECK(sum <= 1.0 + 1e-12);
    CHECK(std::abs(sum - rho.trace()) <= 1e-12);
  }
}
