#pragma once

// Two-photon polarization model: 4x4 density matrices over {HH, HV, VH, VV}
// (first letter = sample arm, second = reference arm) and 2x2 Jones elements
// acting on one arm.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>
#include <optional>
#include <string>

#include "ghostpol/angle.hpp"
#include "ghostpol/errors.hpp"

namespace ghostpol {

enum class Arm { sample, reference };

/// Index into the product basis; sample-arm qubit is the high bit.
enum class Basis : int { HH = 0, HV = 1, VH = 2, VV = 3 };

template <typename Scalar>
class BasicDensityMatrix {
 public:
  using Complex = std::complex<Scalar>;
  using Matrix = Eigen::Matrix<Complex, 4, 4>;

  BasicDensityMatrix() : rho_(Matrix::Zero()) {}
  explicit BasicDensityMatrix(Matrix rho) : rho_(std::move(rho)) {}

  const Matrix& matrix() const { return rho_; }
  Complex operator()(Basis row, Basis col) const {
    return rho_(static_cast<int>(row), static_cast<int>(col));
  }

  Scalar trace() const { return rho_.trace().real(); }
  Scalar purity() const { return (rho_ * rho_).trace().real(); }

  /// Reduced 2x2 state of one arm.
  Eigen::Matrix<Complex, 2, 2> reduced(Arm keep) const {
    Eigen::Matrix<Complex, 2, 2> out = Eigen::Matrix<Complex, 2, 2>::Zero();
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int k = 0; k < 2; ++k)
          out(a, b) += keep == Arm::sample ? rho_(2 * a + k, 2 * b + k)
                                           : rho_(2 * k + a, 2 * k + b);
    return out;
  }

  Scalar hermiticity_error() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }

  Scalar min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(Scalar(0.5) * (rho_ + rho_.adjoint()),
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  /// Hermitian, unit trace and positive semidefinite within the given tolerances.
  bool is_physical(Scalar tol = Scalar(1e-12), Scalar psd_tol = Scalar(1e-10)) const {
    return hermiticity_error() <= tol && std::abs(trace() - Scalar(1)) <= tol &&
           min_eigenvalue() >= -psd_tol;
  }

 private:
  Matrix rho_;
};

enum class ElementKind { identity, polarizer, rotator };

template <typename Scalar>
struct BasicJonesElement {
  using Matrix = Eigen::Matrix<std::complex<Scalar>, 2, 2>;
  Matrix matrix = Matrix::Identity();
  ElementKind kind = ElementKind::identity;
};

using DensityMatrix = BasicDensityMatrix<double>;
using JonesElement = BasicJonesElement<double>;

template <typename Scalar = double>
BasicDensityMatrix<Scalar> bell_phi_plus() {
  using M = typename BasicDensityMatrix<Scalar>::Matrix;
  M rho = M::Zero();
  const Scalar h(0.5);
  rho(0, 0) = h;
  rho(0, 3) = h;
  rho(3, 0) = h;
  rho(3, 3) = h;
  return BasicDensityMatrix<Scalar>(rho);
}

/// V |Phi+><Phi+| + (1 - V) I/4.
template <typename Scalar = double>
BasicDensityMatrix<Scalar> werner_like(Scalar visibility) {
  if (!(visibility >= Scalar(0) && visibility <= Scalar(1)))
    throw DomainError("visibility must lie in [0, 1], got " + std::to_string(visibility));
  using M = typename BasicDensityMatrix<Scalar>::Matrix;
  M rho = visibility * bell_phi_plus<Scalar>().matrix() +
          ((Scalar(1) - visibility) / Scalar(4)) * M::Identity();
  return BasicDensityMatrix<Scalar>(rho);
}

template <typename Scalar = double>
BasicJonesElement<Scalar> identity_element() {
  return {};
}

/// Linear polarizer transmitting along `theta`.
template <typename Scalar = double>
BasicJonesElement<Scalar> polarizer(Angle theta) {
  const Scalar c = std::cos(Scalar(theta.rad()));
  const Scalar s = std::sin(Scalar(theta.rad()));
  typename BasicJonesElement<Scalar>::Matrix m;
  m << c * c, c * s, c * s, s * s;
  return {m, ElementKind::polarizer};
}

/// Optical rotation by `delta`; positive delta turns H toward V.
template <typename Scalar = double>
BasicJonesElement<Scalar> rotator(Angle delta) {
  const Scalar c = std::cos(Scalar(delta.rad()));
  const Scalar s = std::sin(Scalar(delta.rad()));
  typename BasicJonesElement<Scalar>::Matrix m;
  m << c, -s, s, c;
  return {m, ElementKind::rotator};
}

namespace detail {

template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 4, 4> lift(Arm arm,
                                               const typename BasicJonesElement<Scalar>::Matrix& e) {
  using Complex = std::complex<Scalar>;
  Eigen::Matrix<Complex, 4, 4> out = Eigen::Matrix<Complex, 4, 4>::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int k = 0; k < 2; ++k) {
        if (arm == Arm::sample)
          out(2 * a + k, 2 * b + k) = e(a, b);
        else
          out(2 * k + a, 2 * k + b) = e(a, b);
      }
  return out;
}

}  // namespace detail

/// (E ⊗ I) rho (E ⊗ I)^H or (I ⊗ E) rho (I ⊗ E)^H. The result is not
/// renormalized: its trace is the probability that the photon survives.
template <typename Scalar>
BasicDensityMatrix<Scalar> apply_local(const BasicDensityMatrix<Scalar>& state, Arm arm,
                                       const BasicJonesElement<Scalar>& element) {
  const auto op = detail::lift<Scalar>(arm, element.matrix);
  return BasicDensityMatrix<Scalar>(op * state.matrix() * op.adjoint());
}

/// Probability that both photons pass polarizers at theta_s (sample) and
/// theta_r (reference).
template <typename Scalar>
Scalar coincidence_probability(const BasicDensityMatrix<Scalar>& state, Angle theta_s,
                               Angle theta_r) {
  auto out = apply_local(state, Arm::sample, polarizer<Scalar>(theta_s));
  out = apply_local(out, Arm::reference, polarizer<Scalar>(theta_r));
  return out.trace();
}

/// Probability that the photon in `arm` passes its polarizer; the other arm is
/// traced out. No polarizer means certain transmission.
template <typename Scalar>
Scalar singles_probability(const BasicDensityMatrix<Scalar>& state, Arm arm,
                           std::optional<Angle> theta) {
  if (!theta) return state.trace();
  return apply_local(state, arm, polarizer<Scalar>(*theta)).trace();
}

/// Polarization correlation between the arms, computed as the expectation of
/// A(theta_s) ⊗ A(theta_r) with A(t) = P(t) - P(t + 90 deg).
template <typename Scalar>
Scalar correlation_E(const BasicDensityMatrix<Scalar>& state, Angle theta_s, Angle theta_r) {
  auto observable = [](Angle t) {
    const Scalar c = std::cos(Scalar(2) * Scalar(t.rad()));
    const Scalar s = std::sin(Scalar(2) * Scalar(t.rad()));
    typename BasicJonesElement<Scalar>::Matrix a;
    a << c, s, s, -c;
    return a;
  };
  const auto a_s = detail::lift<Scalar>(Arm::sample, observable(theta_s));
  const auto a_r = detail::lift<Scalar>(Arm::reference, observable(theta_r));
  return (state.matrix() * a_s * a_r).trace().real() / state.trace();
}

}  // namespace ghostpol
