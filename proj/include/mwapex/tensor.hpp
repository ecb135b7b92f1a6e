#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "mwapex/errors.hpp"

namespace mwapex {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt3 = 1.7320508075688772;
inline constexpr double kSqrt6 = 2.449489742783178;

/// Symmetric second-order tensor in Voigt order (11, 22, 33, 12, 13, 23).
///
/// Tension positive. Stress tensors carry the true shear components; strain
/// tensors carry engineering shears (gam_ij = 2 eps_ij). Stress is in MPa,
/// strain is dimensionless.
struct SymTensor {
  std::array<double, 6> c{};

  double& operator[](std::size_t i) { return c[i]; }
  double operator[](std::size_t i) const { return c[i]; }

  double trace() const { return c[0] + c[1] + c[2]; }

  static SymTensor identity() { return SymTensor{{1.0, 1.0, 1.0, 0.0, 0.0, 0.0}}; }

  SymTensor& operator+=(const SymTensor& o) {
    for (std::size_t i = 0; i < 6; ++i) c[i] += o.c[i];
    return *this;
  }
  SymTensor& operator-=(const SymTensor& o) {
    for (std::size_t i = 0; i < 6; ++i) c[i] -= o.c[i];
    return *this;
  }
  SymTensor& operator*=(double a) {
    for (double& v : c) v *= a;
    return *this;
  }

  /// Deviatoric part, s = sig - tr(sig)/3 I. Stress convention.
  SymTensor deviator() const {
    SymTensor s = *this;
    const double p = trace() / 3.0;
    s.c[0] -= p;
    s.c[1] -= p;
    s.c[2] -= p;
    return s;
  }
};

inline SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
inline SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
inline SymTensor operator*(double s, SymTensor a) { return a *= s; }

/// Stress invariants. J3 = det(s) with s the deviator.
struct Invariants {
  double I1 = 0.0;
  double J2 = 0.0;
  double J3 = 0.0;
};

inline Invariants invariants(const SymTensor& sig) {
  const SymTensor s = sig.deviator();
  Invariants inv;
  inv.I1 = sig.trace();
  inv.J2 = 0.5 * (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]) + s[3] * s[3] + s[4] * s[4] + s[5] * s[5];
  inv.J3 = s[0] * s[1] * s[2] + 2.0 * s[3] * s[4] * s[5] - s[0] * s[5] * s[5] -
           s[1] * s[4] * s[4] - s[2] * s[3] * s[3];
  return inv;
}

/// Haigh-Westergaard cylindrical coordinates of a stress point.
/// theta in [0, pi/3]: 0 on the tensile meridian, pi/3 on the compressive one.
struct HWCoords {
  double xi = 0.0;     // hydrostatic axis, I1/sqrt(3)
  double rho = 0.0;    // deviatoric radius, sqrt(2 J2)
  double theta = 0.0;  // Lode angle
};

/// States with rho <= rho_eps are treated as exactly hydrostatic (theta = 0).
inline HWCoords to_hw(const SymTensor& sig, double rho_eps = 0.0) {
  const Invariants inv = invariants(sig);
  HWCoords hw;
  hw.xi = inv.I1 / kSqrt3;
  hw.rho = std::sqrt(2.0 * std::max(inv.J2, 0.0));
  if (hw.rho <= rho_eps) {
    hw.rho = (rho_eps > 0.0) ? 0.0 : hw.rho;
    hw.theta = 0.0;
    return hw;
  }
  // cos(3 theta) = 3 sqrt(3)/2 J3 / J2^(3/2), clamped against roundoff
  const double c3t = std::clamp(1.5 * kSqrt3 * inv.J3 / std::pow(inv.J2, 1.5), -1.0, 1.0);
  hw.theta = std::acos(c3t) / 3.0;
  return hw;
}

/// Isotropic elasticity constants. B maps volumetric strain to xi:
/// xi = B eps_v at zero deviator, with B = sqrt(3) K and K the bulk modulus.
struct ElasticModuli {
  double E;
  double nu;
  double G;
  double lame_lambda;
  double K;
  double B;

  ElasticModuli(double E_, double nu_) : E(E_), nu(nu_) {
    if (!(E > 0.0)) throw ValidationError("elastic modulus E must be positive");
    if (!(nu > 0.0 && nu < 0.5)) throw ValidationError("Poisson ratio nu must lie in (0, 0.5)");
    G = E / (2.0 * (1.0 + nu));
    lame_lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    K = E / (3.0 * (1.0 - 2.0 * nu));
    B = kSqrt3 * K;
  }
};

/// sig = lambda tr(eps) I + 2 G eps  (eps given with engineering shears)
inline SymTensor elastic_stress(const SymTensor& eps, const ElasticModuli& m) {
  const double lt = m.lame_lambda * eps.trace();
  SymTensor sig;
  for (std::size_t i = 0; i < 3; ++i) sig[i] = lt + 2.0 * m.G * eps[i];
  for (std::size_t i = 3; i < 6; ++i) sig[i] = m.G * eps[i];
  return sig;
}

/// Inverse map; returns strain with engineering shears.
inline SymTensor elastic_strain(const SymTensor& sig, const ElasticModuli& m) {
  SymTensor eps;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t j = (i + 1) % 3, k = (i + 2) % 3;
    eps[i] = (sig[i] - m.nu * (sig[j] + sig[k])) / m.E;
  }
  for (std::size_t i = 3; i < 6; ++i) eps[i] = sig[i] / m.G;
  return eps;
}

using Mat6 = std::array<std::array<double, 6>, 6>;

/// Stiffness in Voigt form acting on engineering-shear strain vectors.
inline Mat6 elastic_stiffness(const ElasticModuli& m) {
  Mat6 C{};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) C[i][j] = m.lame_lambda;
    C[i][i] += 2.0 * m.G;
  }
  for (std::size_t i = 3; i < 6; ++i) C[i][i] = m.G;
  return C;
}

inline SymTensor apply(const Mat6& A, const SymTensor& v) {
  SymTensor r;
  for (std::size_t i = 0; i < 6; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 6; ++j) s += A[i][j] * v[j];
    r[i] = s;
  }
  return r;
}

}  // namespace mwapex
