#pragma once

#include <algorithm>
#include <cmath>

#include "mwapex/errors.hpp"
#include "mwapex/tensor.hpp"

namespace mwapex {

/// Menetrey-Willam material set. Stress-like quantities in MPa.
struct MaterialParams {
  double E;     // Young's modulus
  double nu;    // Poisson ratio
  double fc;    // uniaxial compressive strength (positive)
  double ft;    // uniaxial tensile strength (positive)
  double e;     // deviatoric eccentricity, (0.5, 1]
  double t;     // softening ductility scale
  double k1d;   // hardening/softening switch value of kappa
  double qh0;   // initial hardening level, (0, 1]
  double gA;    // plastic potential quadratic coefficient
  double gB;    // plastic potential linear coefficient

  void validate() const {
    if (!(E > 0.0)) throw ValidationError("material.E must be positive");
    if (!(nu > 0.0 && nu < 0.5)) throw ValidationError("material.nu must lie in (0, 0.5)");
    if (!(fc > 0.0)) throw ValidationError("material.fc must be positive");
    if (!(ft > 0.0 && ft < fc)) throw ValidationError("material.ft must lie in (0, fc)");
    if (!(e > 0.5 && e <= 1.0)) throw ValidationError("material.e must lie in (0.5, 1]");
    if (!(t > 0.0)) throw ValidationError("material.t must be positive");
    if (!(k1d > 0.0)) throw ValidationError("material.k1d must be positive");
    if (!(qh0 > 0.0 && qh0 <= 1.0)) throw ValidationError("material.qh0 must lie in (0, 1]");
    if (!(gA >= 0.0)) throw ValidationError("material.gA must be non-negative");
    if (!(gB >= 0.0)) throw ValidationError("material.gB must be non-negative");
  }
};

/// Friction parameter m, fixed by the two uniaxial strengths and e.
inline double cohesion_m(const MaterialParams& p) {
  return 3.0 * (p.fc * p.fc - p.ft * p.ft) / (p.fc * p.ft) * p.e / (p.e + 1.0);
}

/// Elliptic deviatoric shape function R(theta, e); R(0) = 1/e, R(pi/3) = 1.
inline double elliptic_r(double theta, double e) {
  const double ct = std::cos(theta);
  const double e2 = e * e;
  const double a = 4.0 * (1.0 - e2) * ct * ct;
  const double b = (2.0 * e - 1.0) * (2.0 * e - 1.0);
  const double num = a + b;
  const double den =
      2.0 * (1.0 - e2) * ct + (2.0 * e - 1.0) * std::sqrt(std::max(a + 5.0 * e2 - 4.0 * e, 0.0));
  return num / den;
}

/// Hardening function: elliptic rise from qh0 to 1 over [0, k1d], then 1.
inline double hardening_qh(double kappa, const MaterialParams& p) {
  if (kappa >= p.k1d) return 1.0;
  const double w = (p.k1d - kappa) / p.k1d;
  return p.qh0 + (1.0 - p.qh0) * std::sqrt(std::max(1.0 - w * w, 0.0));
}

/// dq_h/dkappa. Unbounded as kappa -> 0+, clamped at deriv_clamp.
inline double d_qh_dkappa(double kappa, const MaterialParams& p, double deriv_clamp = 1e12) {
  if (kappa >= p.k1d) return 0.0;
  const double w = (p.k1d - kappa) / p.k1d;
  const double disc = 1.0 - w * w;
  if (disc <= 0.0) return deriv_clamp;
  return std::min((1.0 - p.qh0) * w / (p.k1d * std::sqrt(disc)), deriv_clamp);
}

/// Softening function: 1 on [0, k1d], rational decay beyond.
/// q_s = (1 + u^2)^-2 with u = (n1 - 1)/(n2 - 1), n1 = kappa/k1d, n2 = (k1d + t)/k1d.
inline double softening_qs(double kappa, const MaterialParams& p) {
  if (kappa <= p.k1d) return 1.0;
  const double n1 = kappa / p.k1d;
  const double n2 = (p.k1d + p.t) / p.k1d;
  const double u = (n1 - 1.0) / (n2 - 1.0);
  const double d = 1.0 + u * u;
  return 1.0 / (d * d);
}

/// dq_s/dkappa; zero on the plateau, C1 across k1d.
inline double d_qs_dkappa(double kappa, const MaterialParams& p) {
  if (kappa <= p.k1d) return 0.0;
  const double n2 = (p.k1d + p.t) / p.k1d;
  const double u = (kappa / p.k1d - 1.0) / (n2 - 1.0);
  const double d = 1.0 + u * u;
  return -4.0 * u / (d * d * d) / (p.k1d * (n2 - 1.0));
}

/// Hardening variable with its derived levels, q = q_h q_s.
struct HardeningState {
  double kappa;
  double qh;
  double qs;
  double q;
};

inline HardeningState hardening_state(double kappa, const MaterialParams& p) {
  const double qh = hardening_qh(kappa, p);
  const double qs = softening_qs(kappa, p);
  return {kappa, qh, qs, qh * qs};
}

/// Menetrey-Willam yield function (dimensionless form),
/// f = 3/2 (rho/fc)^2 + q_h m (rho R/(sqrt(6) fc) + xi/(sqrt(3) fc)) - q_h q_s.
inline double yield_f(const HWCoords& hw, double kappa, const MaterialParams& p) {
  const double m = cohesion_m(p);
  const double qh = hardening_qh(kappa, p);
  const double qs = softening_qs(kappa, p);
  const double rr = hw.rho / p.fc;
  return 1.5 * rr * rr +
         qh * m * (hw.rho * elliptic_r(hw.theta, p.e) / (kSqrt6 * p.fc) + hw.xi / (kSqrt3 * p.fc)) -
         qh * qs;
}

/// Hydrostatic coordinate of the surface apex, xi_a = sqrt(3) fc q_s(kappa) / m.
/// The q_h factors cancel; the apex moves inward only through softening.
inline double apex_xi(double kappa, const MaterialParams& p) {
  return kSqrt3 * p.fc * softening_qs(kappa, p) / cohesion_m(p);
}

/// Meridional derivatives of the quadratic plastic potential
///   g = A (rho / fc)^2 / q + B rho / (fc sqrt(q)) + xi / (fc sqrt(q)),  q = q_h q_s,
/// oriented so that plastic flow is dilatant (dg/dxi > 0, dg/drho > 0).
struct PotentialSlopes {
  double g_xi;
  double g_rho;
};

inline PotentialSlopes potential_slopes(double rho, double kappa, const MaterialParams& p) {
  const double q = hardening_qh(kappa, p) * softening_qs(kappa, p);
  const double sq = std::sqrt(q);
  return {1.0 / (p.fc * sq), 2.0 * p.gA * rho / (p.fc * p.fc * q) + p.gB / (p.fc * sq)};
}

/// Flow direction n_g = g_xi I/sqrt(3) + g_rho s/rho as a strain-like tensor
/// (shear slots doubled). Undefined on the hydrostatic axis.
inline SymTensor potential_gradient(const HWCoords& hw, const SymTensor& deviator, double kappa,
                                    const MaterialParams& p, double rho_eps = 0.0) {
  if (hw.rho <= std::max(rho_eps, 0.0))
    throw DegenerateDirectionError("flow direction undefined at rho = 0");
  const PotentialSlopes gs = potential_slopes(hw.rho, kappa, p);
  SymTensor n;
  const double ax = gs.g_xi / kSqrt3;
  const double dev = gs.g_rho / hw.rho;
  for (std::size_t i = 0; i < 3; ++i) n[i] = ax + dev * deviator[i];
  for (std::size_t i = 3; i < 6; ++i) n[i] = 2.0 * dev * deviator[i];
  return n;
}

}  // namespace mwapex
