#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "mwapex/errors.hpp"
#include "mwapex/surface.hpp"
#include "mwapex/tensor.hpp"

namespace mwapex {

struct Tolerances {
  double toll;          // apex residual tolerance, MPa
  double tol_f;         // yield function tolerance, dimensionless
  int max_iter = 50;
  double rho_eps;       // hydrostatic cutoff, MPa
  double deriv_clamp = 1e12;

  static Tolerances defaults(const MaterialParams& p) {
    return {1e-9 * p.fc, 1e-9, 50, 1e-9 * p.fc, 1e12};
  }
};

/// History carried between steps. kappa tracks the volumetric plastic strain,
/// kappa_dot = tr(eps_p_dot), and never decreases.
struct InternalState {
  double kappa = 0.0;
  SymTensor eps_p;
};

enum class Mode { Elastic, SmoothReturn, ApexReturn };

struct StepResult {
  SymTensor sigma;
  InternalState state;
  Mat6 tangent{};
  Mode mode = Mode::Elastic;
  int iterations = 0;
  double residual = 0.0;  // |r|/fc at the apex, |f| on the smooth surface
};

struct TrialState {
  SymTensor sigma;
  HWCoords hw;
};

/// Elastic predictor: sigma_tr = C (eps - eps_p_n).
inline TrialState trial_state(const SymTensor& eps_total_next, const InternalState& state_n,
                              const ElasticModuli& mod, double rho_eps = 0.0) {
  TrialState t;
  t.sigma = elastic_stress(eps_total_next - state_n.eps_p, mod);
  t.hw = to_hw(t.sigma, rho_eps);
  return t;
}

/// Regime selection: the trial point is beyond the surface apex whenever
/// xi_tr exceeds the current tensile limit xi_a(kappa_n), independent of rho.
inline Mode classify(const HWCoords& hw_tr, double kappa_n, const MaterialParams& p,
                     const Tolerances& tol) {
  if (hw_tr.xi > apex_xi(kappa_n, p)) return Mode::ApexReturn;
  if (yield_f(hw_tr, kappa_n, p) > tol.tol_f) return Mode::SmoothReturn;
  return Mode::Elastic;
}

/// Residual of the return-to-apex problem in increment form,
///   r(kappa) = xi_a(kappa) - xi_tr + B (kappa - kappa_n),
/// together with dr/dkappa = (sqrt(3) fc / m) dq_s/dkappa + B.
struct ApexResidual {
  double r;
  double dr;
};

inline ApexResidual apex_residual(double kappa, double xi_tr, double kappa_n,
                                  const MaterialParams& p, const ElasticModuli& mod) {
  return {apex_xi(kappa, p) - xi_tr + mod.B * (kappa - kappa_n),
          kSqrt3 * p.fc / cohesion_m(p) * d_qs_dkappa(kappa, p) + mod.B};
}

struct ApexSolution {
  double kappa_next;
  double xi_next;
  int iterations;
  double residual;  // |r|/fc at exit
};

/// Newton solve of r(kappa) = 0 for the apex regime. The residual is
/// monotone increasing in kappa (|xi_a'| << B for any sane softening slope),
/// so plain Newton from kappa_n converges; r(kappa_n) < 0 by classification.
inline ApexSolution apex_return(double xi_tr, double kappa_n, const MaterialParams& p,
                                const ElasticModuli& mod, const Tolerances& tol) {
  ApexResidual res = apex_residual(kappa_n, xi_tr, kappa_n, p, mod);
  if (res.r > tol.toll)
    throw NegativeMultiplierError("trial point inside the tensile limit: apex return would need kappa < kappa_n");
  double kappa = kappa_n;
  for (int it = 1; it <= tol.max_iter; ++it) {
    if (std::abs(res.r) < tol.toll)
      return {kappa, apex_xi(kappa, p), it - 1, std::abs(res.r) / p.fc};
    if (!(res.dr > 0.0))
      throw NonConvergenceError("apex residual derivative lost positivity at kappa = " +
                                std::to_string(kappa));
    kappa -= res.r / res.dr;
    if (kappa < kappa_n)
      throw NegativeMultiplierError("apex return produced kappa < kappa_n");
    res = apex_residual(kappa, xi_tr, kappa_n, p, mod);
  }
  throw NonConvergenceError("apex return: no convergence in " + std::to_string(tol.max_iter) +
                            " iterations (|r| = " + std::to_string(std::abs(res.r)) + " MPa)");
}

/// Analytic consistent tangent at the apex,
///   C_ep = (B/sqrt(3)) [1 - B/D] (I x I),  D = (sqrt(3) fc / m) dq_s/dkappa + B.
/// Identically zero while q_s is constant (perfectly plastic apex).
inline Mat6 apex_tangent(double kappa_next, const MaterialParams& p, const ElasticModuli& mod) {
  const double D = kSqrt3 * p.fc / cohesion_m(p) * d_qs_dkappa(kappa_next, p) + mod.B;
  if (D <= 1e-10 * mod.B)
    throw SingularTangentError("apex tangent pole: softening slope cancels the volumetric stiffness");
  const double c = mod.B / kSqrt3 * (1.0 - mod.B / D);
  Mat6 C{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) C[i][j] = c;
  return C;
}

/// Final stress/state assembly for an apex step: the stress is hydrostatic at
/// the updated apex and the whole excess predictor strain becomes plastic.
inline StepResult apex_update(const ApexSolution& sol, const SymTensor& sigma_tr,
                              const InternalState& state_n, const MaterialParams& p,
                              const ElasticModuli& mod) {
  StepResult out;
  out.sigma = (sol.xi_next / kSqrt3) * SymTensor::identity();
  out.state.kappa = sol.kappa_next;
  out.state.eps_p = state_n.eps_p + elastic_strain(sigma_tr - out.sigma, mod);
  out.tangent = apex_tangent(sol.kappa_next, p, mod);
  out.mode = Mode::ApexReturn;
  out.iterations = sol.iterations;
  out.residual = sol.residual;
  return out;
}

namespace detail {

/// Scalar reduction of the smooth corrector. With the flow direction frozen
/// at the trial point, the stress path in (xi, rho) is a straight line and
/// theta does not change:
///   xi(L)    = xi_tr  - L sqrt(3) B g_xi
///   rho(L)   = rho_tr - L 2 G g_rho
///   kappa(L) = kappa_n + L sqrt(3) g_xi
struct SmoothScalars {
  double xi_tr, rho_tr, theta, kappa_n;
  double g_xi, g_rho;
  const MaterialParams* p;
  const ElasticModuli* mod;

  double xi(double L) const { return xi_tr - L * kSqrt3 * mod->B * g_xi; }
  double rho(double L) const { return rho_tr - L * 2.0 * mod->G * g_rho; }
  double kappa(double L) const { return kappa_n + L * kSqrt3 * g_xi; }

  double f(double L) const { return yield_f({xi(L), rho(L), theta}, kappa(L), *p); }

  double df(double L, double deriv_clamp) const {
    const double x = xi(L), r = rho(L), k = kappa(L);
    const double m = cohesion_m(*p);
    const double R = elliptic_r(theta, p->e);
    const double qh = hardening_qh(k, *p), qs = softening_qs(k, *p);
    const double dqh = d_qh_dkappa(k, *p, deriv_clamp), dqs = d_qs_dkappa(k, *p);
    const double df_dxi = qh * m / (kSqrt3 * p->fc);
    const double df_drho = 3.0 * r / (p->fc * p->fc) + qh * m * R / (kSqrt6 * p->fc);
    const double df_dk = dqh * m * (r * R / (kSqrt6 * p->fc) + x / (kSqrt3 * p->fc)) -
                         dqh * qs - qh * dqs;
    return df_dxi * (-kSqrt3 * mod->B * g_xi) + df_drho * (-2.0 * mod->G * g_rho) +
           df_dk * (kSqrt3 * g_xi);
  }
};

}  // namespace detail

/// Plastic corrector on the smooth part of the surface. Semi-implicit: the
/// direction n_g is evaluated once at the trial point, then f = 0 is solved
/// for the multiplier by Newton safeguarded with bisection on [0, L_cap],
/// where L_cap drives rho to zero. If even rho = 0 leaves f > 0 the surface
/// has receded past the trial meridian and the step is an apex return.
///
/// The consistent tangent is NOT filled for SmoothReturn results here;
/// integrate_step attaches the finite-difference tangent afterwards.
inline StepResult smooth_return(const SymTensor& sigma_tr, const HWCoords& hw_tr,
                                const InternalState& state_n, const MaterialParams& p,
                                const ElasticModuli& mod, const Tolerances& tol) {
  const SymTensor s_tr = sigma_tr.deviator();
  const SymTensor n_g = potential_gradient(hw_tr, s_tr, state_n.kappa, p, tol.rho_eps);
  const PotentialSlopes gs = potential_slopes(hw_tr.rho, state_n.kappa, p);

  detail::SmoothScalars sc{hw_tr.xi, hw_tr.rho, hw_tr.theta, state_n.kappa,
                           gs.g_xi,  gs.g_rho,  &p,          &mod};

  double hi;
  if (gs.g_rho > 0.0) {
    hi = hw_tr.rho / (2.0 * mod.G * gs.g_rho);
    if (sc.f(hi) > 0.0) {
      // rho = 0 still outside: true vertex return
      const ApexSolution sol = apex_return(hw_tr.xi, state_n.kappa, p, mod, tol);
      return apex_update(sol, sigma_tr, state_n, p, mod);
    }
  } else {
    // purely volumetric flow (g_A = g_B = 0): rho never shrinks, bracket on xi
    hi = p.fc / (kSqrt3 * mod.B * gs.g_xi);
    int guard = 0;
    while (sc.f(hi) > 0.0 && ++guard <= 60) hi *= 2.0;
    if (sc.f(hi) > 0.0)
      throw NonConvergenceError("smooth return: failed to bracket the multiplier");
  }

  double lo = 0.0;  // f(lo) > 0 >= f(hi)
  double L = 0.0, fL = sc.f(0.0);
  int iters = 0;
  bool converged = false;
  for (int it = 1; it <= tol.max_iter; ++it) {
    if (std::abs(fL) <= tol.tol_f) {
      iters = it - 1;
      converged = true;
      break;
    }
    if (fL > 0.0)
      lo = L;
    else
      hi = L;
    const double dfL = sc.df(L, tol.deriv_clamp);
    double Ln = (dfL != 0.0) ? L - fL / dfL : 0.5 * (lo + hi);
    if (!(Ln > lo && Ln < hi)) Ln = 0.5 * (lo + hi);
    L = Ln;
    fL = sc.f(L);
  }
  if (!converged)
    throw NonConvergenceError("smooth return: no convergence in " + std::to_string(tol.max_iter) +
                              " iterations (|f| = " + std::to_string(std::abs(fL)) + ")");

  StepResult out;
  const double xi_new = sc.xi(L), rho_new = sc.rho(L), kappa_new = sc.kappa(L);
  const double scale = (hw_tr.rho > 0.0) ? rho_new / hw_tr.rho : 0.0;
  out.sigma = (xi_new / kSqrt3) * SymTensor::identity() + scale * s_tr;
  out.state.kappa = kappa_new;
  out.state.eps_p = state_n.eps_p + L * n_g;
  out.mode = Mode::SmoothReturn;
  out.iterations = iters;
  out.residual = std::abs(fL);

  // corner guard: a softening surface can slip past the converged point
  if (xi_new > apex_xi(kappa_new, p)) {
    const ApexSolution sol = apex_return(hw_tr.xi, state_n.kappa, p, mod, tol);
    return apex_update(sol, sigma_tr, state_n, p, mod);
  }
  return out;
}

namespace detail {

/// Predictor/corrector without tangent assembly; also the finite-difference
/// probe kernel (the probes must not recurse into tangent evaluation).
inline StepResult integrate_core(const SymTensor& eps_total_next, const InternalState& state_n,
                                 const MaterialParams& p, const ElasticModuli& mod,
                                 const Tolerances& tol) {
  const TrialState tr = trial_state(eps_total_next, state_n, mod, tol.rho_eps);
  switch (classify(tr.hw, state_n.kappa, p, tol)) {
    case Mode::ApexReturn: {
      const ApexSolution sol = apex_return(tr.hw.xi, state_n.kappa, p, mod, tol);
      return apex_update(sol, tr.sigma, state_n, p, mod);
    }
    case Mode::SmoothReturn:
      return smooth_return(tr.sigma, tr.hw, state_n, p, mod, tol);
    case Mode::Elastic:
    default: {
      StepResult out;
      out.sigma = tr.sigma;
      out.state = state_n;
      out.mode = Mode::Elastic;
      return out;
    }
  }
}

}  // namespace detail

/// Consistent tangent by central differences through the full corrector,
/// restarted from the frozen state_n at each probe. Non-symmetric in
/// general: the flow is non-associated.
inline Mat6 smooth_tangent(const SymTensor& eps_total_next, const InternalState& state_n,
                           const MaterialParams& p, const ElasticModuli& mod,
                           const Tolerances& tol, double h = 1e-7) {
  Mat6 C{};
  for (std::size_t j = 0; j < 6; ++j) {
    SymTensor ep = eps_total_next, em = eps_total_next;
    ep[j] += h;
    em[j] -= h;
    const SymTensor sp = detail::integrate_core(ep, state_n, p, mod, tol).sigma;
    const SymTensor sm = detail::integrate_core(em, state_n, p, mod, tol).sigma;
    for (std::size_t i = 0; i < 6; ++i) C[i][j] = (sp[i] - sm[i]) / (2.0 * h);
  }
  return C;
}

/// One backward-Euler step: elastic predictor, regime classification,
/// plastic corrector, consistent tangent.
inline StepResult integrate_step(const SymTensor& eps_total_next, const InternalState& state_n,
                                 const MaterialParams& p, const ElasticModuli& mod,
                                 const Tolerances& tol) {
  StepResult out = detail::integrate_core(eps_total_next, state_n, p, mod, tol);
  if (out.mode == Mode::Elastic)
    out.tangent = elastic_stiffness(mod);
  else if (out.mode == Mode::SmoothReturn)
    out.tangent = smooth_tangent(eps_total_next, state_n, p, mod, tol);
  return out;  // apex steps carry the analytic tangent already
}

}  // namespace mwapex
