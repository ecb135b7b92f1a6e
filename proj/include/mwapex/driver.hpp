#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "mwapex/errors.hpp"
#include "mwapex/return_map.hpp"
#include "mwapex/surface.hpp"
#include "mwapex/tensor.hpp"

namespace mwapex {

enum class Control { Strain, Stress };

/// End-of-phase target for one Voigt component: either the total strain
/// component (engineering shear for slots 3..5) or the stress in MPa.
struct ComponentTarget {
  Control control = Control::Strain;
  double value = 0.0;
};

/// One loading phase. Controlled quantities move linearly from their values
/// at the start of the phase to the targets, over `increments` equal steps.
struct Phase {
  std::array<ComponentTarget, 6> targets{};
  int increments = 200;
};

struct LoadingProgram {
  std::string label;
  std::vector<Phase> phases;
};

struct StepRecord {
  int step = 0;  // 1-based, running across phases
  SymTensor eps;
  SymTensor sigma;
  double xi = 0.0, rho = 0.0, theta = 0.0;
  double kappa = 0.0, qh = 0.0, qs = 0.0, xi_a = 0.0;
  Mode mode = Mode::Elastic;
  int iterations = 0;
};

struct RunResult {
  std::vector<StepRecord> records;
  InternalState final_state;
  SymTensor final_eps;
  SymTensor final_sigma;
};

namespace detail {

/// Gaussian elimination with partial pivoting; false on (near-)singular A.
template <std::size_t N>
bool solve_dense(std::array<std::array<double, N>, N> A, std::array<double, N>& b, int n) {
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
    if (std::abs(A[piv][k]) < 1e-300) return false;
    std::swap(A[piv], A[k]);
    std::swap(b[piv], b[k]);
    for (int i = k + 1; i < n; ++i) {
      const double m = A[i][k] / A[k][k];
      for (int j = k; j < n; ++j) A[i][j] -= m * A[k][j];
      b[i] -= m * b[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= A[i][j] * b[j];
    b[i] = s / A[i][i];
  }
  return true;
}

}  // namespace detail

/// Runs a loading program on a single material point.
///
/// Strain-controlled components are imposed directly. Stress-controlled
/// components are met by a Newton iteration on the conjugate free strain
/// components, using the step-consistent tangent submatrix (finite-difference
/// Jacobian as fallback), with step halving when the residual grows.
inline RunResult run_program(const LoadingProgram& program, const MaterialParams& p,
                             const ElasticModuli& mod, const Tolerances& tol) {
  if (program.phases.empty()) throw ValidationError("loading program has no phases");
  for (const Phase& ph : program.phases)
    if (ph.increments < 1) throw ValidationError("phase increment count must be >= 1");

  RunResult out;
  InternalState state;
  SymTensor eps, sigma;
  int step = 0;
  const double res_tol = 1e-6 * p.fc;
  const int max_outer = 25;

  for (std::size_t iph = 0; iph < program.phases.size(); ++iph) {
    const Phase& ph = program.phases[iph];
    const SymTensor eps0 = eps, sig0 = sigma;  // phase-start values

    std::array<int, 6> free_idx{};
    int nf = 0;
    for (int i = 0; i < 6; ++i)
      if (ph.targets[i].control == Control::Stress) free_idx[nf++] = i;

    for (int n = 1; n <= ph.increments; ++n) {
      const double a = static_cast<double>(n) / ph.increments;
      SymTensor eps_try = eps;
      std::array<double, 6> sig_target{};
      for (int i = 0; i < 6; ++i) {
        const ComponentTarget& ct = ph.targets[i];
        if (ct.control == Control::Strain)
          eps_try[i] = eps0[i] + a * (ct.value - eps0[i]);
        else
          sig_target[i] = sig0[i] + a * (ct.value - sig0[i]);
      }

      StepResult res = integrate_step(eps_try, state, p, mod, tol);

      if (nf > 0) {
        auto norm_inf = [&](const StepResult& r) {
          double v = 0.0;
          for (int k = 0; k < nf; ++k)
            v = std::max(v, std::abs(r.sigma[free_idx[k]] - sig_target[free_idx[k]]));
          return v;
        };
        double rn = norm_inf(res);
        bool ok = rn <= res_tol;
        for (int it = 0; it < max_outer && !ok; ++it) {
          std::array<std::array<double, 6>, 6> J{};
          std::array<double, 6> rhs{};
          for (int r = 0; r < nf; ++r) {
            rhs[r] = -(res.sigma[free_idx[r]] - sig_target[free_idx[r]]);
            for (int c = 0; c < nf; ++c) J[r][c] = res.tangent[free_idx[r]][free_idx[c]];
          }
          if (!detail::solve_dense<6>(J, rhs, nf)) {
            // finite-difference Jacobian; central so a one-sided kink
            // (e.g. a perfectly plastic apex state) still yields a slope
            const double h = 1e-8;
            for (int c = 0; c < nf; ++c) {
              SymTensor ep = eps_try, em = eps_try;
              ep[free_idx[c]] += h;
              em[free_idx[c]] -= h;
              const StepResult rp = integrate_step(ep, state, p, mod, tol);
              const StepResult rm = integrate_step(em, state, p, mod, tol);
              for (int r = 0; r < nf; ++r)
                J[r][c] = (rp.sigma[free_idx[r]] - rm.sigma[free_idx[r]]) / (2.0 * h);
            }
            for (int r = 0; r < nf; ++r)
              rhs[r] = -(res.sigma[free_idx[r]] - sig_target[free_idx[r]]);
            if (!detail::solve_dense<6>(J, rhs, nf))
              throw OuterNonConvergenceError("phase " + std::to_string(iph + 1) + " increment " +
                                             std::to_string(n) + ": singular control Jacobian");
          }
          double lam = 1.0;
          for (int half = 0; half < 5; ++half) {
            SymTensor eps_new = eps_try;
            for (int k = 0; k < nf; ++k) eps_new[free_idx[k]] += lam * rhs[k];
            StepResult rnew = integrate_step(eps_new, state, p, mod, tol);
            const double rn_new = norm_inf(rnew);
            if (rn_new < rn || half == 4) {
              eps_try = eps_new;
              res = rnew;
              rn = rn_new;
              break;
            }
            lam *= 0.5;
          }
          ok = rn <= res_tol;
        }
        if (!ok)
          throw OuterNonConvergenceError("phase " + std::to_string(iph + 1) + " increment " +
                                         std::to_string(n) + ": stress residual " +
                                         std::to_string(rn) + " MPa above tolerance");
      }

      eps = eps_try;
      sigma = res.sigma;
      state = res.state;

      StepRecord rec;
      rec.step = ++step;
      rec.eps = eps;
      rec.sigma = sigma;
      const HWCoords hw = to_hw(sigma, tol.rho_eps);
      rec.xi = hw.xi;
      rec.rho = hw.rho;
      rec.theta = hw.theta;
      rec.kappa = state.kappa;
      const HardeningState hs = hardening_state(state.kappa, p);
      rec.qh = hs.qh;
      rec.qs = hs.qs;
      rec.xi_a = apex_xi(state.kappa, p);
      rec.mode = res.mode;
      rec.iterations = res.iterations;
      out.records.push_back(rec);
    }
  }

  out.final_state = state;
  out.final_eps = eps;
  out.final_sigma = sigma;
  return out;
}

// ---------------------------------------------------------------------------
// Validation scenarios: a 100 mm cube under uniform fields, so displacements
// convert to strains by /100 and one material point is exact.

inline constexpr double kConfinement = -8.0;  // MPa

namespace detail {

inline Phase strain_phase(double e11, double e22, double e33, int increments) {
  Phase ph;
  ph.targets = {ComponentTarget{Control::Strain, e11}, ComponentTarget{Control::Strain, e22},
                ComponentTarget{Control::Strain, e33}, ComponentTarget{Control::Strain, 0.0},
                ComponentTarget{Control::Strain, 0.0}, ComponentTarget{Control::Strain, 0.0}};
  ph.increments = increments;
  return ph;
}

inline Phase confinement_phase(int increments) {
  Phase ph;
  ph.targets = {ComponentTarget{Control::Stress, kConfinement},
                ComponentTarget{Control::Stress, kConfinement},
                ComponentTarget{Control::Stress, kConfinement},
                ComponentTarget{Control::Strain, 0.0},
                ComponentTarget{Control::Strain, 0.0},
                ComponentTarget{Control::Strain, 0.0}};
  ph.increments = increments;
  return ph;
}

}  // namespace detail

/// Hydrostatic traction, perfect-plasticity regime (plateau at 2.95 MPa).
inline LoadingProgram scenario_2_1(int increments = 200) {
  return {"2.1", {detail::strain_phase(4e-4, 4e-4, 4e-4, increments)}};
}

/// Hydrostatic traction with reduced k1d: plateau then softening decay.
inline LoadingProgram scenario_2_2(bool with_unload = false, int increments = 200) {
  if (!with_unload) return {"2.2", {detail::strain_phase(3e-3, 3e-3, 3e-3, increments)}};
  return {"2.2-unload",
          {detail::strain_phase(1e-3, 1e-3, 1e-3, increments),
           detail::strain_phase(5e-4, 5e-4, 5e-4, increments)}};
}

/// Hydrostatic compression to -8 MPa, then tension: axial 0.05 mm and
/// transversal 0.02 mm on the 100 mm cube, ramped proportionally.
inline LoadingProgram scenario_2_3(int increments = 200) {
  return {"2.3",
          {detail::confinement_phase(increments),
           detail::strain_phase(2e-4, 2e-4, 5e-4, increments)}};
}

/// As 2.3 with 0.075 mm axial / 0.005 mm transversal and a softening set
/// (k1d = 8e-5, t = 1e-3): the apex migrates down the hydrostatic axis.
inline LoadingProgram scenario_2_4(int increments = 200) {
  return {"2.4",
          {detail::confinement_phase(increments),
           detail::strain_phase(5e-5, 5e-5, 7.5e-4, increments)}};
}

inline bool is_preset_scenario(const std::string& name) {
  return name == "2.1" || name == "2.2" || name == "2.2-unload" || name == "2.3" || name == "2.4";
}

/// Material overrides bound to a preset (the presets are defined for
/// specific hardening/softening sets, not just load paths).
inline MaterialParams scenario_params(const std::string& name, MaterialParams base) {
  if (name == "2.2" || name == "2.2-unload") {
    base.k1d = 1e-4;
  } else if (name == "2.4") {
    base.k1d = 8e-5;
    base.t = 1e-3;
  }
  return base;
}

inline LoadingProgram make_scenario(const std::string& name, int increments = 200) {
  if (name == "2.1") return scenario_2_1(increments);
  if (name == "2.2") return scenario_2_2(false, increments);
  if (name == "2.2-unload") return scenario_2_2(true, increments);
  if (name == "2.3") return scenario_2_3(increments);
  if (name == "2.4") return scenario_2_4(increments);
  throw ValidationError("unknown scenario preset: " + name);
}

}  // namespace mwapex
