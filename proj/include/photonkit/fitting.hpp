#pragma once

#include <optional>
#include <span>
#include <vector>

#include "photonkit/types.hpp"

namespace photonkit {

enum class DecayModel { exp, biexp, exp_irf };

/// Folds a tag stream modulo the pulse period into a decay histogram.
/// Returns bin centers (ps) and counts. With peak_fraction in (0,1) the
/// histogram is rotated so the maximum sits at that fraction of the period
/// (keeps an IRF-jittered rising edge away from the wrap boundary); bin
/// centers then count from the rotated origin.
struct DecayHistogram {
  std::vector<double> t_ps;
  std::vector<double> counts;
};
DecayHistogram fold_decay(std::span<const std::uint64_t> tags, double period_ps,
                          double bin_width_ps, double peak_fraction = -1.0);

/// Nonlinear least-squares decay fit. Models:
///   exp:     A * exp(-(t - t_first)/T1)
///   biexp:   A * [(1-f) exp(-(t-t_first)/T1) + f exp(-(t-t_first)/tau_slow)]
///   exp_irf: Gaussian-IRF (x) exponential reconvolution + background,
///            irf_sigma_ps must be provided
/// Weighting: Poisson (1/y) for counts >= 10, constant below.
FitResult fit_decay(std::span<const double> t_ps, std::span<const double> counts,
                    DecayModel model, std::optional<double> irf_sigma_ps = std::nullopt);

/// Fano resonance fit of a reflectance spectrum:
///   R(l) = C (q + 2(l-l_c)/w)^2 / (1 + (2(l-l_c)/w)^2) + offset
/// Also tries a pure-Lorentzian submodel and keeps the AIC winner (the q -> inf
/// degeneracy of symmetric dips). Reports lambda_c, w, q, q_factor = lambda_c/w.
FitResult fit_fano(std::span<const double> lambda_nm,
                   std::span<const double> reflectance);

/// Coherence time from the central HOM dip:
///   m(t) = S exp(-|t|/T_env) (1 - V exp(-2|t|/T2))
/// fitted over the center window of a co-polarized HOM histogram. Throws
/// NumericError("dip-not-resolvable: ...") when the center is not at least
/// 20% below the shoulder.
FitResult t2_from_dip(const CorrelationHistogram& co, double period_ps);

// --- generic Levenberg-Marquardt engine (exposed for tests) ---

struct LmOptions {
  int max_iterations = 500;
  double step_tol = 1e-10;
  double grad_tol = 1e-8;
  int multi_start = 3;  // jittered restarts around the initial guess
};

/// Weighted model fit: y_i ~ f(t_i; p). The callback fills model values and,
/// when jac != nullptr, d f/d p_j at every t_i (row-major n x np).
struct LmModel {
  int n_params = 0;
  void (*eval)(const void* ctx, std::span<const double> t, std::span<const double> p,
               std::span<double> f, double* jac) = nullptr;
  const void* ctx = nullptr;
};

struct LmFit {
  std::vector<double> params;
  std::vector<double> sigmas;
  double cost = 0.0;  // 1/2 sum w r^2
  bool converged = false;
  int iterations = 0;
  std::string message;
};

LmFit lm_solve(const LmModel& model, std::span<const double> t,
               std::span<const double> y, std::span<const double> weights,
               std::vector<double> p0, std::span<const double> lower,
               std::span<const double> upper, const LmOptions& opts = {});

/// Poisson-floor weights: 1/max(y, 10).
std::vector<double> poisson_weights(std::span<const double> counts);

/// Evaluates one of the internal fit models and its analytic Jacobian
/// (row-major n x n_params). `aux` is t_first for exp/biexp and irf_sigma for
/// exp_irf; ignored otherwise. Model names: exp, biexp, exp_irf, fano,
/// lorentzian, dip_exp. Exposed for Jacobian verification.
void eval_fit_model(const std::string& name, double aux, std::span<const double> t,
                    std::span<const double> p, std::span<double> f, double* jac);
int fit_model_param_count(const std::string& name);

}  // namespace photonkit
