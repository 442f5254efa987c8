#include "photonkit/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "photonkit/constants.hpp"
#include "photonkit/errors.hpp"
#include "photonkit/physics.hpp"
#include "photonkit/rng.hpp"

namespace photonkit {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

double clampd(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

}  // namespace

std::vector<double> poisson_weights(std::span<const double> counts) {
  std::vector<double> w(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) w[i] = 1.0 / std::max(counts[i], 10.0);
  return w;
}

LmFit lm_solve(const LmModel& model, std::span<const double> t,
               std::span<const double> y, std::span<const double> weights,
               std::vector<double> p0, std::span<const double> lower,
               std::span<const double> upper, const LmOptions& opts) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;

  const int n = static_cast<int>(t.size());
  const int np = model.n_params;
  if (n < np) throw NumericError("lm_solve: fewer data points than parameters");

  std::vector<double> fbuf(n), jbuf(static_cast<std::size_t>(n) * np);

  auto cost_of = [&](const std::vector<double>& p, VectorXd* r_out, MatrixXd* J_out) {
    model.eval(model.ctx, t, p, fbuf, J_out ? jbuf.data() : nullptr);
    double cost = 0.0;
    if (r_out) r_out->resize(n);
    if (J_out) J_out->resize(n, np);
    for (int i = 0; i < n; ++i) {
      const double sw = std::sqrt(weights[i]);
      const double ri = sw * (fbuf[i] - y[i]);
      cost += 0.5 * ri * ri;
      if (r_out) (*r_out)(i) = ri;
      if (J_out)
        for (int j = 0; j < np; ++j) (*J_out)(i, j) = sw * jbuf[i * np + j];
    }
    return cost;
  };

  auto run_from = [&](std::vector<double> p) {
    LmFit fit;
    for (int j = 0; j < np; ++j) p[j] = clampd(p[j], lower[j], upper[j]);

    VectorXd r;
    MatrixXd J;
    double cost = cost_of(p, &r, &J);
    double lambda = 1e-3;
    bool converged = false;
    std::string message = "max iterations reached";
    int it = 0;

    for (it = 0; it < opts.max_iterations; ++it) {
      const MatrixXd JtJ = J.transpose() * J;
      const VectorXd g = J.transpose() * r;
      if (g.lpNorm<Eigen::Infinity>() < opts.grad_tol) {
        converged = true;
        message = "gradient tolerance";
        break;
      }
      // damped normal equations with bound clamping on the trial point
      bool stepped = false;
      for (int tries = 0; tries < 24 && !stepped; ++tries) {
        MatrixXd A = JtJ;
        for (int j = 0; j < np; ++j)
          A(j, j) += lambda * std::max(JtJ(j, j), 1e-12);
        const VectorXd delta = A.ldlt().solve(-g);
        if (!delta.allFinite()) {
          lambda *= 10.0;
          continue;
        }
        std::vector<double> trial(p);
        for (int j = 0; j < np; ++j) {
          // approach bounds geometrically: jumping straight onto a bound can
          // land time constants in a zero-gradient dead zone
          double step = delta(j);
          if (step < 0.0) step = std::max(step, -0.7 * (p[j] - lower[j]));
          if (step > 0.0) step = std::min(step, 0.7 * (upper[j] - p[j]));
          trial[j] = clampd(p[j] + step, lower[j], upper[j]);
        }
        const double trial_cost = cost_of(trial, nullptr, nullptr);
        if (std::isfinite(trial_cost) && trial_cost < cost) {
          double step_norm = 0.0, p_norm = 0.0;
          for (int j = 0; j < np; ++j) {
            step_norm += (trial[j] - p[j]) * (trial[j] - p[j]);
            p_norm += p[j] * p[j];
          }
          p = trial;
          cost = cost_of(p, &r, &J);
          lambda = std::max(lambda / 3.0, 1e-12);
          stepped = true;
          if (std::sqrt(step_norm) < opts.step_tol * (std::sqrt(p_norm) + opts.step_tol)) {
            converged = true;
            message = "step tolerance";
          }
        } else {
          lambda *= 4.0;
        }
      }
      if (!stepped) {
        converged = true;  // no downhill direction left at machine precision
        message = "no further decrease";
        break;
      }
      if (converged) break;
    }

    fit.params = p;
    fit.cost = cost;
    fit.converged = converged;
    fit.iterations = it;
    fit.message = message;

    // 1-sigma from the (scaled) inverse normal matrix at the optimum
    cost_of(p, &r, &J);
    const MatrixXd JtJ = J.transpose() * J;
    const double dof = std::max(1, n - np);
    const double s2 = std::max(1.0, 2.0 * cost / dof);  // inflate when underfitting
    const MatrixXd cov = JtJ.completeOrthogonalDecomposition().pseudoInverse() * s2;
    fit.sigmas.resize(np);
    for (int j = 0; j < np; ++j)
      fit.sigmas[j] = cov(j, j) > 0.0 ? std::sqrt(cov(j, j)) : 0.0;

    // a positive-definite parameter crushed onto its tiny lower floor means
    // the optimizer walked into a degenerate corner (bounds are approached
    // geometrically, never reached exactly)
    for (int j = 0; j < np; ++j) {
      const bool epsilon_floor = lower[j] > 0.0 && lower[j] < 1e-3 * upper[j];
      if (epsilon_floor && p[j] <= 2.0 * lower[j]) {
        fit.converged = false;
        fit.message = "parameter collapsed to lower bound";
      }
    }
    return fit;
  };

  LmFit best = run_from(p0);
  for (int ms = 1; ms < opts.multi_start; ++ms) {
    std::vector<double> p(p0);
    CounterRng jitter(0x9e3779b97f4a7c15ull, rng_stream::synth + 100, ms, 0);
    for (auto& v : p) v *= 1.0 + 0.25 * (jitter.uniform() - 0.5);
    const LmFit alt = run_from(p);
    const bool better = (alt.converged && !best.converged) ||
                        (alt.converged == best.converged && alt.cost < best.cost);
    if (better) best = alt;
  }
  return best;
}

// ---------------------------------------------------------------------------
// decay models

namespace {

struct ExpCtx {
  double t0;
};

void eval_exp(const void* ctx, std::span<const double> t, std::span<const double> p,
              std::span<double> f, double* jac) {
  const double t0 = static_cast<const ExpCtx*>(ctx)->t0;
  const double a = p[0], tau = p[1];
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double dt = t[i] - t0;
    const double e = std::exp(-dt / tau);
    f[i] = a * e;
    if (jac) {
      jac[i * 2 + 0] = e;
      jac[i * 2 + 1] = a * e * dt / (tau * tau);
    }
  }
}

void eval_biexp(const void* ctx, std::span<const double> t, std::span<const double> p,
                std::span<double> f, double* jac) {
  const double t0 = static_cast<const ExpCtx*>(ctx)->t0;
  const double a = p[0], tau1 = p[1], tau2 = p[2], frac = p[3];
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double dt = t[i] - t0;
    const double e1 = std::exp(-dt / tau1);
    const double e2 = std::exp(-dt / tau2);
    f[i] = a * ((1.0 - frac) * e1 + frac * e2);
    if (jac) {
      jac[i * 4 + 0] = (1.0 - frac) * e1 + frac * e2;
      jac[i * 4 + 1] = a * (1.0 - frac) * e1 * dt / (tau1 * tau1);
      jac[i * 4 + 2] = a * frac * e2 * dt / (tau2 * tau2);
      jac[i * 4 + 3] = a * (e2 - e1);
    }
  }
}

// Gaussian-IRF (x) exponential reconvolution:
//   m(t) = A/2 exp(u) erfc(v) + bg,
//   u = s^2/(2 T^2) - (t-t0)/T,  v = (s/T - (t-t0)/s)/sqrt(2)
struct IrfCtx {
  double sigma;
};

void eval_exp_irf(const void* ctx, std::span<const double> t, std::span<const double> p,
                  std::span<double> f, double* jac) {
  const double s = static_cast<const IrfCtx*>(ctx)->sigma;
  const double a = p[0], tau = p[1], t0 = p[2], bg = p[3];
  const double two_over_sqrt_pi = 2.0 / std::sqrt(constants::pi);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double dt = t[i] - t0;
    const double v = (s / tau - dt / s) / kSqrt2;
    // exp(u) erfc(v) = exp(u - v^2) erfcx(v) with u - v^2 = -dt^2/(2 s^2).
    // Deep in the tail (v << 0) erfcx overflows while erfc(v) == 2 exactly,
    // so the expression switches to 2 exp(u) there.
    const double e_uv = std::exp(-dt * dt / (2.0 * s * s));
    const double core =
        v > -6.0 ? e_uv * physics::erfcx(v)
                 : 2.0 * std::exp(s * s / (2.0 * tau * tau) - dt / tau);
    f[i] = 0.5 * a * core + bg;
    if (jac) {
      const double du_dtau = -s * s / (tau * tau * tau) + dt / (tau * tau);
      const double dv_dtau = -s / (kSqrt2 * tau * tau);
      const double du_dt0 = 1.0 / tau;
      const double dv_dt0 = 1.0 / (kSqrt2 * s);
      // d [exp(u) erfc(v)] = core du - exp(u - v^2) 2/sqrt(pi) dv
      jac[i * 4 + 0] = 0.5 * core;
      jac[i * 4 + 1] = 0.5 * a * (core * du_dtau - e_uv * two_over_sqrt_pi * dv_dtau);
      jac[i * 4 + 2] = 0.5 * a * (core * du_dt0 - e_uv * two_over_sqrt_pi * dv_dt0);
      jac[i * 4 + 3] = 1.0;
    }
  }
}

FitResult package(const LmFit& fit, const std::string& model,
                  std::span<const char* const> names) {
  FitResult r;
  r.model = model;
  r.converged = fit.converged;
  r.iterations = fit.iterations;
  r.message = fit.message;
  r.residual_norm = std::sqrt(2.0 * fit.cost);
  r.weighting = "poisson>=10";
  for (std::size_t j = 0; j < names.size(); ++j)
    r.params.push_back({names[j], fit.params[j], fit.sigmas[j]});
  return r;
}

// A time constant is unconstrained when its 1-sigma exceeds half its value or
// when it exceeds the observed span (flat-noise inputs land in a degenerate
// long-tau direction with either signature).
FitResult reliability_check(FitResult r, std::initializer_list<const char*> taus,
                            double span_ps) {
  for (const char* name : taus) {
    const auto* p = r.find(name);
    if (!p) continue;
    const bool noisy_sigma =
        p->sigma > 0.5 * std::abs(p->value) || !(p->sigma > 0.0);
    const bool beyond_span = p->value > span_ps;
    if (noisy_sigma || beyond_span) {
      r.converged = false;
      r.message = std::string(name) + " unconstrained by data";
    }
  }
  return r;
}

// log-linear regression on positive counts for exponential inits
std::pair<double, double> log_linear_tau(std::span<const double> t,
                                         std::span<const double> y, double t0) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (y[i] <= 0.0) continue;
    const double x = t[i] - t0, ly = std::log(y[i]);
    sx += x;
    sy += ly;
    sxx += x * x;
    sxy += x * ly;
    ++n;
  }
  if (n < 2) return {1.0, t.empty() ? 1.0 : std::max(1.0, t.back() - t0)};
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) return {1.0, 1.0};
  const double slope = (n * sxy - sx * sy) / denom;
  const double icept = (sy - slope * sx) / n;
  const double tau = slope < 0.0 ? -1.0 / slope : std::max(1.0, t.back() - t0);
  return {std::exp(icept), tau};
}

}  // namespace

DecayHistogram fold_decay(std::span<const std::uint64_t> tags, double period_ps,
                          double bin_width_ps, double peak_fraction) {
  DecayHistogram h;
  const auto nbins = static_cast<std::size_t>(std::ceil(period_ps / bin_width_ps));
  h.counts.assign(nbins, 0.0);
  h.t_ps.resize(nbins);
  for (std::size_t i = 0; i < nbins; ++i)
    h.t_ps[i] = (static_cast<double>(i) + 0.5) * bin_width_ps;
  for (const std::uint64_t tag : tags) {
    const double phase = std::fmod(static_cast<double>(tag), period_ps);
    const auto idx = static_cast<std::size_t>(phase / bin_width_ps);
    if (idx < nbins) h.counts[idx] += 1.0;
  }
  if (peak_fraction > 0.0 && peak_fraction < 1.0 && nbins > 1) {
    const std::size_t imax = static_cast<std::size_t>(
        std::max_element(h.counts.begin(), h.counts.end()) - h.counts.begin());
    const auto target = static_cast<std::size_t>(peak_fraction * nbins);
    const std::size_t shift = (imax + nbins - target) % nbins;
    std::rotate(h.counts.begin(), h.counts.begin() + shift, h.counts.end());
  }
  return h;
}

FitResult fit_decay(std::span<const double> t_ps, std::span<const double> counts,
                    DecayModel model, std::optional<double> irf_sigma_ps) {
  if (t_ps.size() != counts.size())
    throw std::invalid_argument("fit_decay: size mismatch");
  int above_floor = 0;
  for (const double c : counts) above_floor += (c > 1.0);
  if (above_floor < 30)
    throw std::invalid_argument("fit_decay: need >= 30 bins above the noise floor");

  const auto weights = poisson_weights(counts);
  const double peak = *std::max_element(counts.begin(), counts.end());
  const double t_first = t_ps.front();
  const double span_t = t_ps.back() - t_ps.front();

  if (model == DecayModel::exp) {
    const ExpCtx ctx{t_first};
    auto [a0, tau0] = log_linear_tau(t_ps, counts, t_first);
    const LmModel m{2, &eval_exp, &ctx};
    const std::vector<double> lo{0.0, 1e-3}, hi{1e18, 1e7};
    const auto fit =
        lm_solve(m, t_ps, counts, weights, {std::max(a0, 1e-6), tau0}, lo, hi, {});
    static const char* names[] = {"amplitude", "t1_ps"};
    return reliability_check(package(fit, "exp", names), {"t1_ps"}, span_t);
  }

  if (model == DecayModel::biexp) {
    const ExpCtx ctx{t_first};
    // slow branch from the last third, fast from the first third
    const std::size_t cut = t_ps.size() * 2 / 3;
    auto [as, tau_slow0] = log_linear_tau(t_ps.subspan(cut), counts.subspan(cut), t_first);
    auto [af, tau_fast0] =
        log_linear_tau(t_ps.first(t_ps.size() / 3), counts.first(t_ps.size() / 3), t_first);
    (void)as;
    (void)af;
    if (tau_slow0 <= tau_fast0) tau_slow0 = 8.0 * tau_fast0;
    const LmModel m{4, &eval_biexp, &ctx};
    const std::vector<double> lo{0.0, 1e-3, 1e-3, 0.0}, hi{1e18, 1e7, 1e7, 1.0};
    const auto fit = lm_solve(m, t_ps, counts, weights,
                              {peak, tau_fast0, tau_slow0, 0.2}, lo, hi, {});
    static const char* names[] = {"amplitude", "t1_ps", "tau_slow_ps", "slow_fraction"};
    return reliability_check(package(fit, "biexp", names), {"t1_ps", "tau_slow_ps"}, span_t);
  }

  // exp_irf
  if (!irf_sigma_ps || !(*irf_sigma_ps > 0.0))
    throw std::invalid_argument("fit_decay: exp_irf model requires irf_sigma_ps > 0");
  const IrfCtx ctx{*irf_sigma_ps};
  // rising edge near the histogram maximum
  const std::size_t imax = static_cast<std::size_t>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());
  const double t0_guess = t_ps[imax];
  auto [aa, tau0] =
      log_linear_tau(t_ps.subspan(imax), counts.subspan(imax), t_ps[imax]);
  (void)aa;
  const LmModel m{4, &eval_exp_irf, &ctx};
  // background may drift slightly negative as a nuisance parameter
  const std::vector<double> lo{0.0, 1e-3, t_first - span_t, -0.2 * peak};
  const std::vector<double> hi{1e18, 1e7, t_ps.back(), peak};
  const auto fit = lm_solve(m, t_ps, counts, weights,
                            {peak, std::max(tau0, 1.0), t0_guess, 0.0}, lo, hi, {});
  static const char* names[] = {"amplitude", "t1_ps", "t0_ps", "background"};
  return reliability_check(package(fit, "exp_irf", names), {"t1_ps"}, span_t);
}

// ---------------------------------------------------------------------------
// Fano / Lorentzian

namespace {

void eval_fano(const void*, std::span<const double> t, std::span<const double> p,
               std::span<double> f, double* jac) {
  const double c = p[0], q = p[1], lc = p[2], w = p[3], off = p[4];
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = 2.0 * (t[i] - lc) / w;
    const double d = 1.0 + x * x;
    const double num = (q + x) * (q + x);
    f[i] = c * num / d + off;
    if (jac) {
      const double dx_dlc = -2.0 / w;
      const double dx_dw = -x / w;
      // d/dx [ (q+x)^2 / (1+x^2) ] = 2(q+x)(1 - qx) / (1+x^2)^2
      const double dfdx = c * 2.0 * (q + x) * (1.0 - q * x) / (d * d);
      jac[i * 5 + 0] = num / d;
      jac[i * 5 + 1] = c * 2.0 * (q + x) / d;
      jac[i * 5 + 2] = dfdx * dx_dlc;
      jac[i * 5 + 3] = dfdx * dx_dw;
      jac[i * 5 + 4] = 1.0;
    }
  }
}

void eval_lorentz(const void*, std::span<const double> t, std::span<const double> p,
                  std::span<double> f, double* jac) {
  const double c = p[0], lc = p[1], w = p[2], off = p[3];
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = 2.0 * (t[i] - lc) / w;
    const double d = 1.0 + x * x;
    f[i] = c / d + off;
    if (jac) {
      const double dfdx = -c * 2.0 * x / (d * d);
      jac[i * 4 + 0] = 1.0 / d;
      jac[i * 4 + 1] = dfdx * (-2.0 / w);
      jac[i * 4 + 2] = dfdx * (-x / w);
      jac[i * 4 + 3] = 1.0;
    }
  }
}

double aic_of(double cost, int n, int k) {
  const double rss = std::max(2.0 * cost, 1e-300);
  return n * std::log(rss / n) + 2.0 * k;
}

}  // namespace

FitResult fit_fano(std::span<const double> lambda_nm,
                   std::span<const double> reflectance) {
  if (lambda_nm.size() != reflectance.size())
    throw std::invalid_argument("fit_fano: size mismatch");
  if (lambda_nm.size() < 50)
    throw std::invalid_argument("fit_fano: need >= 50 samples spanning the resonance");

  const std::size_t n = lambda_nm.size();
  const std::vector<double> unit_weights(n, 1.0);

  // baseline from the span edges, resonance at the largest deviation
  const double edge =
      0.5 * (std::accumulate(reflectance.begin(), reflectance.begin() + 5, 0.0) +
             std::accumulate(reflectance.end() - 5, reflectance.end(), 0.0)) /
      5.0;
  std::size_t iext = 0;
  double dev = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(reflectance[i] - edge);
    if (d > dev) {
      dev = d;
      iext = i;
    }
  }
  const double lc0 = lambda_nm[iext];
  const double span = lambda_nm.back() - lambda_nm.front();
  const double w0 = span / 15.0;
  const double depth = reflectance[iext] - edge;

  // full Fano
  const LmModel mf{5, &eval_fano, nullptr};
  const std::vector<double> lof{-1e6, -1e3, lambda_nm.front(), span * 1e-4, -1e6};
  const std::vector<double> hif{1e6, 1e3, lambda_nm.back(), span, 1e6};
  const auto fano = lm_solve(mf, lambda_nm, reflectance, unit_weights,
                             {depth, 1.0, lc0, w0, edge}, lof, hif, {});

  // Lorentzian submodel (the symmetric q -> inf limit)
  const LmModel ml{4, &eval_lorentz, nullptr};
  const std::vector<double> lol{-1e6, lambda_nm.front(), span * 1e-4, -1e6};
  const std::vector<double> hil{1e6, lambda_nm.back(), span, 1e6};
  const auto lor = lm_solve(ml, lambda_nm, reflectance, unit_weights,
                            {depth, lc0, w0, edge}, lol, hil, {});

  const double aic_f = fano.converged ? aic_of(fano.cost, static_cast<int>(n), 5) : 1e300;
  const double aic_l = lor.converged ? aic_of(lor.cost, static_cast<int>(n), 4) : 1e300;

  FitResult r;
  r.model = "fano";
  r.weighting = "unweighted";
  if (aic_l < aic_f) {
    r.converged = lor.converged;
    r.iterations = lor.iterations;
    r.message = "lorentzian submodel selected by AIC";
    r.residual_norm = std::sqrt(2.0 * lor.cost);
    r.params = {{"amplitude", lor.params[0], lor.sigmas[0]},
                {"lambda_c_nm", lor.params[1], lor.sigmas[1]},
                {"width_nm", lor.params[2], lor.sigmas[2]},
                {"offset", lor.params[3], lor.sigmas[3]}};
    const double q_factor = lor.params[1] / lor.params[2];
    const double rel = std::sqrt(std::pow(lor.sigmas[1] / lor.params[1], 2) +
                                 std::pow(lor.sigmas[2] / lor.params[2], 2));
    r.params.push_back({"q_factor", q_factor, std::abs(q_factor) * rel});
  } else {
    r.converged = fano.converged;
    r.iterations = fano.iterations;
    r.message = fano.message;
    r.residual_norm = std::sqrt(2.0 * fano.cost);
    r.params = {{"amplitude", fano.params[0], fano.sigmas[0]},
                {"fano_q", fano.params[1], fano.sigmas[1]},
                {"lambda_c_nm", fano.params[2], fano.sigmas[2]},
                {"width_nm", fano.params[3], fano.sigmas[3]},
                {"offset", fano.params[4], fano.sigmas[4]}};
    const double q_factor = fano.params[2] / fano.params[3];
    const double rel = std::sqrt(std::pow(fano.sigmas[2] / fano.params[2], 2) +
                                 std::pow(fano.sigmas[3] / fano.params[3], 2));
    r.params.push_back({"q_factor", q_factor, std::abs(q_factor) * rel});
  }

  // resonance outside the sampled span is not a usable fit
  const double lc = r.value_of("lambda_c_nm");
  if (lc <= lambda_nm.front() || lc >= lambda_nm.back()) {
    r.converged = false;
    r.message = "resonance outside sampled span";
  }
  return r;
}

// ---------------------------------------------------------------------------
// HOM dip

namespace {

void eval_dip(const void*, std::span<const double> t, std::span<const double> p,
              std::span<double> f, double* jac) {
  const double s = p[0], tenv = p[1], vis = p[2], t2 = p[3];
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double at = std::abs(t[i]);
    const double env = std::exp(-at / tenv);
    const double dip = std::exp(-2.0 * at / t2);
    f[i] = s * env * (1.0 - vis * dip);
    if (jac) {
      jac[i * 4 + 0] = env * (1.0 - vis * dip);
      jac[i * 4 + 1] = s * env * (1.0 - vis * dip) * at / (tenv * tenv);
      jac[i * 4 + 2] = -s * env * dip;
      jac[i * 4 + 3] = -s * env * vis * dip * 2.0 * at / (t2 * t2);
    }
  }
}

}  // namespace

void eval_fit_model(const std::string& name, double aux, std::span<const double> t,
                    std::span<const double> p, std::span<double> f, double* jac) {
  if (name == "exp") {
    const ExpCtx ctx{aux};
    eval_exp(&ctx, t, p, f, jac);
  } else if (name == "biexp") {
    const ExpCtx ctx{aux};
    eval_biexp(&ctx, t, p, f, jac);
  } else if (name == "exp_irf") {
    const IrfCtx ctx{aux};
    eval_exp_irf(&ctx, t, p, f, jac);
  } else if (name == "fano") {
    eval_fano(nullptr, t, p, f, jac);
  } else if (name == "lorentzian") {
    eval_lorentz(nullptr, t, p, f, jac);
  } else if (name == "dip_exp") {
    eval_dip(nullptr, t, p, f, jac);
  } else {
    throw std::invalid_argument("eval_fit_model: unknown model " + name);
  }
}

int fit_model_param_count(const std::string& name) {
  if (name == "exp") return 2;
  if (name == "biexp") return 4;
  if (name == "exp_irf") return 4;
  if (name == "fano") return 5;
  if (name == "lorentzian") return 4;
  if (name == "dip_exp") return 4;
  throw std::invalid_argument("fit_model_param_count: unknown model " + name);
}

FitResult t2_from_dip(const CorrelationHistogram& co, double period_ps) {
  // center window only
  std::vector<double> t, y;
  for (std::size_t i = 0; i < co.counts.size(); ++i) {
    const double c = co.bin_center_ps(i);
    if (std::abs(c) < 0.5 * period_ps) {
      t.push_back(c);
      y.push_back(static_cast<double>(co.counts[i]));
    }
  }
  if (t.size() < 30) throw std::invalid_argument("t2_from_dip: too few center bins");

  // smooth profile for the resolvability check
  const std::size_t half = std::max<std::size_t>(2, t.size() / 400);
  auto smooth_at = [&](std::size_t i) {
    const std::size_t lo = i > half ? i - half : 0;
    const std::size_t hi = std::min(t.size() - 1, i + half);
    double s = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) s += y[k];
    return s / static_cast<double>(hi - lo + 1);
  };
  std::size_t icenter = 0;
  double best = 1e300;
  double shoulder = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::abs(t[i]) < best) {
      best = std::abs(t[i]);
      icenter = i;
    }
  }
  for (std::size_t i = 0; i < t.size(); ++i) shoulder = std::max(shoulder, smooth_at(i));
  const double center_level = smooth_at(icenter);
  if (shoulder <= 0.0 || center_level >= 0.8 * shoulder)
    throw NumericError(
        "dip-not-resolvable: center is not at least 20% below the shoulder");

  const auto weights = poisson_weights(y);
  const LmModel m{4, &eval_dip, nullptr};
  const double span = 0.5 * period_ps;
  const std::vector<double> lo{0.0, 1.0, 0.0, 1e-2};
  const std::vector<double> hi{1e18, 1e7, 1.0, 10.0 * span};

  // stage the initialization: LM envelope fit on the dip-free wings first
  std::vector<double> wing_at, wing_y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::abs(t[i]) >= 0.3 * span) {
      wing_at.push_back(std::abs(t[i]));
      wing_y.push_back(y[i]);
    }
  }
  double s0 = shoulder, tenv0 = span;
  {
    const ExpCtx wctx{0.0};
    const LmModel wm{2, &eval_exp, &wctx};
    const std::vector<double> wlo{0.0, 1.0}, whi{1e18, 1e7};
    LmOptions wopts;
    wopts.multi_start = 1;
    const auto wfit = lm_solve(wm, wing_at, wing_y, poisson_weights(wing_y),
                               {shoulder * 1.5, span / 3.0}, wlo, whi, wopts);
    if (wfit.converged && wfit.params[0] > 0.0) {
      s0 = wfit.params[0];
      tenv0 = wfit.params[1];
    }
  }
  // dip half-depth point as the T2 scale guess
  double t2_guess = span / 10.0;
  for (std::size_t i = icenter; i < t.size(); ++i) {
    if (smooth_at(i) > 0.5 * (center_level + shoulder)) {
      t2_guess = std::max(1.0, 2.0 * std::abs(t[i]));
      break;
    }
  }
  const double v0 = clampd(1.0 - center_level / s0, 0.05, 1.0);
  // t2 collapse to the bound is a dead zone (no gradient); escape it by
  // restarting across dip-width scales and keeping the cheapest fit
  LmOptions opts;
  opts.multi_start = 1;
  LmFit fit;
  fit.cost = 1e300;
  fit.converged = false;
  for (const double scale : {1.0, 0.25, 5.0, 25.0}) {
    const auto cand = lm_solve(m, t, y, weights,
                               {s0, tenv0, v0, std::min(t2_guess * scale, 5.0 * span)},
                               lo, hi, opts);
    const bool better = (cand.converged && !fit.converged) ||
                        (cand.converged == fit.converged && cand.cost < fit.cost);
    if (better) fit = cand;
  }
  static const char* names[] = {"shoulder", "t_env_ps", "dip_visibility", "t2_ps"};
  return reliability_check(package(fit, "dip_exp", names), {"t2_ps"}, period_ps);
}

}  // namespace photonkit
