#include "phi4/solver.hpp"

#include <algorithm>
#include <cmath>

#include "phi4/fft.hpp"
#include "phi4/kernels.hpp"

namespace phi4 {

namespace {

double phi1(double z) { return z == 0.0 ? 1.0 : std::expm1(z) / z; }

std::vector<double> lambdas(const TorusGrid& grid) {
  auto m = wavenumber_magnitudes(grid);
  for (auto& v : m) v *= v;
  return m;
}

double spec_l1_diff(const SpectralField& a, const SpectralField& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.coeffs.size(); ++i) s += std::abs(a.coeffs[i] - b.coeffs[i]);
  return s;
}

bool finite_spectrum(const SpectralField& a) {
  for (const auto& c : a.coeffs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

}  // namespace

std::vector<std::string> config_warnings(const SolverConfig& c) {
  std::vector<std::string> w;
  if (!(0.0 < c.alpha && c.alpha < c.alpha_prime))
    w.push_back("expected 0 < alpha < alpha_prime");
  if (!(1.0 < c.beta && c.beta < 2.0)) w.push_back("expected 1 < beta < 2");
  if (!(c.alpha_prime * (c.p_diag + 2) < 1.0))
    w.push_back("alpha_prime*(p+2) >= 1 violates the a-priori-bound condition");
  if (c.p_diag < 4 || c.p_diag % 2 != 0) w.push_back("p_diag should be even and >= 4");
  return w;
}

SpectralField psi_hat(const SpectralField& Y, const SpectralField& z1,
                      const SpectralField& z2, const SpectralField& z3, double a) {
  const TorusGrid& g = Y.grid;
  if (!(g == z1.grid && g == z2.grid && g == z3.grid))
    throw GridMismatch("psi inputs on different grids");
  const int n = g.points_per_side;
  const int np = detail::padded_size(n, 2, 1);  // exact cubic convolution
  auto by = detail::pad_spectrum(Y, np);
  auto b1 = detail::pad_spectrum(z1, np);
  auto b2 = detail::pad_spectrum(z2, np);
  fft::backward(np, by.data(), by.data());
  fft::backward(np, b1.data(), b1.data());
  fft::backward(np, b2.data(), b2.data());
  const size_t np2 = by.size();
  std::vector<double> ry(np2), r1(np2), r2(np2), cub(np2);
  for (size_t i = 0; i < np2; ++i) {
    ry[i] = by[i].real();
    r1[i] = b1[i].real();
    r2[i] = b2[i].real();
  }
  kernels::cubic_terms(ry.data(), r1.data(), r2.data(), cub.data(), np2);
  for (size_t i = 0; i < np2; ++i) by[i] = cub[i];
  fft::forward(np, by.data(), by.data());
  const double scale = 1.0 / (static_cast<double>(np) * np);
  for (auto& c : by) c *= scale;
  SpectralField out = detail::extract_band(by, np, g);
  for (size_t i = 0; i < out.coeffs.size(); ++i)
    out.coeffs[i] += -z3.coeffs[i] + a * (Y.coeffs[i] + z1.coeffs[i]);
  return out;
}

RealField psi(const RealField& Y, const RealField& z1, const RealField& z2,
              const RealField& z3, double a) {
  return inverse_transform(psi_hat(forward_transform(Y), forward_transform(z1),
                                   forward_transform(z2), forward_transform(z3), a));
}

SpectralField step_mild_hat(const SpectralField& Y, const SpectralField& psi_of_Y,
                            double dt) {
  SpectralField out = Y;
  const auto lam = lambdas(Y.grid);
  for (size_t i = 0; i < out.coeffs.size(); ++i) {
    const double z = -lam[i] * dt;
    out.coeffs[i] = std::exp(z) * Y.coeffs[i] + dt * phi1(z) * psi_of_Y.coeffs[i];
  }
  return out;
}

RealField step_mild(const RealField& Y, const RealField& z1, const RealField& z2,
                    const RealField& z3, double dt, const SolverConfig& config) {
  if (!(dt > 0.0)) throw Error("dt must be positive");
  SpectralField Yh = forward_transform(Y);
  SpectralField P = psi_hat(Yh, forward_transform(z1), forward_transform(z2),
                            forward_transform(z3), config.a);
  return inverse_transform(step_mild_hat(Yh, P, dt));
}

// --------------------------------------------------------------------------
WickStackSource::WickStackSource(const WickStack& st) : stack_(&st) {
  for (size_t i = 0; i < st.times.size(); ++i) {
    z1_.push_back(forward_transform(st.Z[i]));
    z2_.push_back(forward_transform(st.Z2[i]));
    z3_.push_back(forward_transform(st.Z3[i]));
  }
}

const TorusGrid& WickStackSource::grid() const { return stack_->grid; }

void WickStackSource::slice(double t, SpectralField& z1, SpectralField& z2,
                            SpectralField& z3) {
  const auto& tm = stack_->times;
  if (tm.empty() || t < tm.front() - 1e-9 || t > tm.back() + 1e-9)
    throw TimeOutOfRange("stack does not cover requested time");
  auto it = std::lower_bound(tm.begin(), tm.end(), t - 1e-9);
  size_t i = static_cast<size_t>(it - tm.begin());
  if (i < tm.size() && std::fabs(tm[i] - t) <= 1e-9) {
    z1 = z1_[i];
    z2 = z2_[i];
    z3 = z3_[i];
    return;
  }
  size_t lo = i - 1, hi = i;
  double w = (t - tm[lo]) / (tm[hi] - tm[lo]);
  auto mix = [w](const SpectralField& a, const SpectralField& b) {
    SpectralField out = a;
    for (size_t k = 0; k < out.coeffs.size(); ++k)
      out.coeffs[k] = (1.0 - w) * a.coeffs[k] + w * b.coeffs[k];
    return out;
  };
  z1 = mix(z1_[lo], z1_[hi]);
  z2 = mix(z2_[lo], z2_[hi]);
  z3 = mix(z3_[lo], z3_[hi]);
}

StreamingStackSource::StreamingStackSource(const NoiseStream& stream,
                                           const TorusGrid& grid, double base_step,
                                           const RealField* X0)
    : grid_(grid), path_(stream, grid, base_step) {
  if (X0) {
    if (!(X0->grid == grid)) throw GridMismatch("X0 grid differs");
    x0_hat_ = forward_transform(*X0);
    has_x0_ = true;
  }
}

const TorusGrid& StreamingStackSource::grid() const { return grid_; }

void StreamingStackSource::materialize(double t) {
  if (cached_t_ >= 0.0 && std::fabs(t - cached_t_) <= 1e-12) return;
  if (t < cached_t_) throw Error("streaming stack is forward-only");
  path_.advance(t - path_.time());
  SpectralField W = path_.spectrum();
  if (negated_)
    for (auto& c : W.coeffs) c = -c;
  SpectralField V(grid_);
  if (has_x0_) {
    V = x0_hat_;
    const auto lam = lambdas(grid_);
    for (size_t i = 0; i < V.coeffs.size(); ++i) V.coeffs[i] *= std::exp(-t * lam[i]);
    if (negated_)
      for (auto& c : V.coeffs) c = -c;
  }
  RealField w = inverse_transform(W);
  RealField v = has_x0_ ? inverse_transform(V) : RealField(grid_);
  const double c = grid_wick_variance(grid_, t);
  auto zz = wick_powers(w, v, c, c);
  // shift caches
  prev_t_ = cached_t_;
  p1_ = std::move(c1_);
  p2_ = std::move(c2_);
  p3_ = std::move(c3_);
  c1_ = W;
  for (size_t i = 0; i < c1_.coeffs.size(); ++i) c1_.coeffs[i] += V.coeffs[i];
  c2_ = forward_transform(zz[1]);
  c3_ = forward_transform(zz[2]);
  cached_t_ = t;
}

void StreamingStackSource::slice(double t, SpectralField& z1, SpectralField& z2,
                                 SpectralField& z3) {
  if (prev_t_ >= 0.0 && std::fabs(t - prev_t_) <= 1e-12) {
    z1 = p1_;
    z2 = p2_;
    z3 = p3_;
    return;
  }
  materialize(t);
  z1 = c1_;
  z2 = c2_;
  z3 = c3_;
}

// --------------------------------------------------------------------------
namespace {

struct WindowData {
  std::vector<double> tnodes;                   // w+1 node times
  std::vector<SpectralField> node1;             // z1 at nodes
  std::vector<SpectralField> mid1, mid2, mid3;  // stack at step midpoints
};

WindowData gather_window(StackSource& src, double t0, int w, double dt) {
  WindowData wd;
  SpectralField a1, a2, a3, b1, b2, b3;
  src.slice(t0, a1, a2, a3);
  wd.tnodes.push_back(t0);
  wd.node1.push_back(a1);
  for (int j = 0; j < w; ++j) {
    double t1 = t0 + (j + 1) * dt;
    src.slice(t1, b1, b2, b3);
    wd.tnodes.push_back(t1);
    wd.node1.push_back(b1);
    auto avg = [](const SpectralField& x, const SpectralField& y) {
      SpectralField out = x;
      for (size_t i = 0; i < out.coeffs.size(); ++i)
        out.coeffs[i] = 0.5 * (x.coeffs[i] + y.coeffs[i]);
      return out;
    };
    wd.mid1.push_back(avg(a1, b1));
    wd.mid2.push_back(avg(a2, b2));
    wd.mid3.push_back(avg(a3, b3));
    a1 = b1;
    a2 = b2;
    a3 = b3;
  }
  return wd;
}

// Apply the discrete mild map to `old`: out[j+1] = E out[j] + dt phi1 Psi(old[j]).
// Also returns the Psi values used.
struct MapResult {
  std::vector<SpectralField> Y;
  std::vector<SpectralField> psi;
  bool finite = true;
};

MapResult apply_map(const std::vector<SpectralField>& old, const WindowData& wd,
                    int w, double dt, double a) {
  MapResult r;
  r.Y.resize(w + 1);
  r.psi.resize(w);
  r.Y[0] = old[0];
  for (int j = 0; j < w; ++j) {
    r.psi[j] = psi_hat(old[j], wd.mid1[j], wd.mid2[j], wd.mid3[j], a);
    r.Y[j + 1] = step_mild_hat(r.Y[j], r.psi[j], dt);
    if (!finite_spectrum(r.Y[j + 1])) {
      r.finite = false;
      break;
    }
  }
  return r;
}

// Plain forward sweep (the fixed point of apply_map).
MapResult forward_sweep(const SpectralField& Y0, const WindowData& wd, int w,
                        double dt, double a) {
  MapResult r;
  r.Y.resize(w + 1);
  r.psi.resize(w);
  r.Y[0] = Y0;
  for (int j = 0; j < w; ++j) {
    r.psi[j] = psi_hat(r.Y[j], wd.mid1[j], wd.mid2[j], wd.mid3[j], a);
    r.Y[j + 1] = step_mild_hat(r.Y[j], r.psi[j], dt);
    if (!finite_spectrum(r.Y[j + 1])) {
      r.finite = false;
      break;
    }
  }
  return r;
}

struct WindowSolve {
  MapResult traj;       // converged trajectory + fresh psi per step
  int iterations = 0;
  double resub_error = 0.0;
  std::vector<double> iter_diffs;
};

// Successive differences are measured by the spectral l1 norm of the coefficient
// difference, an upper bound for the sup norm.
WindowSolve solve_window(const SpectralField& Ystart, const WindowData& wd, int w,
                         const SolverConfig& cfg) {
  WindowSolve out;
  if (cfg.picard_init == SolverConfig::PicardInit::Warm) {
    MapResult sweep = forward_sweep(Ystart, wd, w, cfg.dt, cfg.a);
    if (!sweep.finite) throw PicardDiverged("forward sweep left the finite range");
    MapResult check = apply_map(sweep.Y, wd, w, cfg.dt, cfg.a);
    double diff = 0.0;
    for (int j = 0; j <= w; ++j) diff = std::max(diff, spec_l1_diff(check.Y[j], sweep.Y[j]));
    out.traj = std::move(check);
    out.iterations = 1;
    out.resub_error = diff;
    out.iter_diffs.push_back(diff);
    return out;
  }

  std::vector<SpectralField> cur(w + 1);
  cur[0] = Ystart;
  for (int j = 1; j <= w; ++j) {
    if (cfg.picard_init == SolverConfig::PicardInit::Zero) {
      cur[j] = SpectralField(Ystart.grid);
    } else {  // heat flow of the initial stack slice
      cur[j] = wd.node1[0];
      const auto lam = lambdas(Ystart.grid);
      double s = wd.tnodes[j] - wd.tnodes[0];
      for (size_t i = 0; i < cur[j].coeffs.size(); ++i)
        cur[j].coeffs[i] *= std::exp(-s * lam[i]);
    }
  }
  double prev_diff = -1.0;
  int grow_streak = 0;
  for (int m = 1; m <= cfg.picard_max_iters; ++m) {
    MapResult next = apply_map(cur, wd, w, cfg.dt, cfg.a);
    if (!next.finite) throw PicardDiverged("Picard iterate left the finite range");
    double diff = 0.0;
    for (int j = 0; j <= w; ++j) diff = std::max(diff, spec_l1_diff(next.Y[j], cur[j]));
    out.iter_diffs.push_back(diff);
    cur = next.Y;
    if (diff < cfg.picard_tol) {
      out.traj = std::move(next);
      out.iterations = m;
      out.resub_error = diff;
      return out;
    }
    if (prev_diff >= 0.0 && diff > prev_diff) {
      if (++grow_streak >= 4) throw PicardDiverged("Picard differences growing");
    } else {
      grow_streak = 0;
    }
    prev_diff = diff;
  }
  throw PicardDiverged("Picard iteration exhausted max iterations");
}

}  // namespace

PicardResult picard_local(StackSource& stack, const RealField& Y_init, double t0,
                          double T_star, const SolverConfig& config) {
  if (!(T_star > 0.0)) throw Error("T_star must be positive");
  const int w = std::max(1, static_cast<int>(std::lround(T_star / config.dt)));
  WindowData wd = gather_window(stack, t0, w, config.dt);
  WindowSolve ws = solve_window(forward_transform(Y_init), wd, w, config);
  PicardResult r;
  r.Y = std::move(ws.traj.Y);
  r.iterations = ws.iterations;
  r.iter_diffs = std::move(ws.iter_diffs);
  return r;
}

Trajectory solve_global(StackSource& stack, const SolverConfig& config) {
  const TorusGrid& g = stack.grid();
  const int J = static_cast<int>(std::lround(config.T / config.dt));
  if (std::fabs(J * config.dt - config.T) > 1e-9)
    throw Error("T must be a multiple of dt");
  const double h2 = g.spacing * g.spacing;
  const int p = config.p_diag;
  const auto lam = lambdas(g);
  const int n = g.points_per_side;

  Trajectory traj;
  traj.grid = g;
  traj.a = config.a;
  traj.times.push_back(0.0);
  traj.diagnostics.push_back({0.0, 0.0, 0.0, 0, 0.0});

  SpectralField Ycur(g);  // Y(0) = 0
  double prev_pow = 0.0;  // ||Y_j||_p^p
  auto real_of = [](const SpectralField& F) { return inverse_transform(F); };
  auto store = [&](int step, const SpectralField& Yh, const SpectralField& z1node) {
    traj.stored_steps.push_back(step);
    RealField y = inverse_transform(Yh);
    SpectralField xh = Yh;
    for (size_t i = 0; i < xh.coeffs.size(); ++i) xh.coeffs[i] += z1node.coeffs[i];
    traj.Y.push_back(y);
    traj.X.push_back(inverse_transform(xh));
  };

  {
    SpectralField z1, z2, z3;
    stack.slice(0.0, z1, z2, z3);
    store(0, Ycur, z1);
  }

  int j = 0;
  while (j < J) {
    int w = std::min(config.window_steps, J - j);
    WindowData wd;
    bool gathered = false;
    for (;;) {
      if (!gathered) {
        wd = gather_window(stack, j * config.dt, w, config.dt);
        gathered = true;
      }
      try {
        WindowSolve ws = solve_window(Ycur, wd, w, config);
        // diagnostics per step in the window
        for (int s = 0; s < w; ++s) {
          const SpectralField& Ya = ws.traj.Y[s];
          const SpectralField& Yb = ws.traj.Y[s + 1];
          RealField yb = real_of(Yb);
          double powsum =
              kernels::weighted_power_sum(yb.values.data(), nullptr,
                                          static_cast<double>(p), yb.values.size()) *
              h2;
          // midpoint-rule energy balance over the interval
          SpectralField Ym = Ya;
          for (size_t i = 0; i < Ym.coeffs.size(); ++i)
            Ym.coeffs[i] = 0.5 * (Ya.coeffs[i] + Yb.coeffs[i]);
          SpectralField dx = Ym, dy = Ym;
          for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
              double f1 = (i == n / 2) ? 0.0 : g.freq(i);
              double f2 = (k == n / 2) ? 0.0 : g.freq(k);
              dx.coeffs[i * n + k] *= std::complex<double>(0.0, f1);
              dy.coeffs[i * n + k] *= std::complex<double>(0.0, f2);
            }
          RealField ym = real_of(Ym), gx = real_of(dx), gy = real_of(dy);
          RealField psir = real_of(ws.traj.psi[s]);
          double grad_term = 0.0, psi_term = 0.0;
          for (size_t i = 0; i < ym.values.size(); ++i) {
            double yp2 = std::pow(ym.values[i], p - 2);
            grad_term += (gx.values[i] * gx.values[i] + gy.values[i] * gy.values[i]) *
                         yp2;
            psi_term += psir.values[i] * yp2 * ym.values[i];
          }
          grad_term *= h2;
          psi_term *= h2;
          double rhs = config.dt * (-(p - 1) * grad_term + psi_term);
          double lhs = (powsum - prev_pow) / p;
          int step = j + s + 1;
          StepDiagnostics d;
          d.t = step * config.dt;
          d.lp_norm = std::pow(powsum, 1.0 / p);
          d.energy_residual = lhs - rhs;
          d.picard_iters = ws.iterations;
          d.resub_error = ws.resub_error;
          traj.times.push_back(d.t);
          traj.diagnostics.push_back(d);
          prev_pow = powsum;
          bool want_store = (config.store_every > 0 && step % config.store_every == 0) ||
                            step == J;
          if (want_store) store(step, Yb, wd.node1[s + 1]);
        }
        Ycur = ws.traj.Y[w];
        j += w;
        break;
      } catch (const PicardDiverged&) {
        // The forward sweep is already the fixed point; shrinking the window
        // replays the same recursion, so a warm divergence is terminal.
        if (config.picard_init == SolverConfig::PicardInit::Warm)
          throw SolverAbort("trajectory left the finite range near t = " +
                            std::to_string(j * config.dt));
        if (w <= 1)
          throw SolverAbort("window shrank below dt at t = " +
                            std::to_string(j * config.dt));
        w /= 2;  // reuse the gathered prefix
      }
    }
  }
  return traj;
}

Trajectory solve_global(const WickStack& stack, const SolverConfig& config) {
  WickStackSource src(stack);
  return solve_global(src, config);
}

EnergyReport energy_report(const Trajectory& traj, const WickStack& stack, int p) {
  WickStackSource src(stack);
  return energy_report(traj, src, p);
}

EnergyReport energy_report(const Trajectory& traj, StackSource& src, int p) {
  if (p < 2 || p % 2 != 0) throw Error("p must be even and >= 2");
  if (traj.stored_steps.size() != traj.times.size())
    throw Error("energy_report needs a fully stored trajectory (store_every = 1)");
  const TorusGrid& g = traj.grid;
  const double h2 = g.spacing * g.spacing;
  EnergyReport rep;
  auto powsum = [&](const RealField& f) {
    return kernels::weighted_power_sum(f.values.data(), nullptr,
                                       static_cast<double>(p), f.values.size()) *
           h2;
  };
  for (size_t s = 0; s + 1 < traj.times.size(); ++s) {
    double ta = traj.times[s], tb = traj.times[s + 1];
    // trapezoidal quadrature with node stacks
    double G[2];
    for (int e = 0; e < 2; ++e) {
      double t = (e == 0) ? ta : tb;
      const RealField& y = traj.Y[s + e];
      SpectralField z1, z2, z3;
      src.slice(t, z1, z2, z3);
      RealField psir = inverse_transform(
          psi_hat(forward_transform(y), z1, z2, z3, traj.a));
      RealField gx = spectral_derivative(y, 0), gy = spectral_derivative(y, 1);
      double grad_term = 0.0, psi_term = 0.0;
      for (size_t i = 0; i < y.values.size(); ++i) {
        double yp2 = std::pow(y.values[i], p - 2);
        grad_term += (gx.values[i] * gx.values[i] + gy.values[i] * gy.values[i]) * yp2;
        psi_term += psir.values[i] * yp2 * y.values[i];
      }
      G[e] = -(p - 1) * grad_term * h2 + psi_term * h2;
    }
    double lhs = (powsum(traj.Y[s + 1]) - powsum(traj.Y[s])) / p;
    double rhs = 0.5 * (tb - ta) * (G[0] + G[1]);
    rep.residuals.push_back(lhs - rhs);
    rep.max_residual = std::max(rep.max_residual, std::fabs(lhs - rhs));
  }
  return rep;
}

AprioriReport apriori_check(const Trajectory& traj, int /*p*/) {
  AprioriReport rep;
  double first = traj.diagnostics.front().lp_norm;
  for (const auto& d : traj.diagnostics) rep.sup_norm = std::max(rep.sup_norm, d.lp_norm);
  rep.bound_offset = rep.sup_norm - first;
  return rep;
}

}  // namespace phi4
