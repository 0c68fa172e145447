#pragma once

#include <string>
#include <vector>

#include "phi4/besov.hpp"
#include "phi4/gaussian.hpp"
#include "phi4/grid.hpp"

namespace phi4 {

struct SolverConfig {
  double a = 1.0;   // mass parameter
  double dt = 1e-3;
  double T = 2.0;
  double picard_tol = 1e-10;
  int picard_max_iters = 50;
  int p_diag = 6;
  double alpha = 0.1, alpha_prime = 0.11, beta = 1.5;  // regularity bookkeeping
  int window_steps = 64;  // initial gluing window; halves on divergence
  int store_every = 0;    // keep every k-th field (0: first and last only)
  // Picard handling: warm start seeds each window with the forward sweep
  // (the sweep is the fixed point of the explicit mild map, so one
  // verification pass suffices); cold starts iterate from a plain guess.
  enum class PicardInit { Warm, Zero, HeatFlow };
  PicardInit picard_init = PicardInit::Warm;
};

// e:conds-p style sanity warnings (never fatal).
std::vector<std::string> config_warnings(const SolverConfig& c);

struct StepDiagnostics {
  double t = 0.0;
  double lp_norm = 0.0;          // ||Y_t|| in the flat L^p cell norm
  double energy_residual = 0.0;  // over the interval ending at t
  int picard_iters = 0;
  double resub_error = 0.0;      // discrete mild map residual at this step
};

struct Trajectory {
  TorusGrid grid;
  double a = 0.0;  // drift constant the run used (for the energy identity)
  std::vector<double> times;
  std::vector<StepDiagnostics> diagnostics;  // one per time
  std::vector<int> stored_steps;             // indices with materialized fields
  std::vector<RealField> Y, X;               // at stored_steps; X = Y + Z1
};

// Psi(Y) = -Y^3 - 3Y^2 Z1 - 3Y Z2 - Z3 + a(Y + Z1); cubic terms evaluated on
// a doubled grid so the convolution is exact on retained modes.
RealField psi(const RealField& Y, const RealField& z1, const RealField& z2,
              const RealField& z3, double a);
SpectralField psi_hat(const SpectralField& Y, const SpectralField& z1,
                      const SpectralField& z2, const SpectralField& z3, double a);

// One ETD1 step: per mode e^{-|z|^2 dt} Y + dt phi1(-|z|^2 dt) Psi_hat.
RealField step_mild(const RealField& Y, const RealField& z1, const RealField& z2,
                    const RealField& z3, double dt, const SolverConfig& config);
SpectralField step_mild_hat(const SpectralField& Y, const SpectralField& psi_of_Y,
                            double dt);

// Abstract stack access at arbitrary times (nodes or linear interpolation).
class StackSource {
 public:
  virtual ~StackSource() = default;
  virtual const TorusGrid& grid() const = 0;
  // spectral stack fields at time t
  virtual void slice(double t, SpectralField& z1, SpectralField& z2,
                     SpectralField& z3) = 0;
};

// Materialized WickStack view.
class WickStackSource : public StackSource {
 public:
  explicit WickStackSource(const WickStack& st);
  const TorusGrid& grid() const override;
  void slice(double t, SpectralField& z1, SpectralField& z2,
             SpectralField& z3) override;

 private:
  const WickStack* stack_;
  std::vector<SpectralField> z1_, z2_, z3_;
};

// On-the-fly OU-driven stack; forward-only in time.
class StreamingStackSource : public StackSource {
 public:
  StreamingStackSource(const NoiseStream& stream, const TorusGrid& grid,
                       double base_step, const RealField* X0 = nullptr);
  const TorusGrid& grid() const override;
  void slice(double t, SpectralField& z1, SpectralField& z2,
             SpectralField& z3) override;
  // pathwise sign flip of the driving noise (Z -> -Z, V -> -V)
  void set_negated(bool on) { negated_ = on; }

 private:
  void materialize(double t);
  TorusGrid grid_;
  OUPath path_;
  SpectralField x0_hat_;
  bool has_x0_ = false;
  bool negated_ = false;
  double cached_t_ = -1.0;
  SpectralField c1_, c2_, c3_;  // cache of the two most recent node slices
  double prev_t_ = -1.0;
  SpectralField p1_, p2_, p3_;
};

struct PicardResult {
  std::vector<SpectralField> Y;  // trajectory on the window nodes
  int iterations = 0;
  std::vector<double> iter_diffs;  // sup-over-time L-infinity differences
};

// Fixed-point iteration of the discrete mild map over [t0, t0+T_star].
PicardResult picard_local(StackSource& stack, const RealField& Y_init, double t0,
                          double T_star, const SolverConfig& config);

Trajectory solve_global(StackSource& stack, const SolverConfig& config);
Trajectory solve_global(const WickStack& stack, const SolverConfig& config);

struct EnergyReport {
  std::vector<double> residuals;  // one per interval
  double max_residual = 0.0;
};
EnergyReport energy_report(const Trajectory& traj, const WickStack& stack, int p);
// Streaming variant: slices are requested in time order, so a forward-only
// source works (a fresh source with the run's stream must be supplied).
EnergyReport energy_report(const Trajectory& traj, StackSource& stack, int p);

struct AprioriReport {
  double sup_norm = 0.0;
  double bound_offset = 0.0;  // sup_t ||Y_t||_p - ||Y_0||_p
};
AprioriReport apriori_check(const Trajectory& traj, int p);

}  // namespace phi4
