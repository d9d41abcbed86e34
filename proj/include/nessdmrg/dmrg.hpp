#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nessdmrg/liouvillian.hpp"
#include "nessdmrg/mpo.hpp"
#include "nessdmrg/mps.hpp"

namespace nessdmrg {

/// Bond-dimension schedule and stopping rules for the steady-state search.
/// Relative energy changes are |E_prev - E| / max(|E_prev|, energy_floor).
struct SweepSchedule {
  std::size_t warmup_bond = 2;
  std::size_t warmup_max_sweeps = 50;
  double warmup_threshold = 1e-3;
  std::size_t bond_increment = 2;
  double ramp_threshold = 0.10;  // relative change that triggers a bond increment
  std::size_t max_bond = 40;
  std::size_t max_sweeps = 200;  // main-phase sweeps, after the warm-up
  double svd_cutoff = 1e-12;
  int local_solver_iters = 6;
  double energy_floor = 1e-12;  // stop once the energy is this small
  double stop_threshold = 1e-3;  // relative change that ends the run at max_bond
  // Once the energy floor is reached, keep sweeping until no observable moves
  // by more than polish_tolerance between sweeps, for at most polish_sweeps.
  std::size_t polish_sweeps = 20;
  double polish_tolerance = 1e-10;
  double converged_energy = 1e-6;  // a run counts as converged at or below this energy
  bool measure_every_sweep = true;

  void validate() const;
};

/// One row of the per-sweep history.
struct SweepRecord {
  std::size_t sweep = 0;  // 1-based over the whole run, warm-up included
  bool warmup = false;
  std::size_t bond_cap = 0;
  std::size_t max_bond = 0;
  double energy = 0.0;
  double walltime_s = 0.0;
  double max_discarded = 0.0;
  bool measured = false;
  double mean_current = 0.0;
  double max_imag = 0.0;
};

struct Observables {
  std::vector<double> current;
  std::vector<double> magnetization;
  double max_imag = 0.0;
};

struct RunResult {
  std::vector<SweepRecord> history;
  std::size_t warmup_sweeps = 0;
  MatrixProductState final_state;
  double final_energy = 0.0;
  std::vector<double> current_profile;
  std::vector<double> magnetization_profile;
  double imag_residual = 0.0;
  bool converged = false;
  std::string reason;

  std::vector<double> energy_history() const;
  std::vector<std::size_t> bond_history() const;
  std::vector<double> walltime_history() const;
};

/// Two-site DMRG on a Hermitian operator, keeping the environment blocks
/// between sweeps. The state's orthogonality center sits on site 1 between
/// sweeps.
class SweepEngine {
 public:
  SweepEngine(const MatrixProductOperator& target, MatrixProductState state);

  struct SweepStats {
    double energy = 0.0;
    double max_discarded = 0.0;
  };

  /// One left-to-right and one right-to-left pass of two-site updates.
  SweepStats sweep(std::size_t max_bond, double cutoff, int local_iters);

  /// <psi|target|psi> / <psi|psi> of the current state.
  double energy() const;
  const MatrixProductState& state() const { return state_; }

 private:
  void update_left(std::size_t k);
  void update_right(std::size_t k);
  double optimize_pair(std::size_t k, bool moving_right, std::size_t max_bond, double cutoff,
                       int local_iters, double& discarded);

  const MatrixProductOperator& target_;
  MatrixProductState state_;
  std::vector<LabeledTensor> left_;   // left_[k]: sites before k, labels (b, w, k)
  std::vector<LabeledTensor> right_;  // right_[k]: sites after k, labels (w, k, b)
};

/// Rayleigh quotient <psi|op|psi> / <psi|psi>, real part.
double rayleigh_quotient(const MatrixProductOperator& op, const MatrixProductState& psi);

/// Stateless single sweep at bond cap `schedule.max_bond`.
std::pair<double, MatrixProductState> dmrg_sweep(const MatrixProductState& state,
                                                 const MatrixProductOperator& target,
                                                 const SweepSchedule& schedule);

/// Sweeps at `schedule.warmup_bond` until the relative energy change drops
/// below `schedule.warmup_threshold` or `warmup_max_sweeps` is reached.
std::pair<MatrixProductState, std::size_t> warm_up(const MatrixProductState& state,
                                                   const MatrixProductOperator& target,
                                                   const SweepSchedule& schedule);

/// <Ivec|O|rho> / <Ivec|rho> for every current and magnetization operator.
Observables measure(const SuperOperatorSet& ops, const MatrixProductState& ivec,
                    const MatrixProductState& rho);

using SweepCallback = std::function<void(const SweepRecord&)>;

/// Full steady-state search: vec(I) start, warm-up, bond ramp, observables.
RunResult solve_ness(const ModelParams& params, Ordering ordering, const SweepSchedule& schedule,
                     const SweepCallback& on_sweep = {});
RunResult solve_ness(const SuperOperatorSet& ops, const SweepSchedule& schedule,
                     const SweepCallback& on_sweep = {});

}  // namespace nessdmrg
