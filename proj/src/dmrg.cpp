#include "nessdmrg/dmrg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "nessdmrg/eigensolver.hpp"
#include "nessdmrg/superspace.hpp"

namespace nessdmrg {

namespace {

double relative_change(double previous, double current, double floor) {
  return std::abs(previous - current) / std::max(std::abs(previous), floor);
}

LabeledTensor unit_env(std::vector<std::string> labels) {
  return LabeledTensor(std::move(labels), {1, 1, 1}, {cplx(1.0)});
}

}  // namespace

void SweepSchedule::validate() const {
  if (warmup_bond < 1) throw DomainError("warmup_bond must be at least 1");
  if (max_bond < warmup_bond) throw DomainError("max_bond must be at least warmup_bond");
  if (bond_increment < 1) throw DomainError("bond_increment must be positive");
  if (!(ramp_threshold > 0.0 && ramp_threshold < 1.0)) {
    throw DomainError("ramp_threshold must lie in (0, 1)");
  }
  if (!(warmup_threshold > 0.0) || !(stop_threshold > 0.0)) {
    throw DomainError("relative-change thresholds must be positive");
  }
  if (!(svd_cutoff >= 0.0)) throw DomainError("svd_cutoff must be non-negative");
  if (local_solver_iters < 1) throw DomainError("local_solver_iters must be positive");
  if (!(energy_floor > 0.0) || !(converged_energy > 0.0)) {
    throw DomainError("energy tolerances must be positive");
  }
}

std::vector<double> RunResult::energy_history() const {
  std::vector<double> out;
  for (const auto& r : history) out.push_back(r.energy);
  return out;
}

std::vector<std::size_t> RunResult::bond_history() const {
  std::vector<std::size_t> out;
  for (const auto& r : history) out.push_back(r.max_bond);
  return out;
}

std::vector<double> RunResult::walltime_history() const {
  std::vector<double> out;
  for (const auto& r : history) out.push_back(r.walltime_s);
  return out;
}

SweepEngine::SweepEngine(const MatrixProductOperator& target, MatrixProductState state)
    : target_(target), state_(canonicalize(state, 1)) {
  const std::size_t n = state_.length();
  if (n < 2) throw DomainError("two-site sweeps need at least two sites");
  if (target.length() != n || target.phys_dims() != state_.phys_dims()) {
    throw ShapeError("state and operator chains do not match");
  }
  left_.resize(n);
  right_.resize(n);
  left_[0] = unit_env({"b", "w", "k"});
  right_[n - 1] = unit_env({"w", "k", "b"});
  for (std::size_t k = n - 1; k-- > 0;) update_right(k);
}

void SweepEngine::update_left(std::size_t k) {
  const LabeledTensor& a = state_.tensors()[k];
  const LabeledTensor x = contract(left_[k], a, {{"k", "l"}}).relabeled({"b", "w", "p", "rk"});
  const LabeledTensor y = contract(x, target_.tensors()[k], {{"w", "l"}, {"p", "in"}})
                              .relabeled({"b", "rk", "out", "rw"});
  left_[k + 1] = contract(a.conj(), y, {{"l", "b"}, {"p", "out"}})
                     .relabeled({"b", "k", "w"})
                     .permuted({"b", "w", "k"});
}

void SweepEngine::update_right(std::size_t k) {
  const LabeledTensor& a = state_.tensors()[k + 1];
  const LabeledTensor x =
      contract(a, right_[k + 1], {{"r", "k"}}).relabeled({"lk", "p", "w", "b"});
  const LabeledTensor y = contract(x, target_.tensors()[k + 1], {{"w", "r"}, {"p", "in"}})
                              .relabeled({"lk", "b", "lw", "out"});
  right_[k] = contract(a.conj(), y, {{"r", "b"}, {"p", "out"}})
                  .relabeled({"b", "k", "w"})
                  .permuted({"w", "k", "b"});
}

double SweepEngine::optimize_pair(std::size_t k, bool moving_right, std::size_t max_bond,
                                  double cutoff, int local_iters, double& discarded) {
  const LabeledTensor a = state_.tensors()[k].relabeled({"l", "p1", "m"});
  const LabeledTensor b = state_.tensors()[k + 1].relabeled({"m", "p2", "r"});
  const LabeledTensor theta = contract(a, b, {{"m", "m"}});
  const std::vector<std::string> theta_labels{"l", "p1", "p2", "r"};
  const std::vector<std::size_t> theta_dims = theta.dims();

  const LabeledTensor& env_l = left_[k];
  const LabeledTensor env_r = right_[k + 1].relabeled({"w", "k", "b2"});
  const LabeledTensor w1 = target_.tensors()[k].relabeled({"wl", "o1", "i1", "wr"});
  const LabeledTensor w2 = target_.tensors()[k + 1].relabeled({"wl", "o2", "i2", "wr"});

  auto apply = [&](const Eigen::VectorXcd& v) {
    LabeledTensor t(theta_labels, theta_dims, std::vector<cplx>(v.data(), v.data() + v.size()));
    t = contract(env_l, t, {{"k", "l"}});  // b w p1 p2 r
    t = contract(t, w1, {{"w", "wl"}, {"p1", "i1"}}).relabeled({"b", "p2", "r", "o1", "w"});
    t = contract(t, w2, {{"w", "wl"}, {"p2", "i2"}}).relabeled({"b", "r", "o1", "o2", "w"});
    t = contract(t, env_r, {{"w", "w"}, {"r", "k"}});  // b o1 o2 b2
    Eigen::VectorXcd out(v.size());
    std::copy(t.data().begin(), t.data().end(), out.data());
    return out;
  };

  Eigen::VectorXcd guess(static_cast<Eigen::Index>(theta.size()));
  std::copy(theta.data().begin(), theta.data().end(), guess.data());
  const EigenPair best = local_eigensolve(apply, guess, local_iters);

  const LabeledTensor optimized(
      theta_labels, theta_dims,
      std::vector<cplx>(best.vector.data(), best.vector.data() + best.vector.size()));
  SvdResult svd = svd_truncate(optimized, {"l", "p1"}, max_bond, cutoff, "m");
  discarded = std::max(discarded, svd.discarded_weight);

  // renormalize the kept weight so the state stays a unit vector
  double kept = 0.0;
  for (double s : svd.s) kept += s * s;
  kept = std::sqrt(kept);
  for (double& s : svd.s) s /= kept;

  LabeledTensor u = svd.u;
  LabeledTensor v = svd.v;
  const std::size_t bond = svd.s.size();
  if (moving_right) {
    auto data = v.data();
    const std::size_t stride = v.size() / bond;
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= svd.s[i / stride];
  } else {
    auto data = u.data();
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= svd.s[i % bond];
  }
  state_.set_pair(k, u.relabeled({"l", "p", "r"}), v.relabeled({"l", "p", "r"}),
                  moving_right ? k + 2 : k + 1);
  if (moving_right) {
    update_left(k);
  } else {
    update_right(k);
  }
  return best.value;
}

SweepEngine::SweepStats SweepEngine::sweep(std::size_t max_bond, double cutoff, int local_iters) {
  const std::size_t n = state_.length();
  SweepStats stats;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    stats.energy = optimize_pair(k, true, max_bond, cutoff, local_iters, stats.max_discarded);
  }
  for (std::size_t k = n - 1; k-- > 0;) {
    stats.energy = optimize_pair(k, false, max_bond, cutoff, local_iters, stats.max_discarded);
  }
  return stats;
}

double SweepEngine::energy() const { return rayleigh_quotient(target_, state_); }

double rayleigh_quotient(const MatrixProductOperator& op, const MatrixProductState& psi) {
  return (overlap3(psi, op, psi) / inner(psi, psi)).real();
}

std::pair<double, MatrixProductState> dmrg_sweep(const MatrixProductState& state,
                                                 const MatrixProductOperator& target,
                                                 const SweepSchedule& schedule) {
  SweepEngine engine(target, state);
  const auto stats =
      engine.sweep(schedule.max_bond, schedule.svd_cutoff, schedule.local_solver_iters);
  return {stats.energy, engine.state()};
}

namespace {

// Runs warm-up sweeps on `engine`, appending to `history`.
std::size_t run_warmup(SweepEngine& engine, const SweepSchedule& schedule,
                       std::vector<SweepRecord>& history, const SweepCallback& on_sweep) {
  double previous = engine.energy();
  std::size_t used = 0;
  while (used < schedule.warmup_max_sweeps) {
    const auto start = std::chrono::steady_clock::now();
    const auto stats =
        engine.sweep(schedule.warmup_bond, schedule.svd_cutoff, schedule.local_solver_iters);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    ++used;
    SweepRecord rec;
    rec.sweep = history.size() + 1;
    rec.warmup = true;
    rec.bond_cap = schedule.warmup_bond;
    rec.max_bond = engine.state().max_bond();
    rec.energy = stats.energy;
    rec.walltime_s = elapsed.count();
    rec.max_discarded = stats.max_discarded;
    history.push_back(rec);
    if (on_sweep) on_sweep(rec);
    const bool settled =
        relative_change(previous, stats.energy, schedule.energy_floor) < schedule.warmup_threshold;
    previous = stats.energy;
    if (settled || stats.energy <= schedule.energy_floor) break;
  }
  return used;
}

}  // namespace

std::pair<MatrixProductState, std::size_t> warm_up(const MatrixProductState& state,
                                                   const MatrixProductOperator& target,
                                                   const SweepSchedule& schedule) {
  schedule.validate();
  SweepEngine engine(target, state);
  std::vector<SweepRecord> history;
  const std::size_t used = run_warmup(engine, schedule, history, {});
  return {engine.state(), used};
}

Observables measure(const SuperOperatorSet& ops, const MatrixProductState& ivec,
                    const MatrixProductState& rho) {
  const cplx trace = inner(ivec, rho);
  if (std::abs(trace) == 0.0) throw NumericalError("state has zero trace; observables undefined");
  Observables out;
  auto eval = [&](const MatrixProductOperator& op) {
    const cplx v = overlap3(ivec, op, rho) / trace;
    out.max_imag = std::max(out.max_imag, std::abs(v.imag()));
    return v.real();
  };
  for (const auto& op : ops.current_ops) out.current.push_back(eval(op));
  for (const auto& op : ops.magnetization_ops) out.magnetization.push_back(eval(op));
  return out;
}

RunResult solve_ness(const ModelParams& params, Ordering ordering, const SweepSchedule& schedule,
                     const SweepCallback& on_sweep) {
  return solve_ness(build_superoperators(params, ordering), schedule, on_sweep);
}

RunResult solve_ness(const SuperOperatorSet& ops, const SweepSchedule& schedule,
                     const SweepCallback& on_sweep) {
  schedule.validate();
  const MatrixProductState ivec = make_ivec(ops.scheme);
  MatrixProductState start = ivec;
  if (start.max_bond() > schedule.warmup_bond) start = truncate(start, schedule.warmup_bond, 0.0);

  RunResult result;
  SweepEngine engine(ops.target, start);
  result.warmup_sweeps = run_warmup(engine, schedule, result.history, on_sweep);

  auto mean = [](const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
  };

  std::size_t bond = schedule.warmup_bond;
  auto main_sweep = [&] {
    const auto start_time = std::chrono::steady_clock::now();
    const auto stats = engine.sweep(bond, schedule.svd_cutoff, schedule.local_solver_iters);
    SweepRecord rec;
    rec.sweep = result.history.size() + 1;
    rec.bond_cap = bond;
    rec.max_bond = engine.state().max_bond();
    rec.energy = stats.energy;
    rec.max_discarded = stats.max_discarded;
    if (schedule.measure_every_sweep) {
      const Observables obs = measure(ops, ivec, engine.state());
      rec.measured = true;
      rec.mean_current = mean(obs.current);
      rec.max_imag = obs.max_imag;
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_time;
    rec.walltime_s = elapsed.count();
    result.history.push_back(rec);
    if (on_sweep) on_sweep(rec);
    return stats.energy;
  };

  double previous = result.history.back().energy;
  bool stop = previous <= schedule.energy_floor;
  bool at_floor = stop;
  if (stop) result.reason = "energy floor reached during warm-up";
  for (std::size_t s = 0; !stop && s < schedule.max_sweeps; ++s) {
    const double energy = main_sweep();
    const double change = relative_change(previous, energy, schedule.energy_floor);
    previous = energy;
    if (energy <= schedule.energy_floor) {
      stop = at_floor = true;
      result.reason = "energy floor reached";
    } else if (bond >= schedule.max_bond && change < schedule.stop_threshold) {
      stop = true;
      result.reason = "energy stable at max bond";
    } else if (change < schedule.ramp_threshold && bond < schedule.max_bond) {
      bond = std::min(bond + schedule.bond_increment, schedule.max_bond);
    }
  }
  // Energies near the floor are dominated by rounding, so the state can
  // still improve after the stopping rule fires.
  if (at_floor && schedule.polish_sweeps > 0) {
    Observables last = measure(ops, ivec, engine.state());
    for (std::size_t s = 0; s < schedule.polish_sweeps; ++s) {
      main_sweep();
      const Observables now = measure(ops, ivec, engine.state());
      double shift = 0.0;
      for (std::size_t k = 0; k < now.current.size(); ++k) {
        shift = std::max(shift, std::abs(now.current[k] - last.current[k]));
      }
      for (std::size_t k = 0; k < now.magnetization.size(); ++k) {
        shift = std::max(shift, std::abs(now.magnetization[k] - last.magnetization[k]));
      }
      last = now;
      if (shift <= schedule.polish_tolerance) break;
    }
  }
  if (!stop) result.reason = "sweep limit reached";

  result.final_state = engine.state();
  result.final_energy = result.history.back().energy;
  const Observables obs = measure(ops, ivec, result.final_state);
  result.current_profile = obs.current;
  result.magnetization_profile = obs.magnetization;
  result.imag_residual = obs.max_imag;
  result.converged = result.final_energy <= schedule.converged_energy;
  if (!result.converged) result.reason += " (energy above convergence tolerance)";
  return result;
}

}  // namespace nessdmrg
