#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "divfree/equilibrium.hpp"
#include "divfree/fno.hpp"
#include "divfree/microstructure.hpp"
#include "divfree/rng.hpp"

namespace divfree {

struct Sample {
  Microstructure micro;   // at n_dis
  Mat3 f_bar;
  std::vector<double> p;  // stress, channel-planar [9][n_dis^2], MPa
  double solver_residual = 0.0;
  int solver_iterations = 0;
};

struct DatasetConfig {
  int n_dat = 64;
  int n_dis = 32;
  int n_res = 32;  // solve resolution; samples are strided down to n_dis
  double ell_u = 1.0;
  MicrostructureConfig micro;  // per-sample seeds are derived from `seed`
  SolverConfig solver;
  std::vector<double> f22_list = {1.002, 1.004};
  std::uint64_t seed = 0;

  void validate() const {
    if (n_dat < 1) throw std::invalid_argument("DatasetConfig: n_dat must be >= 1");
    if (n_dis < 2 || n_dis % 2 != 0) throw std::invalid_argument("DatasetConfig: n_dis must be even");
    if (n_res < n_dis || n_res % n_dis != 0)
      throw std::invalid_argument("DatasetConfig: n_res must be a multiple of n_dis");
    if (f22_list.empty()) throw std::invalid_argument("DatasetConfig: empty load list");
    micro.validate();
    solver.validate();
  }

  GridConfig train_grid() const { return GridConfig{n_dis, ell_u, 2}; }
  GridConfig solve_grid() const { return GridConfig{n_res, ell_u, 2}; }
};

struct Dataset {
  DatasetConfig cfg;
  std::vector<Sample> samples;
};

inline std::uint64_t sample_micro_seed(std::uint64_t dataset_seed, int index) {
  CounterRng rng(dataset_seed, "sample." + std::to_string(index));
  return rng.next_u64();
}

// Solve one boundary value problem and subsample to the training grid.
inline Sample generate_sample(const DatasetConfig& cfg, int index) {
  GridConfig solve_grid = cfg.solve_grid();
  MicrostructureConfig mcfg = cfg.micro;
  mcfg.seed = sample_micro_seed(cfg.seed, index);
  Microstructure micro = voronoi_tessellate(mcfg, solve_grid);
  LoadCase load = LoadCase::uniaxial_x2(cfg.f22_list[index % cfg.f22_list.size()]);
  SolveResult sol;
  try {
    sol = solve_equilibrium(micro, load, solve_grid, cfg.solver);
  } catch (const SolverNotConverged& e) {
    throw std::runtime_error("generate_dataset: sample " + std::to_string(index) + ": " + e.what());
  }

  const int stride = cfg.n_res / cfg.n_dis;
  const int n = cfg.n_dis;
  Sample s;
  s.f_bar = load.f_bar;
  s.solver_residual = sol.residual;
  s.solver_iterations = sol.iterations;
  s.micro.n_dis = n;
  s.micro.n_grains = micro.n_grains;
  s.micro.grain_id.resize(static_cast<std::size_t>(n) * n);
  s.micro.e_field.resize(static_cast<std::size_t>(n) * n);
  s.micro.nu_field.resize(static_cast<std::size_t>(n) * n);
  s.p.assign(9 * static_cast<std::size_t>(n) * n, 0.0);
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) {
      std::size_t dst = static_cast<std::size_t>(i1) * n + i2;
      std::size_t src = static_cast<std::size_t>(i1) * stride * cfg.n_res + static_cast<std::size_t>(i2) * stride;
      s.micro.grain_id[dst] = micro.grain_id[src];
      s.micro.e_field[dst] = micro.e_field[src];
      s.micro.nu_field[dst] = micro.nu_field[src];
      for (int t = 0; t < 9; ++t)
        s.p[static_cast<std::size_t>(t) * n * n + dst] = sol.p_field.v[src * 9 + t];
    }
  return s;
}

inline Dataset generate_dataset(const DatasetConfig& cfg, int threads = 1) {
  cfg.validate();
  Dataset ds;
  ds.cfg = cfg;
  ds.samples.resize(cfg.n_dat);
  threads = std::max(1, threads);
  if (threads == 1) {
    for (int a = 0; a < cfg.n_dat; ++a) ds.samples[a] = generate_sample(cfg, a);
    return ds;
  }
  std::vector<std::thread> pool;
  std::vector<std::string> errors(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (int a = t; a < cfg.n_dat; a += threads) ds.samples[a] = generate_sample(cfg, a);
      } catch (const std::exception& e) {
        errors[t] = e.what();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const std::string& e : errors)
    if (!e.empty()) throw std::runtime_error(e);
  return ds;
}

// Min-max statistics over the training split: global for E, per-component
// for P. Structural-zero components are pass-through (the plane form keeps
// P13 = P23 = P31 = P32 = 0 identically).
struct NormalizationStats {
  double e_min = 0.0, e_max = 0.0;
  std::array<double, 9> p_min{}, p_max{};
  std::array<bool, 9> p_active{};
};

inline NormalizationStats compute_normalization(const Dataset& ds, int n_train) {
  if (n_train < 1 || n_train > static_cast<int>(ds.samples.size()))
    throw std::invalid_argument("compute_normalization: bad training split size");
  NormalizationStats st;
  st.e_min = st.e_max = ds.samples[0].micro.e_field[0];
  for (int t = 0; t < 9; ++t) {
    st.p_min[t] = st.p_max[t] = ds.samples[0].p[static_cast<std::size_t>(t) * ds.samples[0].micro.grain_id.size()];
  }
  const std::size_t np = ds.samples[0].micro.grain_id.size();
  for (int a = 0; a < n_train; ++a) {
    const Sample& s = ds.samples[a];
    for (double e : s.micro.e_field) {
      st.e_min = std::min(st.e_min, e);
      st.e_max = std::max(st.e_max, e);
    }
    for (int t = 0; t < 9; ++t)
      for (std::size_t p = 0; p < np; ++p) {
        double v = s.p[static_cast<std::size_t>(t) * np + p];
        st.p_min[t] = std::min(st.p_min[t], v);
        st.p_max[t] = std::max(st.p_max[t], v);
      }
  }
  if (!(st.e_max > st.e_min)) throw std::runtime_error("compute_normalization: degenerate E channel");
  for (int t = 0; t < 9; ++t) {
    if (st.p_min[t] == 0.0 && st.p_max[t] == 0.0) {
      st.p_active[t] = false;  // structural zero
    } else if (st.p_max[t] > st.p_min[t]) {
      st.p_active[t] = true;
    } else {
      throw std::runtime_error("compute_normalization: degenerate stress channel " + std::to_string(t));
    }
  }
  return st;
}

// NA input i(x) = (E'(x), nu(x), f_bar broadcast), channel-planar
inline std::vector<double> build_input(const Sample& s, const NormalizationStats& st) {
  const std::size_t np = s.micro.grain_id.size();
  std::vector<double> in(11 * np, 0.0);
  const double escale = 1.0 / (st.e_max - st.e_min);
  for (std::size_t p = 0; p < np; ++p) {
    in[p] = (s.micro.e_field[p] - st.e_min) * escale;
    in[np + p] = s.micro.nu_field[p];
  }
  for (int t = 0; t < 9; ++t) {
    double v = s.f_bar.m[t];
    std::fill(in.begin() + (2 + static_cast<std::size_t>(t)) * np, in.begin() + (3 + static_cast<std::size_t>(t)) * np, v);
  }
  return in;
}

inline std::vector<double> build_target(const Sample& s, const NormalizationStats& st) {
  const std::size_t np = s.micro.grain_id.size();
  std::vector<double> tgt(9 * np, 0.0);
  for (int t = 0; t < 9; ++t) {
    if (!st.p_active[t]) continue;
    const double scale = 1.0 / (st.p_max[t] - st.p_min[t]);
    for (std::size_t p = 0; p < np; ++p)
      tgt[static_cast<std::size_t>(t) * np + p] = (s.p[static_cast<std::size_t>(t) * np + p] - st.p_min[t]) * scale;
  }
  return tgt;
}

inline std::vector<double> denormalize_stress(const std::vector<double>& pn, const NormalizationStats& st,
                                              std::size_t np) {
  std::vector<double> out(9 * np, 0.0);
  for (int t = 0; t < 9; ++t) {
    if (!st.p_active[t]) continue;
    const double range = st.p_max[t] - st.p_min[t];
    for (std::size_t p = 0; p < np; ++p)
      out[static_cast<std::size_t>(t) * np + p] = pn[static_cast<std::size_t>(t) * np + p] * range + st.p_min[t];
  }
  return out;
}

struct LossConfig {
  Variant variant = Variant::pg;
  double c_div = 0.1;
  double epsilon = 1e-8;

  void validate() const {
    if (c_div < 0.0) throw std::invalid_argument("LossConfig: c_div must be >= 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("LossConfig: epsilon must be positive");
  }
};

struct LossReport {
  double l_dat = 0.0;
  double l_div = 0.0;
  double l_total = 0.0;
};

// Accumulates the batch sums entering the loss formulas.
struct LossAccumulator {
  double err_sq = 0.0;   // sum |p_out - p_dat|^2
  double dat_sq = 0.0;   // sum |p_dat|^2
  double div_sq = 0.0;   // sum |ell * d_out|^2

  void add(const std::vector<double>& p_out, const std::vector<double>& p_dat,
           const std::vector<double>* d_out, double ell_u) {
    for (std::size_t i = 0; i < p_out.size(); ++i) {
      double diff = p_out[i] - p_dat[i];
      err_sq += diff * diff;
      dat_sq += p_dat[i] * p_dat[i];
    }
    if (d_out)
      for (double d : *d_out) div_sq += ell_u * ell_u * d * d;
  }

  LossReport report(const LossConfig& cfg) const {
    LossReport r;
    r.l_dat = dat_sq > 0.0 ? std::sqrt(err_sq / dat_sq) : std::sqrt(err_sq);
    r.l_div = std::sqrt(cfg.epsilon + div_sq);
    r.l_total = cfg.variant == Variant::pi ? r.l_dat + cfg.c_div * r.l_div : r.l_dat;
    return r;
  }
};

inline LossReport loss(const std::vector<double>& p_out, const std::vector<double>& p_dat,
                       const std::vector<double>* d_out, double ell_u, const LossConfig& cfg) {
  cfg.validate();
  LossAccumulator acc;
  acc.add(p_out, p_dat, d_out, ell_u);
  return acc.report(cfg);
}

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> m, v;
  long step = 0;
};

inline void adam_step(std::vector<double>& theta, const std::vector<double>& grad, AdamState& state,
                      double lr, const AdamConfig& cfg = {}) {
  if (state.m.size() != theta.size()) {
    state.m.assign(theta.size(), 0.0);
    state.v.assign(theta.size(), 0.0);
    state.step = 0;
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    double mhat = state.m[i] / bc1;
    double vhat = state.v[i] / bc2;
    theta[i] -= lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

struct TrainConfig {
  int epochs = 100;
  double lr0 = 1e-3;
  int batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 0;

  void validate() const {
    if (epochs < 0) throw std::invalid_argument("TrainConfig: epochs must be >= 0");
    if (!(lr0 > 0.0)) throw std::invalid_argument("TrainConfig: lr0 must be positive");
  }
};

// halved every floor(epochs/5) epochs, matching the 500/100 protocol ratio
inline double lr_at_epoch(double lr0, int epoch, int total_epochs) {
  int period = std::max(1, total_epochs / 5);
  return lr0 * std::pow(0.5, static_cast<double>(epoch / period));
}

struct HistoryRow {
  int epoch = 0;
  double lr = 0.0;
  double train_l_dat = 0.0, train_l_div = 0.0;
  double test_l_dat = 0.0, test_l_div = 0.0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(int epoch)
      : std::runtime_error("training loss is not finite at epoch " + std::to_string(epoch)), epoch(epoch) {}
  int epoch;
};

struct TrainState {
  FnoModel model;
  AdamState adam;
  int epoch = 0;  // epochs completed so far
  std::vector<HistoryRow> history;
};

namespace train_detail {

struct Prepared {
  std::vector<std::vector<double>> inputs;   // [sample][11*np]
  std::vector<std::vector<double>> targets;  // [sample][9*np]
};

inline Prepared prepare(const Dataset& ds, const NormalizationStats& st) {
  Prepared p;
  p.inputs.reserve(ds.samples.size());
  p.targets.reserve(ds.samples.size());
  for (const Sample& s : ds.samples) {
    p.inputs.push_back(build_input(s, st));
    p.targets.push_back(build_target(s, st));
  }
  return p;
}

inline LossReport split_loss(const FnoModel& model, const Prepared& prep, int begin, int end,
                             const LossConfig& lcfg, double ell_u) {
  LossAccumulator acc;
  for (int a = begin; a < end; ++a) {
    FnoOutput out = fno_forward(model, prep.inputs[a], true);
    acc.add(out.p, prep.targets[a], &out.d, ell_u);
  }
  return acc.report(lcfg);
}

}  // namespace train_detail

// ADAM training with the stepped learning-rate schedule. Deterministic for a
// given seed: batches are ordered by a counter-based shuffle keyed on the
// epoch, gradients accumulate in fixed sample order. `state` carries the
// model and optimizer across calls, so resuming from a stored epoch
// continues the schedule where it stopped.
inline void train(TrainState& state, const Dataset& ds, const NormalizationStats& st,
                  const LossConfig& lcfg, const TrainConfig& tcfg, int n_train) {
  tcfg.validate();
  lcfg.validate();
  if (n_train < 1 || n_train > static_cast<int>(ds.samples.size()))
    throw std::invalid_argument("train: bad training split size");
  const int n_test = static_cast<int>(ds.samples.size()) - n_train;
  const double ell_u = ds.cfg.ell_u;
  train_detail::Prepared prep = train_detail::prepare(ds, st);
  const bool need_div_grad = lcfg.variant == Variant::pi && lcfg.c_div > 0.0;

  std::vector<int> order(n_train);
  for (int i = 0; i < n_train; ++i) order[i] = i;
  const int batch = tcfg.batch_size > 0 ? std::min(tcfg.batch_size, n_train) : n_train;

  std::vector<double> grad(state.model.theta.size(), 0.0);
  for (int epoch = state.epoch; epoch < tcfg.epochs; ++epoch) {
    const double lr = lr_at_epoch(tcfg.lr0, epoch, tcfg.epochs);
    if (batch < n_train) {
      CounterRng shuffle(tcfg.seed, "shuffle." + std::to_string(epoch));
      for (int i = n_train - 1; i > 0; --i)
        std::swap(order[i], order[shuffle.next_below(static_cast<std::uint64_t>(i + 1))]);
    }
    for (int b0 = 0; b0 < n_train; b0 += batch) {
      const int b1 = std::min(b0 + batch, n_train);
      // pass 1: batch sums for the loss weights
      LossAccumulator acc;
      std::vector<std::vector<double>> outs(b1 - b0), divs(b1 - b0);
      for (int j = b0; j < b1; ++j) {
        FnoOutput out = fno_forward(state.model, prep.inputs[order[j]], need_div_grad);
        acc.add(out.p, prep.targets[order[j]], need_div_grad ? &out.d : nullptr, ell_u);
        outs[j - b0] = std::move(out.p);
        if (need_div_grad) divs[j - b0] = std::move(out.d);
      }
      LossReport rep = acc.report(lcfg);
      if (!std::isfinite(rep.l_total)) throw TrainingDiverged(epoch);
      const double dat_w = rep.l_dat > 0.0 && acc.dat_sq > 0.0 ? 1.0 / (rep.l_dat * acc.dat_sq) : 0.0;
      const double div_w = need_div_grad ? lcfg.c_div * ell_u * ell_u / rep.l_div : 0.0;

      // pass 2: per-sample backward with the scalar weights fixed
      std::fill(grad.begin(), grad.end(), 0.0);
      ForwardCache cache;
      std::vector<double> g_p, g_d;
      for (int j = b0; j < b1; ++j) {
        const std::vector<double>& tgt = prep.targets[order[j]];
        fno_forward(state.model, prep.inputs[order[j]], need_div_grad, &cache);
        g_p.assign(outs[j - b0].size(), 0.0);
        for (std::size_t i = 0; i < g_p.size(); ++i) g_p[i] = dat_w * (outs[j - b0][i] - tgt[i]);
        if (need_div_grad) {
          g_d.assign(divs[j - b0].size(), 0.0);
          for (std::size_t i = 0; i < g_d.size(); ++i) g_d[i] = div_w * divs[j - b0][i];
          fno_backward(state.model, cache, g_p, &g_d, grad);
        } else {
          fno_backward(state.model, cache, g_p, nullptr, grad);
        }
      }
      adam_step(state.model.theta, grad, state.adam, lr);
    }

    // post-update metrics for the history
    HistoryRow row;
    row.epoch = epoch + 1;
    row.lr = lr;
    LossReport tr = train_detail::split_loss(state.model, prep, 0, n_train, lcfg, ell_u);
    row.train_l_dat = tr.l_dat;
    row.train_l_div = tr.l_div;
    if (n_test > 0) {
      LossReport te = train_detail::split_loss(state.model, prep, n_train, n_train + n_test, lcfg, ell_u);
      row.test_l_dat = te.l_dat;
      row.test_l_div = te.l_div;
    }
    if (!std::isfinite(row.train_l_dat)) throw TrainingDiverged(epoch);
    state.history.push_back(row);
    state.epoch = epoch + 1;
  }
}

struct EvalMetrics {
  LossReport loss;
  double rel_div_norm = 0.0;   // ||ell*d_out|| / ||p_out|| on normalized stress
  double max_abs_err = 0.0;    // MPa
  double median_abs_err = 0.0; // MPa
};

struct EvalMaps {
  int n_dis = 0;
  std::vector<double> err_map;  // |P_out - P_dat| per pixel, MPa
  std::vector<double> div_map;  // ell * |d_out| per pixel, normalized units
};

inline EvalMetrics evaluate(const FnoModel& model, const NormalizationStats& st, const Dataset& ds,
                            int begin, int end, const LossConfig& lcfg, EvalMaps* maps = nullptr) {
  LossAccumulator acc;
  double p_sq = 0.0;
  std::vector<double> abs_errs;
  const std::size_t np = ds.samples.empty() ? 0 : ds.samples[0].micro.grain_id.size();
  for (int a = begin; a < end; ++a) {
    const Sample& s = ds.samples[a];
    std::vector<double> in = build_input(s, st);
    std::vector<double> tgt = build_target(s, st);
    FnoOutput out = fno_forward(model, in, true);
    acc.add(out.p, tgt, &out.d, ds.cfg.ell_u);
    for (double v : out.p) p_sq += v * v;
    std::vector<double> p_mpa = denormalize_stress(out.p, st, np);
    for (std::size_t px = 0; px < np; ++px) {
      double e2 = 0.0;
      for (int t = 0; t < 9; ++t) {
        double diff = p_mpa[static_cast<std::size_t>(t) * np + px] - s.p[static_cast<std::size_t>(t) * np + px];
        e2 += diff * diff;
      }
      abs_errs.push_back(std::sqrt(e2));
    }
    if (maps && a == begin) {
      maps->n_dis = s.micro.n_dis;
      maps->err_map.assign(np, 0.0);
      maps->div_map.assign(np, 0.0);
      for (std::size_t px = 0; px < np; ++px) {
        double e2 = 0.0, d2 = 0.0;
        for (int t = 0; t < 9; ++t) {
          double diff = p_mpa[static_cast<std::size_t>(t) * np + px] - s.p[static_cast<std::size_t>(t) * np + px];
          e2 += diff * diff;
        }
        for (int r = 0; r < 3; ++r) {
          double d = out.d[static_cast<std::size_t>(r) * np + px];
          d2 += d * d;
        }
        maps->err_map[px] = std::sqrt(e2);
        maps->div_map[px] = ds.cfg.ell_u * std::sqrt(d2);
      }
    }
  }
  EvalMetrics m;
  m.loss = acc.report(lcfg);
  m.rel_div_norm = p_sq > 0.0 ? std::sqrt(acc.div_sq / p_sq) : 0.0;
  if (!abs_errs.empty()) {
    m.max_abs_err = *std::max_element(abs_errs.begin(), abs_errs.end());
    std::nth_element(abs_errs.begin(), abs_errs.begin() + abs_errs.size() / 2, abs_errs.end());
    m.median_abs_err = abs_errs[abs_errs.size() / 2];
  }
  return m;
}

}  // namespace divfree
