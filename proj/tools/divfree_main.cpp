// Command-line front end for the divergence-free stress toolkit: dataset
// generation, FNO training with the pg/pi/pe output heads, evaluation with
// field maps, divergence diagnostics, and the appendix verification suite.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "divfree/appendix.hpp"
#include "divfree/equilibrium.hpp"
#include "divfree/fno.hpp"
#include "divfree/io.hpp"
#include "divfree/microstructure.hpp"
#include "divfree/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitConfigMismatch = 4;

// relative paths resolve against DIVFREE_DATA_DIR when it is set
fs::path resolve_path(const std::string& p) {
  fs::path path(p);
  if (path.is_absolute()) return path;
  if (const char* root = std::getenv("DIVFREE_DATA_DIR")) return fs::path(root) / path;
  return path;
}

struct GenerateArgs {
  std::string out = "dataset";
  int n_dat = 64, n_dis = 32, n_res = 0;  // n_res 0 -> n_dis
  double ell_u = 1.0, s_u = 1.0 / 3.0;
  std::vector<double> e_range = {50.0, 200.0};
  std::vector<double> nu_range = {0.25, 0.35};
  std::vector<double> f22 = {1.002, 1.004};
  double tol_div = 1e-8;
  int max_iter = 500;
  std::uint64_t seed = 0;
  int threads = 1;
};

int run_generate(const GenerateArgs& a) {
  divfree::DatasetConfig cfg;
  cfg.n_dat = a.n_dat;
  cfg.n_dis = a.n_dis;
  cfg.n_res = a.n_res > 0 ? a.n_res : a.n_dis;
  cfg.ell_u = a.ell_u;
  cfg.micro.s_u = a.s_u;
  cfg.micro.e_min = a.e_range.at(0);
  cfg.micro.e_max = a.e_range.at(1);
  cfg.micro.nu_min = a.nu_range.at(0);
  cfg.micro.nu_max = a.nu_range.at(1);
  cfg.solver.tol_div = a.tol_div;
  cfg.solver.max_iter = a.max_iter;
  cfg.f22_list = a.f22;
  cfg.seed = a.seed;
  divfree::Dataset ds = divfree::generate_dataset(cfg, a.threads);
  divfree::io::write_dataset(resolve_path(a.out), ds);
  double worst = 0.0;
  for (const divfree::Sample& s : ds.samples) worst = std::max(worst, s.solver_residual);
  std::cout << "wrote " << ds.samples.size() << " samples to " << resolve_path(a.out).string()
            << " (worst solver residual " << worst << ")\n";
  return kExitOk;
}

struct TrainArgs {
  std::string data = "dataset";
  std::string out = "checkpoint";
  std::string resume;
  std::string variant = "pg";
  double c_div = 0.1;
  double epsilon = 1e-8;
  int epochs = 100;
  double lr0 = 1e-3;
  int batch = 0;
  int modes = 8, width = 16, depth = 4;
  int n_train = 0;  // 0 -> 3/4 of n_dat
  std::uint64_t seed = 0;
};

int run_train(const TrainArgs& a) {
  divfree::Dataset ds = divfree::io::read_dataset(resolve_path(a.data));
  int n_train = a.n_train > 0 ? a.n_train : ds.cfg.n_dat * 3 / 4;
  if (!a.resume.empty() && a.n_train == 0) {
    divfree::io::Checkpoint probe = divfree::io::read_checkpoint(resolve_path(a.resume));
    if (probe.n_train > 0) n_train = probe.n_train;  // keep the stored split
  }
  if (n_train < 1 || n_train > ds.cfg.n_dat) {
    std::cerr << "train: bad split: n_train=" << n_train << " of " << ds.cfg.n_dat << "\n";
    return kExitConfigMismatch;
  }

  divfree::TrainState state;
  divfree::LossConfig lcfg;
  divfree::TrainConfig tcfg;
  divfree::NormalizationStats stats;
  std::uint64_t seed = a.seed;
  if (!a.resume.empty()) {
    divfree::io::Checkpoint ck = divfree::io::read_checkpoint(resolve_path(a.resume));
    if (ck.cfg.n_dis != ds.cfg.n_dis) {
      std::cerr << "train: checkpoint n_dis " << ck.cfg.n_dis << " != dataset n_dis " << ds.cfg.n_dis << "\n";
      return kExitConfigMismatch;
    }
    state.model.cfg = ck.cfg;
    state.model.theta = ck.theta;
    state.adam.m = ck.adam_m;
    state.adam.v = ck.adam_v;
    state.adam.step = ck.adam_step;
    state.epoch = ck.epoch;
    state.history = ck.history;
    lcfg = ck.loss;
    stats = ck.stats;
    seed = ck.seed;
    tcfg.lr0 = ck.lr0;
    tcfg.batch_size = ck.batch_size;
    tcfg.epochs = a.epochs;
    tcfg.seed = seed;
  } else {
    divfree::FnoConfig fcfg;
    fcfg.n_dis = ds.cfg.n_dis;
    fcfg.ell_u = ds.cfg.ell_u;
    fcfg.width = a.width;
    fcfg.depth = a.depth;
    fcfg.modes = a.modes;
    fcfg.variant = divfree::variant_from_name(a.variant);
    state.model = divfree::init_fno(fcfg, seed);
    lcfg.variant = fcfg.variant;
    lcfg.c_div = a.c_div;
    lcfg.epsilon = a.epsilon;
    stats = divfree::compute_normalization(ds, n_train);
    tcfg.epochs = a.epochs;
    tcfg.lr0 = a.lr0;
    tcfg.batch_size = a.batch;
    tcfg.seed = seed;
  }

  try {
    divfree::train(state, ds, stats, lcfg, tcfg, n_train);
  } catch (const divfree::TrainingDiverged& e) {
    std::cerr << "train: " << e.what() << "\n";
    return kExitNumerical;
  }

  divfree::io::Checkpoint ck;
  ck.cfg = state.model.cfg;
  ck.loss = lcfg;
  ck.stats = stats;
  ck.seed = seed;
  ck.epoch = state.epoch;
  ck.total_epochs = tcfg.epochs;
  ck.lr0 = tcfg.lr0;
  ck.batch_size = tcfg.batch_size;
  ck.n_train = n_train;
  ck.theta = state.model.theta;
  ck.adam_m = state.adam.m;
  ck.adam_v = state.adam.v;
  ck.adam_step = state.adam.step;
  ck.history = state.history;
  fs::path out = resolve_path(a.out);
  divfree::io::write_checkpoint(out, ck);
  divfree::io::write_history_csv(out / "history.csv", state.history);
  if (!state.history.empty()) {
    const divfree::HistoryRow& last = state.history.back();
    std::cout << "epoch " << last.epoch << ": train L_dat " << last.train_l_dat << ", test L_dat "
              << last.test_l_dat << ", test L_div " << last.test_l_div << "\n";
  }
  std::cout << "wrote checkpoint to " << out.string() << "\n";
  return kExitOk;
}

struct EvaluateArgs {
  std::string ckpt = "checkpoint";
  std::string data = "dataset";
  std::string out = "evaluation";
  std::string split = "test";
  int sample = -1;
  std::int64_t micro_seed = -1;
  double s_u = 0.0;  // 0 -> dataset default
  double f22 = 1.004;
};

int run_evaluate(const EvaluateArgs& a) {
  divfree::io::Checkpoint ck = divfree::io::read_checkpoint(resolve_path(a.ckpt));
  divfree::Dataset ds = divfree::io::read_dataset(resolve_path(a.data));
  if (ck.cfg.n_dis != ds.cfg.n_dis || ck.cfg.ell_u != ds.cfg.ell_u) {
    std::cerr << "evaluate: checkpoint grid (n_dis " << ck.cfg.n_dis << ") does not match dataset (n_dis "
              << ds.cfg.n_dis << ")\n";
    return kExitConfigMismatch;
  }
  divfree::FnoModel model{ck.cfg, ck.theta};
  const int n_train = ck.n_train > 0 ? std::min(ck.n_train, ds.cfg.n_dat) : ds.cfg.n_dat * 3 / 4;

  int begin = 0, end = ds.cfg.n_dat;
  divfree::Dataset fresh;  // holds a generated out-of-distribution sample
  const divfree::Dataset* eval_ds = &ds;
  if (a.micro_seed >= 0) {
    fresh.cfg = ds.cfg;
    fresh.cfg.n_dat = 1;
    fresh.cfg.seed = static_cast<std::uint64_t>(a.micro_seed);
    if (a.s_u > 0.0) fresh.cfg.micro.s_u = a.s_u;
    fresh.cfg.f22_list = {a.f22};
    try {
      fresh.samples.push_back(divfree::generate_sample(fresh.cfg, 0));
    } catch (const std::exception& e) {
      std::cerr << "evaluate: " << e.what() << "\n";
      return kExitNumerical;
    }
    eval_ds = &fresh;
    begin = 0;
    end = 1;
  } else if (a.sample >= 0) {
    if (a.sample >= ds.cfg.n_dat) {
      std::cerr << "evaluate: sample index out of range\n";
      return kExitConfigMismatch;
    }
    begin = a.sample;
    end = a.sample + 1;
  } else if (a.split == "test") {
    begin = n_train;
  } else if (a.split == "train") {
    end = n_train;
  } else if (a.split != "all") {
    std::cerr << "evaluate: unknown split " << a.split << "\n";
    return kExitConfigMismatch;
  }

  divfree::EvalMaps maps;
  divfree::EvalMetrics metrics = divfree::evaluate(model, ck.stats, *eval_ds, begin, end, ck.loss, &maps);

  fs::path out = resolve_path(a.out);
  fs::create_directories(out);
  json j;
  j["variant"] = divfree::variant_name(ck.cfg.variant);
  j["n_samples"] = end - begin;
  j["l_dat"] = metrics.loss.l_dat;
  j["l_div"] = metrics.loss.l_div;
  j["rel_div_norm"] = metrics.rel_div_norm;
  j["max_abs_err_mpa"] = metrics.max_abs_err;
  j["median_abs_err_mpa"] = metrics.median_abs_err;
  divfree::io::write_text(out / "metrics.json", j.dump(2) + "\n");
  divfree::io::write_field_map(out / "error_map", maps.err_map, maps.n_dis);
  divfree::io::write_field_map(out / "div_map", maps.div_map, maps.n_dis);
  std::cout << "rel_div_norm " << metrics.rel_div_norm << ", L_dat " << metrics.loss.l_dat << "\n";
  std::cout << "wrote metrics and maps to " << out.string() << "\n";
  return kExitOk;
}

struct DiagnoseArgs {
  std::string data;
  int sample = 0;
  std::string blob;
  int n_dis = 0;
  double ell_u = 1.0;
};

int run_diagnose(const DiagnoseArgs& a) {
  divfree::RealTensorField2 field;
  if (!a.blob.empty()) {
    if (a.n_dis <= 0) {
      std::cerr << "diagnose-div: --n-dis required with --blob\n";
      return kExitConfigMismatch;
    }
    divfree::GridConfig g{a.n_dis, a.ell_u, 2};
    field = divfree::RealTensorField2(g);
    std::vector<double> raw = divfree::io::read_blob(resolve_path(a.blob), g.pixel_count() * 9);
    field.v = std::move(raw);
  } else if (!a.data.empty()) {
    divfree::Dataset ds = divfree::io::read_dataset(resolve_path(a.data));
    if (a.sample < 0 || a.sample >= ds.cfg.n_dat) {
      std::cerr << "diagnose-div: sample index out of range\n";
      return kExitConfigMismatch;
    }
    divfree::GridConfig g = ds.cfg.train_grid();
    field = divfree::RealTensorField2(g);
    const divfree::Sample& s = ds.samples[a.sample];
    const std::size_t np = g.pixel_count();
    for (std::size_t px = 0; px < np; ++px)
      for (int t = 0; t < 9; ++t) field.v[px * 9 + t] = s.p[static_cast<std::size_t>(t) * np + px];
  } else {
    std::cerr << "diagnose-div: need --data or --blob\n";
    return kExitConfigMismatch;
  }

  divfree::RealVectorField d = divfree::field_div(field);
  const double ell = field.grid.ell_u;
  double rms_d = std::sqrt(divfree::grid_mean_sq(d));
  double rms_p = std::sqrt(divfree::grid_mean_sq(field));
  auto [mean, fluct] = divfree::mean_fluctuation_split(field);
  double mean_norm = mean.frobenius();
  double max_d = 0.0;
  for (std::size_t px = 0; px < field.grid.pixel_count(); ++px) {
    double m2 = 0.0;
    for (int i = 0; i < 3; ++i) m2 += d.at(px, i) * d.at(px, i);
    max_d = std::max(max_d, std::sqrt(m2));
  }
  std::cout << std::setprecision(17);
  std::cout << "rel_div_vs_mean " << (mean_norm > 0 ? ell * rms_d / mean_norm : ell * rms_d) << "\n";
  std::cout << "rel_div_vs_field " << (rms_p > 0 ? ell * rms_d / rms_p : ell * rms_d) << "\n";
  std::cout << "max_pixel_div " << ell * max_d << "\n";
  return kExitOk;
}

struct CompareArgs {
  std::string data = "dataset";
  std::string out = "comparison";
  int epochs = 100;
  double lr0 = 1e-3;
  int batch = 0;
  int modes = 8, width = 16, depth = 4;
  int n_train = 0;
  int threads = 1;
  std::uint64_t seed = 0;
  std::vector<double> c_div_list = {0.01, 0.1, 1.0, 10.0};
};

int run_compare(const CompareArgs& a) {
  divfree::Dataset ds = divfree::io::read_dataset(resolve_path(a.data));
  const int n_train = a.n_train > 0 ? a.n_train : ds.cfg.n_dat * 3 / 4;
  divfree::NormalizationStats stats = divfree::compute_normalization(ds, n_train);

  struct Row {
    std::string variant;
    double c_div;
    double test_l_dat, test_l_div, rel_div_norm;
  };
  std::vector<std::pair<divfree::Variant, double>> tasks = {{divfree::Variant::pg, 0.0},
                                                            {divfree::Variant::pe, 0.0}};
  for (double c : a.c_div_list) tasks.emplace_back(divfree::Variant::pi, c);
  std::vector<Row> rows(tasks.size());
  std::vector<std::string> errors(tasks.size());

  auto run_one = [&](std::size_t slot) {
    auto [variant, c_div] = tasks[slot];
    divfree::FnoConfig fcfg;
    fcfg.n_dis = ds.cfg.n_dis;
    fcfg.ell_u = ds.cfg.ell_u;
    fcfg.width = a.width;
    fcfg.depth = a.depth;
    fcfg.modes = a.modes;
    fcfg.variant = variant;
    divfree::LossConfig lcfg;
    lcfg.variant = variant;
    lcfg.c_div = c_div;
    divfree::TrainConfig tcfg;
    tcfg.epochs = a.epochs;
    tcfg.lr0 = a.lr0;
    tcfg.batch_size = a.batch;
    tcfg.seed = a.seed;
    divfree::TrainState state;
    state.model = divfree::init_fno(fcfg, a.seed);
    divfree::train(state, ds, stats, lcfg, tcfg, n_train);
    divfree::EvalMetrics m = divfree::evaluate(state.model, stats, ds, n_train, ds.cfg.n_dat, lcfg);
    rows[slot] = {divfree::variant_name(variant), variant == divfree::Variant::pi ? c_div : 0.0,
                  m.loss.l_dat, m.loss.l_div, m.rel_div_norm};
  };

  try {
    const int workers = std::max(1, std::min<int>(a.threads, static_cast<int>(tasks.size())));
    if (workers == 1) {
      for (std::size_t slot = 0; slot < tasks.size(); ++slot) run_one(slot);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w]() {
          for (std::size_t slot = w; slot < tasks.size(); slot += workers) {
            try {
              run_one(slot);
            } catch (const std::exception& e) {
              errors[slot] = e.what();
            }
          }
        });
      for (auto& th : pool) th.join();
      for (const std::string& e : errors)
        if (!e.empty()) {
          std::cerr << "compare: " << e << "\n";
          return kExitNumerical;
        }
    }
  } catch (const divfree::TrainingDiverged& e) {
    std::cerr << "compare: " << e.what() << "\n";
    return kExitNumerical;
  }
  for (const Row& r : rows) {
    std::cout << r.variant;
    if (r.variant == "pi") std::cout << " (c_div " << r.c_div << ")";
    std::cout << ": test L_dat " << r.test_l_dat << ", test L_div " << r.test_l_div << ", rel div "
              << r.rel_div_norm << "\n";
  }

  fs::path out = resolve_path(a.out);
  fs::create_directories(out);
  std::ostringstream os;
  os << "variant,c_div,test_L_dat,test_L_div,rel_div_norm\n" << std::setprecision(17);
  for (const Row& r : rows)
    os << r.variant << ',' << r.c_div << ',' << r.test_l_dat << ',' << r.test_l_div << ','
       << r.rel_div_norm << '\n';
  divfree::io::write_text(out / "tradeoff.csv", os.str());
  std::cout << "wrote " << (out / "tradeoff.csv").string() << "\n";
  return kExitOk;
}

struct VerifyArgs {
  int trials = 20;
  std::uint64_t seed = 0;
  int n_dis = 16;
};

int run_verify_appendix(const VerifyArgs& a) {
  divfree::GridConfig grid{a.n_dis, 1.0, 2};
  divfree::HelmholtzReport h = divfree::verify_tensor_helmholtz(a.trials, a.seed, grid);
  divfree::RiemannFieldReport r = divfree::verify_riemann_field(a.trials, a.seed, grid);
  divfree::ModeRankReport ranks = divfree::measure_mode_ranks(a.seed);

  auto line = [](const std::string& name, double value, bool ok) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << " = " << value << "\n";
  };
  std::cout << "tensor Helmholtz split (" << a.trials << " trials, n_dis " << a.n_dis << ")\n";
  line("  reconstruction rel err", h.max_recon_rel_err, h.max_recon_rel_err <= 1e-12);
  line("  div-free (phi const) rel", h.max_divfree_rel, h.max_divfree_rel <= 1e-11);
  line("  single-mode gradient err", h.max_single_mode_err, h.max_single_mode_err <= 1e-12);
  std::cout << "fourth-order constructions\n";
  line("  symmetric: symmetry defect rel", r.max_sym_defect_rel, r.max_sym_defect_rel <= 1e-12);
  line("  symmetric: div rel", r.max_sym_div_rel, r.max_sym_div_rel <= 1e-11);
  line("  non-symmetric: div rel", r.max_nonsym_div_rel, r.max_nonsym_div_rel <= 1e-11);
  line("  symmetric subspace cross-check", r.max_cross_err_rel, r.max_cross_err_rel <= 1e-12);
  std::cout << "per-mode map ranks (measured): curl " << ranks.rank_curl << ", riemann "
            << ranks.rank_riemann << ", nonsym " << ranks.rank_nonsym << "\n";
  std::cout << "parameter DOF per mode: riemann 6, nonsym 9\n";
  bool pass = h.pass && r.pass;
  std::cout << (pass ? "ALL PASS" : "FAILURES PRESENT") << "\n";
  return pass ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "divergence-free stress fields in Fourier neural operators\n"
      "relative paths resolve against DIVFREE_DATA_DIR when set"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* g = app.add_subcommand("generate", "generate an equilibrium stress dataset");
  g->add_option("--out", gen.out, "output dataset directory");
  g->add_option("--n-dat", gen.n_dat, "number of samples");
  g->add_option("--n-dis", gen.n_dis, "training grid resolution (even)");
  g->add_option("--n-res", gen.n_res, "solver resolution (multiple of n-dis; default n-dis)");
  g->add_option("--ell", gen.ell_u, "cell side length");
  g->add_option("--s-u", gen.s_u, "mean grain size fraction");
  g->add_option("--e-range", gen.e_range, "Young's modulus range [GPa]")->expected(2);
  g->add_option("--nu-range", gen.nu_range, "Poisson ratio range")->expected(2);
  g->add_option("--f22", gen.f22, "mean F22 load list")->expected(-1);
  g->add_option("--tol", gen.tol_div, "solver divergence tolerance");
  g->add_option("--max-iter", gen.max_iter, "solver iteration cap");
  g->add_option("--seed", gen.seed, "dataset seed");
  g->add_option("--threads", gen.threads, "worker thread cap");

  TrainArgs tr;
  CLI::App* t = app.add_subcommand("train", "train an FNO variant on a dataset");
  t->add_option("--data", tr.data, "dataset directory");
  t->add_option("--out", tr.out, "checkpoint directory");
  t->add_option("--resume", tr.resume, "checkpoint to resume from");
  t->add_option("--variant", tr.variant, "pg | pi | pe");
  t->add_option("--c-div", tr.c_div, "divergence constraint coefficient (pi)");
  t->add_option("--epsilon", tr.epsilon, "loss mollifier");
  t->add_option("--epochs", tr.epochs, "total training epochs");
  t->add_option("--lr0", tr.lr0, "initial learning rate");
  t->add_option("--batch", tr.batch, "batch size (0 = full batch)");
  t->add_option("--modes", tr.modes, "retained Fourier modes per dimension");
  t->add_option("--width", tr.width, "hidden channel count");
  t->add_option("--depth", tr.depth, "hidden layers");
  t->add_option("--n-train", tr.n_train, "training split size (default 3/4)");
  t->add_option("--seed", tr.seed, "training/init seed");

  EvaluateArgs ev;
  CLI::App* e = app.add_subcommand("evaluate", "evaluate a checkpoint, write metrics and maps");
  e->add_option("--ckpt", ev.ckpt, "checkpoint directory");
  e->add_option("--data", ev.data, "dataset directory");
  e->add_option("--out", ev.out, "output directory");
  e->add_option("--split", ev.split, "test | train | all");
  e->add_option("--sample", ev.sample, "evaluate a single sample index");
  e->add_option("--micro-seed", ev.micro_seed, "generate a fresh microstructure with this seed");
  e->add_option("--s-u", ev.s_u, "grain size for --micro-seed");
  e->add_option("--f22", ev.f22, "load for --micro-seed");

  DiagnoseArgs di;
  CLI::App* d = app.add_subcommand("diagnose-div", "divergence report for a stored stress field");
  d->add_option("--data", di.data, "dataset directory");
  d->add_option("--sample", di.sample, "sample index");
  d->add_option("--blob", di.blob, "raw f64 stress blob [n,n,3,3]");
  d->add_option("--n-dis", di.n_dis, "grid resolution for --blob");
  d->add_option("--ell", di.ell_u, "cell side length for --blob");

  CompareArgs co;
  CLI::App* c = app.add_subcommand("compare", "train all variants with a shared seed, emit trade-off table");
  c->add_option("--data", co.data, "dataset directory");
  c->add_option("--out", co.out, "output directory");
  c->add_option("--epochs", co.epochs, "training epochs");
  c->add_option("--lr0", co.lr0, "initial learning rate");
  c->add_option("--batch", co.batch, "batch size (0 = full batch)");
  c->add_option("--modes", co.modes, "retained modes");
  c->add_option("--width", co.width, "hidden width");
  c->add_option("--depth", co.depth, "hidden depth");
  c->add_option("--n-train", co.n_train, "training split size");
  c->add_option("--threads", co.threads, "worker thread cap");
  c->add_option("--seed", co.seed, "shared seed");
  c->add_option("--c-div-list", co.c_div_list, "pi constraint coefficients")->expected(-1);

  VerifyArgs ve;
  CLI::App* v = app.add_subcommand("verify-appendix", "run the appendix property suite");
  v->add_option("--trials", ve.trials, "random trials");
  v->add_option("--seed", ve.seed, "seed");
  v->add_option("--n-dis", ve.n_dis, "grid resolution");

  CLI11_PARSE(app, argc, argv);
  try {
    if (g->parsed()) return run_generate(gen);
    if (t->parsed()) return run_train(tr);
    if (e->parsed()) return run_evaluate(ev);
    if (d->parsed()) return run_diagnose(di);
    if (c->parsed()) return run_compare(co);
    if (v->parsed()) return run_verify_appendix(ve);
  } catch (const divfree::SolverNotConverged& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitNumerical;
  } catch (const divfree::TrainingDiverged& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitNumerical;
  } catch (const divfree::io::IoError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitIo;
  } catch (const std::runtime_error& ex) {
    // solver failures propagated out of dataset generation count as numerical
    std::cerr << "error: " << ex.what() << "\n";
    return std::string(ex.what()).find("solver") != std::string::npos ? kExitNumerical : kExitIo;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitConfigMismatch;
  }
  return kExitOk;
}
