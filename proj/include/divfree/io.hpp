#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "divfree/fno.hpp"
#include "divfree/training.hpp"

namespace divfree::io {

using nlohmann::json;
namespace fs = std::filesystem;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// FNV-1a over the raw bytes; recorded in manifests so containers can be
// validated and compared for byte identity.
inline std::string fnv1a_hex(const void* data, std::size_t size) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

// All blobs are little-endian float64, row-major in the declared shape.
inline void write_blob(const fs::path& path, const std::vector<double>& data) {
  static_assert(sizeof(double) == 8);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * 8));
  if (!out) throw IoError("short write to " + path.string());
}

inline std::vector<double> read_blob(const fs::path& path, std::size_t expected_count) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot read " + path.string());
  std::streamsize size = in.tellg();
  if (size != static_cast<std::streamsize>(expected_count * 8))
    throw IoError("blob " + path.string() + " has unexpected size");
  std::vector<double> data(expected_count);
  in.seekg(0);
  in.read(reinterpret_cast<char*>(data.data()), size);
  if (!in) throw IoError("short read from " + path.string());
  return data;
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("short write to " + path.string());
}

inline json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  json j;
  in >> j;
  return j;
}

// ---------------------------------------------------------------------------
// dataset container: <dir>/manifest.json plus one blob per field per sample
// ---------------------------------------------------------------------------

// sample fields on disk: grain_id [n,n], e_field [n,n] (GPa), nu_field [n,n],
// f_bar [3,3], p_field [n,n,3,3] (MPa, pixel-major like RealTensorField2)
inline std::string sample_blob_name(int index, const std::string& field) {
  std::ostringstream os;
  os << "sample_" << std::setw(5) << std::setfill('0') << index << "." << field << ".f64";
  return os.str();
}

inline std::vector<double> sample_p_pixel_major(const Sample& s) {
  const std::size_t np = s.micro.grain_id.size();
  std::vector<double> out(np * 9);
  for (std::size_t px = 0; px < np; ++px)
    for (int t = 0; t < 9; ++t) out[px * 9 + t] = s.p[static_cast<std::size_t>(t) * np + px];
  return out;
}

inline void write_dataset(const fs::path& dir, const Dataset& ds) {
  fs::create_directories(dir);
  json manifest;
  manifest["format"] = "divfree-dataset-v1";
  manifest["n_dat"] = ds.cfg.n_dat;
  manifest["n_dis"] = ds.cfg.n_dis;
  manifest["n_res"] = ds.cfg.n_res;
  manifest["ell_u"] = ds.cfg.ell_u;
  manifest["seed"] = ds.cfg.seed;
  manifest["f22_list"] = ds.cfg.f22_list;
  manifest["micro"] = {{"s_u", ds.cfg.micro.s_u},   {"e_min", ds.cfg.micro.e_min},
                       {"e_max", ds.cfg.micro.e_max}, {"nu_min", ds.cfg.micro.nu_min},
                       {"nu_max", ds.cfg.micro.nu_max}};
  manifest["solver"] = {{"tol_div", ds.cfg.solver.tol_div}, {"max_iter", ds.cfg.solver.max_iter}};
  manifest["shapes"] = {{"grain_id", {ds.cfg.n_dis, ds.cfg.n_dis}},
                        {"e_field", {ds.cfg.n_dis, ds.cfg.n_dis}},
                        {"nu_field", {ds.cfg.n_dis, ds.cfg.n_dis}},
                        {"f_bar", {3, 3}},
                        {"p_field", {ds.cfg.n_dis, ds.cfg.n_dis, 3, 3}}};
  json checksums = json::object();
  json meta = json::array();
  const char* fields[5] = {"grain_id", "e_field", "nu_field", "f_bar", "p_field"};
  for (int a = 0; a < ds.cfg.n_dat; ++a) {
    const Sample& s = ds.samples[a];
    const std::size_t np = s.micro.grain_id.size();
    std::vector<double> grain(np);
    for (std::size_t p = 0; p < np; ++p) grain[p] = static_cast<double>(s.micro.grain_id[p]);
    std::vector<double> fbar(s.f_bar.m.begin(), s.f_bar.m.end());
    std::vector<double> blobs[5] = {std::move(grain), s.micro.e_field, s.micro.nu_field, std::move(fbar),
                                    sample_p_pixel_major(s)};
    for (int f = 0; f < 5; ++f) {
      std::string name = sample_blob_name(a, fields[f]);
      write_blob(dir / name, blobs[f]);
      checksums[name] = fnv1a_hex(blobs[f].data(), blobs[f].size() * 8);
    }
    meta.push_back({{"index", a},
                    {"n_grains", s.micro.n_grains},
                    {"solver_residual", s.solver_residual},
                    {"solver_iterations", s.solver_iterations}});
  }
  manifest["samples"] = meta;
  manifest["checksums"] = checksums;
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

inline Dataset read_dataset(const fs::path& dir) {
  json manifest = read_json(dir / "manifest.json");
  if (manifest.value("format", "") != "divfree-dataset-v1") throw IoError("not a divfree dataset: " + dir.string());
  Dataset ds;
  ds.cfg.n_dat = manifest["n_dat"];
  ds.cfg.n_dis = manifest["n_dis"];
  ds.cfg.n_res = manifest["n_res"];
  ds.cfg.ell_u = manifest["ell_u"];
  ds.cfg.seed = manifest["seed"];
  ds.cfg.f22_list = manifest["f22_list"].get<std::vector<double>>();
  ds.cfg.micro.s_u = manifest["micro"]["s_u"];
  ds.cfg.micro.e_min = manifest["micro"]["e_min"];
  ds.cfg.micro.e_max = manifest["micro"]["e_max"];
  ds.cfg.micro.nu_min = manifest["micro"]["nu_min"];
  ds.cfg.micro.nu_max = manifest["micro"]["nu_max"];
  ds.cfg.solver.tol_div = manifest["solver"]["tol_div"];
  ds.cfg.solver.max_iter = manifest["solver"]["max_iter"];
  const int n = ds.cfg.n_dis;
  const std::size_t np = static_cast<std::size_t>(n) * n;
  ds.samples.resize(ds.cfg.n_dat);
  for (int a = 0; a < ds.cfg.n_dat; ++a) {
    Sample& s = ds.samples[a];
    std::vector<double> grain = read_blob(dir / sample_blob_name(a, "grain_id"), np);
    s.micro.n_dis = n;
    s.micro.grain_id.resize(np);
    int max_id = 0;
    for (std::size_t p = 0; p < np; ++p) {
      s.micro.grain_id[p] = static_cast<int>(grain[p]);
      max_id = std::max(max_id, s.micro.grain_id[p]);
    }
    s.micro.n_grains = manifest["samples"][a].value("n_grains", max_id + 1);
    s.solver_residual = manifest["samples"][a].value("solver_residual", 0.0);
    s.solver_iterations = manifest["samples"][a].value("solver_iterations", 0);
    s.micro.e_field = read_blob(dir / sample_blob_name(a, "e_field"), np);
    s.micro.nu_field = read_blob(dir / sample_blob_name(a, "nu_field"), np);
    std::vector<double> fbar = read_blob(dir / sample_blob_name(a, "f_bar"), 9);
    for (int i = 0; i < 9; ++i) s.f_bar.m[i] = fbar[i];
    std::vector<double> p = read_blob(dir / sample_blob_name(a, "p_field"), np * 9);
    s.p.assign(9 * np, 0.0);
    for (std::size_t px = 0; px < np; ++px)
      for (int t = 0; t < 9; ++t) s.p[static_cast<std::size_t>(t) * np + px] = p[px * 9 + t];
  }
  return ds;
}

inline bool validate_dataset_checksums(const fs::path& dir, std::string* first_bad = nullptr) {
  json manifest = read_json(dir / "manifest.json");
  for (auto& [name, sum] : manifest["checksums"].items()) {
    std::ifstream in(dir / name, std::ios::binary | std::ios::ate);
    if (!in) {
      if (first_bad) *first_bad = name;
      return false;
    }
    std::streamsize size = in.tellg();
    std::vector<char> bytes(static_cast<std::size_t>(size));
    in.seekg(0);
    in.read(bytes.data(), size);
    if (fnv1a_hex(bytes.data(), bytes.size()) != sum.get<std::string>()) {
      if (first_bad) *first_bad = name;
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// checkpoint container: <dir>/checkpoint.json + params.bin
// params.bin holds theta, adam.m, adam.v back to back (little-endian f64),
// with group order documented by the layout in fno.hpp
// ---------------------------------------------------------------------------

struct Checkpoint {
  FnoConfig cfg;
  LossConfig loss;
  NormalizationStats stats;
  std::uint64_t seed = 0;
  int epoch = 0;
  int total_epochs = 0;
  double lr0 = 1e-3;
  int batch_size = 0;
  int n_train = 0;
  std::vector<double> theta, adam_m, adam_v;
  long adam_step = 0;
  std::vector<HistoryRow> history;
};

inline void write_checkpoint(const fs::path& dir, const Checkpoint& ck) {
  fs::create_directories(dir);
  ParamLayout lay = build_layout(ck.cfg);
  json j;
  j["format"] = "divfree-checkpoint-v1";
  j["config"] = {{"n_dis", ck.cfg.n_dis}, {"ell_u", ck.cfg.ell_u},   {"width", ck.cfg.width},
                 {"depth", ck.cfg.depth}, {"modes", ck.cfg.modes},   {"variant", variant_name(ck.cfg.variant)}};
  j["loss"] = {{"c_div", ck.loss.c_div}, {"epsilon", ck.loss.epsilon}};
  j["seed"] = ck.seed;
  j["epoch"] = ck.epoch;
  j["total_epochs"] = ck.total_epochs;
  j["lr0"] = ck.lr0;
  j["batch_size"] = ck.batch_size;
  j["n_train"] = ck.n_train;
  j["adam_step"] = ck.adam_step;
  j["normalization"] = {{"e_min", ck.stats.e_min},
                        {"e_max", ck.stats.e_max},
                        {"p_min", ck.stats.p_min},
                        {"p_max", ck.stats.p_max},
                        {"p_active", ck.stats.p_active}};
  json groups = json::array();
  for (const ParamGroup& g : lay.groups) groups.push_back({{"name", g.name}, {"offset", g.offset}, {"size", g.size}});
  j["param_groups"] = groups;
  j["param_count"] = lay.total;
  std::vector<double> all;
  all.reserve(ck.theta.size() * 3);
  all.insert(all.end(), ck.theta.begin(), ck.theta.end());
  all.insert(all.end(), ck.adam_m.begin(), ck.adam_m.end());
  all.insert(all.end(), ck.adam_v.begin(), ck.adam_v.end());
  j["params_checksum"] = fnv1a_hex(all.data(), all.size() * 8);
  json hist = json::array();
  for (const HistoryRow& r : ck.history)
    hist.push_back({{"epoch", r.epoch},
                    {"lr", r.lr},
                    {"train_l_dat", r.train_l_dat},
                    {"train_l_div", r.train_l_div},
                    {"test_l_dat", r.test_l_dat},
                    {"test_l_div", r.test_l_div}});
  j["history"] = hist;
  write_blob(dir / "params.bin", all);
  write_text(dir / "checkpoint.json", j.dump(2) + "\n");
}

inline Checkpoint read_checkpoint(const fs::path& dir) {
  json j = read_json(dir / "checkpoint.json");
  if (j.value("format", "") != "divfree-checkpoint-v1") throw IoError("not a divfree checkpoint: " + dir.string());
  Checkpoint ck;
  ck.cfg.n_dis = j["config"]["n_dis"];
  ck.cfg.ell_u = j["config"]["ell_u"];
  ck.cfg.width = j["config"]["width"];
  ck.cfg.depth = j["config"]["depth"];
  ck.cfg.modes = j["config"]["modes"];
  ck.cfg.variant = variant_from_name(j["config"]["variant"]);
  ck.loss.variant = ck.cfg.variant;
  ck.loss.c_div = j["loss"]["c_div"];
  ck.loss.epsilon = j["loss"]["epsilon"];
  ck.seed = j["seed"];
  ck.epoch = j["epoch"];
  ck.total_epochs = j["total_epochs"];
  ck.lr0 = j["lr0"];
  ck.batch_size = j["batch_size"];
  ck.n_train = j.value("n_train", 0);
  ck.adam_step = j["adam_step"];
  ck.stats.e_min = j["normalization"]["e_min"];
  ck.stats.e_max = j["normalization"]["e_max"];
  for (int t = 0; t < 9; ++t) {
    ck.stats.p_min[t] = j["normalization"]["p_min"][t];
    ck.stats.p_max[t] = j["normalization"]["p_max"][t];
    ck.stats.p_active[t] = j["normalization"]["p_active"][t];
  }
  std::size_t count = j["param_count"];
  std::vector<double> all = read_blob(dir / "params.bin", count * 3);
  if (fnv1a_hex(all.data(), all.size() * 8) != j["params_checksum"].get<std::string>())
    throw IoError("checkpoint parameter checksum mismatch in " + dir.string());
  ck.theta.assign(all.begin(), all.begin() + count);
  ck.adam_m.assign(all.begin() + count, all.begin() + 2 * count);
  ck.adam_v.assign(all.begin() + 2 * count, all.end());
  for (const json& r : j["history"])
    ck.history.push_back({r["epoch"], r["lr"], r["train_l_dat"], r["train_l_div"], r["test_l_dat"],
                          r["test_l_div"]});
  return ck;
}

// ---------------------------------------------------------------------------
// loss history CSV
// ---------------------------------------------------------------------------

inline void write_history_csv(const fs::path& path, const std::vector<HistoryRow>& history) {
  std::ostringstream os;
  os << "epoch,lr,train_L_dat,train_L_div,test_L_dat,test_L_div\n";
  os << std::setprecision(17);
  for (const HistoryRow& r : history)
    os << r.epoch << ',' << r.lr << ',' << r.train_l_dat << ',' << r.train_l_div << ',' << r.test_l_dat
       << ',' << r.test_l_div << '\n';
  write_text(path, os.str());
}

// ---------------------------------------------------------------------------
// field map export: 16-bit binary PGM plus a JSON sidecar with the value
// range, and the raw f64 blob next to it
// ---------------------------------------------------------------------------

inline void write_pgm16(const fs::path& path, const std::vector<double>& values, int n) {
  double lo = values.empty() ? 0.0 : values[0], hi = lo;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
  std::ostringstream os;
  os << "P5\n" << n << " " << n << "\n65535\n";
  std::string header = os.str();
  std::vector<unsigned char> bytes;
  bytes.reserve(values.size() * 2);
  for (double v : values) {
    unsigned int q = static_cast<unsigned int>(std::lround((v - lo) * scale));
    bytes.push_back(static_cast<unsigned char>(q >> 8));  // PGM 16-bit is big-endian
    bytes.push_back(static_cast<unsigned char>(q & 0xFF));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << header;
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  json side;
  side["min"] = lo;
  side["max"] = hi;
  side["n"] = n;
  write_text(path.string() + ".json", side.dump(2) + "\n");
}

inline void write_field_map(const fs::path& stem, const std::vector<double>& values, int n) {
  write_pgm16(fs::path(stem.string() + ".pgm"), values, n);
  write_blob(fs::path(stem.string() + ".f64"), values);
}

}  // namespace divfree::io
