#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "divfree/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string cli = DIVFREE_CLI_PATH;

int run(const std::string& args) {
  std::string cmd = cli + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string run_capture(const std::string& args, int* exit_code = nullptr) {
  fs::path tmp = fs::temp_directory_path() / "divfree_cli_out.txt";
  std::string cmd = cli + " " + args + " >" + tmp.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  if (exit_code) *exit_code = WEXITSTATUS(status);
  std::ifstream in(tmp);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

fs::path temp_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("divfree_cli_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool dirs_identical(const fs::path& a, const fs::path& b) {
  for (const auto& entry : fs::directory_iterator(a)) {
    fs::path other = b / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("generate is deterministic and self-validating") {
  fs::path da = temp_dir("gen_a"), db = temp_dir("gen_b");
  std::string args = "generate --n-dat 3 --n-dis 8 --seed 7 --out ";
  REQUIRE(run(args + da.string()) == 0);
  REQUIRE(run(args + db.string()) == 0);
  REQUIRE(dirs_identical(da, db));
  REQUIRE(fs::exists(da / "manifest.json"));
  REQUIRE(divfree::io::validate_dataset_checksums(da));
}

TEST_CASE("pe checkpoint reports the architectural divergence floor") {
  fs::path data = temp_dir("pe_data"), ckpt = temp_dir("pe_ckpt"), evald = temp_dir("pe_eval");
  REQUIRE(run("generate --n-dat 4 --n-dis 8 --seed 9 --out " + data.string()) == 0);
  REQUIRE(run("train --data " + data.string() + " --out " + ckpt.string() +
              " --variant pe --epochs 1 --width 4 --depth 1 --modes 3 --seed 9") == 0);
  REQUIRE(run("evaluate --ckpt " + ckpt.string() + " --data " + data.string() + " --out " +
              evald.string()) == 0);
  json metrics = json::parse(slurp(evald / "metrics.json"));
  REQUIRE(metrics["rel_div_norm"].get<double>() <= 1e-10);
}

TEST_CASE("full pipeline: generate, train, evaluate, diagnose") {
  fs::path data = temp_dir("pipe_data");
  fs::path ckpt = temp_dir("pipe_ckpt");
  fs::path evald = temp_dir("pipe_eval");
  REQUIRE(run("generate --n-dat 4 --n-dis 8 --seed 3 --out " + data.string()) == 0);

  SECTION("train writes checkpoint, history, and metadata") {
    REQUIRE(run("train --data " + data.string() + " --out " + ckpt.string() +
                " --variant pi --c-div 0.01 --epochs 2 --width 4 --depth 1 --modes 3 --seed 5") == 0);
    REQUIRE(fs::exists(ckpt / "checkpoint.json"));
    REQUIRE(fs::exists(ckpt / "params.bin"));
    std::string csv = slurp(ckpt / "history.csv");
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 epochs
    json meta = json::parse(slurp(ckpt / "checkpoint.json"));
    REQUIRE(meta["config"]["variant"] == "pi");
    REQUIRE(meta["loss"]["c_div"].get<double>() == 0.01);
    REQUIRE(meta["epoch"].get<int>() == 2);

    SECTION("evaluate emits metrics and correctly sized maps") {
      REQUIRE(run("evaluate --ckpt " + ckpt.string() + " --data " + data.string() + " --out " +
                  evald.string()) == 0);
      json metrics = json::parse(slurp(evald / "metrics.json"));
      REQUIRE(metrics.contains("rel_div_norm"));
      REQUIRE(metrics["n_samples"].get<int>() == 1);  // 3/4 split of 4 leaves one test sample
      std::string pgm = slurp(evald / "error_map.pgm");
      REQUIRE(pgm.rfind("P5\n8 8\n65535\n", 0) == 0);
      REQUIRE(fs::exists(evald / "div_map.pgm"));
      REQUIRE(fs::exists(evald / "error_map.f64"));
    }

    SECTION("resume continues the schedule and matches an uninterrupted run") {
      fs::path ck6 = temp_dir("pipe_ck6"), ckr = temp_dir("pipe_ckr");
      REQUIRE(run("train --data " + data.string() + " --out " + ck6.string() +
                  " --variant pi --c-div 0.01 --epochs 4 --width 4 --depth 1 --modes 3 --seed 5") == 0);
      REQUIRE(run("train --data " + data.string() + " --resume " + ckpt.string() + " --out " +
                  ckr.string() + " --epochs 4") == 0);
      json a = json::parse(slurp(ck6 / "checkpoint.json"));
      json b = json::parse(slurp(ckr / "checkpoint.json"));
      REQUIRE(a["params_checksum"] == b["params_checksum"]);
    }
  }

  SECTION("diagnose-div reports solver-level residuals") {
    int code = 0;
    std::string out = run_capture("diagnose-div --data " + data.string() + " --sample 0", &code);
    REQUIRE(code == 0);
    REQUIRE(out.find("rel_div_vs_mean") != std::string::npos);
    double rel = std::stod(out.substr(out.find("rel_div_vs_mean") + 16));
    REQUIRE(rel <= 1e-7);
  }
}

TEST_CASE("diagnose-div closed forms") {
  const int n = 16;
  fs::path dir = temp_dir("diag");
  auto write_field = [&](const fs::path& p, auto&& value_at) {
    std::vector<double> blob(static_cast<std::size_t>(n) * n * 9, 0.0);
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2) blob[(static_cast<std::size_t>(i1) * n + i2) * 9] = value_at(i1, i2);
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(blob.data()), static_cast<std::streamsize>(blob.size() * 8));
  };

  SECTION("constant field has zero divergence") {
    write_field(dir / "const.f64", [](int, int) { return 5.0; });
    int code = 0;
    std::string out =
        run_capture("diagnose-div --blob " + (dir / "const.f64").string() + " --n-dis 16 --ell 1", &code);
    REQUIRE(code == 0);
    REQUIRE(std::stod(out.substr(out.find("rel_div_vs_mean") + 16)) <= 1e-14);
    REQUIRE(std::stod(out.substr(out.find("max_pixel_div") + 14)) <= 1e-12);
  }
  SECTION("single-mode P11 matches the analytic derivative") {
    // P11 = sin(2 pi x1): d1 = 2 pi cos(2 pi x1), so max ell*|d| = 2 pi
    write_field(dir / "mode.f64", [&](int i1, int) { return std::sin(2.0 * M_PI * i1 / n); });
    int code = 0;
    std::string out =
        run_capture("diagnose-div --blob " + (dir / "mode.f64").string() + " --n-dis 16 --ell 1", &code);
    REQUIRE(code == 0);
    double max_d = std::stod(out.substr(out.find("max_pixel_div") + 14));
    REQUIRE(max_d == Catch::Approx(2.0 * M_PI).epsilon(1e-10));
  }
}

TEST_CASE("compare emits the trade-off table") {
  fs::path data = temp_dir("cmp_data"), out = temp_dir("cmp_out");
  REQUIRE(run("generate --n-dat 4 --n-dis 8 --seed 6 --out " + data.string()) == 0);
  REQUIRE(run("compare --data " + data.string() + " --out " + out.string() +
              " --epochs 1 --width 4 --depth 1 --modes 3 --threads 2 --seed 6 --c-div-list 0.01 10") == 0);
  std::string csv = slurp(out / "tradeoff.csv");
  REQUIRE(csv.rfind("variant,c_div,test_L_dat,test_L_div,rel_div_norm\n", 0) == 0);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + pg + pe + two pi rows
  REQUIRE(csv.find("pg,") != std::string::npos);
  REQUIRE(csv.find("pe,") != std::string::npos);
}

TEST_CASE("verify-appendix passes") {
  int code = 0;
  std::string out = run_capture("verify-appendix --trials 3 --seed 1 --n-dis 8", &code);
  REQUIRE(code == 0);
  REQUIRE(out.find("ALL PASS") != std::string::npos);
  REQUIRE(out.find("curl 6") != std::string::npos);
}

TEST_CASE("exit codes") {
  SECTION("missing dataset is an I/O failure") {
    REQUIRE(run("train --data /nonexistent/dataset --out /tmp/divfree_cli_x") == 2);
  }
  SECTION("grid mismatch between checkpoint and dataset") {
    fs::path d8 = temp_dir("mismatch_d8"), d16 = temp_dir("mismatch_d16"), ck = temp_dir("mismatch_ck");
    REQUIRE(run("generate --n-dat 2 --n-dis 8 --seed 1 --out " + d8.string()) == 0);
    REQUIRE(run("generate --n-dat 2 --n-dis 16 --seed 1 --out " + d16.string()) == 0);
    REQUIRE(run("train --data " + d8.string() + " --out " + ck.string() +
                " --epochs 1 --width 4 --depth 1 --modes 3 --n-train 1") == 0);
    REQUIRE(run("evaluate --ckpt " + ck.string() + " --data " + d16.string() + " --out /tmp/divfree_cli_y") == 4);
  }
  SECTION("solver failure surfaces as a numerical error") {
    REQUIRE(run("generate --n-dat 1 --n-dis 8 --max-iter 1 --seed 2 --out /tmp/divfree_cli_z") == 3);
  }
}

TEST_CASE("DIVFREE_DATA_DIR resolves relative paths") {
  fs::path root = temp_dir("envroot");
  std::string cmd = "DIVFREE_DATA_DIR=" + root.string() + " " + cli +
                    " generate --n-dat 1 --n-dis 8 --seed 4 --out rel_ds >/dev/null 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  REQUIRE(fs::exists(root / "rel_ds" / "manifest.json"));
}
