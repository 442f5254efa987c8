#include "photonkit.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* leaf) {
  const fs::path p = fs::temp_directory_path() / "pk_capi" / leaf;
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("version and error strings") {
  CHECK(std::strlen(pk_version()) > 0);
  double out = 0.0;
  CHECK(pk_bose_einstein(-1.0, 10.0, &out) == PK_ERR_CONFIG);
  CHECK(std::strlen(pk_last_error()) > 0);
  CHECK(pk_bose_einstein(1.0, 30.0, &out) == PK_OK);
  CHECK(std::strlen(pk_last_error()) == 0);
}

TEST_CASE("scalar physics surface") {
  double v = 0.0;
  CHECK(pk_bose_einstein(1.0, 30.0, &v) == PK_OK);
  CHECK(v == doctest::Approx(2.117).epsilon(1e-3));
  CHECK(pk_phonon_dephasing_uev(3.0, 1.0, 30.0, &v) == PK_OK);
  CHECK(v == doctest::Approx(19.8).epsilon(2e-3));
  CHECK(pk_fourier_linewidth_uev(26.9, &v) == PK_OK);
  CHECK(v == doctest::Approx(24.47).epsilon(1e-3));
  CHECK(pk_purcell_lifetime_ps(680.0, 25.28, &v) == PK_OK);
  CHECK(v == doctest::Approx(26.9).epsilon(1e-3));
  CHECK(pk_visibility_inhomogeneous(30.0, 5.953422637, &v) == PK_OK);
  CHECK(v == doctest::Approx(0.76).epsilon(1e-6));
  CHECK(pk_correct_visibility(0.43, 0.039, 2.0, &v) == PK_OK);
  CHECK(v == doctest::Approx(0.508));
  CHECK(pk_correct_visibility(0.43, 0.039, 5.0, &v) == PK_ERR_CONFIG);
  CHECK(pk_calibrate_gamma_inhom(30.0, 0.76, &v) == PK_OK);
  CHECK(v == doctest::Approx(5.9534).epsilon(1e-4));
  CHECK(pk_pair_visibility_oracle(54.0, 3.0, 0.0, &v) == PK_OK);
  CHECK(v == doctest::Approx(0.796).epsilon(1e-2));
  CHECK(pk_calibrate_reservoir(0.25, 16, 80.0, &v) == PK_OK);
  CHECK(v == doctest::Approx(1456.6).epsilon(1e-3));
  CHECK(pk_calibrate_reservoir(0.001, 16, 80.0, &v) == PK_ERR_NUMERIC);
  CHECK(pk_visibility_temperature(680.0, 25.0, 2.5, 3.0, 1.0, 30.0, &v) == PK_OK);
  CHECK(v == doctest::Approx(0.517).epsilon(1e-2));
}

TEST_CASE("config handles") {
  pk_config* cfg = nullptr;
  REQUIRE(pk_config_create(&cfg) == PK_OK);
  CHECK(pk_config_override(cfg, "emitter.purcell_factor", "12.6") == PK_OK);
  CHECK(pk_config_override(cfg, "seed", "99") == PK_OK);
  CHECK(pk_config_override(cfg, "emitter.nonsense", "1") == PK_ERR_CONFIG);

  char hex[65];
  REQUIRE(pk_config_hash_hex(cfg, hex) == PK_OK);
  CHECK(std::strlen(hex) == 64);

  char* text = nullptr;
  REQUIRE(pk_config_to_json(cfg, &text) == PK_OK);
  const std::string json(text);
  pk_string_free(text);
  CHECK(json.find("\"purcell_factor\": 12.6") != std::string::npos);

  pk_config* cfg2 = nullptr;
  REQUIRE(pk_config_parse(json.c_str(), &cfg2) == PK_OK);
  char hex2[65];
  REQUIRE(pk_config_hash_hex(cfg2, hex2) == PK_OK);
  CHECK(std::string(hex) == hex2);

  pk_config_free(cfg);
  pk_config_free(cfg2);

  CHECK(pk_config_load("/nonexistent/path.json", &cfg) == PK_ERR_IO);
}

TEST_CASE("pipeline through the C surface") {
  const auto dir = temp_dir("pipeline");
  pk_config* cfg = nullptr;
  REQUIRE(pk_config_create(&cfg) == PK_OK);
  pk_config_override(cfg, "emitter.purcell_factor", "12.6");
  pk_config_override(cfg, "emitter.leak_rate", "0.02");
  pk_config_override(cfg, "train.n_pulses", "40000");
  pk_config_override(cfg, "seed", "5");

  REQUIRE(pk_run_simulate(cfg, dir.string().c_str()) == PK_OK);
  CHECK(fs::exists(dir / "ch1.ptt"));
  CHECK(fs::exists(dir / "ch2.ptt"));
  CHECK(fs::exists(dir / "run_summary.json"));

  pk_histogram* h = nullptr;
  REQUIRE(pk_correlate_files((dir / "ch1.ptt").string().c_str(),
                             (dir / "ch2.ptt").string().c_str(), 100.0, 43750.0, 2,
                             &h) == PK_OK);
  CHECK(pk_histogram_bins(h) == 875);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < pk_histogram_bins(h); ++i) total += pk_histogram_count(h, i);
  CHECK(total > 1000);
  const auto csv = dir / "hist.csv";
  CHECK(pk_histogram_write_csv(h, csv.string().c_str()) == PK_OK);
  CHECK(fs::exists(csv));
  pk_histogram_free(h);

  const auto g2_json = dir / "g2.json";
  REQUIRE(pk_analyze_hbt((dir / "ch1.ptt").string().c_str(),
                         (dir / "ch2.ptt").string().c_str(), 12500.0, 2, cfg,
                         g2_json.string().c_str()) == PK_OK);
  std::ifstream in(g2_json);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("\"g2_zero\"") != std::string::npos);
  CHECK(text.find("\"config_hash\"") != std::string::npos);

  // magic mismatch is an I/O error
  const auto bogus = dir / "bogus.ptt";
  std::ofstream(bogus) << "not a timetag file";
  pk_histogram* h2 = nullptr;
  CHECK(pk_correlate_files(bogus.string().c_str(), bogus.string().c_str(), 1.0, 100.0,
                           1, &h2) == PK_ERR_IO);

  pk_config_free(cfg);
}

TEST_CASE("reproduce preset through the C surface") {
  const auto dir = temp_dir("preset");
  int all_pass = 0;
  REQUIRE(pk_run_reproduce("fig2e", dir.string().c_str(), nullptr, 1, &all_pass) ==
          PK_OK);
  CHECK(all_pass == 1);
  CHECK(fs::exists(dir / "fig2e_summary.json"));
  CHECK(pk_run_reproduce("fig9z", dir.string().c_str(), nullptr, 1, nullptr) ==
        PK_ERR_CONFIG);
}
