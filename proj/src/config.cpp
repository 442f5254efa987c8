#include "photonkit/config.hpp"

#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include "photonkit/errors.hpp"
#include "photonkit/physics.hpp"

namespace photonkit {

using json = nlohmann::ordered_json;

namespace {

json to_json(const RunConfig& c) {
  // nlohmann::json (std::map storage) sorts keys on its own; using the
  // explicit field list keeps the schema in one place.
  json j;
  j["emitter"] = {
      {"t1_free_ps", c.emitter.t1_free_ps},
      {"purcell_factor", c.emitter.purcell_factor},
      {"gamma_inhom_ghz", c.emitter.gamma_inhom_ghz},
      {"alpha_uev", c.emitter.alpha_uev},
      {"e_phonon_mev", c.emitter.e_phonon_mev},
      {"temperature_k", c.emitter.temperature_k},
      {"slow_fraction", c.emitter.slow_fraction},
      {"tau_slow_ps", c.emitter.tau_slow_ps},
      {"reservoir_tau_ps", c.emitter.reservoir_tau_ps},
      {"reexcite_prob", c.emitter.reexcite_prob},
      {"leak_rate", c.emitter.leak_rate},
  };
  j["cavity"] = {
      {"lambda_c0_nm", c.cavity.lambda_c0_nm},
      {"delta_r_nm", c.cavity.delta_r_nm},
      {"tuning_slope", c.cavity.tuning_slope},
      {"q_factor", c.cavity.q_factor},
      {"fp_max", c.cavity.fp_max},
      {"mode_splitting_nm", c.cavity.mode_splitting_nm},
      {"spatial_derating", c.cavity.spatial_derating},
  };
  j["train"] = {
      {"base_rate_mhz", c.train.base_rate_mhz},
      {"multiplier", c.train.multiplier},
      {"pulse_fwhm_ps", c.train.pulse_fwhm_ps},
      {"pulse_area", c.train.pulse_area},
      {"n_pulses", c.train.n_pulses},
  };
  j["bench"] = {
      {"topology", c.bench.topology == BenchTopology::hom ? "hom" : "hbt"},
      {"delay_ps", c.bench.delay_ps},
      {"polarization_mode",
       c.bench.polarization_mode == Polarization::cross ? "cross" : "co"},
      {"splitter_ratio", c.bench.splitter_ratio},
      {"t2_pure_ps", c.bench.t2_pure_ps ? json(*c.bench.t2_pure_ps) : json(nullptr)},
  };
  j["detector"] = {
      {"irf_sigma_ps", c.detector.irf_sigma_ps},
      {"efficiency", c.detector.efficiency},
      {"dark_rate_hz", c.detector.dark_rate_hz},
      {"dead_time_ps", c.detector.dead_time_ps},
  };
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["truth_sidecar"] = c.truth_sidecar;
  j["output_dir"] = c.output_dir;
  return j;
}

template <typename T>
void read_field(const json& j, const char* section, const char* key, T& out) {
  if (!j.contains(key)) return;  // missing fields keep their defaults
  try {
    j.at(key).get_to(out);
  } catch (const json::exception& e) {
    throw ConfigError(std::string(section) + "." + key + ": " + e.what());
  }
}

void check_known_keys(const json& j, const char* section,
                      std::initializer_list<const char*> known) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) { ok = true; break; }
    if (!ok)
      throw ConfigError(std::string(section) + ": unknown field '" + it.key() + "'");
  }
}

RunConfig from_json(const json& j) {
  RunConfig c;
  check_known_keys(j, "config",
                   {"emitter", "cavity", "train", "bench", "detector", "seed", "threads",
                    "truth_sidecar", "output_dir"});
  if (j.contains("emitter")) {
    const auto& e = j.at("emitter");
    check_known_keys(e, "emitter",
                     {"t1_free_ps", "purcell_factor", "gamma_inhom_ghz", "alpha_uev",
                      "e_phonon_mev", "temperature_k", "slow_fraction", "tau_slow_ps",
                      "reservoir_tau_ps", "reexcite_prob", "leak_rate"});
    read_field(e, "emitter", "t1_free_ps", c.emitter.t1_free_ps);
    read_field(e, "emitter", "purcell_factor", c.emitter.purcell_factor);
    read_field(e, "emitter", "gamma_inhom_ghz", c.emitter.gamma_inhom_ghz);
    read_field(e, "emitter", "alpha_uev", c.emitter.alpha_uev);
    read_field(e, "emitter", "e_phonon_mev", c.emitter.e_phonon_mev);
    read_field(e, "emitter", "temperature_k", c.emitter.temperature_k);
    read_field(e, "emitter", "slow_fraction", c.emitter.slow_fraction);
    read_field(e, "emitter", "tau_slow_ps", c.emitter.tau_slow_ps);
    read_field(e, "emitter", "reservoir_tau_ps", c.emitter.reservoir_tau_ps);
    read_field(e, "emitter", "reexcite_prob", c.emitter.reexcite_prob);
    read_field(e, "emitter", "leak_rate", c.emitter.leak_rate);
  }
  if (j.contains("cavity")) {
    const auto& v = j.at("cavity");
    check_known_keys(v, "cavity",
                     {"lambda_c0_nm", "delta_r_nm", "tuning_slope", "q_factor", "fp_max",
                      "mode_splitting_nm", "spatial_derating"});
    read_field(v, "cavity", "lambda_c0_nm", c.cavity.lambda_c0_nm);
    read_field(v, "cavity", "delta_r_nm", c.cavity.delta_r_nm);
    read_field(v, "cavity", "tuning_slope", c.cavity.tuning_slope);
    read_field(v, "cavity", "q_factor", c.cavity.q_factor);
    read_field(v, "cavity", "fp_max", c.cavity.fp_max);
    read_field(v, "cavity", "mode_splitting_nm", c.cavity.mode_splitting_nm);
    read_field(v, "cavity", "spatial_derating", c.cavity.spatial_derating);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    check_known_keys(t, "train",
                     {"base_rate_mhz", "multiplier", "pulse_fwhm_ps", "pulse_area",
                      "n_pulses"});
    read_field(t, "train", "base_rate_mhz", c.train.base_rate_mhz);
    read_field(t, "train", "multiplier", c.train.multiplier);
    read_field(t, "train", "pulse_fwhm_ps", c.train.pulse_fwhm_ps);
    read_field(t, "train", "pulse_area", c.train.pulse_area);
    read_field(t, "train", "n_pulses", c.train.n_pulses);
  }
  if (j.contains("bench")) {
    const auto& b = j.at("bench");
    check_known_keys(b, "bench",
                     {"topology", "delay_ps", "polarization_mode", "splitter_ratio",
                      "t2_pure_ps"});
    if (b.contains("topology")) {
      const std::string t = b.at("topology").get<std::string>();
      if (t == "hbt")
        c.bench.topology = BenchTopology::hbt;
      else if (t == "hom")
        c.bench.topology = BenchTopology::hom;
      else
        throw ConfigError("bench.topology: expected 'hbt' or 'hom', got '" + t + "'");
    }
    read_field(b, "bench", "delay_ps", c.bench.delay_ps);
    if (b.contains("polarization_mode")) {
      const std::string p = b.at("polarization_mode").get<std::string>();
      if (p == "co")
        c.bench.polarization_mode = Polarization::co;
      else if (p == "cross")
        c.bench.polarization_mode = Polarization::cross;
      else
        throw ConfigError("bench.polarization_mode: expected 'co' or 'cross'");
    }
    read_field(b, "bench", "splitter_ratio", c.bench.splitter_ratio);
    if (b.contains("t2_pure_ps") && !b.at("t2_pure_ps").is_null()) {
      double v = 0;
      read_field(b, "bench", "t2_pure_ps", v);
      c.bench.t2_pure_ps = v;
    }
  }
  if (j.contains("detector")) {
    const auto& d = j.at("detector");
    check_known_keys(d, "detector",
                     {"irf_sigma_ps", "efficiency", "dark_rate_hz", "dead_time_ps"});
    read_field(d, "detector", "irf_sigma_ps", c.detector.irf_sigma_ps);
    read_field(d, "detector", "efficiency", c.detector.efficiency);
    read_field(d, "detector", "dark_rate_hz", c.detector.dark_rate_hz);
    read_field(d, "detector", "dead_time_ps", c.detector.dead_time_ps);
  }
  read_field(j, "config", "seed", c.seed);
  read_field(j, "config", "threads", c.threads);
  read_field(j, "config", "truth_sidecar", c.truth_sidecar);
  read_field(j, "config", "output_dir", c.output_dir);
  return c;
}

}  // namespace

RunConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return from_json(j);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json_text(buf.str());
}

std::string canonical_json(const RunConfig& config) {
  // sorted keys for a stable hash
  return nlohmann::json(to_json(config)).dump();
}

std::string pretty_json(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

std::array<std::uint8_t, 32> sha256_bytes(const void* data, std::size_t size) {
  std::array<std::uint8_t, 32> digest{};
  unsigned int len = 0;
  EVP_Digest(data, size, digest.data(), &len, EVP_sha256(), nullptr);
  return digest;
}

std::array<std::uint8_t, 32> config_hash(const RunConfig& config) {
  const std::string canon = canonical_json(config);
  return sha256_bytes(canon.data(), canon.size());
}

std::string to_hex(const std::array<std::uint8_t, 32>& digest) {
  static const char* hex = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (std::uint8_t b : digest) {
    s.push_back(hex[b >> 4]);
    s.push_back(hex[b & 0xF]);
  }
  return s;
}

std::string config_hash_hex(const RunConfig& config) { return to_hex(config_hash(config)); }

void apply_override(RunConfig& config, const std::string& dotted_key,
                    const std::string& value) {
  json j = to_json(config);
  json* node = &j;
  std::string rest = dotted_key;
  for (std::size_t pos = rest.find('.'); pos != std::string::npos; pos = rest.find('.')) {
    const std::string head = rest.substr(0, pos);
    if (!node->contains(head))
      throw ConfigError("override: unknown section '" + head + "'");
    node = &(*node)[head];
    rest = rest.substr(pos + 1);
  }
  if (!node->contains(rest))
    throw ConfigError("override: unknown key '" + dotted_key + "'");
  try {
    (*node)[rest] = json::parse(value);
  } catch (const json::exception&) {
    (*node)[rest] = value;  // bare strings are allowed unquoted
  }
  config = from_json(j);
}

void validate(const RunConfig& config) {
  physics::validate(config.emitter);
  physics::validate(config.cavity);
  physics::validate(config.train);
  physics::validate(config.detector);
  physics::validate(config.bench, config.train.period_ps());
  if (config.threads < 1) throw ConfigError("threads: must be >= 1");
}

}  // namespace photonkit
