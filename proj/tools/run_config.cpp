#include "run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>

namespace rhstrng::cli {

using nlohmann::json;

namespace {

using Fields = std::map<std::string, std::function<void(const json&)>>;

void read_object(const json& j, const std::string& where, const Fields& fields) {
  if (!j.is_object()) throw UsageError("config: '" + where + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    const std::string name = where.empty() ? key : where + "." + key;
    auto it = fields.find(key);
    if (it == fields.end()) throw UsageError("config: unknown key '" + name + "'");
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw UsageError("config: bad value for '" + name + "': " + e.what());
    } catch (const std::invalid_argument& e) {
      throw UsageError("config: bad value for '" + name + "': " + e.what());
    }
  }
}

auto number(double& x) {
  return [&x](const json& v) {
    if (!v.is_number()) throw std::invalid_argument("expected a number");
    x = v.get<double>();
  };
}

template <class T>
auto count(T& x) {
  return [&x](const json& v) {
    if (!v.is_number_unsigned()) throw std::invalid_argument("expected a non-negative integer");
    auto u = v.get<std::uint64_t>();
    if (u > std::numeric_limits<T>::max()) throw std::invalid_argument("integer out of range");
    x = static_cast<T>(u);
  };
}

auto text(std::string& x) {
  return [&x](const json& v) {
    if (!v.is_string()) throw std::invalid_argument("expected a string");
    x = v.get<std::string>();
  };
}

void read_device(const json& j, DeviceParams& d) {
  read_object(j, "device",
              {{"t_fl_nm", number(d.t_fl_nm)},
               {"sigma_t_fl", number(d.sigma_t_fl)},
               {"cd_nm", number(d.cd_nm)},
               {"t_tb_nm", number(d.t_tb_nm)},
               {"sigma_t_tb", number(d.sigma_t_tb)},
               {"tmr", number(d.tmr)},
               {"sigma_tmr", number(d.sigma_tmr)},
               {"r_p_ohm", number(d.r_p_ohm)},
               {"delta_300", number(d.delta_300)},
               {"ic0_ap2p_ua", number(d.ic0_ap2p_ua)},
               {"ic0_p2ap_ua", number(d.ic0_p2ap_ua)},
               {"tau0_ns", number(d.tau0_ns)},
               {"r_load_ohm", number(d.r_load_ohm)},
               {"tb_decay_nm", number(d.tb_decay_nm)},
               {"barrier_asymmetry", number(d.barrier_asymmetry)}});
}

void read_generator(const json& j, GeneratorConfig& g) {
  read_object(j, "generator",
              {{"variant", [&](const json& v) { g.variant = parse_variant(v.get<std::string>()); }},
               {"parallel_n", count(g.parallel_n)},
               {"t_pre_ns", number(g.timing.t_pre_ns)},
               {"t_rd_ns", number(g.timing.t_rd_ns)},
               {"t_wr_ns", number(g.timing.t_wr_ns)},
               {"t_reset_ns", number(g.timing.t_reset_ns)},
               {"target_prob", number(g.target_prob)},
               {"energy_pj_per_bit_cell", number(g.energy_pj_per_bit_cell)},
               {"energy_pj_per_bit_parallel_asymptote", number(g.energy_pj_per_bit_parallel_asymptote)},
               {"area_um2_cell", number(g.area_um2_cell)},
               {"area_um2_unit", number(g.area_um2_unit)},
               {"area_um2_per_bit_parallel_asymptote", number(g.area_um2_per_bit_parallel_asymptote)},
               {"forced", [&](const json& v) {
                  g.forced.clear();
                  for (const auto& pair : v) {
                    if (!pair.is_array() || pair.size() != 2)
                      throw std::invalid_argument("forced entries are [p1, p2] pairs");
                    g.forced.push_back({pair[0].get<double>(), pair[1].get<double>()});
                  }
                }}});
}

void read_sweep(const json& j, SweepSpec& s) {
  // The axis picks the default range, so it is applied before start/stop/step.
  if (j.is_object() && j.contains("axis")) {
    auto keep = s;
    try {
      s = SweepSpec::defaults(parse_axis(j["axis"].get<std::string>()));
    } catch (const std::exception& e) {
      throw UsageError(std::string("config: bad value for 'sweep.axis': ") + e.what());
    }
    s.generator = keep.generator;
    s.variants = keep.variants;
    s.n_samples = keep.n_samples;
    s.bits_per_point = keep.bits_per_point;
  }
  read_object(j, "sweep",
              {{"axis", [](const json&) {}},
               {"start", number(s.start)},
               {"stop", number(s.stop)},
               {"step", number(s.step)},
               {"n_samples", count(s.n_samples)},
               {"bits_per_point", count(s.bits_per_point)},
               {"variants", [&](const json& v) {
                  s.variants.clear();
                  for (const auto& name : v) s.variants.push_back(parse_variant(name.get<std::string>()));
                }}});
}

void read_backends(const json& j, std::map<BackendKind, RngBackend>& b) {
  if (!j.is_object()) throw UsageError("config: 'backends' must be an object");
  for (const auto& [name, value] : j.items()) {
    BackendKind k;
    try {
      k = parse_backend(name);
    } catch (const std::invalid_argument&) {
      throw UsageError("config: unknown key 'backends." + name + "'");
    }
    auto& be = b.at(k);
    read_object(value, "backends." + name,
                {{"instructions_per_u15", number(be.instructions_per_u15)},
                 {"instructions_per_double", number(be.instructions_per_double)},
                 {"latency_cycles", count(be.latency_cycles)}});
  }
}

}  // namespace

RunConfig::RunConfig() {
  for (auto k : {BackendKind::TrngInstruction, BackendKind::SoftwareStdlib, BackendKind::SoftwareBoostLagFib})
    backends[k] = RngBackend::defaults(k);
}

void RunConfig::validate() const {
  try {
    generator.validate();
    environment.validate();
    sweep.validate();
    option.validate();
    cost.validate();
    pipeline.validate();
    for (const auto& [k, b] : backends) b.validate();
  } catch (const std::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

void apply_config(const json& doc, RunConfig& rc) {
  read_object(doc, "",
              {{"seed", [&](const json& v) {
                  if (!v.is_number_unsigned()) throw std::invalid_argument("expected a non-negative integer");
                  rc.seed = v.get<std::uint64_t>();
                }},
               {"device", [&](const json& v) { read_device(v, rc.generator.device); }},
               {"generator", [&](const json& v) { read_generator(v, rc.generator); }},
               {"environment", [&](const json& v) {
                  read_object(v, "environment",
                              {{"temperature_k", number(rc.environment.temperature_k)},
                               {"v_variation_rate", number(rc.environment.v_variation_rate)}});
                }},
               {"sweep", [&](const json& v) { read_sweep(v, rc.sweep); }},
               {"option", [&](const json& v) {
                  read_object(v, "option",
                              {{"s0", number(rc.option.s0)},
                               {"strike", number(rc.option.strike)},
                               {"rate", number(rc.option.rate)},
                               {"volatility", number(rc.option.volatility)},
                               {"maturity_years", number(rc.option.maturity_years)},
                               {"n_paths", count(rc.option.n_paths)}});
                }},
               {"cost", [&](const json& v) {
                  read_object(v, "cost",
                              {{"per_path_work", number(rc.cost.per_path_work)},
                               {"fixed_overhead", number(rc.cost.fixed_overhead)}});
                }},
               {"pipeline", [&](const json& v) {
                  auto& p = rc.pipeline;
                  read_object(v, "pipeline",
                              {{"frequency_hz", number(p.frequency_hz)},
                               {"t_pre_ns", number(p.t_pre_ns)},
                               {"t_rd_ns", number(p.t_rd_ns)},
                               {"t_wr_ns", number(p.t_wr_ns)},
                               {"latency_cycles", count(p.latency_cycles)},
                               {"ipc", number(p.ipc)}});
                }},
               {"backends", [&](const json& v) { read_backends(v, rc.backends); }},
               {"nist", [&](const json& v) {
                  read_object(v, "nist",
                              {{"n_groups", count(rc.nist.n_groups)},
                               {"group_alpha", number(rc.nist.group_alpha)}});
                }}});
  rc.sweep.generator = rc.generator;
}

RunConfig load_config(const std::string& path) {
  std::string file = path;
  if (file.empty()) {
    if (const char* env = std::getenv("RHSTRNG_CONFIG"); env && *env) file = env;
  }
  RunConfig rc;
  if (file.empty()) return rc;
  std::ifstream in(file);
  if (!in) throw UsageError("config file not found: " + file);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("malformed config '" + file + "': " + e.what());
  }
  apply_config(doc, rc);
  return rc;
}

json to_json(const RunConfig& rc) {
  const auto& d = rc.generator.device;
  const auto& g = rc.generator;
  json j;
  j["device"] = {{"t_fl_nm", d.t_fl_nm},         {"sigma_t_fl", d.sigma_t_fl},   {"cd_nm", d.cd_nm},
                 {"t_tb_nm", d.t_tb_nm},         {"sigma_t_tb", d.sigma_t_tb},   {"tmr", d.tmr},
                 {"sigma_tmr", d.sigma_tmr},     {"r_p_ohm", d.r_p_ohm},         {"delta_300", d.delta_300},
                 {"ic0_ap2p_ua", d.ic0_ap2p_ua}, {"ic0_p2ap_ua", d.ic0_p2ap_ua}, {"tau0_ns", d.tau0_ns},
                 {"r_load_ohm", d.r_load_ohm},   {"tb_decay_nm", d.tb_decay_nm},
                 {"barrier_asymmetry", d.barrier_asymmetry}};
  j["generator"] = {{"variant", to_string(g.variant)},   {"parallel_n", g.parallel_n},
                    {"t_pre_ns", g.timing.t_pre_ns},     {"t_rd_ns", g.timing.t_rd_ns},
                    {"t_wr_ns", g.timing.t_wr_ns},       {"t_reset_ns", g.timing.t_reset_ns},
                    {"target_prob", g.target_prob}};
  if (!g.forced.empty()) {
    json f = json::array();
    for (const auto& fp : g.forced) f.push_back({fp.p1, fp.p2});
    j["generator"]["forced"] = f;
  }
  j["environment"] = {{"temperature_k", rc.environment.temperature_k},
                      {"v_variation_rate", rc.environment.v_variation_rate}};
  return j;
}

}  // namespace rhstrng::cli
