#include "rhstrng/trng_core.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace rhstrng {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::ConvAPtoP: return "ConvAPtoP";
    case Variant::ConvPtoAP: return "ConvPtoAP";
    case Variant::RhsSingleUnit: return "RhsSingleUnit";
    case Variant::RhsTrng: return "RhsTrng";
    case Variant::RhsParallel: return "RhsParallel";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  std::string key;
  for (char c : name) {
    if (c != '-' && c != '_') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "convap2p" || key == "convaptop") return Variant::ConvAPtoP;
  if (key == "convp2ap" || key == "convptoap") return Variant::ConvPtoAP;
  if (key == "rhssingle" || key == "rhssingleunit") return Variant::RhsSingleUnit;
  if (key == "rhstrng") return Variant::RhsTrng;
  if (key == "rhsparallel") return Variant::RhsParallel;
  throw std::invalid_argument("unknown variant '" + name + "'");
}

void CycleTiming::validate() const {
  if (t_pre_ns < 0 || t_rd_ns < 0 || t_wr_ns < 0 || t_reset_ns < 0) {
    throw std::invalid_argument("CycleTiming: phase times must be non-negative");
  }
  if (t_pre_ns + t_rd_ns + t_wr_ns <= 0) throw std::invalid_argument("CycleTiming: cycle time must be positive");
}

unsigned GeneratorConfig::unit_count() const {
  switch (variant) {
    case Variant::RhsTrng: return 2;
    case Variant::RhsParallel: return parallel_n + 1;
    default: return 1;
  }
}

void GeneratorConfig::validate() const {
  timing.validate();
  device.validate();
  if (variant == Variant::RhsParallel && parallel_n < 1) throw std::invalid_argument("RhsParallel needs n >= 1");
  if (energy_pj_per_bit_cell <= 0 || energy_pj_per_bit_parallel_asymptote <= 0 || area_um2_cell <= 0 ||
      area_um2_unit <= 0 || area_um2_per_bit_parallel_asymptote <= 0) {
    throw std::invalid_argument("GeneratorConfig: energy and area values must be positive");
  }
  if (!(target_prob > 0 && target_prob < 1)) throw std::invalid_argument("GeneratorConfig: target_prob in (0, 1)");
  for (const auto& f : forced) f.validate();
}

PulseCalibration calibrate_nominal(const DeviceParams& params, double width_ns, double target_prob) {
  const DeviceInstance dev = sample_device(params, false, 0);
  const Environment env{};
  return {calibrate_pulse(Direction::AP_to_P, target_prob, width_ns, dev, env),
          calibrate_pulse(Direction::P_to_AP, target_prob, width_ns, dev, env)};
}

Generator::Generator(const GeneratorConfig& config, const Environment& env, std::uint64_t seed,
                     std::vector<DeviceInstance> devices)
    : config_(config) {
  config_.validate();
  env.validate();
  const unsigned n_units = config_.unit_count();
  std::optional<PulseCalibration> cal = config_.calibration;
  if (!cal && config_.forced.empty()) cal = calibrate_nominal(config_.device, config_.timing.t_wr_ns, config_.target_prob);

  units_.reserve(n_units);
  for (unsigned u = 0; u < n_units; ++u) {
    DeviceInstance dev = u < devices.size() ? devices[u] : sample_device(config_.device, false, 0);
    dev.state = MagState::P;
    FlipProbs flip;
    if (!config_.forced.empty()) {
      flip = config_.forced[config_.forced.size() == 1 ? 0 : u];
    } else {
      flip.p1 = switching_probability(dev, cal->p_to_ap, env);
      flip.p2 = switching_probability(dev, cal->ap_to_p, env);
    }
    units_.push_back(Unit{dev, flip, RandomStream(substream_seed(seed, u))});
  }
  if (config_.forced.size() > 1 && config_.forced.size() != n_units) {
    throw std::invalid_argument("GeneratorConfig: forced needs 1 or unit_count entries");
  }

  if (!is_conventional(config_.variant)) {
    std::vector<std::uint8_t> discard;
    step(discard);
  }
}

MagState Generator::rhs_cycle(Unit& unit) {
  const MagState read = unit.device.state;
  const Direction d = read == MagState::P ? Direction::P_to_AP : Direction::AP_to_P;
  apply_write(unit.device, d, d == Direction::P_to_AP ? unit.flip.p1 : unit.flip.p2, unit.rng);
  return read;
}

MagState Generator::conv_cycle(Unit& unit, Direction d) {
  unit.device.state = source_state(d);  // reset always succeeds
  apply_write(unit.device, d, d == Direction::P_to_AP ? unit.flip.p1 : unit.flip.p2, unit.rng);
  return unit.device.state;
}

void Generator::step(std::vector<std::uint8_t>& out) {
  last_.resize(units_.size());
  if (is_conventional(config_.variant)) {
    const Direction d = config_.variant == Variant::ConvAPtoP ? Direction::AP_to_P : Direction::P_to_AP;
    last_[0] = conv_cycle(units_[0], d);
    out.push_back(static_cast<std::uint8_t>(last_[0]));
    return;
  }
  for (std::size_t u = 0; u < units_.size(); ++u) last_[u] = rhs_cycle(units_[u]);
  auto bit = [this](std::size_t u) { return static_cast<std::uint8_t>(last_[u]); };
  if (config_.variant == Variant::RhsSingleUnit) {
    out.push_back(bit(0));
  } else {
    // RhsTrng is the one-lane case: unit 0 XOR unit 1.
    for (std::size_t u = 0; u + 1 < units_.size(); ++u) out.push_back(bit(u) ^ bit(u + 1));
  }
}

BitStream generate_bitstream(const GeneratorConfig& config, const Environment& env, std::size_t n_bits,
                             std::uint64_t seed, std::vector<DeviceInstance> devices) {
  if (n_bits == 0) throw std::invalid_argument("generate_bitstream: n_bits must be >= 1");
  Generator gen(config, env, seed, std::move(devices));
  BitStream bs;
  bs.bits.reserve(n_bits + gen.lanes());
  while (bs.bits.size() < n_bits) {
    gen.step(bs.bits);
    ++bs.n_cycles;
  }
  bs.bits.resize(n_bits);
  bs.n_bits = n_bits;
  bs.simulated_time_ns = static_cast<double>(bs.n_cycles) * config.timing.cycle_ns(config.variant);
  bs.energy_pj = static_cast<double>(n_bits) * cost_report(config).energy_pj_per_bit;
  bs.variant = to_string(config.variant);
  if (config.variant == Variant::RhsParallel) bs.variant += "(" + std::to_string(config.parallel_n) + ")";
  bs.seed = seed;
  return bs;
}

Throughput throughput_report(const GeneratorConfig& config) {
  config.timing.validate();
  Throughput t;
  t.per_lane_mbps = 1e3 / config.timing.cycle_ns(config.variant);
  t.aggregate_mbps = t.per_lane_mbps * config.lanes();
  return t;
}

CostReport cost_report(const GeneratorConfig& config) {
  switch (config.variant) {
    case Variant::RhsTrng: return {config.energy_pj_per_bit_cell, config.area_um2_cell};
    case Variant::RhsParallel: {
      const double n = config.parallel_n;
      const double xor_area = config.area_um2_cell - 2.0 * config.area_um2_unit;
      return {(n + 1.0) / n * config.energy_pj_per_bit_parallel_asymptote,
              ((n + 1.0) * config.area_um2_unit + n * xor_area) / n};
    }
    default: return {config.energy_pj_per_bit_parallel_asymptote, config.area_um2_unit};
  }
}

}  // namespace rhstrng
