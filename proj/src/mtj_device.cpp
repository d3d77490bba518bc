#include "rhstrng/mtj_device.hpp"

#include <cmath>
#include <stdexcept>

namespace rhstrng {

namespace {

constexpr int kMaxRejections = 100;
constexpr int kBisectionIterations = 200;
constexpr double kCalibrationTolerance = 1e-6;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// Gaussian around `nominal` with relative sigma, redrawn while non-positive.
double positive_gaussian(RandomStream& rng, double nominal, double rel_sigma, const char* name) {
  for (int i = 0; i < kMaxRejections; ++i) {
    const double v = nominal * (1.0 + rel_sigma * rng.normal());
    if (v > 0.0) return v;
  }
  throw std::runtime_error(std::string("sample_device: too many non-positive draws for ") + name);
}

}  // namespace

std::string to_string(Direction d) { return d == Direction::AP_to_P ? "AP_to_P" : "P_to_AP"; }
std::string to_string(MagState s) { return s == MagState::P ? "P" : "AP"; }

void DeviceParams::validate() const {
  require(t_fl_nm > 0 && t_tb_nm > 0 && cd_nm > 0, "DeviceParams: thicknesses and diameter must be positive");
  require(r_p_ohm > 0 && r_load_ohm >= 0, "DeviceParams: resistances must be positive");
  require(ic0_ap2p_ua > 0 && ic0_p2ap_ua > 0, "DeviceParams: critical currents must be positive");
  require(tmr > 0, "DeviceParams: TMR must be positive");
  require(sigma_t_fl >= 0 && sigma_t_tb >= 0 && sigma_tmr >= 0, "DeviceParams: sigmas must be non-negative");
  require(delta_300 > 0 && tau0_ns > 0 && tb_decay_nm > 0, "DeviceParams: model constants must be positive");
  require(barrier_asymmetry > -1 && barrier_asymmetry < 1, "DeviceParams: barrier_asymmetry must lie in (-1, 1)");
}

void Environment::validate() const {
  require(temperature_k > 0, "Environment: temperature must be positive");
  require(v_variation_rate >= -0.5 && v_variation_rate <= 0.5, "Environment: v_variation_rate must lie in [-0.5, 0.5]");
}

DeviceInstance sample_device(const DeviceParams& params, bool process_variation, std::uint64_t seed) {
  params.validate();
  DeviceInstance dev;
  dev.nominal = params;
  dev.t_fl_nm = params.t_fl_nm;
  dev.t_tb_nm = params.t_tb_nm;
  dev.tmr = params.tmr;
  if (process_variation) {
    RandomStream rng(seed);
    dev.t_fl_nm = positive_gaussian(rng, params.t_fl_nm, params.sigma_t_fl, "t_fl");
    dev.t_tb_nm = positive_gaussian(rng, params.t_tb_nm, params.sigma_t_tb, "t_tb");
    dev.tmr = positive_gaussian(rng, params.tmr, params.sigma_tmr, "tmr");
  }
  dev.r_p_eff = params.r_p_ohm * std::exp((dev.t_tb_nm - params.t_tb_nm) / params.tb_decay_nm);
  dev.r_ap_eff = dev.r_p_eff * (1.0 + dev.tmr);
  dev.state = MagState::P;
  return dev;
}

double effective_delta(const DeviceInstance& dev, Direction d, double temperature_k) {
  const auto& p = dev.nominal;
  const double h = d == Direction::P_to_AP ? p.barrier_asymmetry : -p.barrier_asymmetry;
  const double volume_ratio = dev.t_fl_nm / p.t_fl_nm;
  return p.delta_300 * (1.0 + h) * (1.0 + h) * volume_ratio * (300.0 / temperature_k);
}

double effective_ic0(const DeviceInstance& dev, Direction d) {
  const auto& p = dev.nominal;
  const double ic0 = d == Direction::AP_to_P ? p.ic0_ap2p_ua : p.ic0_p2ap_ua;
  return ic0 * dev.t_fl_nm / p.t_fl_nm;
}

double switching_probability(const DeviceInstance& dev, const WritePulse& pulse, const Environment& env) {
  if (pulse.width_ns <= 0.0 || pulse.current_ua <= 0.0) return 0.0;
  const auto& p = dev.nominal;
  const double divider = (p.r_p_ohm + p.r_load_ohm) / (dev.source_resistance(pulse.direction) + p.r_load_ohm);
  const double i_eff = pulse.current_ua * (1.0 + env.v_variation_rate) * divider;
  const double exponent =
      effective_delta(dev, pulse.direction, env.temperature_k) * (1.0 - i_eff / effective_ic0(dev, pulse.direction));
  const double tau = p.tau0_ns * std::exp(std::max(exponent, 0.0));
  return -std::expm1(-pulse.width_ns / tau);
}

bool apply_write(DeviceInstance& dev, Direction d, double p_switch, RandomStream& rng) {
  if (dev.state != source_state(d)) return false;
  if (!rng.bernoulli(p_switch)) return false;
  dev.state = target_state(d);
  return true;
}

bool apply_write(DeviceInstance& dev, const WritePulse& pulse, const Environment& env, RandomStream& rng) {
  if (dev.state != source_state(pulse.direction)) return false;
  return apply_write(dev, pulse.direction, switching_probability(dev, pulse, env), rng);
}

WritePulse calibrate_pulse(Direction d, double target_prob, double width_ns, const DeviceInstance& dev,
                           const Environment& env) {
  require(target_prob > 0.0 && target_prob < 1.0, "calibrate_pulse: target must lie in (0, 1)");
  require(width_ns > 0.0, "calibrate_pulse: width must be positive");
  env.validate();

  WritePulse pulse{d, 0.0, width_ns};
  auto prob_at = [&](double current) {
    pulse.current_ua = current;
    return switching_probability(dev, pulse, env);
  };

  double lo = 0.0;
  double hi = 100.0 * effective_ic0(dev, d);
  if (prob_at(hi) < target_prob - kCalibrationTolerance) {
    throw std::runtime_error("calibrate_pulse: target probability unreachable within [0, 100 Ic0]");
  }
  for (int i = 0; i < kBisectionIterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double pm = prob_at(mid);
    if (std::abs(pm - target_prob) <= kCalibrationTolerance) return pulse;
    (pm < target_prob ? lo : hi) = mid;
  }
  throw std::runtime_error("calibrate_pulse: no convergence after 200 iterations");
}

}  // namespace rhstrng
