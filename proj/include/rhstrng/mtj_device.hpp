#pragma once

#include <cstdint>
#include <string>

#include "rhstrng/random.hpp"

namespace rhstrng {

enum class MagState : std::uint8_t { P = 0, AP = 1 };

enum class Direction : std::uint8_t { AP_to_P, P_to_AP };

/// State a write in `d` switches from / to.
constexpr MagState source_state(Direction d) { return d == Direction::AP_to_P ? MagState::AP : MagState::P; }
constexpr MagState target_state(Direction d) { return d == Direction::AP_to_P ? MagState::P : MagState::AP; }
constexpr MagState flipped(MagState s) { return s == MagState::P ? MagState::AP : MagState::P; }

std::string to_string(Direction d);
std::string to_string(MagState s);

/// Nominal device and switching-model constants. Sigma fields are relative
/// (0.03 means 3% of nominal).
struct DeviceParams {
  double t_fl_nm = 1.3;
  double sigma_t_fl = 0.03;
  double cd_nm = 32.0;
  double t_tb_nm = 0.85;
  double sigma_t_tb = 0.03;
  double tmr = 2.0;
  double sigma_tmr = 0.03;

  double r_p_ohm = 5000.0;     ///< parallel resistance at nominal t_TB
  double delta_300 = 20.0;     ///< thermal stability factor at 300 K
  double ic0_ap2p_ua = 40.0;
  double ic0_p2ap_ua = 55.0;
  double tau0_ns = 0.5;
  double r_load_ohm = 50000.0;  ///< series access resistance
  double tb_decay_nm = 1.0;     ///< R_P grows by e per this much extra barrier
  /// Offset-field asymmetry h: Delta_P2AP = Delta (1+h)^2, Delta_AP2P = Delta (1-h)^2.
  double barrier_asymmetry = 0.06;

  void validate() const;  ///< throws std::invalid_argument
};

struct DeviceInstance {
  DeviceParams nominal;
  double t_fl_nm = 1.3;
  double t_tb_nm = 0.85;
  double tmr = 2.0;
  MagState state = MagState::P;
  double r_p_eff = 5000.0;
  double r_ap_eff = 15000.0;

  /// Resistance of the state a write in `d` starts from.
  double source_resistance(Direction d) const { return d == Direction::AP_to_P ? r_ap_eff : r_p_eff; }
};

struct Environment {
  double temperature_k = 300.0;
  double v_variation_rate = 0.0;

  void validate() const;
};

struct WritePulse {
  Direction direction = Direction::AP_to_P;
  double current_ua = 0.0;
  double width_ns = 0.0;
};

/// Draws a device. With `process_variation` off the nominal values are used
/// and the seed is ignored. Non-positive draws are resampled; after 100
/// rejections std::runtime_error is thrown.
DeviceInstance sample_device(const DeviceParams& params, bool process_variation, std::uint64_t seed);

/// Effective barrier height of the device for a write in `d` at temperature T.
double effective_delta(const DeviceInstance& dev, Direction d, double temperature_k);

/// Critical current of the device for a write in `d`, scaled by free-layer thickness.
double effective_ic0(const DeviceInstance& dev, Direction d);

/// Néel-Brown switching probability 1 - exp(-w/tau).
double switching_probability(const DeviceInstance& dev, const WritePulse& pulse, const Environment& env);

/// Bernoulli switching. A pulse whose direction does not start from the
/// current state is a no-op and returns false without consuming randomness.
bool apply_write(DeviceInstance& dev, const WritePulse& pulse, const Environment& env, RandomStream& rng);

/// Same as apply_write with a precomputed switching probability.
bool apply_write(DeviceInstance& dev, Direction d, double p_switch, RandomStream& rng);

/// Bisection on current amplitude over [0, 100 Ic0] until the switching
/// probability is within 1e-6 of `target_prob`. Throws std::invalid_argument
/// for bad inputs and std::runtime_error when the target is unreachable.
WritePulse calibrate_pulse(Direction d, double target_prob, double width_ns, const DeviceInstance& dev,
                           const Environment& env);

}  // namespace rhstrng
