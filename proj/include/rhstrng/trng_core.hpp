#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rhstrng/markov_analysis.hpp"
#include "rhstrng/mtj_device.hpp"
#include "rhstrng/random.hpp"

namespace rhstrng {

enum class Variant : std::uint8_t { ConvAPtoP, ConvPtoAP, RhsSingleUnit, RhsTrng, RhsParallel };

std::string to_string(Variant v);
/// Accepts "conv-ap2p", "conv-p2ap", "rhs-single", "rhs-trng", "rhs-parallel"
/// and the enumerator spellings. Throws std::invalid_argument.
Variant parse_variant(const std::string& name);

constexpr bool is_conventional(Variant v) { return v == Variant::ConvAPtoP || v == Variant::ConvPtoAP; }

struct CycleTiming {
  double t_pre_ns = 0.2;
  double t_rd_ns = 0.2;
  double t_wr_ns = 2.9;
  double t_reset_ns = 2.9;  ///< conventional designs only

  double cycle_ns(Variant v) const {
    const double rhs = t_pre_ns + t_rd_ns + t_wr_ns;
    return is_conventional(v) ? rhs + t_reset_ns : rhs;
  }
  void validate() const;
};

/// Write pulses held fixed while the environment or device varies.
struct PulseCalibration {
  WritePulse ap_to_p;
  WritePulse p_to_ap;

  const WritePulse& for_direction(Direction d) const { return d == Direction::AP_to_P ? ap_to_p : p_to_ap; }
};

struct GeneratorConfig {
  Variant variant = Variant::RhsTrng;
  unsigned parallel_n = 1;  ///< output lanes of RhsParallel
  CycleTiming timing;
  double energy_pj_per_bit_cell = 5.3;
  double energy_pj_per_bit_parallel_asymptote = 2.65;
  double area_um2_cell = 24.29;
  double area_um2_unit = 9.79;
  double area_um2_per_bit_parallel_asymptote = 14.5;

  DeviceParams device;
  double target_prob = 0.5;
  /// Unset: calibrated on the nominal device at 300 K, zero voltage shift.
  std::optional<PulseCalibration> calibration;
  /// Bypass the device model: unit u switches with forced[u] (or forced[0]
  /// when only one entry is given).
  std::vector<FlipProbs> forced;

  unsigned lanes() const { return variant == Variant::RhsParallel ? parallel_n : 1; }
  unsigned unit_count() const;
  void validate() const;
};

/// Calibrates both directions at t_wr on the nominal device.
PulseCalibration calibrate_nominal(const DeviceParams& params, double width_ns, double target_prob);

struct BitStream {
  std::vector<std::uint8_t> bits;  ///< one 0/1 value per element
  std::size_t n_bits = 0;
  std::uint64_t n_cycles = 0;
  double simulated_time_ns = 0.0;
  double energy_pj = 0.0;
  std::string variant;
  std::uint64_t seed = 0;
};

/// Cycle-accurate state machine for one configured design.
class Generator {
 public:
  /// `devices` overrides the nominal unit devices (process studies); missing
  /// entries are filled with nominal devices.
  Generator(const GeneratorConfig& config, const Environment& env, std::uint64_t seed,
            std::vector<DeviceInstance> devices = {});

  /// Runs one cycle and appends lanes() bits to `out`.
  void step(std::vector<std::uint8_t>& out);

  unsigned lanes() const { return config_.lanes(); }
  std::size_t unit_count() const { return units_.size(); }
  /// Per-cycle switching probabilities of unit `u` at this environment.
  FlipProbs realized(std::size_t u) const { return units_.at(u).flip; }
  MagState unit_state(std::size_t u) const { return units_.at(u).device.state; }
  /// Value each unit output in the most recent cycle.
  const std::vector<MagState>& last_outputs() const { return last_; }

 private:
  struct Unit {
    DeviceInstance device;
    FlipProbs flip;
    RandomStream rng;
  };

  MagState rhs_cycle(Unit& unit);
  MagState conv_cycle(Unit& unit, Direction d);

  GeneratorConfig config_;
  std::vector<Unit> units_;
  std::vector<MagState> last_;
};

/// Runs the configured design until n_bits are produced. RHS variants discard
/// one warm-up cycle first; it is not counted in the cycle total.
BitStream generate_bitstream(const GeneratorConfig& config, const Environment& env, std::size_t n_bits,
                             std::uint64_t seed, std::vector<DeviceInstance> devices = {});

struct Throughput {
  double per_lane_mbps = 0.0;
  double aggregate_mbps = 0.0;
};

Throughput throughput_report(const GeneratorConfig& config);

struct CostReport {
  double energy_pj_per_bit = 0.0;
  double area_um2_per_bit = 0.0;
};

/// Per-bit energy and area. RhsTrng is one cell; RhsParallel(n) shares n+1
/// units and n XOR gates over n bits; single-unit designs are one unit.
CostReport cost_report(const GeneratorConfig& config);

}  // namespace rhstrng
