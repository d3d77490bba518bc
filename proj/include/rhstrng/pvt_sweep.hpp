#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rhstrng/trng_core.hpp"

namespace rhstrng {

enum class SweepAxis { Voltage, Temperature, Process };

std::string to_string(SweepAxis a);
SweepAxis parse_axis(const std::string& name);

struct SweepSpec {
  std::vector<Variant> variants{Variant::ConvAPtoP, Variant::ConvPtoAP, Variant::RhsSingleUnit, Variant::RhsTrng};
  SweepAxis axis = SweepAxis::Voltage;
  double start = -0.1;
  double stop = 0.1;
  double step = 0.02;
  std::size_t n_samples = 200;  ///< process study: device sets
  std::size_t bits_per_point = 1'000'000;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  GeneratorConfig generator;  ///< device constants, timing, calibration target

  /// Default range for the axis: +-10 % in 2 % steps, 280.15..320.15 K in 5 K steps.
  static SweepSpec defaults(SweepAxis axis);
  std::vector<double> points() const;
  void validate() const;
};

struct SweepRow {
  Variant variant = Variant::RhsTrng;
  SweepAxis axis = SweepAxis::Voltage;
  double value = 0.0;
  double p_one = 0.0;
  double shannon = 0.0;
  double min_entropy = 0.0;
  double p1_model = 0.0;  ///< realized P->AP probability (mean over devices for Process)
  double p2_model = 0.0;
  std::size_t n_bits = 0;
  double lag1 = 0.0;      ///< empirical lag-1 autocorrelation of the stream
};

struct SweepReport {
  std::vector<SweepRow> rows;

  std::string to_csv() const;
  const SweepRow& find(Variant v, double value) const;
};

SweepReport voltage_sweep(const SweepSpec& spec);
SweepReport temperature_sweep(const SweepSpec& spec);
/// Samples n_samples device sets once and runs every variant on them; each
/// set contributes bits_per_point / n_samples bits.
SweepReport process_variation_study(const SweepSpec& spec);
SweepReport run_sweep(const SweepSpec& spec);

/// Empirical lag-1 autocorrelation of a 0/1 sequence.
double lag1_autocorrelation(const std::vector<std::uint8_t>& bits);

}  // namespace rhstrng
