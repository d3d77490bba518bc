#include "rhstrng/pvt_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <thread>

#include "rhstrng/randomness_tests.hpp"

namespace rhstrng {

namespace {

constexpr std::uint64_t kDeviceStream = 0xD5;

// Runs fn(i) for i in [0, n) on up to `jobs` threads; fn writes to slot i only.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += jobs) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::uint64_t point_seed(std::uint64_t master, Variant v, std::size_t point) {
  return substream_seed(substream_seed(master, static_cast<std::uint64_t>(v) + 1), point);
}

GeneratorConfig calibrated(const SweepSpec& spec, Variant v) {
  GeneratorConfig cfg = spec.generator;
  cfg.variant = v;
  if (!cfg.calibration && cfg.forced.empty()) {
    cfg.calibration = calibrate_nominal(cfg.device, cfg.timing.t_wr_ns, cfg.target_prob);
  }
  return cfg;
}

void fill_stats(SweepRow& row, const std::vector<std::uint8_t>& bits) {
  const auto e = entropy_report(bits);
  row.p_one = e.p_one;
  row.shannon = e.shannon;
  row.min_entropy = e.min_entropy;
  row.n_bits = bits.size();
  row.lag1 = lag1_autocorrelation(bits);
}

SweepReport environment_sweep(const SweepSpec& spec, SweepAxis axis) {
  if (spec.axis != axis) throw std::invalid_argument("sweep spec axis does not match the requested sweep");
  spec.validate();
  const auto points = spec.points();
  const std::size_t n_jobs = spec.variants.size() * points.size();
  SweepReport report;
  report.rows.resize(n_jobs);

  const GeneratorConfig base = calibrated(spec, spec.variants.front());
  const DeviceInstance nominal = sample_device(base.device, false, 0);

  parallel_for(n_jobs, spec.jobs, [&](std::size_t job) {
    const Variant v = spec.variants[job / points.size()];
    const std::size_t pi = job % points.size();
    GeneratorConfig cfg = base;
    cfg.variant = v;
    Environment env;
    if (axis == SweepAxis::Voltage) env.v_variation_rate = points[pi];
    else env.temperature_k = points[pi];

    SweepRow& row = report.rows[job];
    row.variant = v;
    row.axis = axis;
    row.value = points[pi];
    if (cfg.forced.empty()) {
      row.p1_model = switching_probability(nominal, cfg.calibration->p_to_ap, env);
      row.p2_model = switching_probability(nominal, cfg.calibration->ap_to_p, env);
    } else {
      row.p1_model = cfg.forced[0].p1;
      row.p2_model = cfg.forced[0].p2;
    }
    const auto bs = generate_bitstream(cfg, env, spec.bits_per_point, point_seed(spec.seed, v, pi));
    fill_stats(row, bs.bits);
  });
  return report;
}

}  // namespace

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Voltage: return "voltage";
    case SweepAxis::Temperature: return "temperature";
    case SweepAxis::Process: return "process";
  }
  return "?";
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "voltage" || name == "v") return SweepAxis::Voltage;
  if (name == "temperature" || name == "t") return SweepAxis::Temperature;
  if (name == "process" || name == "p") return SweepAxis::Process;
  throw std::invalid_argument("unknown sweep axis '" + name + "' (expected voltage, temperature or process)");
}

SweepSpec SweepSpec::defaults(SweepAxis axis) {
  SweepSpec s;
  s.axis = axis;
  switch (axis) {
    case SweepAxis::Voltage:
      s.start = -0.1, s.stop = 0.1, s.step = 0.02;
      break;
    case SweepAxis::Temperature:
      s.start = 280.15, s.stop = 320.15, s.step = 5.0;
      break;
    case SweepAxis::Process:
      s.start = s.stop = 0.0, s.step = 1.0;
      break;
  }
  return s;
}

std::vector<double> SweepSpec::points() const {
  if (axis == SweepAxis::Process) return {static_cast<double>(n_samples)};
  std::vector<double> pts;
  const double eps = 1e-9 * std::abs(step);
  for (std::size_t i = 0;; ++i) {
    double v = start + static_cast<double>(i) * step;
    if (v > stop + eps) break;
    if (std::abs(v) < eps) v = 0.0;
    pts.push_back(v);
  }
  return pts;
}

void SweepSpec::validate() const {
  if (variants.empty()) throw std::invalid_argument("SweepSpec: no variants");
  if (bits_per_point < 10'000) throw std::invalid_argument("SweepSpec: bits_per_point must be >= 10^4");
  generator.validate();
  if (axis == SweepAxis::Process) {
    if (n_samples == 0 || bits_per_point < n_samples) {
      throw std::invalid_argument("SweepSpec: process study needs 1 <= n_samples <= bits_per_point");
    }
    return;
  }
  if (!(step > 0) || stop < start) throw std::invalid_argument("SweepSpec: empty or invalid range");
  if (axis == SweepAxis::Temperature && start <= 0) throw std::invalid_argument("SweepSpec: temperature must be > 0 K");
  if (axis == SweepAxis::Voltage && (start < -0.5 || stop > 0.5)) {
    throw std::invalid_argument("SweepSpec: voltage variation must lie in [-0.5, 0.5]");
  }
}

std::string SweepReport::to_csv() const {
  std::string s = "variant,axis,value,p_one,shannon,min_entropy,p1_model,p2_model\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%s,%s,%.6g,%.8f,%.8f,%.8f,%.8f,%.8f\n", to_string(r.variant).c_str(),
                  to_string(r.axis).c_str(), r.value, r.p_one, r.shannon, r.min_entropy, r.p1_model, r.p2_model);
    s += line;
  }
  return s;
}

const SweepRow& SweepReport::find(Variant v, double value) const {
  for (const auto& r : rows) {
    if (r.variant == v && std::abs(r.value - value) <= 1e-9 * std::max(1.0, std::abs(value))) return r;
  }
  throw std::out_of_range("SweepReport: no row for " + to_string(v));
}

SweepReport voltage_sweep(const SweepSpec& spec) { return environment_sweep(spec, SweepAxis::Voltage); }

SweepReport temperature_sweep(const SweepSpec& spec) { return environment_sweep(spec, SweepAxis::Temperature); }

SweepReport process_variation_study(const SweepSpec& spec) {
  if (spec.axis != SweepAxis::Process) throw std::invalid_argument("process study needs axis = process");
  spec.validate();
  const std::size_t n = spec.n_samples;
  const std::size_t per_set = spec.bits_per_point / n;
  const GeneratorConfig base = calibrated(spec, spec.variants.front());

  // Device sets are shared by all variants: two units each.
  std::vector<std::vector<DeviceInstance>> sets(n);
  const std::uint64_t dev_master = substream_seed(spec.seed, kDeviceStream);
  for (std::size_t s = 0; s < n; ++s) {
    sets[s] = {sample_device(base.device, true, substream_seed(dev_master, 2 * s)),
               sample_device(base.device, true, substream_seed(dev_master, 2 * s + 1))};
  }

  SweepReport report;
  const Environment env{};
  for (Variant v : spec.variants) {
    GeneratorConfig cfg = base;
    cfg.variant = v;
    std::vector<std::vector<std::uint8_t>> chunks(n);
    std::vector<FlipProbs> realized(n);
    parallel_for(n, spec.jobs, [&](std::size_t s) {
      auto bs = generate_bitstream(cfg, env, per_set, point_seed(spec.seed, v, s), sets[s]);
      chunks[s] = std::move(bs.bits);
      realized[s] = Generator(cfg, env, 0, sets[s]).realized(0);
    });
    std::vector<std::uint8_t> all;
    all.reserve(per_set * n);
    SweepRow row;
    row.variant = v;
    row.axis = SweepAxis::Process;
    row.value = static_cast<double>(n);
    for (std::size_t s = 0; s < n; ++s) {
      all.insert(all.end(), chunks[s].begin(), chunks[s].end());
      row.p1_model += realized[s].p1 / static_cast<double>(n);
      row.p2_model += realized[s].p2 / static_cast<double>(n);
    }
    fill_stats(row, all);
    report.rows.push_back(row);
  }
  return report;
}

SweepReport run_sweep(const SweepSpec& spec) {
  switch (spec.axis) {
    case SweepAxis::Voltage: return voltage_sweep(spec);
    case SweepAxis::Temperature: return temperature_sweep(spec);
    case SweepAxis::Process: return process_variation_study(spec);
  }
  throw std::invalid_argument("unknown sweep axis");
}

double lag1_autocorrelation(const std::vector<std::uint8_t>& bits) {
  if (bits.size() < 2) return 0.0;
  const double n = static_cast<double>(bits.size());
  double ones = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    ones += bits[i];
    if (i + 1 < bits.size()) pairs += bits[i] & bits[i + 1];
  }
  const double m = ones / n;
  const double var = m * (1.0 - m);
  if (var <= 0.0) return 0.0;
  return (pairs / (n - 1.0) - m * m) / var;
}

}  // namespace rhstrng
