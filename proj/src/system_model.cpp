#include "rhstrng/system_model.hpp"

#include <boost/random/lagged_fibonacci.hpp>
#include <cmath>
#include <cstdio>
#include <functional>
#include <json.hpp>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace rhstrng {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

std::uint64_t take_bits(BitSource& src, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v = (v << 1) | (src.next_bit() & 1u);
  return v;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

std::uint8_t FairBitSource::next_bit() {
  if (left_ == 0) {
    word_ = rng_.next_u64();
    left_ = 64;
  }
  --left_;
  const auto b = static_cast<std::uint8_t>(word_ & 1u);
  word_ >>= 1;
  return b;
}

std::uint8_t SequenceBitSource::next_bit() {
  if (pos_ >= bits_.size()) throw std::out_of_range("bit source exhausted");
  return bits_[pos_++];
}

std::uint8_t GeneratorBitSource::next_bit() {
  if (pos_ == buffer_.size()) {
    buffer_.clear();
    pos_ = 0;
    while (buffer_.size() < 4096) gen_.step(buffer_);
  }
  return buffer_[pos_++];
}

std::string to_string(BackendKind k) {
  switch (k) {
    case BackendKind::TrngInstruction: return "trng";
    case BackendKind::SoftwareStdlib: return "stdlib";
    case BackendKind::SoftwareBoostLagFib: return "boost-lagfib1279";
  }
  return "?";
}

BackendKind parse_backend(const std::string& name) {
  if (name == "trng") return BackendKind::TrngInstruction;
  if (name == "stdlib") return BackendKind::SoftwareStdlib;
  if (name == "boost" || name == "boost-lagfib1279" || name == "lagfib") return BackendKind::SoftwareBoostLagFib;
  throw std::invalid_argument("unknown backend '" + name + "' (expected trng, stdlib or boost)");
}

RngBackend RngBackend::defaults(BackendKind kind) {
  switch (kind) {
    case BackendKind::SoftwareStdlib: return {kind, 11.5, 23.0, 0};
    case BackendKind::SoftwareBoostLagFib: return {kind, 38.75, 77.5, 0};
    default: return {BackendKind::TrngInstruction, 1.0, 1.0, 8};
  }
}

void RngBackend::validate() const {
  require(instructions_per_u15 > 0 && instructions_per_double > 0, "RngBackend: costs must be positive");
  if (kind == BackendKind::TrngInstruction) {
    require(instructions_per_u15 == 1.0 && instructions_per_double == 1.0,
            "RngBackend: a TRNG instruction counts as one instruction");
  }
}

std::uint16_t rand_u15(BitSource& src, const RngBackend& backend, InstructionCounter* counter) {
  const auto v = static_cast<std::uint16_t>(take_bits(src, 15));
  if (counter) counter->count += backend.instructions_per_u15;
  return v;
}

double frand(BitSource& src, Precision precision, double lo, double hi, const RngBackend& backend,
             InstructionCounter* counter) {
  require(lo < hi, "frand: lo must be below hi");
  const int m = precision == Precision::Single ? 23 : 52;
  const double u = std::ldexp(static_cast<double>(take_bits(src, m)), -m);
  if (counter) counter->count += backend.instructions_per_double;
  double x = lo + u * (hi - lo);
  if (x >= hi) x = std::nextafter(hi, lo);  // rounding of the affine map
  if (precision == Precision::Single) {
    float f = static_cast<float>(x);
    if (static_cast<double>(f) >= hi) f = std::nextafter(static_cast<float>(hi), static_cast<float>(lo));
    if (static_cast<double>(f) < lo) f = std::nextafter(f, static_cast<float>(hi));
    x = f;
  }
  return x;
}

void PipelineConfig::validate() const {
  require(frequency_hz > 0 && ipc > 0 && latency_cycles > 0, "PipelineConfig: frequency, IPC and latency must be positive");
  require(t_pre_ns >= 0 && t_rd_ns >= 0 && t_wr_ns >= 0, "PipelineConfig: phase times must be non-negative");
  const double latency_ns = latency_cycles / frequency_hz * 1e9;
  require(t_pre_ns + t_rd_ns + t_wr_ns <= latency_ns * (1 + 1e-12),
          "PipelineConfig: relaxed TRNG phases exceed the instruction latency");
}

void CostModel::validate() const {
  require(per_path_work >= 0 && fixed_overhead >= 0, "CostModel: costs must be non-negative");
}

void OptionSpec::validate() const {
  require(s0 > 0 && strike > 0 && maturity_years > 0, "OptionSpec: s0, strike and maturity must be positive");
  require(volatility >= 0, "OptionSpec: volatility must be non-negative");
  require(n_paths >= 1, "OptionSpec: n_paths must be >= 1");
}

double instruction_count(std::size_t n_paths, const RngBackend& backend, const CostModel& cost) {
  return cost.fixed_overhead +
         static_cast<double>(n_paths) * (cost.per_path_work + 2.0 * backend.instructions_per_double);
}

BenchEntry price_option_mc(const OptionSpec& spec, const RngBackend& backend, std::uint64_t seed,
                           const CostModel& cost, const PipelineConfig& pipeline, BitSource* source) {
  spec.validate();
  backend.validate();
  cost.validate();
  pipeline.validate();

  std::function<double()> uniform;
  std::unique_ptr<FairBitSource> own_source;
  std::minstd_rand lcg(static_cast<std::minstd_rand::result_type>(seed % 2147483646u + 1u));
  boost::random::lagged_fibonacci1279 lagfib(static_cast<std::uint32_t>(seed ^ (seed >> 32)));
  switch (backend.kind) {
    case BackendKind::TrngInstruction:
      if (!source) {
        own_source = std::make_unique<FairBitSource>(seed);
        source = own_source.get();
      }
      uniform = [&] { return frand(*source, Precision::Double, 0.0, 1.0, backend); };
      break;
    case BackendKind::SoftwareStdlib:
      uniform = [&] { return static_cast<double>(lcg() - 1u) / 2147483646.0; };
      break;
    case BackendKind::SoftwareBoostLagFib:
      uniform = [&] { return lagfib(); };
      break;
  }

  const double t = spec.maturity_years;
  const double drift = (spec.rate - 0.5 * spec.volatility * spec.volatility) * t;
  const double vol = spec.volatility * std::sqrt(t);
  const double discount = std::exp(-spec.rate * t);

  // Welford running mean and variance of the payoff.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < spec.n_paths; ++i) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double z = std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
    const double st = spec.s0 * std::exp(drift + vol * z);
    const double payoff = std::max(st - spec.strike, 0.0);
    const double delta = payoff - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (payoff - mean);
  }

  BenchEntry e;
  e.backend = backend.kind;
  e.n_paths = spec.n_paths;
  e.price = discount * mean;
  const double var = spec.n_paths > 1 ? m2 / static_cast<double>(spec.n_paths - 1) : 0.0;
  e.stderr_ = discount * std::sqrt(var / static_cast<double>(spec.n_paths));
  e.instructions = instruction_count(spec.n_paths, backend, cost);
  e.runtime_s = e.instructions / (pipeline.ipc * pipeline.frequency_hz);
  return e;
}

double black_scholes_oracle(const OptionSpec& spec) {
  spec.validate();
  const double t = spec.maturity_years;
  const double discount = std::exp(-spec.rate * t);
  if (spec.volatility == 0.0) return std::max(spec.s0 - spec.strike * discount, 0.0);
  const double sq = spec.volatility * std::sqrt(t);
  const double d1 = (std::log(spec.s0 / spec.strike) + (spec.rate + 0.5 * spec.volatility * spec.volatility) * t) / sq;
  const double d2 = d1 - sq;
  return spec.s0 * normal_cdf(d1) - spec.strike * discount * normal_cdf(d2);
}

BenchReport speedup_report(const OptionSpec& spec, const SpeedupOptions& options) {
  bool has_trng = false;
  for (auto k : options.backends) has_trng |= k == BackendKind::TrngInstruction;
  require(has_trng, "speedup_report: the TRNG backend is the baseline and must be included");

  const std::size_t nb = options.backends.size();
  const std::size_t n_jobs = nb * options.n_paths.size();
  BenchReport report;
  report.entries.resize(n_jobs);

  auto run = [&](std::size_t job) {
    const std::size_t pi = job / nb;
    const BackendKind kind = options.backends[job % nb];
    OptionSpec s = spec;
    s.n_paths = options.n_paths[pi];
    RngBackend backend = RngBackend::defaults(kind);
    for (const auto& b : options.backend_costs)
      if (b.kind == kind) backend = b;
    if (options.simulate) {
      const std::uint64_t seed = substream_seed(substream_seed(options.seed, static_cast<std::uint64_t>(kind)), pi);
      report.entries[job] = price_option_mc(s, backend, seed, options.cost, options.pipeline);
    } else {
      s.validate();
      BenchEntry e;
      e.backend = kind;
      e.n_paths = s.n_paths;
      e.instructions = instruction_count(s.n_paths, backend, options.cost);
      e.runtime_s = e.instructions / (options.pipeline.ipc * options.pipeline.frequency_hz);
      report.entries[job] = e;
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(n_jobs)));
  if (jobs == 1) {
    for (std::size_t j = 0; j < n_jobs; ++j) run(j);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t j = w; j < n_jobs; j += jobs) run(j);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (auto& e : report.entries) {
    const auto& base = report.find(BackendKind::TrngInstruction, e.n_paths);
    e.ratio_vs_trng = e.instructions / base.instructions;
    e.speedup_vs_trng = e.runtime_s / base.runtime_s;
  }
  return report;
}

const BenchEntry& BenchReport::find(BackendKind k, std::size_t n_paths) const {
  for (const auto& e : entries) {
    if (e.backend == k && e.n_paths == n_paths) return e;
  }
  throw std::out_of_range("BenchReport: no entry for " + to_string(k));
}

std::string BenchReport::to_csv() const {
  std::string s = "backend,n_paths,price,stderr,instructions,runtime_s,ratio_vs_trng,speedup_vs_trng\n";
  char line[256];
  for (const auto& e : entries) {
    std::snprintf(line, sizeof line, "%s,%zu,%.6f,%.6f,%.0f,%.9g,%.6f,%.6f\n", to_string(e.backend).c_str(), e.n_paths,
                  e.price, e.stderr_, e.instructions, e.runtime_s, e.ratio_vs_trng, e.speedup_vs_trng);
    s += line;
  }
  return s;
}

std::string BenchReport::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : entries) {
    j.push_back({{"backend", to_string(e.backend)},
                 {"n_paths", e.n_paths},
                 {"price", e.price},
                 {"stderr", e.stderr_},
                 {"instructions", e.instructions},
                 {"runtime_s", e.runtime_s},
                 {"ratio_vs_trng", e.ratio_vs_trng},
                 {"speedup_vs_trng", e.speedup_vs_trng}});
  }
  return j.dump(2);
}

}  // namespace rhstrng
