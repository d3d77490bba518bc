#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rhstrng/random.hpp"
#include "rhstrng/trng_core.hpp"

namespace rhstrng {

/// Source of random bits feeding the TRNG instructions.
class BitSource {
 public:
  virtual ~BitSource() = default;
  /// Throws std::out_of_range when exhausted.
  virtual std::uint8_t next_bit() = 0;
};

/// Ideal fair source (pseudo-random, for CI and statistical tests).
class FairBitSource final : public BitSource {
 public:
  explicit FairBitSource(std::uint64_t seed) : rng_(seed) {}
  std::uint8_t next_bit() override;

 private:
  RandomStream rng_;
  std::uint64_t word_ = 0;
  int left_ = 0;
};

/// Replays a fixed sequence.
class SequenceBitSource final : public BitSource {
 public:
  explicit SequenceBitSource(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}
  std::uint8_t next_bit() override;
  std::size_t remaining() const { return bits_.size() - pos_; }

 private:
  std::vector<std::uint8_t> bits_;
  std::size_t pos_ = 0;
};

/// Bits straight from a simulated generator.
class GeneratorBitSource final : public BitSource {
 public:
  GeneratorBitSource(const GeneratorConfig& config, const Environment& env, std::uint64_t seed)
      : gen_(config, env, seed) {}
  std::uint8_t next_bit() override;

 private:
  Generator gen_;
  std::vector<std::uint8_t> buffer_;
  std::size_t pos_ = 0;
};

enum class BackendKind { TrngInstruction, SoftwareStdlib, SoftwareBoostLagFib };

std::string to_string(BackendKind k);
BackendKind parse_backend(const std::string& name);

struct RngBackend {
  BackendKind kind = BackendKind::TrngInstruction;
  double instructions_per_u15 = 1.0;
  double instructions_per_double = 1.0;
  unsigned latency_cycles = 8;

  /// Calibrated defaults: TRNG 1/1; stdlib 11.5/23; Boost lagged Fibonacci 38.75/77.5.
  static RngBackend defaults(BackendKind kind);
  void validate() const;
};

struct InstructionCounter {
  double count = 0.0;
};

enum class Precision { Single, Double };

/// 15 bits, first consumed bit most significant.
std::uint16_t rand_u15(BitSource& src, const RngBackend& backend = {}, InstructionCounter* counter = nullptr);

/// lo + u (hi - lo), u = mantissa / 2^m with m = 23 or 52 bits.
double frand(BitSource& src, Precision precision, double lo, double hi, const RngBackend& backend = {},
             InstructionCounter* counter = nullptr);

struct PipelineConfig {
  double frequency_hz = 2e9;
  double t_pre_ns = 0.5;
  double t_rd_ns = 0.5;
  double t_wr_ns = 3.0;
  unsigned latency_cycles = 8;
  double ipc = 1.0;

  void validate() const;  ///< relaxed phases must fit in the instruction latency
};

struct CostModel {
  double per_path_work = 16.0;
  double fixed_overhead = 18000.0;

  void validate() const;
};

struct OptionSpec {
  double s0 = 100.0;
  double strike = 100.0;
  double rate = 0.05;
  double volatility = 0.2;
  double maturity_years = 1.0;
  std::size_t n_paths = 1'000'000;

  void validate() const;
};

struct BenchEntry {
  BackendKind backend = BackendKind::TrngInstruction;
  std::size_t n_paths = 0;
  double price = 0.0;
  double stderr_ = 0.0;
  double instructions = 0.0;
  double runtime_s = 0.0;
  double ratio_vs_trng = 1.0;
  double speedup_vs_trng = 1.0;
};

struct BenchReport {
  std::vector<BenchEntry> entries;

  std::string to_csv() const;
  std::string to_json() const;
  const BenchEntry& find(BackendKind k, std::size_t n_paths) const;
};

/// Instruction count of a run: fixed + n (per_path_work + 2 per-double cost).
double instruction_count(std::size_t n_paths, const RngBackend& backend, const CostModel& cost);

/// European call by terminal GBM sampling, one Box-Muller normal per path.
/// TrngInstruction draws from `source` (a FairBitSource seeded with `seed`
/// when null); software backends use their own engines seeded with `seed`.
BenchEntry price_option_mc(const OptionSpec& spec, const RngBackend& backend, std::uint64_t seed,
                           const CostModel& cost = {}, const PipelineConfig& pipeline = {},
                           BitSource* source = nullptr);

/// Closed-form Black-Scholes call; sigma = 0 gives the discounted forward payoff.
double black_scholes_oracle(const OptionSpec& spec);

struct SpeedupOptions {
  std::vector<std::size_t> n_paths{100, 1000, 10000, 100000, 1000000};
  std::vector<BackendKind> backends{BackendKind::TrngInstruction, BackendKind::SoftwareStdlib,
                                    BackendKind::SoftwareBoostLagFib};
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  /// Replaces RngBackend::defaults for a matching kind.
  std::vector<RngBackend> backend_costs;
  CostModel cost;
  PipelineConfig pipeline;
  bool simulate = true;  ///< false: instruction counts only, no Monte Carlo
};

BenchReport speedup_report(const OptionSpec& spec, const SpeedupOptions& options = {});

}  // namespace rhstrng
