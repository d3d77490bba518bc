// Acceptance checks. Prints one PASS/FAIL line per criterion with the
// sub-checks indented beneath it. Exit status is nonzero if any selected
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nist_examples.hpp"
#include "rhstrng/markov_analysis.hpp"
#include "rhstrng/pvt_sweep.hpp"
#include "rhstrng/randomness_tests.hpp"
#include "rhstrng/system_model.hpp"
#include "rhstrng/trng_core.hpp"

using namespace rhstrng;

namespace {

class Criterion {
 public:
  Criterion(int id, std::string title) : id_(id), title_(std::move(title)), start_(std::chrono::steady_clock::now()) {}

  void check(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    lines_.push_back(std::string(ok ? "    ok    " : "    FAIL  ") + buf);
    ok_ = ok_ && ok;
  }

  void note(const std::string& text) { lines_.push_back("    info  " + text); }

  bool finish() const {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::printf("%s criterion %d: %s (%.1f s)\n", ok_ ? "PASS" : "FAIL", id_, title_.c_str(), secs);
    for (const auto& l : lines_) std::printf("%s\n", l.c_str());
    std::fflush(stdout);
    return ok_;
  }

 private:
  int id_;
  std::string title_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> lines_;
  bool ok_ = true;
};

double ones_fraction(const std::vector<std::uint8_t>& bits) {
  std::size_t n = 0;
  for (auto b : bits) n += b;
  return static_cast<double>(n) / bits.size();
}

constexpr std::uint64_t kSeed = 1;

bool criterion1() {
  Criterion c(1, "forced-probability grid matches the stationary and XOR predictions");
  const double grid[] = {0.3, 0.4, 0.5, 0.6, 0.7};
  const std::size_t n = 1'000'000;
  const double tol = 0.0015;
  for (auto v : {Variant::RhsSingleUnit, Variant::RhsTrng}) {
    double worst = 0, wp1 = 0, wp2 = 0, worst_z = 0;
    std::size_t k = 0;
    for (double p1 : grid) {
      for (double p2 : grid) {
        GeneratorConfig g;
        g.variant = v;
        g.forced = {{p1, p2}};
        const auto bs = generate_bitstream(g, {}, n, substream_seed(kSeed, 100 * static_cast<int>(v) + k++));
        double expect = steady_state({p1, p2}).p_out_1;
        if (v == Variant::RhsTrng) expect = xor_output_prob(expect, expect);
        const double dev = std::abs(ones_fraction(bs.bits) - expect);
        if (dev > worst) worst = dev, wp1 = p1, wp2 = p2;
        double rho = lag1_autocorrelation(FlipProbs{p1, p2});
        if (v == Variant::RhsTrng) rho *= rho;
        const double sigma = std::sqrt(expect * (1 - expect) / n * (1 + rho) / (1 - rho));
        worst_z = std::max(worst_z, dev / sigma);
      }
    }
    c.check(worst <= tol, "%-13s max |freq - prediction| = %.5f at (%.1f, %.1f), tolerance %.4f, 25 points x 1e6 bits",
            to_string(v).c_str(), worst, wp1, wp2, tol);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-13s largest deviation in units of the correlated-chain sigma: %.2f",
                  to_string(v).c_str(), worst_z);
    c.note(buf);
  }
  return c.finish();
}

bool criterion2(const std::string& data_dir) {
  Criterion c(2, "nominal RhsTrng stream passes the NIST modules; worked examples reproduced");
  GeneratorConfig g;
  const auto bs = generate_bitstream(g, {}, 1'000'000, kSeed);
  const auto rows = run_nist_suite(bs.bits);
  for (const auto& r : rows) {
    c.check(r.passed(), "%-26s composite p = %.6f  pass rate %zu/%zu  (p > 0.0001, rate >= 0.91)", r.module.c_str(),
            r.p_value, r.pass_count, r.group_count);
  }
  for (const auto& ex : testing::nist_examples(data_dir)) {
    const double got = ex.compute();
    c.check(std::abs(got - ex.expected) < 5e-5, "worked example %-38s %.6f vs %.6f", ex.name.c_str(), got,
            ex.expected);
  }
  return c.finish();
}

bool criterion3() {
  Criterion c(3, "throughput and cost bookkeeping");
  GeneratorConfig g;
  const auto tp = throughput_report(g);
  c.check(std::lround(tp.per_lane_mbps) == 303, "single-cell rate %.4f Mb/s (rounds to 303)", tp.per_lane_mbps);
  GeneratorConfig par;
  par.variant = Variant::RhsParallel;
  par.parallel_n = 1'000'000;
  auto lim = cost_report(par);
  c.check(std::abs(lim.energy_pj_per_bit / 2.65 - 1) < 1e-4 && std::abs(lim.area_um2_per_bit / 14.5 - 1) < 1e-4,
          "n -> infinity (n = 1e6): %.6f pJ/bit, %.6f um^2/bit", lim.energy_pj_per_bit, lim.area_um2_per_bit);
  par.parallel_n = 64;
  auto c64 = cost_report(par);
  const double de = c64.energy_pj_per_bit / 2.65 - 1, da = c64.area_um2_per_bit / 14.5 - 1;
  c.check(std::abs(de) <= 0.01, "n = 64 energy %.5f pJ/bit, %+.3f%% from 2.65 (limit 1%%)", c64.energy_pj_per_bit,
          100 * de);
  c.check(std::abs(da) <= 0.01, "n = 64 area %.5f um^2/bit, %+.3f%% from 14.5 (limit 1%%)", c64.area_um2_per_bit,
          100 * da);
  return c.finish();
}

bool criterion4() {
  Criterion c(4, "process variation: RHS-TRNG min-entropy >= 0.99 and Conv.PtoAP < Conv.APtoP < RhsSingleUnit < RhsTrng");
  auto s = SweepSpec::defaults(SweepAxis::Process);
  s.n_samples = 200;
  s.bits_per_point = 200 * 5000;
  s.seed = kSeed;
  const auto r = process_variation_study(s);
  const double pa = r.find(Variant::ConvPtoAP, 200).min_entropy;
  const double ap = r.find(Variant::ConvAPtoP, 200).min_entropy;
  const double su = r.find(Variant::RhsSingleUnit, 200).min_entropy;
  const double tr = r.find(Variant::RhsTrng, 200).min_entropy;
  c.check(tr >= 0.99, "RhsTrng min-entropy %.5f >= 0.99", tr);
  c.check(pa < ap, "Conv.PtoAP %.5f < Conv.APtoP %.5f", pa, ap);
  c.check(ap < su, "Conv.APtoP %.5f < RhsSingleUnit %.5f", ap, su);
  c.check(su < tr, "RhsSingleUnit %.5f < RhsTrng %.5f", su, tr);
  return c.finish();
}

// Shannon shortfall explained by a 3 sigma frequency deviation of a stationary chain.
double shannon_tolerance(const SweepRow& row) {
  const double p = std::clamp(row.p_one, 1e-9, 1 - 1e-9);
  const double rho = std::clamp(row.lag1, -0.99, 0.99);
  const double sigma = std::sqrt(p * (1 - p) / row.n_bits * (1 + rho) / (1 - rho));
  return 1.0 - binary_shannon(std::min(1.0, 0.5 + 3 * sigma));
}

bool criterion5() {
  Criterion c(5, "voltage/temperature sweeps: Shannon ordering RhsTrng >= RhsSingleUnit >= Conv; RhsTrng >= 0.999 over T");
  for (auto axis : {SweepAxis::Voltage, SweepAxis::Temperature}) {
    auto s = SweepSpec::defaults(axis);
    s.seed = kSeed;
    const auto r = run_sweep(s);
    int bad_trng = 0, bad_single = 0;
    double worst_margin = 1;
    for (double x : s.points()) {
      const auto& tr = r.find(Variant::RhsTrng, x);
      const auto& su = r.find(Variant::RhsSingleUnit, x);
      const auto& ap = r.find(Variant::ConvAPtoP, x);
      const auto& pa = r.find(Variant::ConvPtoAP, x);
      bad_trng += tr.shannon < su.shannon - shannon_tolerance(tr);
      const double conv = std::max(ap.shannon, pa.shannon);
      bad_single += su.shannon < conv - shannon_tolerance(su);
      worst_margin = std::min(worst_margin, su.shannon - conv);
    }
    const char* name = axis == SweepAxis::Voltage ? "voltage" : "temperature";
    c.check(bad_trng == 0, "%-11s RhsTrng >= RhsSingleUnit at %zu/%zu points (3 sigma tolerance)", name,
            s.points().size() - bad_trng, s.points().size());
    c.check(bad_single == 0, "%-11s RhsSingleUnit >= both Conv at %zu/%zu points (smallest margin %.2e)", name,
            s.points().size() - bad_single, s.points().size(), worst_margin);
    if (axis == SweepAxis::Temperature) {
      double lo = 1;
      for (double x : s.points()) lo = std::min(lo, r.find(Variant::RhsTrng, x).shannon);
      c.check(lo >= 0.999, "RhsTrng minimum Shannon over 7..47 C = %.6f >= 0.999", lo);
    }
  }
  return c.finish();
}

bool criterion6() {
  Criterion c(6, "XOR self-stabilization: marginals 0.45 give 0.495");
  GeneratorConfig g;
  g.forced = {{0.45, 0.55}};
  const auto bs = generate_bitstream(g, {}, 1'000'000, kSeed);
  const double f = ones_fraction(bs.bits);
  c.check(steady_state({0.45, 0.55}).p_out_1 == 0.45, "unit marginal p1/(p1+p2) = 0.45");
  c.check(std::abs(f - 0.495) <= 0.0015, "XOR 1-frequency %.5f, |dev| %.5f <= 0.0015 (1e6 bits)", f,
          std::abs(f - 0.495));
  return c.finish();
}

bool criterion7() {
  Criterion c(7, "option pricing agrees with Black-Scholes");
  OptionSpec o;
  const double bs = black_scholes_oracle(o);
  c.check(std::abs(bs - 10.4506) < 5e-5, "Black-Scholes oracle %.6f (10.4506)", bs);
  o.n_paths = 1'000'000;
  auto big = price_option_mc(o, {}, kSeed);
  c.check(std::abs(big.price - bs) <= 3 * big.stderr_, "1e6 paths: %.5f +- %.5f, %.2f SE from oracle", big.price,
          big.stderr_, std::abs(big.price - bs) / big.stderr_);
  o.n_paths = 10'000;
  int within = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto e = price_option_mc(o, {}, seed);
    within += std::abs(e.price - bs) <= 3 * e.stderr_;
  }
  c.check(within >= 99, "1e4 paths: %d/100 seeds within 3 SE (need 99)", within);
  return c.finish();
}

bool criterion8() {
  Criterion c(8, "speedup model: ratios, speedup range and monotonicity");
  SpeedupOptions opt;
  opt.simulate = false;
  const auto r = speedup_report(OptionSpec{}, opt);
  auto ratio = [&](BackendKind k, std::size_t n) { return r.find(k, n).ratio_vs_trng; };
  const double b6 = ratio(BackendKind::SoftwareBoostLagFib, 1'000'000);
  const double s6 = ratio(BackendKind::SoftwareStdlib, 1'000'000);
  const double b2 = ratio(BackendKind::SoftwareBoostLagFib, 100);
  const double s2 = ratio(BackendKind::SoftwareStdlib, 100);
  c.check(std::abs(b6 / 9.5 - 1) <= 0.10, "Boost ratio at 1e6 = %.3f (9.5 +- 10%%)", b6);
  c.check(std::abs(s6 / 3.3 - 1) <= 0.10, "stdlib ratio at 1e6 = %.3f (3.3 +- 10%%)", s6);
  c.check(std::abs(b2 / 2.0 - 1) <= 0.25, "Boost ratio at 1e2 = %.3f (2 +- 25%%)", b2);
  c.check(std::abs(s2 / 1.0 - 1) <= 0.25, "stdlib ratio at 1e2 = %.3f (1 +- 25%%)", s2);
  for (auto k : {BackendKind::SoftwareBoostLagFib, BackendKind::SoftwareStdlib}) {
    const double sp = r.find(k, 1'000'000).speedup_vs_trng;
    c.check(sp >= 3.4 && sp <= 12, "%s runtime speedup at 1e6 = %.3f in [3.4, 12]", to_string(k).c_str(), sp);
  }

  RandomStream rng(kSeed);
  int violations = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const CostModel cost{1e-3 + 1e3 * rng.uniform(), 1e-3 + 1e6 * rng.uniform()};
    const RngBackend trng{BackendKind::TrngInstruction, 1, 1e-3 + 10 * rng.uniform(), 8};
    const RngBackend sw{BackendKind::SoftwareStdlib, 1, trng.instructions_per_double + 1e3 * rng.uniform(), 8};
    double prev = 0;
    for (std::size_t n = 1; n <= 100'000'000; n *= 10) {
      const double q = instruction_count(n, sw, cost) / instruction_count(n, trng, cost);
      violations += q < prev * (1 - 1e-12);
      prev = q;
    }
  }
  c.check(violations == 0, "ratio nondecreasing in n_paths over %d random positive cost sets (%d violations)", trials,
          violations);
  return c.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> selected;
  std::string data_dir = RHSTRNG_TEST_DATA_DIR;
  app.add_option("--criterion,-c", selected, "Criteria to run (default: all)")->check(CLI::Range(1, 8));
  app.add_option("--data", data_dir, "Directory holding e_1e6.bin");
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8};

  bool all = true;
  for (int id : selected) {
    switch (id) {
      case 1: all &= criterion1(); break;
      case 2: all &= criterion2(data_dir); break;
      case 3: all &= criterion3(); break;
      case 4: all &= criterion4(); break;
      case 5: all &= criterion5(); break;
      case 6: all &= criterion6(); break;
      case 7: all &= criterion7(); break;
      case 8: all &= criterion8(); break;
    }
  }
  return all ? 0 : 1;
}
