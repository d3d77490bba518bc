#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rhstrng/bitstream_io.hpp"
#include "rhstrng/markov_analysis.hpp"
#include "rhstrng/pvt_sweep.hpp"
#include "rhstrng/randomness_tests.hpp"
#include "rhstrng/system_model.hpp"
#include "rhstrng/trng_core.hpp"
#include "run_config.hpp"

using namespace rhstrng;
using cli::RunConfig;
using cli::UsageError;
using nlohmann::json;

namespace {

struct SeedChoice {
  std::uint64_t value;
  bool from_entropy;
};

SeedChoice resolve_seed(const CLI::Option* flag, std::uint64_t flag_value, const RunConfig& rc) {
  if (flag->count()) return {flag_value, false};
  if (rc.seed) return {*rc.seed, false};
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::fprintf(stderr, "no --seed given; using seed %llu from system entropy\n", static_cast<unsigned long long>(s));
  return {s, true};
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
}

void require_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw UsageError("input file not found: " + path);
}

template <class T>
void override_if(const CLI::Option* opt, T& target, const T& value) {
  if (opt->count()) target = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for read-and-invert MTJ true random number generators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rhstrng 0.1.0");

  std::string config_path;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  app.add_option("--config", config_path, "JSON config file (default: $RHSTRNG_CONFIG)");

  auto add_seed = [&](CLI::App* sub) { return sub->add_option("--seed", seed, "Master seed"); };
  auto add_jobs = [&](CLI::App* sub) {
    return sub->add_option("--jobs,-j", jobs, "Worker threads")->check(CLI::PositiveNumber);
  };

  // generate
  auto* gen = app.add_subcommand("generate", "Simulate a TRNG and write its bitstream");
  std::string variant_name, out_path, meta_path, format_name = "packed";
  std::size_t n_bits = 1'000'000;
  unsigned parallel_n = 1;
  double temperature = 300.0, voltage = 0.0;
  std::vector<double> forced_probs;
  auto* o_variant = gen->add_option("--variant", variant_name, "conv-ap2p, conv-p2ap, rhs-single, rhs-trng, rhs-parallel");
  gen->add_option("--bits,-n", n_bits, "Number of bits")->check(CLI::PositiveNumber);
  gen->add_option("--out,-o", out_path, "Bitstream file")->required();
  gen->add_option("--meta", meta_path, "Metadata JSON (default: <out>.json)");
  gen->add_option("--format", format_name, "packed or ascii")->check(CLI::IsMember({"packed", "ascii"}));
  auto* o_par = gen->add_option("--parallel-n", parallel_n, "Lanes of rhs-parallel")->check(CLI::PositiveNumber);
  auto* o_temp = gen->add_option("--temperature", temperature, "Temperature in K")->check(CLI::PositiveNumber);
  auto* o_volt = gen->add_option("--voltage", voltage, "Relative supply shift, e.g. -0.05");
  auto* o_forced = gen->add_option("--forced", forced_probs, "Force flip probabilities p1,p2[,p1,p2...] per unit")
                       ->delimiter(',');
  auto* gen_seed = add_seed(gen);

  // test
  auto* tst = app.add_subcommand("test", "Run the NIST SP 800-22 suite and entropy estimates on a bitstream");
  std::string in_path, in_format = "auto", json_path;
  std::size_t groups = 10, max_bits = 0;
  tst->add_option("--in,-i", in_path, "Bitstream file")->required();
  tst->add_option("--format", in_format, "packed, ascii or auto")->check(CLI::IsMember({"packed", "ascii", "auto"}));
  auto* o_groups = tst->add_option("--groups", groups, "Number of equal groups")->check(CLI::PositiveNumber);
  tst->add_option("--max-bits", max_bits, "Only read this many bits");
  tst->add_option("--json", json_path, "Write the report as JSON");
  add_jobs(tst);

  // analyze
  auto* ana = app.add_subcommand("analyze", "Closed-form stationary output and entropy for (p1, p2) grids");
  std::vector<double> p1s, p2s;
  ana->add_option("--p1", p1s, "P->AP switching probabilities")->required()->delimiter(',')->check(CLI::Range(0.0, 1.0));
  ana->add_option("--p2", p2s, "AP->P switching probabilities")->required()->delimiter(',')->check(CLI::Range(0.0, 1.0));
  std::string ana_out;
  ana->add_option("--out,-o", ana_out, "CSV output (default: stdout)");

  // sweep
  auto* swp = app.add_subcommand("sweep", "Voltage, temperature or process-variation study");
  std::string axis_name, sweep_out;
  double s_start = 0, s_stop = 0, s_step = 0;
  std::size_t bits_per_point = 0, n_samples = 0;
  std::vector<std::string> sweep_variants;
  auto* o_axis = swp->add_option("--axis", axis_name, "voltage, temperature or process");
  auto* o_start = swp->add_option("--start", s_start);
  auto* o_stop = swp->add_option("--stop", s_stop);
  auto* o_step = swp->add_option("--step", s_step);
  auto* o_bpp = swp->add_option("--bits-per-point", bits_per_point);
  auto* o_samples = swp->add_option("--samples", n_samples, "Device sets for the process study");
  auto* o_variants = swp->add_option("--variants", sweep_variants)->delimiter(',');
  swp->add_option("--out,-o", sweep_out, "CSV output (default: stdout)");
  auto* swp_seed = add_seed(swp);
  add_jobs(swp);

  // bench
  auto* bch = app.add_subcommand("bench", "Option-pricing benchmark and instruction-count speedup model");
  std::vector<std::size_t> paths;
  std::vector<std::string> backend_names;
  std::string csv_path, bench_json;
  bool counts_only = false;
  auto* o_paths = bch->add_option("--paths", paths, "Monte Carlo path counts")->delimiter(',');
  auto* o_backends = bch->add_option("--backends", backend_names, "trng, stdlib, boost-lagfib1279")->delimiter(',');
  bch->add_flag("--counts-only", counts_only, "Skip the Monte Carlo runs");
  bch->add_option("--csv", csv_path, "CSV output");
  bch->add_option("--json", bench_json, "JSON output");
  auto* bch_seed = add_seed(bch);
  add_jobs(bch);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    RunConfig rc = cli::load_config(config_path);

    if (*gen) {
      auto& g = rc.generator;
      if (o_variant->count()) g.variant = parse_variant(variant_name);
      override_if(o_par, g.parallel_n, parallel_n);
      override_if(o_temp, rc.environment.temperature_k, temperature);
      override_if(o_volt, rc.environment.v_variation_rate, voltage);
      if (o_forced->count()) {
        if (forced_probs.size() % 2) throw UsageError("--forced takes p1,p2 pairs");
        g.forced.clear();
        for (std::size_t i = 0; i < forced_probs.size(); i += 2) g.forced.push_back({forced_probs[i], forced_probs[i + 1]});
      }
      rc.sweep.generator = g;
      rc.validate();
      const auto s = resolve_seed(gen_seed, seed, rc);
      const auto fmt = parse_bit_format(format_name);

      const auto bs = generate_bitstream(g, rc.environment, n_bits, s.value);
      write_bits(out_path, bs.bits, fmt);

      std::size_t ones = 0;
      for (auto b : bs.bits) ones += b;
      const auto tp = throughput_report(g);
      const auto cost = cost_report(g);
      json meta = cli::to_json(rc);
      meta["bits_file"] = std::filesystem::path(out_path).filename().string();
      meta["format"] = format_name;
      meta["variant"] = bs.variant;
      meta["seed"] = s.value;
      meta["seed_source"] = s.from_entropy ? "entropy" : "user";
      meta["n_bits"] = bs.n_bits;
      meta["n_cycles"] = bs.n_cycles;
      meta["simulated_time_ns"] = bs.simulated_time_ns;
      meta["energy_pj"] = bs.energy_pj;
      meta["ones_fraction"] = static_cast<double>(ones) / bs.n_bits;
      meta["throughput_mbps_per_lane"] = tp.per_lane_mbps;
      meta["throughput_mbps_aggregate"] = tp.aggregate_mbps;
      meta["energy_pj_per_bit"] = cost.energy_pj_per_bit;
      meta["area_um2_per_bit"] = cost.area_um2_per_bit;
      write_text(meta_path.empty() ? out_path + ".json" : meta_path, meta.dump(2) + "\n");
      std::printf("wrote %zu bits (%s) to %s\n", bs.n_bits, bs.variant.c_str(), out_path.c_str());
      std::printf("simulated time %.6g ns, energy %.6g pJ, ones fraction %.6f\n", bs.simulated_time_ns,
                  bs.energy_pj, static_cast<double>(ones) / bs.n_bits);
    } else if (*tst) {
      require_file(in_path);
      if (o_groups->count()) rc.nist.n_groups = groups;
      rc.nist.jobs = jobs;
      std::optional<std::size_t> limit;
      if (max_bits) limit = max_bits;
      const auto bits = read_bits(in_path, parse_bit_format(in_format), limit);
      if (bits.empty()) throw UsageError("input file holds no bits: " + in_path);
      const auto results = run_nist_suite(bits, rc.nist);
      const auto ent = entropy_report(bits);
      std::cout << format_nist_report(results);
      std::printf("\nbits %zu  p(1) %.6f  shannon %.6f  min-entropy %.6f\n", bits.size(), ent.p_one,
                  ent.shannon, ent.min_entropy);
      if (!json_path.empty()) write_text(json_path, nist_report_json(results, ent) + "\n");
    } else if (*ana) {
      std::ostringstream os;
      os << "p1,p2,p_out_1,lag1,shannon,min_entropy,xor_p_one,xor_shannon,xor_min_entropy\n";
      char line[256];
      for (double p1 : p1s) {
        for (double p2 : p2s) {
          FlipProbs fp{p1, p2};
          const auto one = predicted_entropy(fp, false);
          const auto two = predicted_entropy(fp, true);
          std::snprintf(line, sizeof line, "%.6g,%.6g,%.8f,%.8f,%.8f,%.8f,%.8f,%.8f,%.8f\n", p1, p2, one.p_one,
                        lag1_autocorrelation(fp), one.shannon, one.min_entropy, two.p_one, two.shannon,
                        two.min_entropy);
          os << line;
        }
      }
      write_text(ana_out, os.str());
    } else if (*swp) {
      auto& sp = rc.sweep;
      if (o_axis->count()) {
        auto keep = sp;
        try {
          sp = SweepSpec::defaults(parse_axis(axis_name));
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
        sp.generator = keep.generator;
        sp.variants = keep.variants;
        sp.n_samples = keep.n_samples;
        sp.bits_per_point = keep.bits_per_point;
      }
      override_if(o_start, sp.start, s_start);
      override_if(o_stop, sp.stop, s_stop);
      override_if(o_step, sp.step, s_step);
      override_if(o_bpp, sp.bits_per_point, bits_per_point);
      override_if(o_samples, sp.n_samples, n_samples);
      if (o_variants->count()) {
        sp.variants.clear();
        for (const auto& v : sweep_variants) sp.variants.push_back(parse_variant(v));
      }
      sp.jobs = jobs;
      rc.validate();
      sp.seed = resolve_seed(swp_seed, seed, rc).value;
      write_text(sweep_out, run_sweep(sp).to_csv());
    } else if (*bch) {
      SpeedupOptions opt;
      if (o_paths->count()) opt.n_paths = paths;
      if (o_backends->count()) {
        opt.backends.clear();
        for (const auto& b : backend_names) opt.backends.push_back(parse_backend(b));
      }
      for (const auto& [k, b] : rc.backends) opt.backend_costs.push_back(b);
      opt.cost = rc.cost;
      opt.pipeline = rc.pipeline;
      opt.simulate = !counts_only;
      opt.jobs = jobs;
      rc.validate();
      opt.seed = resolve_seed(bch_seed, seed, rc).value;
      const auto report = speedup_report(rc.option, opt);
      std::printf("%-18s %10s %12s %10s %14s %8s %8s\n", "backend", "paths", "price", "stderr", "instructions",
                  "ratio", "speedup");
      for (const auto& e : report.entries) {
        std::printf("%-18s %10zu %12.6f %10.6f %14.0f %8.3f %8.3f\n", to_string(e.backend).c_str(), e.n_paths,
                    e.price, e.stderr_, e.instructions, e.ratio_vs_trng, e.speedup_vs_trng);
      }
      std::printf("Black-Scholes reference %.6f\n", black_scholes_oracle(rc.option));
      if (!csv_path.empty()) write_text(csv_path, report.to_csv());
      if (!bench_json.empty()) write_text(bench_json, report.to_json() + "\n");
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 2;
  }
  return 0;
}
