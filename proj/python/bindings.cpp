#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rhstrng/markov_analysis.hpp"
#include "rhstrng/mtj_device.hpp"
#include "rhstrng/pvt_sweep.hpp"
#include "rhstrng/randomness_tests.hpp"
#include "rhstrng/system_model.hpp"
#include "rhstrng/trng_core.hpp"

namespace py = pybind11;
using namespace rhstrng;

namespace {

using BitArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

std::span<const std::uint8_t> view(const BitArray& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D array of 0/1 values");
  return {a.data(), static_cast<std::size_t>(a.size())};
}

BitArray to_array(std::vector<std::uint8_t>&& bits) {
  auto* heap = new std::vector<std::uint8_t>(std::move(bits));
  py::capsule owner(heap, [](void* p) { delete static_cast<std::vector<std::uint8_t>*>(p); });
  const auto n = static_cast<py::ssize_t>(heap->size());
  return BitArray({n}, {py::ssize_t{1}}, heap->data(), owner);
}

}  // namespace

PYBIND11_MODULE(_rhstrng, m) {
  m.doc() = "MTJ-based true random number generator simulator";

  py::enum_<Variant>(m, "Variant")
      .value("ConvAPtoP", Variant::ConvAPtoP)
      .value("ConvPtoAP", Variant::ConvPtoAP)
      .value("RhsSingleUnit", Variant::RhsSingleUnit)
      .value("RhsTrng", Variant::RhsTrng)
      .value("RhsParallel", Variant::RhsParallel);
  m.def("parse_variant", &parse_variant);

  py::class_<FlipProbs>(m, "FlipProbs")
      .def(py::init<double, double>(), py::arg("p1"), py::arg("p2"))
      .def_readwrite("p1", &FlipProbs::p1)
      .def_readwrite("p2", &FlipProbs::p2);

  m.def("steady_state", [](double p1, double p2) {
    auto s = steady_state({p1, p2});
    return py::dict(py::arg("p_ap") = s.p_ap, py::arg("p_p") = s.p_p, py::arg("p_out_1") = s.p_out_1,
                    py::arg("p_out_0") = s.p_out_0);
  }, py::arg("p1"), py::arg("p2"));
  m.def("xor_output_prob", &xor_output_prob, py::arg("p_a"), py::arg("p_b"));
  m.def("lag1_autocorrelation", [](double p1, double p2) { return lag1_autocorrelation(FlipProbs{p1, p2}); },
        py::arg("p1"), py::arg("p2"));
  m.def("binary_shannon", &binary_shannon);
  m.def("binary_min_entropy", &binary_min_entropy);

  py::class_<DeviceParams>(m, "DeviceParams")
      .def(py::init<>())
      .def_readwrite("t_fl_nm", &DeviceParams::t_fl_nm)
      .def_readwrite("sigma_t_fl", &DeviceParams::sigma_t_fl)
      .def_readwrite("cd_nm", &DeviceParams::cd_nm)
      .def_readwrite("t_tb_nm", &DeviceParams::t_tb_nm)
      .def_readwrite("sigma_t_tb", &DeviceParams::sigma_t_tb)
      .def_readwrite("tmr", &DeviceParams::tmr)
      .def_readwrite("sigma_tmr", &DeviceParams::sigma_tmr)
      .def_readwrite("r_p_ohm", &DeviceParams::r_p_ohm)
      .def_readwrite("delta_300", &DeviceParams::delta_300)
      .def_readwrite("ic0_ap2p_ua", &DeviceParams::ic0_ap2p_ua)
      .def_readwrite("ic0_p2ap_ua", &DeviceParams::ic0_p2ap_ua)
      .def_readwrite("tau0_ns", &DeviceParams::tau0_ns)
      .def_readwrite("r_load_ohm", &DeviceParams::r_load_ohm)
      .def_readwrite("tb_decay_nm", &DeviceParams::tb_decay_nm)
      .def_readwrite("barrier_asymmetry", &DeviceParams::barrier_asymmetry);

  py::class_<Environment>(m, "Environment")
      .def(py::init<double, double>(), py::arg("temperature_k") = 300.0, py::arg("v_variation_rate") = 0.0)
      .def_readwrite("temperature_k", &Environment::temperature_k)
      .def_readwrite("v_variation_rate", &Environment::v_variation_rate);

  py::class_<GeneratorConfig>(m, "GeneratorConfig")
      .def(py::init([](Variant v, unsigned n) {
             GeneratorConfig g;
             g.variant = v;
             g.parallel_n = n;
             return g;
           }),
           py::arg("variant") = Variant::RhsTrng, py::arg("parallel_n") = 1)
      .def_readwrite("variant", &GeneratorConfig::variant)
      .def_readwrite("parallel_n", &GeneratorConfig::parallel_n)
      .def_readwrite("target_prob", &GeneratorConfig::target_prob)
      .def_readwrite("device", &GeneratorConfig::device)
      .def_property(
          "forced",
          [](const GeneratorConfig& g) {
            std::vector<std::pair<double, double>> out;
            for (const auto& f : g.forced) out.emplace_back(f.p1, f.p2);
            return out;
          },
          [](GeneratorConfig& g, const std::vector<std::pair<double, double>>& v) {
            g.forced.clear();
            for (auto [a, b] : v) g.forced.push_back({a, b});
          })
      .def("throughput_mbps", [](const GeneratorConfig& g) { return throughput_report(g).aggregate_mbps; })
      .def("cost", [](const GeneratorConfig& g) {
        auto c = cost_report(g);
        return py::make_tuple(c.energy_pj_per_bit, c.area_um2_per_bit);
      });

  m.def(
      "generate",
      [](const GeneratorConfig& config, std::size_t n_bits, std::uint64_t seed, const Environment& env) {
        BitStream bs;
        {
          py::gil_scoped_release release;
          bs = generate_bitstream(config, env, n_bits, seed);
        }
        py::dict meta(py::arg("variant") = bs.variant, py::arg("n_cycles") = bs.n_cycles,
                      py::arg("simulated_time_ns") = bs.simulated_time_ns, py::arg("energy_pj") = bs.energy_pj,
                      py::arg("seed") = bs.seed);
        return py::make_tuple(to_array(std::move(bs.bits)), meta);
      },
      py::arg("config"), py::arg("n_bits"), py::arg("seed"), py::arg("env") = Environment{},
      "Returns (bits, metadata); bits is a uint8 array of 0/1 values.");

  m.def("shannon_entropy", [](const BitArray& a) { return shannon_entropy(view(a)); });
  m.def("min_entropy", [](const BitArray& a) { return min_entropy(view(a)); });

  m.def(
      "nist_suite",
      [](const BitArray& a, std::size_t n_groups, unsigned jobs) {
        NistOptions opt;
        opt.n_groups = n_groups;
        opt.jobs = jobs;
        std::vector<TestResult> rows;
        {
          py::gil_scoped_release release;
          rows = run_nist_suite(view(a), opt);
        }
        py::list out;
        for (const auto& r : rows) {
          out.append(py::dict(py::arg("module") = r.module, py::arg("p_value") = r.p_value,
                              py::arg("first_group_p_value") = r.first_group_p_value,
                              py::arg("pass_count") = r.pass_count, py::arg("group_count") = r.group_count,
                              py::arg("verdict") = r.verdict()));
        }
        return out;
      },
      py::arg("bits"), py::arg("n_groups") = 10, py::arg("jobs") = 1);

  m.def(
      "sweep",
      [](const std::string& axis, std::size_t bits_per_point, std::uint64_t seed, std::size_t n_samples,
         unsigned jobs) {
        auto s = SweepSpec::defaults(parse_axis(axis));
        s.bits_per_point = bits_per_point;
        s.seed = seed;
        s.n_samples = n_samples;
        s.jobs = jobs;
        py::gil_scoped_release release;
        return run_sweep(s).to_csv();
      },
      py::arg("axis"), py::arg("bits_per_point") = 1'000'000, py::arg("seed") = 1, py::arg("n_samples") = 200,
      py::arg("jobs") = 1, "Runs a sweep with default ranges and returns the CSV table.");

  py::class_<OptionSpec>(m, "OptionSpec")
      .def(py::init<>())
      .def_readwrite("s0", &OptionSpec::s0)
      .def_readwrite("strike", &OptionSpec::strike)
      .def_readwrite("rate", &OptionSpec::rate)
      .def_readwrite("volatility", &OptionSpec::volatility)
      .def_readwrite("maturity_years", &OptionSpec::maturity_years)
      .def_readwrite("n_paths", &OptionSpec::n_paths);

  m.def("black_scholes", &black_scholes_oracle);
  m.def(
      "price_option",
      [](const OptionSpec& spec, const std::string& backend, std::uint64_t seed) {
        auto e = price_option_mc(spec, RngBackend::defaults(parse_backend(backend)), seed);
        return py::dict(py::arg("price") = e.price, py::arg("stderr") = e.stderr_,
                        py::arg("instructions") = e.instructions, py::arg("runtime_s") = e.runtime_s);
      },
      py::arg("spec"), py::arg("backend") = "trng", py::arg("seed") = 1);
  m.def(
      "speedup_csv",
      [](bool simulate, std::uint64_t seed) {
        SpeedupOptions opt;
        opt.simulate = simulate;
        opt.seed = seed;
        return speedup_report(OptionSpec{}, opt).to_csv();
      },
      py::arg("simulate") = false, py::arg("seed") = 1);
}
