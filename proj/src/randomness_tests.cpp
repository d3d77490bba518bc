#include "rhstrng/randomness_tests.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <json.hpp>
#include <stdexcept>
#include <thread>

#include "rhstrng/markov_analysis.hpp"

namespace rhstrng {

namespace {

double fraction_of_ones(Bits bits) {
  if (bits.empty()) throw std::invalid_argument("entropy of an empty stream is undefined");
  std::size_t ones = 0;
  for (auto b : bits) ones += b != 0;
  return static_cast<double>(ones) / static_cast<double>(bits.size());
}

constexpr std::size_t kTemplateLen = 9;
constexpr std::size_t kOverlapBlock = 1032;

// One row of the report before aggregation over groups.
struct ModuleSpec {
  std::string name;
  std::size_t min_bits;
};

// Row order of the report; per-group results are written into these slots.
enum Row : std::size_t {
  kFrequency,
  kBlockFrequency,
  kCusumForward,
  kCusumReverse,
  kRuns,
  kLongestRun,
  kRank,
  kFft,
  kNonOverlapping,
  kOverlapping,
  kApEn,
  kSerial1,
  kSerial2,
  kLinearComplexity,
  kRowCount
};

std::vector<ModuleSpec> module_specs() {
  const std::size_t non_overlap_min = 8 * ((std::size_t{1} << kTemplateLen) + kTemplateLen - 1);
  return {
      {"Frequency", 100},
      {"BlockFrequency", 128},
      {"CumulativeSums (forward)", 100},
      {"CumulativeSums (reverse)", 100},
      {"Runs", 100},
      {"LongestRun", 128},
      {"Rank", 38 * 32 * 32},
      {"FFT", 1000},
      {"NonOverlappingTemplate", non_overlap_min},
      {"OverlappingTemplate", 72 * kOverlapBlock},
      {"ApproximateEntropy", std::size_t{1} << 16},
      {"Serial (p1)", 32},
      {"Serial (p2)", 32},
      {"LinearComplexity", 200 * 500},
  };
}

using GroupResult = std::vector<std::vector<double>>;  // per row, p-values of this group

GroupResult run_group(Bits g, const std::vector<ModuleSpec>& specs,
                      const std::vector<std::vector<std::uint8_t>>& templates) {
  GroupResult r(kRowCount);
  auto on = [&](Row row) { return g.size() >= specs[row].min_bits; };
  if (on(kFrequency)) r[kFrequency] = {nist::frequency(g)};
  if (on(kBlockFrequency)) r[kBlockFrequency] = {nist::block_frequency(g, 128)};
  if (on(kCusumForward)) {
    r[kCusumForward] = {nist::cumulative_sums(g, false)};
    r[kCusumReverse] = {nist::cumulative_sums(g, true)};
  }
  if (on(kRuns)) r[kRuns] = {nist::runs(g)};
  if (on(kLongestRun)) r[kLongestRun] = {nist::longest_run(g)};
  if (on(kRank)) r[kRank] = {nist::rank(g)};
  if (on(kFft)) r[kFft] = {nist::spectral(g)};
  if (on(kNonOverlapping)) {
    for (const auto& t : templates) r[kNonOverlapping].push_back(nist::non_overlapping_template(g, t, 8));
  }
  if (on(kOverlapping)) r[kOverlapping] = {nist::overlapping_template(g, kTemplateLen, kOverlapBlock)};
  if (on(kApEn)) r[kApEn] = {nist::approximate_entropy(g, 10)};
  if (on(kSerial1)) {
    const auto [p1, p2] = nist::serial(g, nist::serial_block_len(g.size()));
    r[kSerial1] = {p1};
    r[kSerial2] = {p2};
  }
  if (on(kLinearComplexity)) r[kLinearComplexity] = {nist::linear_complexity(g, 500)};
  return r;
}

}  // namespace

double shannon_entropy(Bits bits) { return binary_shannon(fraction_of_ones(bits)); }

double min_entropy(Bits bits) { return binary_min_entropy(fraction_of_ones(bits)); }

EntropyReport entropy_report(Bits bits) {
  const double p = fraction_of_ones(bits);
  return {binary_shannon(p), binary_min_entropy(p), bits.size(), p};
}

bool TestResult::passed() const { return !skipped && p_value > 1e-4 && pass_rate() >= 0.91; }

std::string TestResult::verdict() const {
  if (skipped) return "Skipped";
  return passed() ? "Pass" : "Fail";
}

std::vector<TestResult> run_nist_suite(Bits bits, const NistOptions& options) {
  if (options.n_groups == 0) throw std::invalid_argument("run_nist_suite: n_groups must be >= 1");
  if (bits.size() % options.n_groups != 0) {
    throw std::invalid_argument("run_nist_suite: stream length must be divisible by the group count");
  }
  if (bits.empty()) throw std::invalid_argument("run_nist_suite: empty stream");
  const std::size_t group_len = bits.size() / options.n_groups;
  const auto specs = module_specs();
  const auto templates = nist::aperiodic_templates(kTemplateLen);

  std::vector<GroupResult> groups(options.n_groups);
  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(options.n_groups)));
  auto work = [&](unsigned worker) {
    for (std::size_t gi = worker; gi < options.n_groups; gi += jobs) {
      groups[gi] = run_group(bits.subspan(gi * group_len, group_len), specs, templates);
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  std::vector<TestResult> out;
  for (std::size_t row = 0; row < kRowCount; ++row) {
    TestResult tr;
    tr.module = specs[row].name;
    std::vector<double> all;
    for (const auto& g : groups) all.insert(all.end(), g[row].begin(), g[row].end());
    if (all.empty()) {
      tr.skipped = true;
      tr.skip_reason = "needs at least " + std::to_string(specs[row].min_bits) + " bits per group";
      out.push_back(tr);
      continue;
    }
    tr.first_group_p_value = all.front();
    tr.p_value = nist::uniformity_p_value(all);
    tr.group_count = all.size();
    tr.pass_count = static_cast<std::size_t>(
        std::count_if(all.begin(), all.end(), [&](double p) { return p >= options.group_alpha; }));
    out.push_back(tr);
  }
  return out;
}

std::string format_nist_report(const std::vector<TestResult>& results) {
  std::string s;
  char line[160];
  std::snprintf(line, sizeof line, "%-28s %10s %10s %11s  %s\n", "Test", "P-value", "Group0 P", "Pass rate",
                "Result");
  s += line;
  for (const auto& r : results) {
    if (r.skipped) {
      std::snprintf(line, sizeof line, "%-28s %10s %10s %11s  Skipped (%s)\n", r.module.c_str(), "-", "-", "-",
                    r.skip_reason.c_str());
    } else {
      const std::string rate = std::to_string(r.pass_count) + "/" + std::to_string(r.group_count);
      std::snprintf(line, sizeof line, "%-28s %10.6f %10.6f %11s  %s\n", r.module.c_str(), r.p_value,
                    r.first_group_p_value, rate.c_str(), r.verdict().c_str());
    }
    s += line;
  }
  return s;
}

std::string nist_report_json(const std::vector<TestResult>& results, const EntropyReport& entropy) {
  nlohmann::json j;
  j["entropy"] = {{"n_bits", entropy.n_bits},
                  {"p_one", entropy.p_one},
                  {"shannon", entropy.shannon},
                  {"min_entropy", entropy.min_entropy}};
  auto& rows = j["tests"] = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json row{{"module", r.module}, {"verdict", r.verdict()}};
    if (r.skipped) {
      row["reason"] = r.skip_reason;
    } else {
      row["p_value"] = r.p_value;
      row["first_group_p_value"] = r.first_group_p_value;
      row["pass_count"] = r.pass_count;
      row["group_count"] = r.group_count;
      row["pass_rate"] = r.pass_rate();
    }
    rows.push_back(row);
  }
  return j.dump(2);
}

}  // namespace rhstrng
