#include <fftw3.h>

#include <algorithm>
#include <array>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "rhstrng/randomness_tests.hpp"

namespace rhstrng::nist {

namespace {

void need(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double chi_square(const std::vector<std::size_t>& observed, const std::vector<double>& pi, double n) {
  double chi2 = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = n * pi[i];
    chi2 += (observed[i] - expected) * (observed[i] - expected) / expected;
  }
  return chi2;
}

// Counts of every m-bit pattern over the sequence wrapped end-to-start.
std::vector<std::uint32_t> cyclic_pattern_counts(Bits bits, std::size_t m) {
  const std::size_t n = bits.size();
  std::vector<std::uint32_t> counts(std::size_t{1} << m, 0);
  const std::uint32_t mask = static_cast<std::uint32_t>((std::size_t{1} << m) - 1);
  std::uint32_t v = 0;
  for (std::size_t j = 0; j + 1 < m; ++j) v = (v << 1) | bits[j % n];
  for (std::size_t i = 0; i < n; ++i) {
    v = ((v << 1) | bits[(i + m - 1) % n]) & mask;
    ++counts[v];
  }
  return counts;
}

double psi_squared(Bits bits, std::size_t m) {
  if (m == 0) return 0.0;
  const double n = static_cast<double>(bits.size());
  double sum = 0.0;
  for (auto c : cyclic_pattern_counts(bits, m)) sum += double(c) * double(c);
  return std::ldexp(sum, static_cast<int>(m)) / n - n;
}

double apen_phi(Bits bits, std::size_t m) {
  if (m == 0) return 0.0;
  const double n = static_cast<double>(bits.size());
  double phi = 0.0;
  for (auto c : cyclic_pattern_counts(bits, m)) {
    if (c > 0) phi += (c / n) * std::log(c / n);
  }
  return phi;
}

// Overlapping windows of m bits, most significant first: w[i] = bits[i..i+m).
std::vector<std::uint32_t> windows(Bits bits, std::size_t m) {
  if (bits.size() < m) return {};
  std::vector<std::uint32_t> w(bits.size() - m + 1);
  const std::uint32_t mask = static_cast<std::uint32_t>((std::size_t{1} << m) - 1);
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    v = ((v << 1) | bits[i]) & mask;
    if (i + 1 >= m) w[i + 1 - m] = v;
  }
  return w;
}

std::uint32_t template_value(const std::vector<std::uint8_t>& tmpl) {
  std::uint32_t v = 0;
  for (auto b : tmpl) v = (v << 1) | (b & 1u);
  return v;
}

// Probability that a random rows x cols GF(2) matrix has rank r.
double rank_probability(std::size_t rows, std::size_t cols, std::size_t r) {
  const double m = static_cast<double>(rows), q = static_cast<double>(cols), rr = static_cast<double>(r);
  double product = 1.0;
  for (std::size_t i = 0; i < r; ++i) {
    const double di = static_cast<double>(i);
    product *= (1.0 - std::pow(2.0, di - q)) * (1.0 - std::pow(2.0, di - m)) / (1.0 - std::pow(2.0, di - rr));
  }
  return std::pow(2.0, rr * (q + m - rr) - m * q) * product;
}

std::size_t gf2_rank(std::vector<std::uint64_t> rows, std::size_t cols) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    const std::uint64_t bit = std::uint64_t{1} << (cols - 1 - c);
    auto pivot = std::find_if(rows.begin() + static_cast<std::ptrdiff_t>(rank), rows.end(),
                              [bit](std::uint64_t r) { return (r & bit) != 0; });
    if (pivot == rows.end()) continue;
    std::swap(rows[rank], *pivot);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i != rank && (rows[i] & bit)) rows[i] ^= rows[rank];
    }
    ++rank;
  }
  return rank;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

double igamc(double a, double x) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(a, x);
}

double frequency(Bits bits) {
  need(!bits.empty(), "frequency: empty sequence");
  long long s = 0;
  for (auto b : bits) s += b ? 1 : -1;
  const double s_obs = std::abs(static_cast<double>(s)) / std::sqrt(static_cast<double>(bits.size()));
  return std::erfc(s_obs / std::numbers::sqrt2);
}

double block_frequency(Bits bits, std::size_t block_len) {
  need(block_len > 0 && bits.size() >= block_len, "block_frequency: sequence shorter than one block");
  const std::size_t n_blocks = bits.size() / block_len;
  double sum = 0.0;
  for (std::size_t j = 0; j < n_blocks; ++j) {
    std::size_t ones = 0;
    for (std::size_t k = 0; k < block_len; ++k) ones += bits[j * block_len + k];
    const double pi = static_cast<double>(ones) / static_cast<double>(block_len) - 0.5;
    sum += pi * pi;
  }
  const double chi2 = 4.0 * static_cast<double>(block_len) * sum;
  return igamc(n_blocks / 2.0, chi2 / 2.0);
}

double cumulative_sums(Bits bits, bool reverse) {
  need(!bits.empty(), "cumulative_sums: empty sequence");
  const long long n = static_cast<long long>(bits.size());
  long long s = 0, z = 0;
  for (long long i = 0; i < n; ++i) {
    const auto b = bits[static_cast<std::size_t>(reverse ? n - 1 - i : i)];
    s += b ? 1 : -1;
    z = std::max(z, std::llabs(s));
  }
  // Integer division truncating toward zero, as in the reference implementation.
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  double sum1 = 0.0;
  for (long long k = (-n / z + 1) / 4; k <= (n / z - 1) / 4; ++k) {
    sum1 += normal_cdf(static_cast<double>((4 * k + 1) * z) / sqrt_n);
    sum1 -= normal_cdf(static_cast<double>((4 * k - 1) * z) / sqrt_n);
  }
  double sum2 = 0.0;
  for (long long k = (-n / z - 3) / 4; k <= (n / z - 1) / 4; ++k) {
    sum2 += normal_cdf(static_cast<double>((4 * k + 3) * z) / sqrt_n);
    sum2 -= normal_cdf(static_cast<double>((4 * k + 1) * z) / sqrt_n);
  }
  return std::clamp(1.0 - sum1 + sum2, 0.0, 1.0);
}

double runs(Bits bits) {
  need(bits.size() >= 2, "runs: need at least 2 bits");
  const double n = static_cast<double>(bits.size());
  std::size_t ones = 0;
  for (auto b : bits) ones += b;
  const double pi = ones / n;
  if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) return 0.0;
  std::size_t v = 1;
  for (std::size_t k = 0; k + 1 < bits.size(); ++k) v += bits[k] != bits[k + 1];
  const double num = std::abs(static_cast<double>(v) - 2.0 * n * pi * (1.0 - pi));
  return std::erfc(num / (2.0 * std::sqrt(2.0 * n) * pi * (1.0 - pi)));
}

double longest_run(Bits bits) {
  const std::size_t n = bits.size();
  need(n >= 128, "longest_run: need at least 128 bits");
  std::size_t m;
  std::size_t v_lo;
  std::vector<double> pi;
  if (n < 6272) {
    m = 8;
    v_lo = 1;
    pi = {0.21484375, 0.3671875, 0.23046875, 0.1875};
  } else if (n < 750000) {
    m = 128;
    v_lo = 4;
    pi = {0.1174035788, 0.242955959, 0.249363483, 0.17517706, 0.102701071, 0.112398847};
  } else {
    m = 10000;
    v_lo = 10;
    pi = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727};
  }
  const std::size_t k = pi.size() - 1;
  const std::size_t n_blocks = n / m;
  std::vector<std::size_t> nu(pi.size(), 0);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    std::size_t run = 0, longest = 0;
    for (std::size_t j = 0; j < m; ++j) {
      run = bits[b * m + j] ? run + 1 : 0;
      longest = std::max(longest, run);
    }
    const std::size_t cls = longest <= v_lo ? 0 : std::min(longest - v_lo, k);
    ++nu[cls];
  }
  return igamc(k / 2.0, chi_square(nu, pi, static_cast<double>(n_blocks)) / 2.0);
}

double rank(Bits bits, std::size_t rows, std::size_t cols) {
  need(rows >= 1 && cols >= 1 && cols <= 64, "rank: matrix shape must be within 1..64 columns");
  const std::size_t block = rows * cols;
  const std::size_t n_blocks = bits.size() / block;
  need(n_blocks >= 1, "rank: sequence shorter than one matrix");
  const std::size_t full = std::min(rows, cols);
  // Class probabilities are the 32 x 32 values for every shape, as in the reference.
  static const double p_full = rank_probability(32, 32, 32);
  static const double p_minus = rank_probability(32, 32, 31);
  static const double p_rest = 1.0 - p_full - p_minus;

  std::array<std::size_t, 3> f{0, 0, 0};
  std::vector<std::uint64_t> matrix(rows);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    for (std::size_t r = 0; r < rows; ++r) {
      std::uint64_t row = 0;
      for (std::size_t c = 0; c < cols; ++c) row = (row << 1) | bits[b * block + r * cols + c];
      matrix[r] = row;
    }
    const std::size_t rk = gf2_rank(matrix, cols);
    ++f[rk == full ? 0 : (rk + 1 == full ? 1 : 2)];
  }
  const double nb = static_cast<double>(n_blocks);
  double chi2 = (f[0] - p_full * nb) * (f[0] - p_full * nb) / (p_full * nb) +
                (f[1] - p_minus * nb) * (f[1] - p_minus * nb) / (p_minus * nb);
  chi2 += (f[2] - p_rest * nb) * (f[2] - p_rest * nb) / (p_rest * nb);
  return std::exp(-chi2 / 2.0);
}

double spectral(Bits bits) {
  const std::size_t n = bits.size();
  need(n >= 2, "spectral: need at least 2 bits");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = bits[i] ? 1.0 : -1.0;
  auto* out = fftw_alloc_complex(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), x.data(), out, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  const double threshold = std::sqrt(std::log(1.0 / 0.05) * static_cast<double>(n));
  std::size_t below = 0;
  for (std::size_t k = 0; k < n / 2; ++k) {
    if (std::hypot(out[k][0], out[k][1]) < threshold) ++below;
  }
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(out);
  const double n0 = 0.95 * static_cast<double>(n) / 2.0;
  const double d = (static_cast<double>(below) - n0) / std::sqrt(static_cast<double>(n) * 0.95 * 0.05 / 4.0);
  return std::erfc(std::abs(d) / std::numbers::sqrt2);
}

std::vector<std::vector<std::uint8_t>> aperiodic_templates(std::size_t m) {
  need(m >= 1 && m <= 20, "aperiodic_templates: m must lie in 1..20");
  std::vector<std::vector<std::uint8_t>> out;
  std::vector<std::uint8_t> t(m);
  for (std::uint32_t v = 0; v < (1u << m); ++v) {
    for (std::size_t i = 0; i < m; ++i) t[i] = (v >> (m - 1 - i)) & 1u;
    bool bordered = false;
    for (std::size_t shift = 1; shift < m && !bordered; ++shift) {
      bordered = std::equal(t.begin(), t.end() - static_cast<std::ptrdiff_t>(shift),
                            t.begin() + static_cast<std::ptrdiff_t>(shift));
    }
    if (!bordered) out.push_back(t);
  }
  return out;
}

namespace {

double non_overlapping_from_windows(const std::vector<std::uint32_t>& win, std::size_t n, std::size_t m,
                                    std::uint32_t target, std::size_t n_blocks) {
  const std::size_t block_len = n / n_blocks;
  const double mu = static_cast<double>(block_len - m + 1) / std::ldexp(1.0, static_cast<int>(m));
  const double var = static_cast<double>(block_len) *
                     (1.0 / std::ldexp(1.0, static_cast<int>(m)) -
                      (2.0 * static_cast<double>(m) - 1.0) / std::ldexp(1.0, static_cast<int>(2 * m)));
  double chi2 = 0.0;
  for (std::size_t j = 0; j < n_blocks; ++j) {
    const std::size_t base = j * block_len;
    std::size_t w = 0;
    for (std::size_t i = 0; i + m <= block_len;) {
      if (win[base + i] == target) {
        ++w;
        i += m;
      } else {
        ++i;
      }
    }
    chi2 += (static_cast<double>(w) - mu) * (static_cast<double>(w) - mu) / var;
  }
  return igamc(n_blocks / 2.0, chi2 / 2.0);
}

}  // namespace

double non_overlapping_template(Bits bits, const std::vector<std::uint8_t>& tmpl, std::size_t n_blocks) {
  const std::size_t m = tmpl.size();
  need(m >= 1 && m <= 20 && n_blocks >= 1, "non_overlapping_template: bad template or block count");
  need(bits.size() / n_blocks >= m, "non_overlapping_template: blocks shorter than the template");
  return non_overlapping_from_windows(windows(bits, m), bits.size(), m, template_value(tmpl), n_blocks);
}

std::vector<double> overlapping_default_pi() {
  return {0.364091, 0.185659, 0.139381, 0.100571, 0.070432, 0.139865};
}

double overlapping_template(Bits bits, std::size_t m, std::size_t block_len, const std::vector<double>& pi) {
  need(m >= 1 && block_len >= m && pi.size() >= 2, "overlapping_template: bad parameters");
  const std::size_t n_blocks = bits.size() / block_len;
  need(n_blocks >= 1, "overlapping_template: sequence shorter than one block");
  const std::size_t k = pi.size() - 1;
  std::vector<std::size_t> nu(pi.size(), 0);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    std::size_t count = 0, run = 0;
    for (std::size_t j = 0; j < block_len; ++j) {
      run = bits[b * block_len + j] ? run + 1 : 0;
      if (run >= m) ++count;  // every window of m ones ending here
    }
    ++nu[std::min(count, k)];
  }
  return igamc(k / 2.0, chi_square(nu, pi, static_cast<double>(n_blocks)) / 2.0);
}

double approximate_entropy(Bits bits, std::size_t m) {
  need(m >= 1 && m <= 24 && bits.size() >= 1, "approximate_entropy: bad block length");
  const double n = static_cast<double>(bits.size());
  const double apen = apen_phi(bits, m) - apen_phi(bits, m + 1);
  const double chi2 = 2.0 * n * (std::numbers::ln2 - apen);
  return igamc(std::ldexp(1.0, static_cast<int>(m) - 1), chi2 / 2.0);
}

std::pair<double, double> serial(Bits bits, std::size_t m) {
  need(m >= 2 && m <= 24 && !bits.empty(), "serial: block length must lie in 2..24");
  const double psi_m = psi_squared(bits, m);
  const double psi_m1 = psi_squared(bits, m - 1);
  const double psi_m2 = psi_squared(bits, m - 2);
  const double del1 = psi_m - psi_m1;
  const double del2 = psi_m - 2.0 * psi_m1 + psi_m2;
  return {igamc(std::ldexp(1.0, static_cast<int>(m) - 2), del1 / 2.0),
          igamc(std::ldexp(1.0, static_cast<int>(m) - 3), del2 / 2.0)};
}

std::size_t serial_block_len(std::size_t n) {
  if (n < 2) return 0;
  const auto log2n = static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(n))));
  return log2n < 3 ? 0 : std::min<std::size_t>(16, log2n - 3);
}

std::size_t berlekamp_massey(Bits s) {
  const std::size_t n = s.size();
  std::vector<std::uint8_t> c(n + 1, 0), b(n + 1, 0), t;
  c[0] = b[0] = 1;
  std::size_t l = 0;
  long long m = -1;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint8_t d = s[i];
    for (std::size_t j = 1; j <= l; ++j) d ^= c[j] & s[i - j];
    if (!d) continue;
    t = c;
    const std::size_t shift = static_cast<std::size_t>(static_cast<long long>(i) - m);
    for (std::size_t j = 0; j + shift <= n; ++j) c[j + shift] ^= b[j];
    if (2 * l <= i) {
      l = i + 1 - l;
      m = static_cast<long long>(i);
      b = t;
    }
  }
  return l;
}

double linear_complexity(Bits bits, std::size_t block_len) {
  need(block_len >= 1, "linear_complexity: block length must be positive");
  const std::size_t n_blocks = bits.size() / block_len;
  need(n_blocks >= 1, "linear_complexity: sequence shorter than one block");
  const double mm = static_cast<double>(block_len);
  const double odd_next = (block_len + 1) % 2 == 0 ? 1.0 : -1.0;  // (-1)^(M+1)
  const double mu = mm / 2.0 + (9.0 + odd_next) / 36.0 - (mm / 3.0 + 2.0 / 9.0) / std::pow(2.0, mm);
  const double sign = block_len % 2 == 0 ? 1.0 : -1.0;  // (-1)^M
  static const std::vector<double> pi{0.01047, 0.03125, 0.125, 0.5, 0.25, 0.0625, 0.020833};
  std::vector<std::size_t> nu(7, 0);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    const double l = static_cast<double>(berlekamp_massey(bits.subspan(b * block_len, block_len)));
    const double t = sign * (l - mu) + 2.0 / 9.0;
    std::size_t cls;
    if (t <= -2.5) cls = 0;
    else if (t <= -1.5) cls = 1;
    else if (t <= -0.5) cls = 2;
    else if (t <= 0.5) cls = 3;
    else if (t <= 1.5) cls = 4;
    else if (t <= 2.5) cls = 5;
    else cls = 6;
    ++nu[cls];
  }
  return igamc(3.0, chi_square(nu, pi, static_cast<double>(n_blocks)) / 2.0);
}

double uniformity_p_value(std::span<const double> p_values) {
  need(!p_values.empty(), "uniformity_p_value: no p-values");
  std::array<double, 10> bins{};
  for (double p : p_values) {
    const auto idx = std::min<std::size_t>(9, static_cast<std::size_t>(std::max(0.0, p) * 10.0));
    bins[idx] += 1.0;
  }
  const double expected = static_cast<double>(p_values.size()) / 10.0;
  double chi2 = 0.0;
  for (double f : bins) chi2 += (f - expected) * (f - expected) / expected;
  return igamc(4.5, chi2 / 2.0);
}

}  // namespace rhstrng::nist
