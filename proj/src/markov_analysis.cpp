#include "rhstrng/markov_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rhstrng {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void FlipProbs::validate() const {
  if (!is_probability(p1) || !is_probability(p2)) {
    throw std::domain_error("flip probabilities must lie in [0, 1]");
  }
}

SteadyState steady_state(const FlipProbs& fp) {
  fp.validate();
  const double total = fp.p1 + fp.p2;
  if (total <= 0.0) {
    throw std::domain_error("p1 = p2 = 0: chain has no unique stationary distribution");
  }
  SteadyState ss;
  ss.p_ap = fp.p1 / total;
  ss.p_p = fp.p2 / total;
  ss.p_out_1 = ss.p_ap;
  ss.p_out_0 = ss.p_p;
  return ss;
}

double xor_output_prob(double p_a, double p_b) {
  if (!is_probability(p_a) || !is_probability(p_b)) {
    throw std::domain_error("xor_output_prob: inputs must lie in [0, 1]");
  }
  return p_a * (1.0 - p_b) + p_b * (1.0 - p_a);
}

double lag1_autocorrelation(const FlipProbs& fp) {
  fp.validate();
  if (fp.p1 + fp.p2 <= 0.0) {
    throw std::domain_error("lag1_autocorrelation: p1 + p2 must be positive");
  }
  return 1.0 - fp.p1 - fp.p2;
}

double binary_shannon(double p) {
  auto term = [](double q) { return q > 0.0 ? -q * std::log2(q) : 0.0; };
  return std::clamp(term(p) + term(1.0 - p), 0.0, 1.0);
}

double binary_min_entropy(double p) {
  return std::clamp(-std::log2(std::max(p, 1.0 - p)), 0.0, 1.0) + 0.0;  // no -0
}

PredictedEntropy predicted_entropy(const FlipProbs& fp, bool xor_of_two) {
  double p = steady_state(fp).p_out_1;
  if (xor_of_two) p = xor_output_prob(p, p);
  return {p, binary_shannon(p), binary_min_entropy(p)};
}

}  // namespace rhstrng
