#pragma once

// Closed-form analysis of the two-state chain driven by bidirectional
// write pulses. These are the analytic predictions the simulator is
// checked against.

namespace rhstrng {

/// Per-cycle flip probabilities of a read-then-invert-write unit.
struct FlipProbs {
  double p1 = 0.5;  ///< P -> AP switching probability
  double p2 = 0.5;  ///< AP -> P switching probability

  void validate() const;
};

struct SteadyState {
  double p_ap = 0.5;
  double p_p = 0.5;
  double p_out_1 = 0.5;
  double p_out_0 = 0.5;
};

struct PredictedEntropy {
  double p_one = 0.5;  ///< marginal probability of emitting 1
  double shannon = 1.0;
  double min_entropy = 1.0;
};

/// Stationary distribution: p_out_1 = p1 / (p1 + p2).
/// Throws std::domain_error when p1 = p2 = 0 (both states absorbing).
SteadyState steady_state(const FlipProbs& fp);

/// Probability that the XOR of two independent bits is 1.
double xor_output_prob(double p_a, double p_b);

/// Lag-1 autocorrelation of the state sequence, 1 - p1 - p2.
/// Lag k is this value raised to the k-th power.
double lag1_autocorrelation(const FlipProbs& fp);

/// Binary Shannon entropy of a Bernoulli(p) source, 0 log 0 = 0.
double binary_shannon(double p);

/// Binary min-entropy, -log2 max(p, 1 - p).
double binary_min_entropy(double p);

/// Marginal entropies of a unit output, or of the XOR of two identical
/// independent units when `xor_of_two` is set. Serial correlation is ignored.
PredictedEntropy predicted_entropy(const FlipProbs& fp, bool xor_of_two);

}  // namespace rhstrng
