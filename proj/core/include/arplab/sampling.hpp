#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arplab/markov.hpp"

namespace arplab {

// A next-token distribution over n+1 outcomes; the last index is EOS.
using Dist = std::vector<double>;

enum class TransformKind {
  Stochastic,
  Greedy,
  TopK,
  Nucleus,
  Temperature,
  LengthPenalty,
};

struct Transform {
  TransformKind kind = TransformKind::Stochastic;
  double param = 0.0;  // k for top-k, p for nucleus, t for temperature, beta for lp
};

// An ordered chain of transforms, applied left to right.
struct TransformSpec {
  std::vector<Transform> chain;

  static TransformSpec stochastic() { return {{{TransformKind::Stochastic, 0.0}}}; }
  static TransformSpec greedy() { return {{{TransformKind::Greedy, 0.0}}}; }
  static TransformSpec topk(std::size_t k) {
    return {{{TransformKind::TopK, static_cast<double>(k)}}};
  }
  static TransformSpec nucleus(double p) { return {{{TransformKind::Nucleus, p}}}; }
  static TransformSpec temperature(double t) { return {{{TransformKind::Temperature, t}}}; }
  static TransformSpec length_penalty(double beta) {
    return {{{TransformKind::LengthPenalty, beta}}};
  }

  TransformSpec then(const TransformSpec& next) const;

  // Grammar: kind[:param] joined by "+", e.g. "topk:10+temp:0.9".
  // Kinds: stochastic, greedy, topk, nucleus, temp, lp.
  static TransformSpec parse(const std::string& text);
  std::string to_string() const;

  void validate() const;
};

// Applies the chain to one distribution. Throws InvalidDistribution for
// malformed input and DegenerateSupport if all mass is removed.
Dist apply_transform(const Dist& d, const TransformSpec& spec);

// Applies the chain to every row [B_i, b_i] of the model and recomputes the
// sparsity on the transformed B. Raw counts are carried over unchanged.
TransitionModel transform_model(const TransitionModel& model, const TransformSpec& spec);

// Samples a sequence from the (transformed) chain: starts at `start`, draws
// each successor by inverse CDF over ascending token ids (EOS last), stops at
// EOS or max_len. Fully reproducible from the seed.
std::vector<std::string> generate(const TransitionModel& model, const TransformSpec& spec,
                                  const std::string& start, std::size_t max_len,
                                  std::uint64_t seed);

}  // namespace arplab
