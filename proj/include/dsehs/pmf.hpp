#pragma once

#include <stdexcept>
#include <vector>

namespace dsehs {

// Probability mass function over consecutive integers [offset, offset + size - 1].
struct Pmf {
  int offset = 0;
  std::vector<double> probs;

  int min_value() const { return offset; }
  int max_value() const { return offset + static_cast<int>(probs.size()) - 1; }

  double prob_of(int v) const {
    const int i = v - offset;
    if (i < 0 || i >= static_cast<int>(probs.size())) return 0.0;
    return probs[static_cast<std::size_t>(i)];
  }

  double mass() const {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
  }

  double mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) m += (offset + static_cast<int>(i)) * probs[i];
    return m;
  }

  void validate(double tol = 1e-12) const {
    if (probs.empty()) throw std::invalid_argument("pmf: empty support");
    for (double p : probs)
      if (p < 0.0) throw std::invalid_argument("pmf: negative probability");
    const double s = mass();
    if (s < 1.0 - tol || s > 1.0 + tol) throw std::invalid_argument("pmf: mass not 1");
  }

  static Pmf point(int v) { return Pmf{v, {1.0}}; }

  static Pmf bernoulli(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("bernoulli: p outside [0,1]");
    return Pmf{0, {1.0 - p, p}};
  }
};

}  // namespace dsehs
