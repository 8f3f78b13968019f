#pragma once

#include <span>
#include <vector>

#include "rbml/common.hpp"

namespace rbml {

// Anything that maps a feature vector to a class-probability vector.
// Implementations are immutable once fitted; predictions are pure.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::size_t n_features() const = 0;
  virtual std::size_t n_classes() const = 0;

  // Writes K probabilities (non-negative, summing to 1) into out.
  virtual void predict_proba_into(std::span<const double> x,
                                  std::span<double> out) const = 0;

  std::vector<double> predict_proba(std::span<const double> x) const {
    check_input(x);
    std::vector<double> p(n_classes(), 0.0);
    predict_proba_into(x, p);
    return p;
  }

  // argmax with lowest-index tie-break.
  std::size_t predict(std::span<const double> x) const {
    auto p = predict_proba(x);
    return argmax(p);
  }

 protected:
  void check_input(std::span<const double> x) const {
    if (x.size() != n_features())
      throw data_error("input has dimension " + std::to_string(x.size()) +
                       ", model expects " + std::to_string(n_features()));
  }
};

}  // namespace rbml
