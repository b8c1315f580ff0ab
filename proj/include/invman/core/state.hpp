#pragma once

#include <initializer_list>

#include "invman/core/linalg.hpp"

namespace invman {

/// Finite state vector; construction rejects NaN and Inf.
class StateVector {
 public:
  explicit StateVector(Vec coords);
  StateVector(std::initializer_list<double> values);

  const Vec& coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  double operator[](int i) const { return coords_(i); }

 private:
  Vec coords_;
};

}  // namespace invman
