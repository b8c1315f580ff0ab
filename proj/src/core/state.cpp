#include "invman/core/state.hpp"

#include "invman/core/errors.hpp"

namespace invman {

StateVector::StateVector(Vec coords) : coords_(std::move(coords)) {
  if (!coords_.allFinite()) throw InvalidArgument("state vector has non-finite entries");
}

StateVector::StateVector(std::initializer_list<double> values) : coords_(values.size()) {
  int i = 0;
  for (double v : values) coords_(i++) = v;
  if (!coords_.allFinite()) throw InvalidArgument("state vector has non-finite entries");
}

}  // namespace invman
