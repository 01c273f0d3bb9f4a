#pragma once

#include "elastica/manifold.hpp"

namespace elastica {

/// Clamped data: endpoints, unit end tangents and the prescribed length.
struct BoundaryConditions {
  VecX x1;
  VecX x2;
  VecX v1;
  VecX v2;
  double L = 0.0;

  /// Throws InvalidArgument naming the violated constraint.
  void validate(const Manifold& model) const;
};

}  // namespace elastica
