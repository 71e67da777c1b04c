#pragma once

#include "wcur/grid.hpp"

namespace wcur {

/// Accuracy of the centered stencils used for every derivative taken on
/// gridded fields (anything past the 2-jet of the immersion).
enum class DiffOrder { second = 2, fourth = 4 };

/// Node layers consumed by one stencil application.
inline int stencil_reach(DiffOrder o) { return o == DiffOrder::fourth ? 2 : 1; }

/// Centered first partial along axis a. Output margin = input margin + reach.
Field partial(const Field& f, int axis, DiffOrder order);

/// Centered second partial along axis a.
Field partial2(const Field& f, int axis, DiffOrder order);

/// Centered mixed partial d_u d_v (tensor-product stencil, same reach).
Field partial_mixed(const Field& f, DiffOrder order);

/// Derivatives defined on the whole grid: 4th-order centered in the interior
/// (and everywhere on periodic axes), 2nd-order at the two outermost layers
/// of non-periodic axes. Used to build jets from sampled values.
struct NodalJets {
  FieldPair d1;
  std::array<Field, 3> d2;  // uu, uv, vv
};
NodalJets finite_difference_jets(const Field& f);

}  // namespace wcur
