#pragma once

#include <array>

namespace tnav::oracle {

// Eigen-decomposition of a symmetric 3x3 matrix by cyclic Jacobi rotations.
// Hand-written reference, independent of any linear-algebra library.
// Eigenvalues ascending; vectors[i] is the unit eigenvector of values[i].
struct Eig3 {
  std::array<double, 3> values{};
  std::array<std::array<double, 3>, 3> vectors{};
};

Eig3 jacobi_eig3(const std::array<std::array<double, 3>, 3>& m);

}  // namespace tnav::oracle
