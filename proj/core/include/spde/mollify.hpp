#pragma once

#include "spde/lattice.hpp"

namespace spde {

/// Sampled smoothing kernel zeta_eps(x) = eps^-d * zeta(x/eps) where zeta is
/// the standard bump exp(-1/(1-|y|^2)) on |y| < 1.  The sampled weights are
/// renormalized so that sum(weights) * h^dim == 1, which makes the L_p
/// contraction and mass-conservation properties of convolution exact rather
/// than O(h).
struct MollifierKernel {
  GridSpec grid;
  double eps;
  ScalarField weights;  // full-grid copy of the sampled kernel, 0 outside support

  struct SupportPoint {
    std::array<int, 3> offset;  // lattice offset from the origin, per axis
    double w;
  };
  std::vector<SupportPoint> support;
};

/// Builds the kernel.  Requires 2h <= eps < len/4 so the kernel spans at
/// least two cells and stays well inside one period.
MollifierKernel make_kernel(const GridSpec& grid, double eps);

/// Periodic discrete convolution u * weights (times h^dim).
ScalarField mollify(const ScalarField& u, const MollifierKernel& k);

/// Mode-wise mollification of a stack.
SeqField mollify_seq(const SeqField& g, const MollifierKernel& k);

VectorField mollify_vec(const VectorField& F, const MollifierKernel& k);

}  // namespace spde
