#pragma once

#include <vector>

namespace bouss {

struct QuadPoint1D {
    double x;
    double w;
};

// Gauss-Legendre rule on [-1, 1], exact for polynomials of degree 2n-1.
std::vector<QuadPoint1D> gauss_legendre(int n);

// Same rule mapped to [0, 1].
std::vector<QuadPoint1D> gauss_legendre_unit(int n);

struct TriQuadPoint {
    double xi;
    double eta;
    double w;  // weights sum to 1/2 (reference triangle area)
};

// Tensor Gauss rule on the reference triangle {xi,eta >= 0, xi+eta <= 1}
// via the collapsed-square map (xi, eta) = (a(1-b), b). Exact for total
// degree <= 2n-2.
std::vector<TriQuadPoint> triangle_rule(int n);

// The same rule applied on each of the 4 congruent children of the
// reference triangle. Used as an independent cross-check rule: different
// points, higher resolution.
std::vector<TriQuadPoint> triangle_rule_refined(int n);

}  // namespace bouss
