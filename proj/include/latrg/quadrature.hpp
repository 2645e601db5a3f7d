#pragma once

#include <vector>

namespace latrg {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre on [-1, 1], weight 1. Golub-Welsch via a symmetric
// tridiagonal eigensolve; nodes ascending.
QuadratureRule gauss_legendre(int order);

// Gauss-Hermite with weight exp(-x^2) (physicists' convention).
QuadratureRule gauss_hermite(int order);

}  // namespace latrg
