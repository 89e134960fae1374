#pragma once

#include <vector>

#include "akvf/types.hpp"

namespace akvf {

// Quadrature rule on the reference triangle {(x,y) : x,y >= 0, x+y <= 1}.
// Weights sum to the reference area 1/2.
struct QuadratureRule {
    int order = 0; // polynomial degree integrated exactly
    std::vector<Vec2> points;
    std::vector<double> weights;

    int size() const { return static_cast<int>(points.size()); }

    void add_centroid(double w);
    // Barycentric orbit (a, a, 1-2a), all 3 permutations, weight w each.
    void add_orbit3(double a, double w);
    // Barycentric orbit (a, b, 1-a-b), all 6 permutations, weight w each.
    void add_orbit6(double a, double b, double w);
};

// Symmetric rules with polynomial exactness 1..10.
QuadratureRule triangle_rule(int order);

int max_quadrature_order();

} // namespace akvf
