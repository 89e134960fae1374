#include "akvf/quadrature.hpp"

#include <stdexcept>
#include <string>

namespace akvf {

void QuadratureRule::add_centroid(double w) {
    points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
    weights.push_back(w);
}

void QuadratureRule::add_orbit3(double a, double w) {
    const double c = 1.0 - 2.0 * a;
    // barycentric (l0,l1,l2) maps to reference coords (l1,l2)
    points.emplace_back(a, c);
    points.emplace_back(c, a);
    points.emplace_back(a, a);
    for (int i = 0; i < 3; ++i) weights.push_back(w);
}

void QuadratureRule::add_orbit6(double a, double b, double w) {
    const double c = 1.0 - a - b;
    points.emplace_back(b, c);
    points.emplace_back(c, b);
    points.emplace_back(a, c);
    points.emplace_back(c, a);
    points.emplace_back(a, b);
    points.emplace_back(b, a);
    for (int i = 0; i < 6; ++i) weights.push_back(w);
}

int max_quadrature_order() { return 10; }

// Symmetric Gauss rules for the triangle (Dunavant family), degrees 1-10.
// Orbit parameters refined so that all monomial moments up to the stated
// degree are exact to full double precision.
QuadratureRule triangle_rule(int order) {
    if (order < 1 || order > max_quadrature_order())
        throw std::invalid_argument("triangle_rule: order must be in [1, " +
                                    std::to_string(max_quadrature_order()) + "], got " +
                                    std::to_string(order));
    QuadratureRule r;
    r.order = order;
    switch (order) {
        case 1:
            r.add_centroid(0.50000000000000000);
            break;
        case 2:
            r.add_orbit3(0.16666666666666667, 0.16666666666666667);
            break;
        case 3:
            r.add_centroid(-0.28125000000000000);
            r.add_orbit3(0.20000000000000000, 0.26041666666666667);
            break;
        case 4:
            r.add_orbit3(0.44594849091596489, 0.11169079483900573);
            r.add_orbit3(0.091576213509770743, 0.054975871827660934);
            break;
        case 5:
            r.add_centroid(0.11250000000000000);
            r.add_orbit3(0.47014206410511509, 0.066197076394253091);
            r.add_orbit3(0.10128650732345634, 0.062969590272413576);
            break;
        case 6:
            r.add_orbit3(0.24928674517091042, 0.058393137863189683);
            r.add_orbit3(0.063089014491502228, 0.025422453185103408);
            r.add_orbit6(0.31035245103378441, 0.63650249912139865, 0.041425537809186788);
            break;
        case 7:
            r.add_centroid(-0.074785022233840875);
            r.add_orbit3(0.26034596607903983, 0.087807628716603906);
            r.add_orbit3(0.065130102902215812, 0.026673617804419246);
            r.add_orbit6(0.31286549600487386, 0.63844418856980973, 0.038556880445128570);
            break;
        case 8:
            r.add_centroid(0.072157803838893584);
            r.add_orbit3(0.17056930775176021, 0.051608685267359125);
            r.add_orbit3(0.050547228317030975, 0.016229248811599040);
            r.add_orbit3(0.45929258829272316, 0.047545817133642312);
            r.add_orbit6(0.26311282963463811, 0.72849239295540428, 0.013615157087217497);
            break;
        case 9:
            r.add_centroid(0.048567898141399417);
            r.add_orbit3(0.48968251919873763, 0.015667350113569535);
            r.add_orbit3(0.43708959149293664, 0.038913770502387140);
            r.add_orbit3(0.18820353561903273, 0.039823869463605127);
            r.add_orbit3(0.044729513394452710, 0.012788837829349016);
            r.add_orbit6(0.22196298916076570, 0.74119859878449802, 0.021641769688644689);
            break;
        case 10:
            r.add_centroid(0.045408995191376790);
            r.add_orbit3(0.48557763338365738, 0.018362978878233352);
            r.add_orbit3(0.10948157548503705, 0.022660529717763967);
            r.add_orbit6(0.14170721941487995, 0.30793983876412095, 0.036378958422710054);
            r.add_orbit6(0.025003534762686386, 0.24667256063990269, 0.014163621265528742);
            r.add_orbit6(0.0095408154002994576, 0.066803251012200266, 0.0047108334818664117);
            break;
    }
    return r;
}

} // namespace akvf
