#pragma once

#include <stdexcept>
#include <vector>

namespace healfem {

/// One point of a reference-triangle rule, in barycentric coordinates.
/// Weights sum to the reference-triangle area 1/2.
struct QuadPoint {
    double l0, l1, l2; // barycentric coordinates
    double w;
};

/// Symmetric Gauss rules on the unit triangle {l1 >= 0, l2 >= 0, l1 + l2 <= 1},
/// exact for polynomials up to the requested total degree. Supported degrees
/// are 2..6; a request is served by the smallest tabulated rule that is exact
/// for it (all rules have positive weights).
inline std::vector<QuadPoint> quadrature_rule(int degree) {
    if (degree < 2 || degree > 6)
        throw std::invalid_argument("quadrature_rule: degree must be in 2..6");

    auto perm3 = [](std::vector<QuadPoint>& pts, double a, double b, double w) {
        pts.push_back({a, b, b, w});
        pts.push_back({b, a, b, w});
        pts.push_back({b, b, a, w});
    };
    auto perm6 = [](std::vector<QuadPoint>& pts, double a, double b, double c, double w) {
        pts.push_back({a, b, c, w});
        pts.push_back({a, c, b, w});
        pts.push_back({b, a, c, w});
        pts.push_back({b, c, a, w});
        pts.push_back({c, a, b, w});
        pts.push_back({c, b, a, w});
    };

    std::vector<QuadPoint> pts;
    const double half = 0.5; // reference area factor: tabulated weights sum to 1
    if (degree == 2) {
        perm3(pts, 2.0 / 3.0, 1.0 / 6.0, half / 3.0);
    } else if (degree <= 4) {
        // Dunavant degree 4, 6 points
        perm3(pts, 0.108103018168070, 0.445948490915965, half * 0.223381589678011);
        perm3(pts, 0.816847572980459, 0.091576213509771, half * 0.109951743655322);
    } else if (degree == 5) {
        pts.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, half * 0.225});
        perm3(pts, 0.059715871789770, 0.470142064105115, half * 0.132394152788506);
        perm3(pts, 0.797426985353087, 0.101286507323456, half * 0.125939180544827);
    } else {
        // Dunavant degree 6, 12 points
        perm3(pts, 0.501426509658179, 0.249286745170910, half * 0.116786275726379);
        perm3(pts, 0.873821971016996, 0.063089014491502, half * 0.050844906370207);
        perm6(pts, 0.053145049844816, 0.310352451033785, 0.636502499121399,
              half * 0.082851075618374);
    }
    return pts;
}

} // namespace healfem
