// Minimal tour: build a mesh, assemble the step-1 growth-factor system,
// estimate its condition number and compare with the calibrated bound.

#include <iostream>

#include "healfem/conditioning.hpp"

int main() {
    using namespace healfem;
    const Rect domain{{-1.0, -1.0}, {1.0, 1.0}};
    const ModelParams params;

    const ZetaConstants zeta = calibrate_zeta({4, 8, 16}, domain);
    std::cout << "calibrated: zeta1_M=" << zeta.zeta1_M << " zeta2_M=" << zeta.zeta2_M
              << " zeta2_inv=" << zeta.zeta2_inv << "\n";

    for (int n : {4, 8, 16}) {
        const Mesh mesh(n, domain);
        const Stepper stepper(mesh, params);
        const StateFields state = initial_state(mesh, params);
        const auto sys = stepper.build_system_g(state);
        const double k = empirical_condition(sys.A);
        const BoundPair b = bound_g(params, mesh.h(), params.dt, zeta);
        std::cout << "n=" << n << "  h=" << mesh.h() << "  k(A_g)=" << k
                  << "  bound=" << b.corrected << "  literal=" << b.paper_literal << "\n";
    }
    return 0;
}
