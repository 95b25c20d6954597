// Scratch probe used during development; not installed.
#include <cstdio>
#include <numbers>

#include "clm/rtclm.hpp"

using namespace clm;

int main() {
    std::vector<double> x{40.2, 106.1, 75.8, 99.0, 36.5, 26.5, 90.9,
                          98.7, 155.3, 128.8, 87.1, 102.3, 113.6};
    const auto ev = rtclm::evaluate_design(x, {50.0, 220.0});
    std::printf("evaluate: penalized=%d h6=%.2f h4=%.2f f1=%.3f f2=%.3f\n", ev.penalized, ev.h6,
                ev.h4, ev.f1, ev.f2);
    if (!ev.penalized) {
        const auto& d = *ev.design;
        std::printf("phi_A=%.4f phi_H=%.4f dy=%.3f res=%.2e br=(%+d,%+d)\n", d.phi_A, d.phi_H_l,
                    d.dy_EH, d.coupling_residual, d.branches.dyad1, d.branches.dyad2);
        std::printf("a2=%.2f b2=%.2f DF=%.2f CF=%.2f\n", d.a2, d.b2, d.df_len, d.cf_len);
        for (std::size_t i = 0; i < ev.violations.size(); ++i)
            std::printf("  viol[%zu] = %.3f\n", i, ev.violations[i]);
        std::printf("theta1=%.2f theta2=%.2f psi2=%.2f hbar=%.2f hm=%.2f\n", ev.theta1, ev.theta2,
                    ev.psi2, ev.h_bar, ev.h_m_aux);
    }
    // Small random scan: how often does a random vector evaluate cleanly?
    std::srand(12345);
    int ok = 0, tried = 0;
    const auto& lb = rtclm::lower_bounds();
    const auto& ub = rtclm::upper_bounds();
    for (int k = 0; k < 400; ++k) {
        std::vector<double> g(13);
        for (int i = 0; i < 13; ++i)
            g[i] = lb[i] + (ub[i] - lb[i]) * (std::rand() / (double)RAND_MAX);
        ++tried;
        const auto e = rtclm::evaluate_design(g, {50.0, 220.0});
        if (!e.penalized) {
            ++ok;
            if (ok <= 3)
                std::printf("feasible sample: h6=%.1f h4=%.1f viol_total=%.1f\n", e.h6, e.h4,
                            [&] {
                                double s = 0;
                                for (double v : e.violations) s += v > 0 ? v : 0;
                                return s;
                            }());
        }
    }
    std::printf("random feasibility: %d/%d\n", ok, tried);
    return 0;
}
