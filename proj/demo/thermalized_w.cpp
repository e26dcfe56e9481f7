// Prints the measures of the thermalized W state at a few expansion rates.

#include <cstdio>

#include "horizon/info_measures.hpp"

int main() {
    using namespace horizon;
    std::printf("%6s %4s %10s %10s %10s %10s\n", "gamma", "N", "F_e", "I(A:B)", "I(A:B:C)", "N(rho)");
    for (double g : {0.0, 0.25, 0.5, 0.75, 1.0, 1.5}) {
        const auto p = ChannelParams::automatic(g);
        const auto sys = thermalize(StateKind::w, p);
        const auto rho_ab = partial_trace(sys.rho_abc, {party::alice, party::bob});
        const double f = entanglement_fidelity_numeric(embedded_initial(StateKind::w, p), kraus_set(p));
        std::printf("%6.2f %4zu %10.6f %10.6f %10.6f %10.6f\n", g, p.truncation, f,
                    mutual_information(rho_ab, {party::alice}, {party::bob}), tripartite_mi_numeric(sys),
                    negativity(rho_ab));
    }
}
