// entangled_states.hpp
// GHZ and W states shared by Alice, Bob and Charlie, and their thermalized
// versions once Bob's Kruskal mode is re-expanded in light-cone modes.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include "horizon/desitter_channel.hpp"
#include "horizon/fock_algebra.hpp"

namespace horizon {

enum class StateKind { ghz, w };

inline std::string_view to_string(StateKind k) { return k == StateKind::ghz ? "ghz" : "w"; }

inline StateKind parse_state_kind(std::string_view s) {
    if (s == "ghz" || s == "GHZ") return StateKind::ghz;
    if (s == "w" || s == "W") return StateKind::w;
    throw std::invalid_argument("unknown state kind '" + std::string(s) + "' (expected ghz or w)");
}

/// Subsystem positions.
namespace party {
inline constexpr Index alice = 0;
inline constexpr Index bob = 1;
inline constexpr Index charlie = 2;
} // namespace party

/// (|000> + |111>) / sqrt 2 over A, B, C.
inline MultiModeKet ghz_ket() {
    Vector v = Vector::Zero(8);
    v(0b000) = v(0b111) = 1.0 / std::sqrt(2.0);
    return {ModeLayout{2, 2, 2}, std::move(v)};
}

/// (|100> + |010> + |001>) / sqrt 3 over A, B, C.
inline MultiModeKet w_ket() {
    Vector v = Vector::Zero(8);
    v(0b100) = v(0b010) = v(0b001) = 1.0 / std::sqrt(3.0);
    return {ModeLayout{2, 2, 2}, std::move(v)};
}

inline MultiModeKet initial_ket(StateKind k) { return k == StateKind::ghz ? ghz_ket() : w_ket(); }

/// rho_AB = Tr_C |psi><psi| of the initial qubit state.
inline DensityOperator reduced_initial(StateKind k) {
    return partial_trace(initial_ket(k), {party::alice, party::bob});
}

/// Pure state over A(2) B_I(N+1) B_II(N+1) C(2) plus its reduction to A B_I C.
struct ThermalizedSystem {
    StateKind kind;
    ChannelParams params;
    MultiModeKet total_pure;
    DensityOperator rho_abc;
};

/// Subsystem positions inside ThermalizedSystem::total_pure.
namespace purified {
inline constexpr Index alice = 0;
inline constexpr Index bob_region_one = 1;
inline constexpr Index bob_region_two = 2;
inline constexpr Index charlie = 3;
} // namespace purified

/// Replaces Bob's Kruskal qubit |0>, |1> by squeezed_vacuum, squeezed_one in
/// an arbitrary three-qubit ket (A, B, C), then traces region II.
inline ThermalizedSystem thermalize(const MultiModeKet& qubits, StateKind kind, const ChannelParams& p) {
    if (qubits.layout() != ModeLayout{2, 2, 2}) throw std::invalid_argument("thermalize: expected a three-qubit ket");
    if (p.truncation < 1) throw std::invalid_argument("thermalize: truncation must be >= 1");
    const Index d = p.fock_dim();
    const MultiModeKet bob[2] = {squeezed_vacuum(p), squeezed_one(p)};

    const ModeLayout layout{2, d, d, 2};
    Vector amps = Vector::Zero(static_cast<Eigen::Index>(layout.total()));
    for (Index a = 0; a < 2; ++a)
        for (Index b = 0; b < 2; ++b)
            for (Index c = 0; c < 2; ++c) {
                const double alpha = qubits[(a << 2) | (b << 1) | c];
                if (alpha == 0.0) continue;
                const Vector& modes = bob[b].amplitudes();
                for (Index k = 0; k < d * d; ++k) {
                    const double v = modes(static_cast<Eigen::Index>(k));
                    if (v == 0.0) continue;
                    // flat index of |a, k / d, k % d, c>
                    const Index flat = (a * d * d + k) * 2 + c;
                    amps(static_cast<Eigen::Index>(flat)) += alpha * v;
                }
            }
    MultiModeKet total(layout, std::move(amps));
    DensityOperator rho = partial_trace(total, {purified::alice, purified::bob_region_one, purified::charlie});
    return {kind, p, std::move(total), std::move(rho)};
}

inline ThermalizedSystem thermalize(StateKind kind, const ChannelParams& p) { return thermalize(initial_ket(kind), kind, p); }

/// rho'_AB written term by term from the series for the thermalized GHZ
/// and W states, truncated to terms that fit in Fock levels 0..N.
inline DensityOperator final_rho_ab_closed(StateKind kind, const ChannelParams& p) {
    const Index d = p.fock_dim();
    const double t = std::tanh(p.gamma);
    const double x = t * t;
    const double c = std::cosh(p.gamma);
    const double c2 = c * c;
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(2 * d), static_cast<Eigen::Index>(2 * d));
    auto at = [d](Index a, Index n) { return static_cast<Eigen::Index>(a * d + n); };

    double xn = 1.0; // tanh^{2n}
    if (kind == StateKind::ghz) {
        const double pre = 1.0 / (2.0 * c2);
        for (Index n = 0; n < d; ++n) {
            m(at(0, n), at(0, n)) += pre * xn;
            if (n + 1 < d) m(at(1, n + 1), at(1, n + 1)) += pre * xn * static_cast<double>(n + 1) / c2;
            xn *= x;
        }
    } else {
        const double pre = 1.0 / (3.0 * c2);
        for (Index n = 0; n < d; ++n) {
            m(at(1, n), at(1, n)) += pre * xn;
            m(at(0, n), at(0, n)) += pre * xn;
            if (n + 1 < d) {
                const auto np1 = static_cast<double>(n + 1);
                m(at(0, n + 1), at(0, n + 1)) += pre * xn * np1 / c2;
                const double cross = pre * xn * std::sqrt(np1) / c;
                m(at(1, n), at(0, n + 1)) += cross;
                m(at(0, n + 1), at(1, n)) += cross;
            }
            xn *= x;
        }
    }
    return {ModeLayout{2, d}, std::move(m)};
}

/// reduced_initial(kind) with Bob's qubit placed in Fock levels |0>, |1>.
inline DensityOperator embedded_initial(StateKind kind, const ChannelParams& p) {
    return embed_subsystem(reduced_initial(kind), party::bob, p.fock_dim());
}

} // namespace horizon
