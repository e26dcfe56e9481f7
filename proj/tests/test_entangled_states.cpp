#include <cmath>

#include <gtest/gtest.h>

#include "horizon/entangled_states.hpp"
#include "horizon/sweep.hpp"
#include "oracles.hpp"

using namespace horizon;

namespace {
constexpr double ghz_diag_01_at_half = 0.08397384813934037162; // <0 1|rho'_AB|0 1>, GHZ, gamma 1/2

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }
} // namespace

TEST(InitialStates, NormsAndMarginals) {
    EXPECT_NEAR(ghz_ket().squared_norm(), 1.0, 1e-15);
    EXPECT_NEAR(w_ket().squared_norm(), 1.0, 1e-15);

    const auto g = reduced_initial(StateKind::ghz);
    EXPECT_NEAR(g(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(g(3, 3), 0.5, 1e-15);
    EXPECT_NEAR(g(0, 3), 0.0, 1e-15);

    const auto w = reduced_initial(StateKind::w);
    EXPECT_NEAR(w(0, 0), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(w(1, 1), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(w(2, 2), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(w(1, 2), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(w(3, 3), 0.0, 1e-15);
}

TEST(StateKindText, RoundTrip) {
    EXPECT_EQ(parse_state_kind(to_string(StateKind::ghz)), StateKind::ghz);
    EXPECT_EQ(parse_state_kind("W"), StateKind::w);
    EXPECT_THROW(parse_state_kind("bell"), std::invalid_argument);
}

TEST(Thermalize, GhzDiagonalAtHalf) {
    const auto p = ChannelParams::automatic(0.5);
    const auto rho = final_rho_ab(StateKind::ghz, p);
    const Index d = p.fock_dim();
    EXPECT_NEAR(rho(0 * d + 1, 0 * d + 1), ghz_diag_01_at_half, 1e-14);
    EXPECT_NEAR(rho(0, 0), 0.5 * 0.78644773296592741015, 1e-14);
}

TEST(Thermalize, ZeroGammaReproducesQubitState) {
    for (auto kind : {StateKind::ghz, StateKind::w}) {
        const auto p = ChannelParams::automatic(0.0);
        const auto rho = final_rho_ab(kind, p);
        EXPECT_LE(max_abs(rho.matrix() - embedded_initial(kind, p).matrix()), 1e-15);
    }
}

TEST(Thermalize, RejectsNonQubitInput) {
    const MultiModeKet bad(ModeLayout{2, 3, 2}, Vector::Zero(12));
    EXPECT_THROW(thermalize(bad, StateKind::w, ChannelParams::fixed(0.5, 4)), std::invalid_argument);
}

TEST(Routes, ThreeConstructionsAgree) {
    for (auto kind : {StateKind::ghz, StateKind::w})
        for (double g : {0.0, 0.1, 0.3, 0.5, 1.0, 1.4}) {
            const auto p = ChannelParams::automatic(g);
            const auto res = route_residuals(kind, p, kraus_set(p));
            EXPECT_LE(res.worst(), 1e-12) << to_string(kind) << " " << g;
        }
}

TEST(Routes, AgreeAtFixedSmallTruncation) {
    // even far from convergence the truncated routes are the same operator
    for (auto kind : {StateKind::ghz, StateKind::w})
        for (Index n : {1u, 2u, 5u}) {
            const auto p = ChannelParams::fixed(0.9, n);
            EXPECT_LE(route_residuals(kind, p, kraus_set(p)).worst(), 1e-14) << n;
        }
}

TEST(Routes, ArbitraryQubitInputsAgreeWithKraus) {
    std::mt19937 rng(27);
    const auto p = ChannelParams::automatic(0.7);
    const auto ks = kraus_set(p);
    for (int trial = 0; trial < 5; ++trial) {
        const MultiModeKet psi(ModeLayout{2, 2, 2}, oracle::random_unit(rng, 8));
        const auto sys = thermalize(psi, StateKind::w, p);
        const auto in = embed_subsystem(density_from_ket(psi), party::bob, p.fock_dim());
        const auto out = apply_channel(in, ks, party::bob);
        EXPECT_LE(max_abs(out.matrix() - sys.rho_abc.matrix()), 1e-13);
    }
}

TEST(Purification, TotalStateIsPure) {
    for (auto kind : {StateKind::ghz, StateKind::w})
        for (double g : {0.2, 0.9, 1.5}) {
            const auto sys = thermalize(kind, ChannelParams::automatic(g));
            EXPECT_NEAR(sys.total_pure.squared_norm(), 1.0, 1e-11);
            EXPECT_LE(purity_defect(sys), 1e-9);
            EXPECT_NEAR(sys.rho_abc.trace(), 1.0, 1e-11);
        }
}

TEST(Marginals, GhzAliceCharlieSymmetry) {
    const auto sys = thermalize(StateKind::ghz, ChannelParams::automatic(0.6));
    const auto ra = partial_trace(sys.rho_abc, {party::alice});
    const auto rc = partial_trace(sys.rho_abc, {party::charlie});
    EXPECT_LE(max_abs(ra.matrix() - rc.matrix()), 1e-14);
    EXPECT_NEAR(ra(0, 0), 0.5, 1e-12);
}

TEST(Marginals, ChannelLeavesOtherPartiesAlone) {
    for (auto kind : {StateKind::ghz, StateKind::w}) {
        const auto sys = thermalize(kind, ChannelParams::automatic(1.1));
        const auto before = partial_trace(initial_ket(kind), {party::alice, party::charlie});
        const auto after = partial_trace(sys.rho_abc, {party::alice, party::charlie});
        EXPECT_LE(max_abs(after.matrix() - before.matrix()), 1e-11);
    }
}

TEST(Marginals, WCharlieCrossTermVanishes) {
    // Bob's branches |1>,|0> are orthogonal after thermalization too, so
    // Charlie's coherence between |0> and |1> stays at zero
    const auto sys = thermalize(StateKind::w, ChannelParams::automatic(0.8));
    const auto rc = partial_trace(sys.rho_abc, {party::charlie});
    EXPECT_NEAR(rc(0, 0), 2.0 / 3.0, 1e-11);
    EXPECT_NEAR(rc(1, 1), 1.0 / 3.0, 1e-11);
    EXPECT_EQ(rc(0, 1), 0.0);
}

TEST(ClosedRho, PsdAndTraceBound) {
    for (auto kind : {StateKind::ghz, StateKind::w})
        for (double g : {0.25, 0.75, 1.25}) {
            const auto p = ChannelParams::automatic(g);
            const auto rho = final_rho_ab_closed(kind, p);
            EXPECT_NEAR(rho.trace(), 1.0, p.tail_bound() + 1e-12);
            EXPECT_TRUE(is_positive_semidefinite(rho.matrix()));
        }
}
