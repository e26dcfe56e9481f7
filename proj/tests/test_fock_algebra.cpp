#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "horizon/desitter_channel.hpp"
#include "horizon/fock_algebra.hpp"
#include "oracles.hpp"

using namespace horizon;

namespace {

DensityOperator random_state(std::mt19937& rng, ModeLayout layout, Eigen::Index rank) {
    const auto n = static_cast<Eigen::Index>(layout.total());
    return {std::move(layout), oracle::random_density(rng, n, rank)};
}

} // namespace

TEST(NumberState, BasisVectors) {
    auto k0 = number_state(0, 3);
    EXPECT_EQ(k0.layout(), (ModeLayout{3}));
    EXPECT_EQ(k0.amplitudes(), (Vector(3) << 1, 0, 0).finished());
    EXPECT_EQ(number_state(2, 3).amplitudes(), (Vector(3) << 0, 0, 1).finished());
    EXPECT_THROW(number_state(3, 3), std::out_of_range);
}

TEST(Tensor, IndexArithmetic) {
    const auto a = tensor(number_state(0, 2), number_state(1, 2));
    EXPECT_EQ(a.amplitudes(), (Vector(4) << 0, 1, 0, 0).finished());
    const auto b = tensor(number_state(1, 2), number_state(0, 2));
    EXPECT_EQ(b.amplitudes(), (Vector(4) << 0, 0, 1, 0).finished());
    EXPECT_EQ(b.layout(), (ModeLayout{2, 2}));
}

TEST(Tensor, NormIsMultiplicative) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 50; ++trial) {
        Vector va(3), vb(5);
        for (auto& x : va) x = u(rng);
        for (auto& x : vb) x = u(rng);
        const MultiModeKet a(ModeLayout{3}, va), b(ModeLayout{5}, vb);
        const auto ab = tensor(a, b);
        // direct multiplication of the two sums of squares
        double na = 0, nb = 0;
        for (double x : va) na += x * x;
        for (double x : vb) nb += x * x;
        EXPECT_NEAR(ab.squared_norm(), na * nb, 1e-13);
    }
}

TEST(DensityFromKet, Projectors) {
    const auto rho0 = density_from_ket(number_state(0, 2));
    EXPECT_EQ(rho0.matrix(), (Matrix(2, 2) << 1, 0, 0, 0).finished());

    const MultiModeKet plus(ModeLayout{2}, (Vector(2) << 1, 1).finished() / std::sqrt(2.0));
    const auto rp = density_from_ket(plus);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) EXPECT_NEAR(rp(i, j), 0.5, 1e-15);
}

TEST(DensityFromKet, RankOneForUnitKets) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const MultiModeKet psi(ModeLayout{2, 3}, oracle::random_unit(rng, 6));
        const auto ev = oracle::jacobi_eigenvalues(density_from_ket(psi).matrix());
        EXPECT_NEAR(ev.back(), 1.0, 1e-12);
        for (std::size_t k = 0; k + 1 < ev.size(); ++k) EXPECT_NEAR(ev[k], 0.0, 1e-12);
        EXPECT_NEAR(density_from_ket(psi).trace(), psi.squared_norm(), 1e-14);
    }
}

TEST(PartialTrace, ProductProjector) {
    const auto rho = density_from_ket(tensor(number_state(0, 2), number_state(0, 2)));
    const auto red = partial_trace(rho, {0});
    EXPECT_EQ(red.matrix(), (Matrix(2, 2) << 1, 0, 0, 0).finished());
}

TEST(PartialTrace, EmptyKeepAndBadIndex) {
    const auto rho = density_from_ket(tensor(number_state(0, 2), number_state(0, 2)));
    EXPECT_THROW(partial_trace(rho, {}), std::invalid_argument);
    EXPECT_THROW(partial_trace(rho, {2}), std::out_of_range);
}

TEST(PartialTrace, SqueezedVacuumThermalReduction) {
    const auto p = ChannelParams::automatic(0.5);
    const auto red = partial_trace(density_from_ket(squeezed_vacuum(p)), {0});
    const double t = std::tanh(0.5), c = std::cosh(0.5);
    EXPECT_NEAR(red(0, 0), 0.78644773296592741015, 1e-14);
    for (Index n = 0; n < p.fock_dim(); ++n) {
        EXPECT_NEAR(red(n, n), std::pow(t, 2.0 * static_cast<double>(n)) / (c * c), 1e-15);
        for (Index m = 0; m < p.fock_dim(); ++m)
            if (m != n) {
                EXPECT_EQ(red(n, m), 0.0);
            }
    }
}

TEST(PartialTrace, MatchesNaiveDefinitionOnRandomStates) {
    std::mt19937 rng(5);
    const std::vector<Index> dims{2, 3, 2};
    for (std::vector<Index> keep : {std::vector<Index>{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}}) {
        const auto rho = random_state(rng, ModeLayout(dims), 3);
        const Matrix expected = oracle::naive_partial_trace(rho.matrix(), dims, keep);
        const auto got = partial_trace(rho, keep);
        EXPECT_LE((got.matrix() - expected).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_NEAR(got.trace(), rho.trace(), 1e-12);
    }
}

TEST(PartialTrace, KetRouteMatchesProjectorRoute) {
    std::mt19937 rng(8);
    const MultiModeKet psi(ModeLayout{2, 3, 3, 2}, oracle::random_unit(rng, 36));
    const auto a = partial_trace(psi, {0, 1, 3});
    const auto b = partial_trace(density_from_ket(psi), {0, 1, 3});
    EXPECT_LE((a.matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

// Property: reductions of PSD unit-trace operators stay PSD with unit trace.
TEST(PartialTraceProperty, ReductionsArePsdUnitTrace) {
    std::mt19937 rng(21);
    std::uniform_int_distribution<Index> dim(1, 3);
    for (int trial = 0; trial < 40; ++trial) {
        const ModeLayout layout{dim(rng), dim(rng), dim(rng)};
        const auto rho = random_state(rng, layout, 1 + static_cast<Eigen::Index>(trial % 4));
        for (Index k = 0; k < 3; ++k) {
            const auto red = partial_trace(rho, {k});
            EXPECT_NEAR(red.trace(), 1.0, 1e-10);
            const auto ev = oracle::jacobi_eigenvalues(red.matrix());
            EXPECT_GE(ev.front(), -1e-10);
        }
    }
}

TEST(PartialTraceProperty, ProductKetReducesToFactor) {
    std::mt19937 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const MultiModeKet a(ModeLayout{3}, oracle::random_unit(rng, 3));
        const MultiModeKet b(ModeLayout{4}, oracle::random_unit(rng, 4));
        const auto red = partial_trace(density_from_ket(tensor(a, b)), {0});
        EXPECT_LE((red.matrix() - density_from_ket(a).matrix()).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(PartialTranspose, DiagonalStateUnchanged) {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(3, 3) = 0.5;
    const DensityOperator rho(ModeLayout{2, 2}, m);
    EXPECT_EQ(partial_transpose(rho, 0), m);
}

TEST(PartialTranspose, BellStateSpectrum) {
    const MultiModeKet bell(ModeLayout{2, 2}, (Vector(4) << 1, 0, 0, 1).finished() / std::sqrt(2.0));
    const Matrix pt = partial_transpose(density_from_ket(bell), 0);
    const auto ev = oracle::jacobi_eigenvalues(pt);
    EXPECT_NEAR(ev[0], -0.5, 1e-14);
    for (int k = 1; k < 4; ++k) EXPECT_NEAR(ev[static_cast<std::size_t>(k)], 0.5, 1e-14);
    const Vector lib = eig_symmetric(pt);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(lib(k), ev[static_cast<std::size_t>(k)], 1e-14);
}

TEST(PartialTranspose, MatchesNaiveAndIsInvolution) {
    std::mt19937 rng(9);
    const std::vector<Index> dims{2, 3, 2};
    for (int trial = 0; trial < 10; ++trial) {
        const auto rho = random_state(rng, ModeLayout(dims), 2);
        for (Index sub = 0; sub < 3; ++sub) {
            const Matrix pt = partial_transpose(rho, sub);
            EXPECT_EQ(pt, oracle::naive_partial_transpose(rho.matrix(), dims, sub));
            EXPECT_NEAR(pt.trace(), rho.trace(), 1e-14);
            EXPECT_LE((pt - pt.transpose()).cwiseAbs().maxCoeff(), 1e-14);
            const DensityOperator ptop(rho.layout(), pt);
            EXPECT_LE((partial_transpose(ptop, sub) - rho.matrix()).cwiseAbs().maxCoeff(), 1e-14);
        }
    }
    EXPECT_THROW(partial_transpose(random_state(rng, ModeLayout(dims), 1), 3), std::out_of_range);
}

TEST(EigSymmetric, SmallCases) {
    const Vector id = eig_symmetric(Matrix::Identity(3, 3));
    for (int k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(id(k), 1.0);
    const Vector x = eig_symmetric((Matrix(2, 2) << 0, 1, 1, 0).finished());
    EXPECT_NEAR(x(0), -1.0, 1e-15);
    EXPECT_NEAR(x(1), 1.0, 1e-15);
    EXPECT_THROW(eig_symmetric((Matrix(2, 2) << 0, 1, 0, 0).finished()), std::invalid_argument);
}

TEST(EigSymmetric, RandomMatricesTraceAndReconstruction) {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix m(8, 8);
        for (auto& x : m.reshaped()) x = u(rng);
        m = (0.5 * (m + m.transpose())).eval();
        // sprinkle exact zeros so the block split has something to do
        if (trial % 2) {
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j)
                    if ((i + j) % 3 == 0 && i != j) m(i, j) = 0.0;
        }
        const auto dec = spectral_decomposition(m);
        EXPECT_LE(std::abs(dec.values.sum() - m.trace()), 1e-9);
        const Matrix back = dec.vectors * dec.values.asDiagonal() * dec.vectors.transpose();
        EXPECT_LE((back - m).cwiseAbs().maxCoeff(), 1e-9);
        const auto ref = oracle::jacobi_eigenvalues(m);
        for (int k = 0; k < 8; ++k) EXPECT_NEAR(dec.values(k), ref[static_cast<std::size_t>(k)], 1e-10);
        for (int k = 1; k < 8; ++k) EXPECT_LE(dec.values(k - 1), dec.values(k));
    }
}

TEST(EigSymmetric, BlockPermutedMatrixMatchesDense) {
    // two interleaved blocks: {0, 2, 4} and {1, 3, 5}
    Matrix m = Matrix::Zero(6, 6);
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int a : {0, 1})
        for (int i = a; i < 6; i += 2)
            for (int j = a; j <= i; j += 2) m(i, j) = m(j, i) = u(rng);
    const Vector lib = eig_symmetric(m);
    const auto ref = oracle::jacobi_eigenvalues(m);
    for (int k = 0; k < 6; ++k) EXPECT_NEAR(lib(k), ref[static_cast<std::size_t>(k)], 1e-12);

    const SparseMatrix sp = m.sparseView();
    const Vector sv = eig_symmetric(sp);
    for (int k = 0; k < 6; ++k) EXPECT_NEAR(sv(k), ref[static_cast<std::size_t>(k)], 1e-12);
}

TEST(Entropy, PureAndMaximallyMixed) {
    std::mt19937 rng(1);
    const MultiModeKet psi(ModeLayout{3}, oracle::random_unit(rng, 3));
    EXPECT_NEAR(von_neumann_entropy(density_from_ket(psi)), 0.0, 1e-12);
    const DensityOperator mixed(ModeLayout{2}, Matrix::Identity(2, 2) / 2.0);
    EXPECT_NEAR(von_neumann_entropy(mixed, LogBase::two), 1.0, 1e-15);
    EXPECT_NEAR(von_neumann_entropy(mixed, LogBase::e), std::log(2.0), 1e-15);
}

TEST(Entropy, ThermalReductionMatchesSeries) {
    const double g = 0.5, t = std::tanh(g), c = std::cosh(g);
    const auto p = ChannelParams::automatic(g);
    const auto red = partial_trace(squeezed_vacuum(p), {0});
    // direct series: p_n = tanh^{2n} / cosh^2, summed until terms vanish
    double s = 0.0;
    for (int n = 0; n < 400; ++n) {
        const double pn = std::pow(t, 2.0 * n) / (c * c);
        if (pn > 0) s -= pn * std::log2(pn);
    }
    EXPECT_NEAR(von_neumann_entropy(red), s, 1e-10);
}

TEST(Entropy, RejectsSignificantlyNegativeSpectrum) {
    const DensityOperator bad(ModeLayout{2}, (Matrix(2, 2) << 1.1, 0, 0, -0.1).finished());
    EXPECT_THROW(von_neumann_entropy(bad), not_a_state_error);
    // inside the clipping window
    const DensityOperator ok(ModeLayout{2}, (Matrix(2, 2) << 1.0, 0, 0, -1e-11).finished());
    EXPECT_NEAR(von_neumann_entropy(ok), 0.0, 1e-15);
}

// Property: Schmidt symmetry and relabeling invariance.
TEST(EntropyProperty, SchmidtSymmetryAndRelabeling) {
    std::mt19937 rng(33);
    for (int trial = 0; trial < 30; ++trial) {
        const Index da = 2 + static_cast<Index>(trial % 3), db = 2 + static_cast<Index>((trial / 3) % 3);
        const MultiModeKet psi(ModeLayout{da, db}, oracle::random_unit(rng, static_cast<Eigen::Index>(da * db)));
        const double sa = von_neumann_entropy(partial_trace(psi, {0}));
        const double sb = von_neumann_entropy(partial_trace(psi, {1}));
        EXPECT_NEAR(sa, sb, 1e-9);

        // swap the two subsystems by hand and compare
        Vector swapped(psi.amplitudes().size());
        for (Index i = 0; i < da; ++i)
            for (Index j = 0; j < db; ++j) swapped(static_cast<Eigen::Index>(j * da + i)) = psi[i * db + j];
        const MultiModeKet relabeled(ModeLayout{db, da}, swapped);
        EXPECT_NEAR(von_neumann_entropy(partial_trace(relabeled, {1})), sa, 1e-12);

        const Vector ev = eig_symmetric(partial_trace(psi, {0}).matrix());
        EXPECT_EQ(std::abs(ev(ev.size() - 1) - 1.0) < 1e-9, sa < 1e-9);
    }
}

TEST(EmbedSubsystem, PadsWithZeros) {
    const DensityOperator q(ModeLayout{2, 2}, (Matrix(4, 4) << 0.5, 0, 0, 0.5, 0, 0, 0, 0, 0, 0, 0, 0, 0.5, 0, 0, 0.5).finished());
    const auto e = embed_subsystem(q, 1, 4);
    EXPECT_EQ(e.layout(), (ModeLayout{2, 4}));
    EXPECT_DOUBLE_EQ(e(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(e(0, 5), 0.5); // |0 0><1 1|
    EXPECT_DOUBLE_EQ(e(5, 5), 0.5);
    EXPECT_DOUBLE_EQ(e.trace(), 1.0);
}

TEST(ModeLayoutTest, Invariants) {
    EXPECT_THROW(ModeLayout({2, 0}), std::invalid_argument);
    const ModeLayout l{2, 3, 4};
    EXPECT_EQ(l.total(), 24u);
    EXPECT_EQ(l.stride(0), 12u);
    EXPECT_EQ(l.digit(13, 1), 0u);
    EXPECT_EQ(l.digit(17, 1), 1u);
    EXPECT_THROW(MultiModeKet(l, Vector::Zero(23)), std::invalid_argument);
    EXPECT_THROW(DensityOperator(ModeLayout{2}, (Matrix(2, 2) << 1, 0.1, 0, 0).finished()), std::invalid_argument);
}
