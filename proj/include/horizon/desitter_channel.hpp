// desitter_channel.hpp
// The horizon as a noisy channel on Bob's Fock mode: Bogoliubov
// parameterization, two-mode squeezed states, Kraus operators, operator-sum
// application and complete-positivity witnesses.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "horizon/fock_algebra.hpp"

namespace horizon {

inline constexpr Index max_truncation = 512;
inline constexpr double default_tail_tol = 1e-12;

/// Tail mass lost by truncating the image of the Kruskal level |m> (m = 0 or
/// 1) to Fock levels 0..N. With x = tanh^2 gamma:
///   m = 0:  x^{N+1}
///   m = 1:  x^N ((N+1)(1-x) + x)
inline double branch_tail(Index level, Index cutoff, double gamma) {
    const double t = std::tanh(gamma);
    const double x = t * t;
    const auto n = static_cast<double>(cutoff);
    switch (level) {
    case 0: return std::pow(x, n + 1.0);
    case 1: return std::pow(x, n) * ((n + 1.0) * (1.0 - x) + x);
    default: throw std::out_of_range("branch_tail: only Kruskal levels 0 and 1 enter the model");
    }
}

/// tanh^{2(N+1)} gamma, the vacuum-branch tail.
inline double vacuum_tail(Index cutoff, double gamma) { return branch_tail(0, cutoff, gamma); }

/// Worst tail over both Kruskal levels.
inline double tail_bound(Index cutoff, double gamma) {
    return std::max(branch_tail(0, cutoff, gamma), branch_tail(1, cutoff, gamma));
}

/// Expansion-rate squeezing parameter plus Fock truncation.
struct ChannelParams {
    double gamma = 0.0;
    Index truncation = 1; ///< N; the Fock dimension is N+1
    double tail_tol = default_tail_tol;

    /// Smallest N >= 1 whose tail bound is within `tail_tol`, capped at 512.
    static ChannelParams automatic(double gamma, double tail_tol = default_tail_tol) {
        validate(gamma, tail_tol);
        ChannelParams p{gamma, 1, tail_tol};
        while (p.truncation < max_truncation && horizon::tail_bound(p.truncation, gamma) > tail_tol) ++p.truncation;
        return p;
    }

    static ChannelParams fixed(double gamma, Index truncation, double tail_tol = default_tail_tol) {
        validate(gamma, tail_tol);
        if (truncation == 0) throw std::invalid_argument("ChannelParams: truncation must be >= 1");
        return {gamma, truncation, tail_tol};
    }

    [[nodiscard]] Index fock_dim() const noexcept { return truncation + 1; }
    [[nodiscard]] double tail_bound() const { return horizon::tail_bound(truncation, gamma); }
    /// True when the tolerance could not be met (the 512 cap bound, or an
    /// explicit N that is too small).
    [[nodiscard]] bool tail_exceeds_tol() const { return tail_bound() > tail_tol; }

private:
    static void validate(double gamma, double tail_tol) {
        if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("ChannelParams: gamma must be finite and >= 0");
        if (!(tail_tol > 0.0)) throw std::invalid_argument("ChannelParams: tail_tol must be > 0");
    }
};

/// gamma = artanh(exp(-pi a omega)), a = sqrt(3 / Lambda).
inline double gamma_from_frequency(double omega, double lambda) {
    if (!(omega > 0.0)) throw std::domain_error("gamma_from_frequency: omega must be > 0 (omega = 0 is infinite squeezing)");
    if (!(lambda > 0.0)) throw std::domain_error("gamma_from_frequency: cosmological constant must be > 0");
    const double a = std::sqrt(3.0 / lambda);
    return std::atanh(std::exp(-std::numbers::pi * a * omega));
}

/// Kruskal vacuum in region I (x) region II: sum_n tanh^n / cosh |n>|n>.
inline MultiModeKet squeezed_vacuum(const ChannelParams& p) {
    const Index d = p.fock_dim();
    const double t = std::tanh(p.gamma);
    const double c = std::cosh(p.gamma);
    Vector amps = Vector::Zero(static_cast<Eigen::Index>(d * d));
    double tn = 1.0;
    for (Index n = 0; n < d; ++n) {
        amps(static_cast<Eigen::Index>(n * d + n)) = tn / c;
        tn *= t;
    }
    return {ModeLayout{d, d}, std::move(amps)};
}

/// Kruskal one-particle state: sum_n tanh^n sqrt(n+1) / cosh^2 |n+1>|n>.
inline MultiModeKet squeezed_one(const ChannelParams& p) {
    if (p.truncation < 1) throw std::invalid_argument("squeezed_one: truncation must be >= 1");
    const Index d = p.fock_dim();
    const double t = std::tanh(p.gamma);
    const double c = std::cosh(p.gamma);
    Vector amps = Vector::Zero(static_cast<Eigen::Index>(d * d));
    double tn = 1.0;
    for (Index n = 0; n + 1 < d; ++n) {
        amps(static_cast<Eigen::Index>((n + 1) * d + n)) = tn * std::sqrt(static_cast<double>(n + 1)) / (c * c);
        tn *= t;
    }
    return {ModeLayout{d, d}, std::move(amps)};
}

// ---------------------------------------------------------------------------
// Kraus operators

/// Truncated creation operator: <m+1| b^dagger |m> = sqrt(m+1).
inline SparseMatrix creation_operator(Index dim) {
    std::vector<Eigen::Triplet<double>> t;
    for (Index m = 0; m + 1 < dim; ++m)
        t.emplace_back(static_cast<int>(m + 1), static_cast<int>(m), std::sqrt(static_cast<double>(m + 1)));
    SparseMatrix b(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    b.setFromTriplets(t.begin(), t.end());
    return b;
}

/// base^{b^dagger b}, diagonal with entries base^m.
inline SparseMatrix number_power(Index dim, double base) {
    SparseMatrix d(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    d.reserve(Eigen::VectorXi::Constant(static_cast<Eigen::Index>(dim), 1));
    double v = 1.0;
    for (Index m = 0; m < dim; ++m) {
        d.insert(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)) = v;
        v *= base;
    }
    d.makeCompressed();
    return d;
}

/// How to read the scalar prefactor of A_n. `tanh_power_n` uses tanh^n gamma
/// and reproduces the squeezed states; `printed_tanh_squared` uses the
/// literal tanh^2 gamma for every n and is kept for the audit.
enum class KrausReading { tanh_power_n, printed_tanh_squared };

/// Levels of the target mode the channel is fed with (the Kruskal qubit).
inline constexpr Index kraus_input_levels = 2;

class KrausSet {
public:
    KrausSet(ChannelParams params, std::vector<SparseMatrix> ops) : params_(params), ops_(std::move(ops)) {
        const auto d = static_cast<Eigen::Index>(params_.fock_dim());
        for (const auto& a : ops_)
            if (a.rows() != d || a.cols() != d) throw std::invalid_argument("KrausSet: operator side must be N+1");
        gram_ = SparseMatrix(d, d);
        for (const auto& a : ops_) gram_ += SparseMatrix(a.transpose() * a);
        completeness_defect_ = defect_over_columns(std::min<Index>(kraus_input_levels, params_.fock_dim()));
        full_defect_ = defect_over_columns(params_.fock_dim());
    }

    [[nodiscard]] const ChannelParams& params() const noexcept { return params_; }
    [[nodiscard]] const std::vector<SparseMatrix>& ops() const noexcept { return ops_; }
    [[nodiscard]] Index size() const noexcept { return ops_.size(); }
    [[nodiscard]] Index dim() const noexcept { return params_.fock_dim(); }

    /// sum_n A_n^T A_n
    [[nodiscard]] const SparseMatrix& completeness() const noexcept { return gram_; }

    /// max |(sum_n A_n^T A_n - I)_{ij}| over input columns j in {0, 1}.
    [[nodiscard]] double completeness_defect() const noexcept { return completeness_defect_; }

    /// The same max-norm over the whole truncated space. The top levels lose
    /// most of their image, so this is close to 1 for gamma > 0.
    [[nodiscard]] double full_space_defect() const noexcept { return full_defect_; }

private:
    double defect_over_columns(Index cols) const {
        double worst = 0.0;
        for (Index j = 0; j < cols; ++j) {
            double diag = 0.0;
            for (SparseMatrix::InnerIterator it(gram_, static_cast<Eigen::Index>(j)); it; ++it) {
                if (static_cast<Index>(it.row()) == j) diag = it.value();
                else worst = std::max(worst, std::abs(it.value()));
            }
            worst = std::max(worst, std::abs(diag - 1.0));
        }
        return worst;
    }

    ChannelParams params_;
    std::vector<SparseMatrix> ops_;
    SparseMatrix gram_;
    double completeness_defect_ = 0.0;
    double full_defect_ = 0.0;
};

/// A_n = tanh^n gamma / (sqrt(n!) cosh gamma) (b^dagger)^n (1/cosh gamma)^{b^dagger b},
/// n = 0..N. The number-operator factor acts first.
inline KrausSet kraus_set(const ChannelParams& p, KrausReading reading = KrausReading::tanh_power_n) {
    const Index d = p.fock_dim();
    const double t = std::tanh(p.gamma);
    const double c = std::cosh(p.gamma);
    const SparseMatrix bdag = creation_operator(d);
    const SparseMatrix damp = number_power(d, 1.0 / c);

    // Scaled powers: B_n = s_n / sqrt(n!) (b^dagger)^n with s_n = tanh^n
    // (or 1 for the printed reading, which carries tanh^2 as a constant).
    // The running scale keeps entries bounded where (b^dagger)^n alone overflows.
    const double step = reading == KrausReading::tanh_power_n ? t : 1.0;
    const double constant = reading == KrausReading::tanh_power_n ? 1.0 / c : (t * t) / c;

    std::vector<SparseMatrix> ops;
    ops.reserve(d);
    SparseMatrix power(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    power.setIdentity();
    for (Index n = 0; n < d; ++n) {
        if (n > 0) power = (step / std::sqrt(static_cast<double>(n))) * (bdag * power);
        SparseMatrix a = constant * (power * damp);
        a.prune(0.0);
        ops.push_back(std::move(a));
    }
    return {p, std::move(ops)};
}

namespace detail {

// I_left (x) A (x) I_right
inline SparseMatrix embed_operator(const SparseMatrix& a, Index left, Index dim, Index right) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(a.nonZeros()) * left * right);
    for (Eigen::Index q = 0; q < a.outerSize(); ++q)
        for (SparseMatrix::InnerIterator it(a, q); it; ++it)
            for (Index l = 0; l < left; ++l)
                for (Index r = 0; r < right; ++r)
                    t.emplace_back(static_cast<int>((l * dim + static_cast<Index>(it.row())) * right + r),
                                   static_cast<int>((l * dim + static_cast<Index>(q)) * right + r), it.value());
    const auto side = static_cast<Eigen::Index>(left * dim * right);
    SparseMatrix e(side, side);
    e.setFromTriplets(t.begin(), t.end());
    return e;
}

} // namespace detail

/// rho' = sum_n E_n rho E_n^T with E_n = I (x) A_n (x) I on subsystem `target`.
inline DensityOperator apply_channel(const DensityOperator& rho, const KrausSet& ks, Index target) {
    const ModeLayout& layout = rho.layout();
    if (target >= layout.subsystems()) throw std::out_of_range("apply_channel: target subsystem out of range");
    if (layout.dim(target) != ks.dim())
        throw std::invalid_argument("apply_channel: target dimension does not match the Kraus operators");
    Index left = 1;
    for (Index k = 0; k < target; ++k) left *= layout.dim(k);
    const Index right = layout.stride(target);

    const SparseMatrix in = rho.matrix().sparseView(1.0, 0.0);
    Matrix out = Matrix::Zero(rho.matrix().rows(), rho.matrix().cols());
    for (const auto& a : ks.ops()) {
        if (a.nonZeros() == 0) continue;
        const SparseMatrix e = detail::embed_operator(a, left, ks.dim(), right);
        const SparseMatrix term = e * in * SparseMatrix(e.transpose());
        for (Eigen::Index k = 0; k < term.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(term, k); it; ++it) out(it.row(), it.col()) += it.value();
    }
    out = 0.5 * (out + out.transpose()).eval();
    return {layout, std::move(out)};
}

/// Choi operator sum_n vec(A_n) vec(A_n)^T, column-major vec, side (N+1)^2.
inline SparseMatrix choi_matrix(const KrausSet& ks) {
    const Index d = ks.dim();
    std::vector<Eigen::Triplet<double>> trip;
    for (const auto& a : ks.ops()) {
        std::vector<std::pair<Index, double>> v;
        for (Eigen::Index col = 0; col < a.outerSize(); ++col)
            for (SparseMatrix::InnerIterator it(a, col); it; ++it)
                v.emplace_back(static_cast<Index>(col) * d + static_cast<Index>(it.row()), it.value());
        for (const auto& [i, vi] : v)
            for (const auto& [j, vj] : v) trip.emplace_back(static_cast<int>(i), static_cast<int>(j), vi * vj);
    }
    SparseMatrix choi(static_cast<Eigen::Index>(d * d), static_cast<Eigen::Index>(d * d));
    choi.setFromTriplets(trip.begin(), trip.end());
    return choi;
}

/// Minimum Choi eigenvalue through the Gram matrix G_nm = tr(A_n^T A_m):
/// Choi = V V^T and G = V^T V share their nonzero spectrum, and Choi has
/// (N+1)^2 - rank(V) extra zeros.
inline double choi_min_eigenvalue_gram(const KrausSet& ks) {
    const auto k = static_cast<Eigen::Index>(ks.size());
    Matrix gram(k, k);
    for (Eigen::Index n = 0; n < k; ++n)
        for (Eigen::Index m = 0; m <= n; ++m) {
            const double v = ks.ops()[static_cast<Index>(n)].cwiseProduct(ks.ops()[static_cast<Index>(m)]).sum();
            gram(n, m) = gram(m, n) = v;
        }
    const Vector ev = eig_symmetric(gram);
    const double lo = ev.size() > 0 ? ev(0) : 0.0;
    const auto side = static_cast<Index>(ks.dim() * ks.dim());
    return static_cast<Index>(k) < side ? std::min(lo, 0.0) : lo;
}

} // namespace horizon
