// info_measures.hpp
// Entanglement fidelity, bipartite and tripartite mutual information, partial
// transpose spectra and negativity. The numeric routines work on the
// truncated operators and are the ground truth; the *_closed functions
// evaluate the printed series literally so the two can be compared.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "horizon/desitter_channel.hpp"
#include "horizon/entangled_states.hpp"
#include "horizon/fock_algebra.hpp"

namespace horizon {

enum class Measure { fidelity, mi_ab, mi_abc, negativity };

inline constexpr Measure all_measures[] = {Measure::fidelity, Measure::mi_ab, Measure::mi_abc, Measure::negativity};

inline std::string_view to_string(Measure m) {
    switch (m) {
    case Measure::fidelity: return "fidelity";
    case Measure::mi_ab: return "mi_ab";
    case Measure::mi_abc: return "mi_abc";
    case Measure::negativity: return "negativity";
    }
    return "?";
}

inline Measure parse_measure(std::string_view s) {
    if (s == "fidelity") return Measure::fidelity;
    if (s == "mi-ab" || s == "mi_ab") return Measure::mi_ab;
    if (s == "mi-abc" || s == "mi_abc") return Measure::mi_abc;
    if (s == "negativity") return Measure::negativity;
    throw std::invalid_argument("unknown measure '" + std::string(s) + "'");
}

/// Published threshold below which distillable entanglement survives.
inline constexpr double paper_threshold = 0.783;

/// Where the printed PT eigenvalues change sign: sinh gamma = 1.
inline double pt_sign_change_gamma() { return std::asinh(1.0); }

// ---------------------------------------------------------------------------
// Fidelity

/// F_e = sum_n tr(rho (I (x) A_n))^2 with the Kraus set on subsystem `target`.
inline double entanglement_fidelity_numeric(const DensityOperator& rho, const KrausSet& ks, Index target = party::bob) {
    const ModeLayout& layout = rho.layout();
    if (target >= layout.subsystems()) throw std::out_of_range("entanglement_fidelity: target out of range");
    if (layout.dim(target) != ks.dim()) throw std::invalid_argument("entanglement_fidelity: target dimension does not match Kraus side");
    const Index right = layout.stride(target);
    const Index d = ks.dim();
    const Index left = rho.side() / (d * right);

    double f = 0.0;
    for (const auto& a : ks.ops()) {
        // tr(rho X) = sum_{i,j} rho(j, i) X(i, j); X acts as A on one digit
        double tr = 0.0;
        for (Eigen::Index q = 0; q < a.outerSize(); ++q)
            for (SparseMatrix::InnerIterator it(a, q); it; ++it) {
                const auto p = static_cast<Index>(it.row());
                for (Index l = 0; l < left; ++l)
                    for (Index r = 0; r < right; ++r) {
                        const Index i = (l * d + p) * right + r;
                        const Index j = (l * d + static_cast<Index>(q)) * right + r;
                        tr += it.value() * rho(j, i);
                    }
            }
        f += tr * tr;
    }
    return f;
}

/// Printed closed forms: GHZ (1/4cosh^2)(1 + 1/cosh^2)^2, W (1/9cosh^2)(2 + 1/cosh^2)^2.
inline double fidelity_closed_paper(StateKind kind, double gamma) {
    if (!(gamma >= 0.0)) throw std::domain_error("fidelity_closed_paper: gamma must be >= 0");
    const double c2 = std::cosh(gamma) * std::cosh(gamma);
    const double k = kind == StateKind::ghz ? 1.0 : 2.0;
    const double pre = kind == StateKind::ghz ? 4.0 : 9.0;
    return (k + 1.0 / c2) * (k + 1.0 / c2) / (pre * c2);
}

/// What the Kraus set gives by hand: only A_0 has a diagonal, so
/// GHZ (1/4cosh^2)(1 + 1/cosh)^2, W (1/9cosh^2)(2 + 1/cosh)^2.
inline double fidelity_closed_kraus(StateKind kind, double gamma) {
    const double c = std::cosh(gamma);
    const double k = kind == StateKind::ghz ? 1.0 : 2.0;
    const double pre = kind == StateKind::ghz ? 4.0 : 9.0;
    return (k + 1.0 / c) * (k + 1.0 / c) / (pre * c * c);
}

// ---------------------------------------------------------------------------
// Mutual information (bits)

/// I(a:b) = S(a) + S(b) - S(ab). Subsystems in neither part are traced out.
inline double mutual_information(const DensityOperator& rho, std::vector<Index> part_a, std::vector<Index> part_b) {
    if (part_a.empty() || part_b.empty()) throw std::invalid_argument("mutual_information: parts must be nonempty");
    for (Index a : part_a)
        if (std::find(part_b.begin(), part_b.end(), a) != part_b.end())
            throw std::invalid_argument("mutual_information: partitions overlap");
    std::vector<Index> both = part_a;
    both.insert(both.end(), part_b.begin(), part_b.end());
    const double sa = von_neumann_entropy(partial_trace(rho, part_a));
    const double sb = von_neumann_entropy(partial_trace(rho, part_b));
    const double sab = both.size() == rho.layout().subsystems() ? von_neumann_entropy(rho)
                                                                 : von_neumann_entropy(partial_trace(rho, both));
    return sa + sb - sab;
}

/// Entropies of every marginal of a three-party operator, computed once.
struct TripartiteEntropies {
    double a, b, c, ab, ac, bc, abc;

    explicit TripartiteEntropies(const DensityOperator& rho) {
        if (rho.layout().subsystems() != 3) throw std::invalid_argument("TripartiteEntropies: expected three subsystems");
        const DensityOperator rab = partial_trace(rho, {0, 1});
        const DensityOperator rbc = partial_trace(rho, {1, 2});
        ab = von_neumann_entropy(rab);
        bc = von_neumann_entropy(rbc);
        ac = von_neumann_entropy(partial_trace(rho, {0, 2}));
        a = von_neumann_entropy(partial_trace(rab, {0}));
        b = von_neumann_entropy(partial_trace(rab, {1}));
        c = von_neumann_entropy(partial_trace(rbc, {1}));
        abc = von_neumann_entropy(rho);
    }

    [[nodiscard]] double mi_ab() const { return a + b - ab; }
    [[nodiscard]] double mi_ac() const { return a + c - ac; }
    [[nodiscard]] double mi_a_bc() const { return a + bc - abc; }
    /// I(A:B:C) = I(A:B) + I(A:C) - I(A:BC)
    [[nodiscard]] double tripartite() const { return mi_ab() + mi_ac() - mi_a_bc(); }
};

inline double tripartite_mi_numeric(const ThermalizedSystem& sys) { return TripartiteEntropies(sys.rho_abc).tripartite(); }

// ---------------------------------------------------------------------------
// Printed series

/// W_n, W'_n, M_n^{+-} as functions of gamma. The n = 0 value of n / sinh^2
/// is taken as 0 so that W_0 = 2 also at gamma = 0.
struct ClosedFormHelpers {
    double gamma;
    double t2, s2, c2;

    explicit ClosedFormHelpers(double g)
        : gamma(g), t2(std::tanh(g) * std::tanh(g)), s2(std::sinh(g) * std::sinh(g)), c2(std::cosh(g) * std::cosh(g)) {}

    [[nodiscard]] double n_over_s2(Index n) const { return n == 0 ? 0.0 : static_cast<double>(n) / s2; }
    [[nodiscard]] double w(Index n) const { return 2.0 + n_over_s2(n); }
    [[nodiscard]] double w_prime(Index n) const { return 2.0 + static_cast<double>(n + 1) / c2; }
    [[nodiscard]] double m(Index n, int sign) const {
        const double np1 = static_cast<double>(n + 1);
        return 1.0 + t2 + np1 / c2 + sign * std::sqrt(1.0 - t2 + 1.0 / c2) * std::sqrt(1.0 + 3.0 * t2 + np1 / c2);
    }
    /// tanh^{2n}, exactly 1 at n = 0 even for gamma = 0
    [[nodiscard]] double x_pow(Index n) const { return n == 0 ? 1.0 : std::pow(t2, static_cast<double>(n)); }
};

namespace detail {
// v log2 v with 0 log 0 = 0; negative arguments give NaN.
inline double xlog2x(double v) {
    if (v == 0.0) return 0.0;
    if (v < 0.0) return std::numeric_limits<double>::quiet_NaN();
    return v * std::log2(v);
}

inline void require_w_gamma(StateKind kind, double gamma, const char* who) {
    if (!(gamma >= 0.0)) throw std::domain_error(std::string(who) + ": gamma must be >= 0");
    if (kind == StateKind::w && gamma < 1e-6)
        throw std::domain_error(std::string(who) + ": the W series diverges as gamma -> 0; use the numeric path below 1e-6");
}
} // namespace detail

/// Literal partial sum (n = 0 .. n_terms-1) of the printed I(A:B).
inline double bipartite_mi_closed(StateKind kind, double gamma, Index n_terms) {
    detail::require_w_gamma(kind, gamma, "bipartite_mi_closed");
    const ClosedFormHelpers h(gamma);
    using detail::xlog2x;
    double sum = 0.0;
    if (kind == StateKind::ghz) {
        for (Index n = 0; n < n_terms; ++n) {
            const double xn = h.x_pow(n);
            if (xn == 0.0) break;
            sum += xn * (xlog2x(h.n_over_s2(n)) - xlog2x(h.n_over_s2(n) + 1.0));
        }
        return 1.0 + sum / (2.0 * h.c2);
    }
    const double log2_t2 = std::log2(h.t2);
    const double log2_6c2 = std::log2(6.0 * h.c2);
    for (Index n = 0; n < n_terms; ++n) {
        const double xn = h.x_pow(n);
        if (xn == 0.0) break;
        const double log_term = static_cast<double>(n) * log2_t2 - log2_6c2;
        sum += xn * (xlog2x(h.m(n, +1)) + xlog2x(h.m(n, -1)) - 2.0 * xlog2x(h.w(n)) - 2.0 / h.c2 * log_term);
    }
    return std::log2(3.0) - 5.0 / 3.0 - std::log2(3.0 * h.c2) / (3.0 * h.c2) - log2_t2 / 3.0 - sum / (6.0 * h.c2);
}

/// Literal partial sum of the printed I(A:B:C).
inline double tripartite_mi_closed(StateKind kind, double gamma, Index n_terms) {
    detail::require_w_gamma(kind, gamma, "tripartite_mi_closed");
    const ClosedFormHelpers h(gamma);
    using detail::xlog2x;
    double sum = 0.0;
    if (kind == StateKind::ghz) {
        for (Index n = 0; n < n_terms; ++n) {
            const double xn = h.x_pow(n);
            if (xn == 0.0) break;
            const double wm2 = h.n_over_s2(n);
            const double wpm2 = h.w_prime(n) - 2.0;
            sum += xn * (xlog2x(wm2) + xlog2x(wpm2) - xlog2x(wm2 + 1.0) - xlog2x(wpm2 + 1.0));
        }
        return 1.0 + sum / (2.0 * h.c2);
    }
    const double log2_t2 = std::log2(h.t2);
    const double log2_6c2 = std::log2(6.0 * h.c2);
    for (Index n = 0; n < n_terms; ++n) {
        const double xn = h.x_pow(n);
        if (xn == 0.0) break;
        const double log_term = static_cast<double>(n) * log2_t2 - log2_6c2;
        sum += xn * (xlog2x(h.m(n, +1)) + xlog2x(h.m(n, -1)) - xlog2x(h.w(n)) - xlog2x(h.w_prime(n)) -
                     2.0 / h.c2 * log_term);
    }
    return std::log2(3.0) - 8.0 / 3.0 - 2.0 * std::log2(3.0 * h.c2) / (3.0 * h.c2) - log2_t2 / 3.0 - sum / (3.0 * h.c2);
}

// ---------------------------------------------------------------------------
// Partial transpose and negativity

inline Vector pt_spectrum(const DensityOperator& rho, Index sub = party::alice) {
    return eig_symmetric(partial_transpose(rho, sub));
}

/// Sum of |lambda| over PT eigenvalues below -1e-10.
inline double negativity(const DensityOperator& rho, Index sub = party::alice) {
    double n = 0.0;
    for (double lambda : pt_spectrum(rho, sub))
        if (lambda < -tol::psd_clip) n -= lambda;
    return n;
}

/// (lambda_n^+, lambda_n^-) from the printed W-state PT eigenvalues.
inline std::pair<double, double> pt_spectrum_w_closed(double gamma, Index n) {
    if (!(gamma > 0.0)) throw std::domain_error("pt_spectrum_w_closed: gamma must be > 0");
    const ClosedFormHelpers h(gamma);
    const double u = 1.0 + h.n_over_s2(n) + h.t2;
    const double root = std::sqrt(u * u - 4.0 * h.t2 + 4.0 / h.c2);
    const double pre = h.x_pow(n) / (6.0 * h.c2);
    return {pre * (u + root), pre * (u - root)};
}

/// sum_n |lambda_n^-| over the negative printed eigenvalues, n < n_terms.
inline double negativity_w_closed(double gamma, Index n_terms) {
    double s = 0.0;
    for (Index n = 0; n < n_terms; ++n) {
        const double lm = pt_spectrum_w_closed(gamma, n).second;
        if (lm < 0.0) s -= lm;
    }
    return s;
}

/// rho'_AB through purification then trace (the ground-truth route).
inline DensityOperator final_rho_ab(StateKind kind, const ChannelParams& p) {
    return partial_trace(thermalize(kind, p).rho_abc, {party::alice, party::bob});
}

struct ThresholdSearch {
    double lo = 0.5;
    double hi = 1.2;
    double gamma_tol = 1e-6;
    double negativity_floor = 1e-9;
    double tail_tol = default_tail_tol;
};

/// Largest gamma in [lo, hi] with W negativity above the floor, by bisection
/// (auto truncation at every probe).
inline double negativity_threshold(StateKind kind, const ThresholdSearch& s = {}) {
    if (kind == StateKind::ghz) throw std::invalid_argument("negativity_threshold: GHZ negativity vanishes identically, no threshold");
    auto entangled = [&](double g) {
        return negativity(final_rho_ab(kind, ChannelParams::automatic(g, s.tail_tol))) > s.negativity_floor;
    };
    double lo = s.lo, hi = s.hi;
    if (!entangled(lo)) throw std::runtime_error("negativity_threshold: no negativity at the lower bracket end");
    if (entangled(hi)) throw std::runtime_error("negativity_threshold: negativity persists at the upper bracket end");
    while (hi - lo > s.gamma_tol) {
        const double mid = 0.5 * (lo + hi);
        (entangled(mid) ? lo : hi) = mid;
    }
    return lo;
}

} // namespace horizon
