// fock_algebra.hpp
// Truncated Fock-space linear algebra over real amplitudes: kets, density
// operators, tensor products, partial trace/transpose, spectra and entropy.
//
// Index convention: for a layout (d_0, d_1, ..., d_{k-1}) the flat index of
// the basis state |i_0 i_1 ... i_{k-1}> is row-major, i.e. subsystem 0 is the
// slowest-varying digit.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace horizon {

using Index = std::size_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Thrown when an operator fails a state check (significantly negative
/// eigenvalue, wrong trace).
class not_a_state_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace tol {
inline constexpr double symmetric = 1e-12;     // DensityOperator symmetry
inline constexpr double eig_symmetric = 1e-10; // input check for eigensolves
inline constexpr double psd_clip = 1e-10;      // [-1e-10, 0) counts as zero
inline constexpr double entropy_error = 1e-8;  // below -1e-8 is not a state
} // namespace tol

// ---------------------------------------------------------------------------
// ModeLayout

class ModeLayout {
public:
    ModeLayout() = default;
    ModeLayout(std::initializer_list<Index> dims) : ModeLayout(std::vector<Index>(dims)) {}
    explicit ModeLayout(std::vector<Index> dims) : dims_(std::move(dims)) {
        for (Index d : dims_) {
            if (d == 0) throw std::invalid_argument("ModeLayout: subsystem dimension must be >= 1");
        }
    }

    [[nodiscard]] Index subsystems() const noexcept { return dims_.size(); }
    [[nodiscard]] Index dim(Index sub) const { return dims_.at(sub); }
    [[nodiscard]] const std::vector<Index>& dims() const noexcept { return dims_; }

    [[nodiscard]] Index total() const noexcept {
        return std::accumulate(dims_.begin(), dims_.end(), Index{1}, std::multiplies<>{});
    }

    /// Distance in flat index between consecutive values of one subsystem digit.
    [[nodiscard]] Index stride(Index sub) const {
        if (sub >= dims_.size()) throw std::out_of_range("ModeLayout: subsystem index out of range");
        Index s = 1;
        for (Index k = sub + 1; k < dims_.size(); ++k) s *= dims_[k];
        return s;
    }

    [[nodiscard]] Index digit(Index flat, Index sub) const { return (flat / stride(sub)) % dims_.at(sub); }

    [[nodiscard]] ModeLayout concat(const ModeLayout& other) const {
        std::vector<Index> d = dims_;
        d.insert(d.end(), other.dims_.begin(), other.dims_.end());
        return ModeLayout(std::move(d));
    }

    [[nodiscard]] ModeLayout restrict_to(const std::vector<Index>& keep) const {
        std::vector<Index> d;
        d.reserve(keep.size());
        for (Index k : keep) d.push_back(dims_.at(k));
        return ModeLayout(std::move(d));
    }

    friend bool operator==(const ModeLayout&, const ModeLayout&) = default;

private:
    std::vector<Index> dims_;
};

// ---------------------------------------------------------------------------
// MultiModeKet

class MultiModeKet {
public:
    MultiModeKet() = default;
    MultiModeKet(ModeLayout layout, Vector amplitudes)
        : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
        if (static_cast<Index>(amplitudes_.size()) != layout_.total())
            throw std::invalid_argument("MultiModeKet: amplitude count does not match layout");
    }

    [[nodiscard]] const ModeLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] const Vector& amplitudes() const noexcept { return amplitudes_; }
    [[nodiscard]] double operator[](Index i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }
    [[nodiscard]] double squared_norm() const { return amplitudes_.squaredNorm(); }
    [[nodiscard]] double norm() const { return amplitudes_.norm(); }

private:
    ModeLayout layout_;
    Vector amplitudes_;
};

// ---------------------------------------------------------------------------
// DensityOperator

class DensityOperator {
public:
    DensityOperator() = default;
    DensityOperator(ModeLayout layout, Matrix matrix) : layout_(std::move(layout)), matrix_(std::move(matrix)) {
        const auto side = static_cast<Eigen::Index>(layout_.total());
        if (matrix_.rows() != side || matrix_.cols() != side)
            throw std::invalid_argument("DensityOperator: matrix side does not match layout");
        const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
        if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > tol::symmetric * scale)
            throw std::invalid_argument("DensityOperator: matrix is not symmetric");
    }

    [[nodiscard]] const ModeLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] const Matrix& matrix() const noexcept { return matrix_; }
    [[nodiscard]] double operator()(Index i, Index j) const {
        return matrix_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    [[nodiscard]] double trace() const { return matrix_.trace(); }
    [[nodiscard]] Index side() const noexcept { return layout_.total(); }

private:
    ModeLayout layout_;
    Matrix matrix_;
};

// ---------------------------------------------------------------------------
// Construction

inline MultiModeKet number_state(Index n, Index dim) {
    if (dim == 0) throw std::invalid_argument("number_state: dimension must be >= 1");
    if (n >= dim) throw std::out_of_range("number_state: level " + std::to_string(n) + " >= dimension " + std::to_string(dim));
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
    v(static_cast<Eigen::Index>(n)) = 1.0;
    return {ModeLayout{dim}, std::move(v)};
}

inline MultiModeKet tensor(const MultiModeKet& a, const MultiModeKet& b) {
    const auto na = a.amplitudes().size();
    const auto nb = b.amplitudes().size();
    Vector out(na * nb);
    for (Eigen::Index i = 0; i < na; ++i) out.segment(i * nb, nb) = a.amplitudes()(i) * b.amplitudes();
    return {a.layout().concat(b.layout()), std::move(out)};
}

inline DensityOperator density_from_ket(const MultiModeKet& psi) {
    const Vector& v = psi.amplitudes();
    return {psi.layout(), v * v.transpose()};
}

namespace detail {

// Validated, sorted copy of a subsystem selection.
inline std::vector<Index> checked_selection(const ModeLayout& layout, std::vector<Index> keep) {
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be nonempty");
    std::sort(keep.begin(), keep.end());
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
        throw std::invalid_argument("partial_trace: duplicate subsystem index");
    if (keep.back() >= layout.subsystems()) throw std::out_of_range("partial_trace: subsystem index out of range");
    return keep;
}

// Splits every flat index into (kept index, traced index) for the selection.
struct IndexSplit {
    std::vector<Index> kept;
    std::vector<Index> traced;
    Index kept_dim = 1;
    Index traced_dim = 1;
};

inline IndexSplit split_indices(const ModeLayout& layout, const std::vector<Index>& keep) {
    IndexSplit s;
    std::vector<bool> is_kept(layout.subsystems(), false);
    for (Index k : keep) is_kept[k] = true;
    for (Index k = 0; k < layout.subsystems(); ++k) (is_kept[k] ? s.kept_dim : s.traced_dim) *= layout.dim(k);

    const Index total = layout.total();
    s.kept.resize(total);
    s.traced.resize(total);
    std::vector<Index> digits(layout.subsystems(), 0);
    for (Index flat = 0; flat < total; ++flat) {
        Index kf = 0, tf = 0;
        for (Index k = 0; k < layout.subsystems(); ++k) {
            if (is_kept[k]) kf = kf * layout.dim(k) + digits[k];
            else tf = tf * layout.dim(k) + digits[k];
        }
        s.kept[flat] = kf;
        s.traced[flat] = tf;
        // increment the mixed-radix counter, last subsystem fastest
        for (Index k = layout.subsystems(); k-- > 0;) {
            if (++digits[k] < layout.dim(k)) break;
            digits[k] = 0;
        }
    }
    return s;
}

} // namespace detail

/// Reduced density operator of subsystems `keep`, summing over all others.
inline DensityOperator partial_trace(const DensityOperator& rho, std::vector<Index> keep) {
    keep = detail::checked_selection(rho.layout(), std::move(keep));
    const auto split = detail::split_indices(rho.layout(), keep);

    std::vector<std::vector<Index>> by_traced(split.traced_dim);
    for (Index i = 0; i < rho.side(); ++i) by_traced[split.traced[i]].push_back(i);

    const Matrix& m = rho.matrix();
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(split.kept_dim), static_cast<Eigen::Index>(split.kept_dim));
    for (const auto& group : by_traced) {
        for (Index i : group) {
            for (Index j : group) {
                const double v = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                if (v != 0.0) out(static_cast<Eigen::Index>(split.kept[i]), static_cast<Eigen::Index>(split.kept[j])) += v;
            }
        }
    }
    out = 0.5 * (out + out.transpose()).eval();
    return {rho.layout().restrict_to(keep), std::move(out)};
}

/// Same as partial_trace(density_from_ket(psi), keep) without materializing
/// the full projector; cost scales with the number of nonzero amplitudes.
inline DensityOperator partial_trace(const MultiModeKet& psi, std::vector<Index> keep) {
    keep = detail::checked_selection(psi.layout(), std::move(keep));
    const auto split = detail::split_indices(psi.layout(), keep);

    std::vector<std::vector<std::pair<Index, double>>> by_traced(split.traced_dim);
    for (Index i = 0; i < psi.layout().total(); ++i) {
        const double a = psi[i];
        if (a != 0.0) by_traced[split.traced[i]].emplace_back(split.kept[i], a);
    }

    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(split.kept_dim), static_cast<Eigen::Index>(split.kept_dim));
    for (const auto& group : by_traced) {
        for (const auto& [ki, ai] : group)
            for (const auto& [kj, aj] : group)
                out(static_cast<Eigen::Index>(ki), static_cast<Eigen::Index>(kj)) += ai * aj;
    }
    return {psi.layout().restrict_to(keep), std::move(out)};
}

/// Transposes the indices of subsystem `sub` only.
inline Matrix partial_transpose(const DensityOperator& rho, Index sub) {
    const ModeLayout& layout = rho.layout();
    if (sub >= layout.subsystems()) throw std::out_of_range("partial_transpose: subsystem index out of range");
    const Index stride = layout.stride(sub);
    const Index dim = layout.dim(sub);
    const Index side = rho.side();

    std::vector<Index> digit(side);
    for (Index i = 0; i < side; ++i) digit[i] = (i / stride) % dim;

    const Matrix& m = rho.matrix();
    Matrix out(m.rows(), m.cols());
    for (Index j = 0; j < side; ++j) {
        const Index dj = digit[j];
        for (Index i = 0; i < side; ++i) {
            const Index di = digit[i];
            const Index ip = i - di * stride + dj * stride;
            const Index jp = j - dj * stride + di * stride;
            out(static_cast<Eigen::Index>(ip), static_cast<Eigen::Index>(jp)) =
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Spectra
//
// Matrices in this library are block diagonal up to a permutation (the
// squeezed-state structure couples only a handful of basis states). The
// solvers split the exact-nonzero pattern into connected components and
// diagonalize each block with Eigen; the spectrum is that of the full matrix.

struct SpectralDecomposition {
    Vector values;  ///< ascending
    Matrix vectors; ///< column k pairs with values(k)
};

namespace detail {

class DisjointSets {
public:
    explicit DisjointSets(Index n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), Index{0}); }
    Index find(Index x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(Index a, Index b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<Index> parent_;
};

inline std::vector<std::vector<Index>> components(DisjointSets& sets, Index n) {
    std::vector<std::vector<Index>> out;
    std::vector<Index> slot(n, n);
    for (Index i = 0; i < n; ++i) {
        const Index r = sets.find(i);
        if (slot[r] == n) {
            slot[r] = out.size();
            out.emplace_back();
        }
        out[slot[r]].push_back(i);
    }
    return out;
}

inline void require_symmetric(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eig_symmetric: matrix is not square");
    if (m.size() == 0) return;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol::eig_symmetric * scale)
        throw std::invalid_argument("eig_symmetric: matrix is not symmetric");
}

template <class Entry>
void solve_blocks(const std::vector<std::vector<Index>>& blocks, Entry&& entry, bool with_vectors, Index n,
                  std::vector<std::pair<double, Index>>& values, Matrix* vectors) {
    Index pos = 0;
    for (const auto& block : blocks) {
        const auto b = static_cast<Eigen::Index>(block.size());
        if (b == 1) {
            values.emplace_back(entry(block[0], block[0]), pos);
            if (with_vectors) (*vectors)(static_cast<Eigen::Index>(block[0]), static_cast<Eigen::Index>(pos)) = 1.0;
            ++pos;
            continue;
        }
        Matrix sub(b, b);
        for (Eigen::Index r = 0; r < b; ++r)
            for (Eigen::Index c = 0; c < b; ++c) sub(r, c) = entry(block[static_cast<Index>(r)], block[static_cast<Index>(c)]);
        Eigen::SelfAdjointEigenSolver<Matrix> es(sub, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw std::runtime_error("eig_symmetric: eigensolver did not converge");
        for (Eigen::Index k = 0; k < b; ++k) {
            values.emplace_back(es.eigenvalues()(k), pos);
            if (with_vectors) {
                for (Eigen::Index r = 0; r < b; ++r)
                    (*vectors)(static_cast<Eigen::Index>(block[static_cast<Index>(r)]), static_cast<Eigen::Index>(pos)) =
                        es.eigenvectors()(r, k);
            }
            ++pos;
        }
    }
    (void)n;
}

inline SpectralDecomposition decompose_dense(const Matrix& m, bool with_vectors) {
    require_symmetric(m);
    const auto n = static_cast<Index>(m.rows());
    DisjointSets sets(n);
    for (Index j = 0; j < n; ++j)
        for (Index i = j + 1; i < n; ++i)
            if (m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0.0 ||
                m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) != 0.0)
                sets.unite(i, j);
    const auto blocks = components(sets, n);

    std::vector<std::pair<double, Index>> values;
    values.reserve(n);
    Matrix raw = with_vectors ? Matrix::Zero(m.rows(), m.cols()) : Matrix{};
    auto entry = [&m](Index r, Index c) {
        // symmetrize so the block solver sees an exactly symmetric matrix
        return 0.5 * (m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) +
                      m(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)));
    };
    solve_blocks(blocks, entry, with_vectors, n, values, &raw);

    std::stable_sort(values.begin(), values.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    SpectralDecomposition out;
    out.values.resize(static_cast<Eigen::Index>(n));
    if (with_vectors) out.vectors.resize(m.rows(), m.cols());
    for (Index k = 0; k < n; ++k) {
        out.values(static_cast<Eigen::Index>(k)) = values[k].first;
        if (with_vectors) out.vectors.col(static_cast<Eigen::Index>(k)) = raw.col(static_cast<Eigen::Index>(values[k].second));
    }
    return out;
}

} // namespace detail

/// Ascending eigenvalues of a real symmetric matrix.
inline Vector eig_symmetric(const Matrix& m) { return detail::decompose_dense(m, false).values; }

/// Sparse overload; never densifies beyond the largest connected block.
inline Vector eig_symmetric(const SparseMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eig_symmetric: matrix is not square");
    const auto n = static_cast<Index>(m.rows());
    const SparseMatrix diff = m - SparseMatrix(m.transpose());
    double scale = 1.0;
    for (Eigen::Index k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
    for (Eigen::Index k = 0; k < diff.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(diff, k); it; ++it)
            if (std::abs(it.value()) > tol::eig_symmetric * scale) throw std::invalid_argument("eig_symmetric: matrix is not symmetric");

    detail::DisjointSets sets(n);
    for (Eigen::Index k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it)
            if (it.value() != 0.0) sets.unite(static_cast<Index>(it.row()), static_cast<Index>(it.col()));
    const auto blocks = detail::components(sets, n);

    // local position of every index inside its block, for scatter
    std::vector<Index> block_of(n), local(n);
    for (Index b = 0; b < blocks.size(); ++b)
        for (Index r = 0; r < blocks[b].size(); ++r) {
            block_of[blocks[b][r]] = b;
            local[blocks[b][r]] = r;
        }
    std::vector<Matrix> dense(blocks.size());
    for (Index b = 0; b < blocks.size(); ++b) {
        const auto s = static_cast<Eigen::Index>(blocks[b].size());
        dense[b] = Matrix::Zero(s, s);
    }
    for (Eigen::Index k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            const auto r = static_cast<Index>(it.row()), c = static_cast<Index>(it.col());
            dense[block_of[r]](static_cast<Eigen::Index>(local[r]), static_cast<Eigen::Index>(local[c])) += 0.5 * it.value();
            dense[block_of[r]](static_cast<Eigen::Index>(local[c]), static_cast<Eigen::Index>(local[r])) += 0.5 * it.value();
        }

    std::vector<double> values;
    values.reserve(n);
    for (const auto& d : dense) {
        if (d.rows() == 1) {
            values.push_back(d(0, 0));
            continue;
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(d, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw std::runtime_error("eig_symmetric: eigensolver did not converge");
        for (Eigen::Index k = 0; k < d.rows(); ++k) values.push_back(es.eigenvalues()(k));
    }
    std::sort(values.begin(), values.end());
    return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

/// Eigenvalues plus orthonormal eigenvectors, m = V diag(values) V^T.
inline SpectralDecomposition spectral_decomposition(const Matrix& m) { return detail::decompose_dense(m, true); }

// ---------------------------------------------------------------------------
// Entropy

enum class LogBase { two, e };

/// Shannon entropy of a spectrum; negative values above -1e-8 count as zero.
inline double spectrum_entropy(const Vector& eigenvalues, LogBase base = LogBase::two) {
    double s = 0.0;
    for (double lambda : eigenvalues) {
        if (lambda < -tol::entropy_error)
            throw not_a_state_error("von_neumann_entropy: eigenvalue " + std::to_string(lambda) + " is below -1e-8");
        const double p = std::clamp(lambda, 0.0, 1.0);
        if (p > 0.0) s -= p * std::log(p);
    }
    return base == LogBase::two ? s / std::log(2.0) : s;
}

inline double von_neumann_entropy(const DensityOperator& rho, LogBase base = LogBase::two) {
    return spectrum_entropy(eig_symmetric(rho.matrix()), base);
}

/// Smallest eigenvalue is at least -tol.
inline bool is_positive_semidefinite(const Matrix& m, double tolerance = tol::psd_clip) {
    const Vector v = eig_symmetric(m);
    return v.size() == 0 || v(0) >= -tolerance;
}

/// Places an operator on subsystem `sub` with a larger local dimension,
/// padding the new levels with zeros (|k> stays |k>).
inline DensityOperator embed_subsystem(const DensityOperator& rho, Index sub, Index new_dim) {
    const ModeLayout& from = rho.layout();
    if (sub >= from.subsystems()) throw std::out_of_range("embed_subsystem: subsystem index out of range");
    if (new_dim < from.dim(sub)) throw std::invalid_argument("embed_subsystem: new dimension is smaller than the old one");
    std::vector<Index> dims = from.dims();
    dims[sub] = new_dim;
    ModeLayout to(dims);

    std::vector<Index> map(from.total());
    for (Index i = 0; i < from.total(); ++i) {
        Index flat = 0;
        for (Index k = 0; k < from.subsystems(); ++k) flat = flat * to.dim(k) + from.digit(i, k);
        map[i] = flat;
    }
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(to.total()), static_cast<Eigen::Index>(to.total()));
    for (Index i = 0; i < from.total(); ++i)
        for (Index j = 0; j < from.total(); ++j)
            out(static_cast<Eigen::Index>(map[i]), static_cast<Eigen::Index>(map[j])) = rho(i, j);
    return {std::move(to), std::move(out)};
}

} // namespace horizon
