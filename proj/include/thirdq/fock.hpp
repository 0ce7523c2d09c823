#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "thirdq/hermite.hpp"

namespace thirdq::fock {

using Complex = std::complex<double>;

/// Occupation vector (m_0, ..., m_L): number of oscillatons in each
/// harmonic-oscillator level of the mode.
using Occupation = std::vector<int>;

/// Truncated multi-oscillaton occupation basis for one field mode.
///
/// Keeps every occupation vector with Sum m_n <= osc_cutoff over levels
/// 0..level_cutoff, ordered by total number and then lexicographically.
/// The ordering is a pure function of the two cutoffs, so two spaces
/// built with the same cutoffs index their bases identically.
class ModeSpace {
public:
    ModeSpace(int level_cutoff, int osc_cutoff);

    int level_cutoff() const { return level_cutoff_; }
    int osc_cutoff() const { return osc_cutoff_; }
    std::size_t dim() const { return basis_.size(); }

    const Occupation& occupation(std::size_t index) const { return basis_[index]; }
    const std::vector<Occupation>& basis() const { return basis_; }

    /// Basis index of an occupation vector, or nullopt if it violates
    /// the cutoffs (truncated away).
    std::optional<std::size_t> index_of(const Occupation& occ) const;

    /// The zero-oscillaton state; always index 0.
    std::size_t vacuum_index() const { return 0; }

    /// Index of the one-oscillaton state at the given level.
    std::size_t single_index(int level) const;

    /// Basis indices of the one-oscillaton sector, ordered by level.
    std::vector<std::size_t> single_sector() const;

    bool operator==(const ModeSpace& other) const {
        return level_cutoff_ == other.level_cutoff_ && osc_cutoff_ == other.osc_cutoff_ &&
               basis_ == other.basis_;
    }

private:
    int level_cutoff_;
    int osc_cutoff_;
    std::vector<Occupation> basis_;
    std::map<Occupation, std::size_t> index_;
};

/// Sparse operator on a ModeSpace basis. Entries are kept in a map with
/// (row, col) keys so iteration order, and therefore every derived
/// quantity, is deterministic. Exact zeros produced by arithmetic are
/// pruned; explicitly never-touched entries are zero.
class OperatorMatrix {
public:
    using Key = std::pair<std::size_t, std::size_t>;
    using EntryMap = std::map<Key, Complex>;

    explicit OperatorMatrix(std::size_t dim) : dim_(dim) {}

    static OperatorMatrix identity(std::size_t dim);

    std::size_t dim() const { return dim_; }
    const EntryMap& entries() const { return entries_; }
    std::size_t nnz() const { return entries_.size(); }

    Complex at(std::size_t row, std::size_t col) const;
    void add(std::size_t row, std::size_t col, Complex value);

    OperatorMatrix adjoint() const;
    OperatorMatrix scaled(Complex factor) const;

    OperatorMatrix operator+(const OperatorMatrix& other) const;
    OperatorMatrix operator-(const OperatorMatrix& other) const;
    OperatorMatrix operator*(const OperatorMatrix& other) const;

    std::vector<Complex> apply(const std::vector<Complex>& vec) const;

    /// Submatrix over the given basis indices, reindexed positionally:
    /// entry (kept[i], kept[j]) of this matrix becomes entry (i, j).
    OperatorMatrix restricted(const std::vector<std::size_t>& kept) const;

    /// Largest entry magnitude.
    double max_abs() const;

    /// Largest entry magnitude of (*this - other).
    double max_abs_diff(const OperatorMatrix& other) const;

    bool operator==(const OperatorMatrix& other) const {
        return dim_ == other.dim_ && entries_ == other.entries_;
    }

private:
    std::size_t dim_;
    EntryMap entries_;
};

/// Bogoliubov mixing angle gamma with its normalization
/// beta = (cos^2 gamma - sin^2 gamma)^(-1/2), the factor that keeps the
/// transformed operators canonical. Only |gamma| < pi/4 is admissible;
/// beyond it beta diverges or turns imaginary.
struct MixingParams {
    double gamma;
    double beta;
};

MixingParams mixing_params(double gamma);

/// Truncation-safe subspace: occupation vectors that stay at least
/// `margin` quanta away from both cutoffs. Operator identities that
/// truncation necessarily breaks at the basis boundary hold exactly on
/// these indices.
class InteriorProjector {
public:
    InteriorProjector(const ModeSpace& space, int margin);

    int margin() const { return margin_; }
    const std::vector<std::size_t>& kept_indices() const { return kept_; }

private:
    int margin_;
    std::vector<std::size_t> kept_;
};

/// Oscillaton annihilation operator for one oscillator level:
/// maps m_level = k to k-1 with amplitude sqrt(k).
OperatorMatrix build_annihilation(const ModeSpace& space, int level);

/// Adjoint of build_annihilation.
OperatorMatrix build_creation(const ModeSpace& space, int level);

/// Generalized photon operators on the oscillaton basis:
///   a' = Sum_{n=1}^{L} sqrt(n) c^dag_{n-1} c_n,  a'^dag = adjoint(a').
/// On the one-oscillaton sector these reduce to the usual photon
/// ladder operators.
std::pair<OperatorMatrix, OperatorMatrix> build_photon_ops(const ModeSpace& space);

/// c' = beta (cos g * c + sin g * c^dag),
/// c'^dag = beta (sin g * c + cos g * c^dag).
/// For real operand matrices the second line is verified to equal
/// adjoint(c') entry for entry.
std::pair<OperatorMatrix, OperatorMatrix> bogoliubov_transform(const OperatorMatrix& c,
                                                               const OperatorMatrix& c_dagger,
                                                               const MixingParams& p);

/// Mode field operator psi(x) = Sum_n phi_n(x) c_n.
OperatorMatrix field_operator(const ModeSpace& space, double x);

/// ab - ba.
OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);

}  // namespace thirdq::fock
