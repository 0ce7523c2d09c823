#include "thirdq/fock.hpp"

#include <cmath>
#include <stdexcept>

namespace thirdq::fock {

namespace {

void enumerate_fixed_total(int slots, int total, Occupation& prefix, std::vector<Occupation>& out) {
    if (slots == 1) {
        prefix.push_back(total);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int m = 0; m <= total; ++m) {
        prefix.push_back(m);
        enumerate_fixed_total(slots - 1, total - m, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

ModeSpace::ModeSpace(int level_cutoff, int osc_cutoff)
    : level_cutoff_(level_cutoff), osc_cutoff_(osc_cutoff) {
    if (level_cutoff < 1) {
        throw std::invalid_argument("level cutoff must be at least 1");
    }
    if (osc_cutoff < 1) {
        throw std::invalid_argument("oscillaton cutoff must be at least 1");
    }
    const int slots = level_cutoff + 1;
    Occupation prefix;
    prefix.reserve(slots);
    for (int total = 0; total <= osc_cutoff; ++total) {
        enumerate_fixed_total(slots, total, prefix, basis_);
    }
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        index_.emplace(basis_[i], i);
    }
}

std::optional<std::size_t> ModeSpace::index_of(const Occupation& occ) const {
    auto it = index_.find(occ);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t ModeSpace::single_index(int level) const {
    if (level < 0 || level > level_cutoff_) {
        throw std::invalid_argument("level out of bounds");
    }
    Occupation occ(static_cast<std::size_t>(level_cutoff_) + 1, 0);
    occ[static_cast<std::size_t>(level)] = 1;
    return index_.at(occ);
}

std::vector<std::size_t> ModeSpace::single_sector() const {
    std::vector<std::size_t> sector;
    sector.reserve(static_cast<std::size_t>(level_cutoff_) + 1);
    for (int n = 0; n <= level_cutoff_; ++n) {
        sector.push_back(single_index(n));
    }
    return sector;
}

OperatorMatrix OperatorMatrix::identity(std::size_t dim) {
    OperatorMatrix id(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        id.entries_.emplace(Key{i, i}, Complex{1.0, 0.0});
    }
    return id;
}

Complex OperatorMatrix::at(std::size_t row, std::size_t col) const {
    auto it = entries_.find({row, col});
    return it == entries_.end() ? Complex{0.0, 0.0} : it->second;
}

void OperatorMatrix::add(std::size_t row, std::size_t col, Complex value) {
    if (row >= dim_ || col >= dim_) {
        throw std::out_of_range("operator entry outside matrix");
    }
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
        throw std::invalid_argument("operator amplitude not finite");
    }
    auto [it, inserted] = entries_.try_emplace({row, col}, value);
    if (!inserted) {
        it->second += value;
        if (it->second == Complex{0.0, 0.0}) {
            entries_.erase(it);
        }
    } else if (value == Complex{0.0, 0.0}) {
        entries_.erase(it);
    }
}

OperatorMatrix OperatorMatrix::adjoint() const {
    OperatorMatrix result(dim_);
    for (const auto& [key, value] : entries_) {
        result.entries_.emplace(Key{key.second, key.first}, std::conj(value));
    }
    return result;
}

OperatorMatrix OperatorMatrix::scaled(Complex factor) const {
    OperatorMatrix result(dim_);
    if (factor == Complex{0.0, 0.0}) {
        return result;
    }
    for (const auto& [key, value] : entries_) {
        result.entries_.emplace(key, factor * value);
    }
    return result;
}

OperatorMatrix OperatorMatrix::operator+(const OperatorMatrix& other) const {
    if (dim_ != other.dim_) {
        throw std::invalid_argument("operator dimension mismatch");
    }
    OperatorMatrix result = *this;
    for (const auto& [key, value] : other.entries_) {
        result.add(key.first, key.second, value);
    }
    return result;
}

OperatorMatrix OperatorMatrix::operator-(const OperatorMatrix& other) const {
    if (dim_ != other.dim_) {
        throw std::invalid_argument("operator dimension mismatch");
    }
    OperatorMatrix result = *this;
    for (const auto& [key, value] : other.entries_) {
        result.add(key.first, key.second, -value);
    }
    return result;
}

OperatorMatrix OperatorMatrix::operator*(const OperatorMatrix& other) const {
    if (dim_ != other.dim_) {
        throw std::invalid_argument("operator dimension mismatch");
    }
    // Row-major adjacency of the right factor, then one pass over the
    // left factor's entries.
    std::vector<std::vector<std::pair<std::size_t, Complex>>> rows(other.dim_);
    for (const auto& [key, value] : other.entries_) {
        rows[key.first].emplace_back(key.second, value);
    }
    OperatorMatrix result(dim_);
    for (const auto& [key, value] : entries_) {
        for (const auto& [col, rhs] : rows[key.second]) {
            result.add(key.first, col, value * rhs);
        }
    }
    return result;
}

std::vector<Complex> OperatorMatrix::apply(const std::vector<Complex>& vec) const {
    if (vec.size() != dim_) {
        throw std::invalid_argument("operator dimension mismatch");
    }
    std::vector<Complex> out(dim_, Complex{0.0, 0.0});
    for (const auto& [key, value] : entries_) {
        out[key.first] += value * vec[key.second];
    }
    return out;
}

OperatorMatrix OperatorMatrix::restricted(const std::vector<std::size_t>& kept) const {
    std::map<std::size_t, std::size_t> remap;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        remap.emplace(kept[i], i);
    }
    OperatorMatrix result(kept.size());
    for (const auto& [key, value] : entries_) {
        auto r = remap.find(key.first);
        auto c = remap.find(key.second);
        if (r != remap.end() && c != remap.end()) {
            result.entries_.emplace(Key{r->second, c->second}, value);
        }
    }
    return result;
}

double OperatorMatrix::max_abs() const {
    double max = 0.0;
    for (const auto& [key, value] : entries_) {
        max = std::max(max, std::abs(value));
    }
    return max;
}

double OperatorMatrix::max_abs_diff(const OperatorMatrix& other) const {
    if (dim_ != other.dim_) {
        throw std::invalid_argument("operator dimension mismatch");
    }
    double max = 0.0;
    auto it = entries_.begin();
    auto jt = other.entries_.begin();
    while (it != entries_.end() || jt != other.entries_.end()) {
        if (jt == other.entries_.end() || (it != entries_.end() && it->first < jt->first)) {
            max = std::max(max, std::abs(it->second));
            ++it;
        } else if (it == entries_.end() || jt->first < it->first) {
            max = std::max(max, std::abs(jt->second));
            ++jt;
        } else {
            max = std::max(max, std::abs(it->second - jt->second));
            ++it;
            ++jt;
        }
    }
    return max;
}

MixingParams mixing_params(double gamma) {
    constexpr double kQuarterPi = 0.78539816339744830962;
    if (!std::isfinite(gamma) || std::abs(gamma) >= kQuarterPi) {
        throw std::domain_error("mixing angle outside hyperbolic domain");
    }
    return {gamma, 1.0 / std::sqrt(std::cos(2.0 * gamma))};
}

InteriorProjector::InteriorProjector(const ModeSpace& space, int margin) : margin_(margin) {
    if (margin < 1) {
        throw std::invalid_argument("interior margin must be at least 1");
    }
    const int max_total = space.osc_cutoff() - margin;
    const int max_level = space.level_cutoff() - margin;
    for (std::size_t i = 0; i < space.dim(); ++i) {
        const Occupation& occ = space.occupation(i);
        int total = 0;
        bool high_level_empty = true;
        for (std::size_t n = 0; n < occ.size(); ++n) {
            total += occ[n];
            if (occ[n] != 0 && static_cast<int>(n) > max_level) {
                high_level_empty = false;
            }
        }
        if (total <= max_total && high_level_empty) {
            kept_.push_back(i);
        }
    }
}

OperatorMatrix build_annihilation(const ModeSpace& space, int level) {
    if (level < 0 || level > space.level_cutoff()) {
        throw std::invalid_argument("level out of bounds");
    }
    OperatorMatrix op(space.dim());
    for (std::size_t col = 0; col < space.dim(); ++col) {
        const Occupation& occ = space.occupation(col);
        const int k = occ[static_cast<std::size_t>(level)];
        if (k == 0) {
            continue;
        }
        Occupation lowered = occ;
        lowered[static_cast<std::size_t>(level)] = k - 1;
        // Lowering can never leave the truncated basis.
        const std::size_t row = *space.index_of(lowered);
        op.add(row, col, Complex{std::sqrt(static_cast<double>(k)), 0.0});
    }
    return op;
}

OperatorMatrix build_creation(const ModeSpace& space, int level) {
    return build_annihilation(space, level).adjoint();
}

std::pair<OperatorMatrix, OperatorMatrix> build_photon_ops(const ModeSpace& space) {
    OperatorMatrix a(space.dim());
    for (int n = 1; n <= space.level_cutoff(); ++n) {
        const OperatorMatrix term = build_creation(space, n - 1) * build_annihilation(space, n);
        a = a + term.scaled(Complex{std::sqrt(static_cast<double>(n)), 0.0});
    }
    return {a, a.adjoint()};
}

std::pair<OperatorMatrix, OperatorMatrix> bogoliubov_transform(const OperatorMatrix& c,
                                                               const OperatorMatrix& c_dagger,
                                                               const MixingParams& p) {
    if (c.dim() != c_dagger.dim()) {
        throw std::invalid_argument("operator dimension mismatch");
    }
    if (c.adjoint() != c_dagger) {
        throw std::invalid_argument("operator pair is not an adjoint pair");
    }
    const double cos_g = std::cos(p.gamma);
    const double sin_g = std::sin(p.gamma);
    const Complex bc{p.beta * cos_g, 0.0};
    const Complex bs{p.beta * sin_g, 0.0};

    OperatorMatrix c_prime = c.scaled(bc) + c_dagger.scaled(bs);
    OperatorMatrix c_prime_dagger = c.scaled(bs) + c_dagger.scaled(bc);

    bool real_input = true;
    for (const auto& [key, value] : c.entries()) {
        if (value.imag() != 0.0) {
            real_input = false;
            break;
        }
    }
    if (real_input && !(c_prime_dagger == c_prime.adjoint())) {
        throw std::logic_error("transformed pair lost adjoint consistency");
    }
    return {c_prime, c_prime_dagger};
}

OperatorMatrix field_operator(const ModeSpace& space, double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("field coordinate not finite");
    }
    const std::vector<double> phi = oscillator_eigenfunctions(space.level_cutoff(), x);
    OperatorMatrix psi(space.dim());
    for (int n = 0; n <= space.level_cutoff(); ++n) {
        psi = psi + build_annihilation(space, n).scaled(Complex{phi[static_cast<std::size_t>(n)], 0.0});
    }
    return psi;
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("operator dimension mismatch");
    }
    return a * b - b * a;
}

}  // namespace thirdq::fock
