#include "thirdq/scattering.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace thirdq::scattering {

namespace {

constexpr double kQuarterPi = 0.78539816339744830962;

}  // namespace

RatioPrediction predicted_ratio(double gamma) {
    if (!std::isfinite(gamma) || std::abs(gamma) >= kQuarterPi) {
        throw std::domain_error("mixing angle outside domain");
    }
    return RatioPrediction{gamma, 4.0 * gamma * gamma};
}

double gamma_from_ratio(double ratio) {
    if (!std::isfinite(ratio) || ratio < 0.0) {
        throw std::domain_error("negative rate ratio");
    }
    return std::sqrt(ratio / 4.0);
}

ChannelDecomposition decompose_channels(const fock::ModeSpace& space, const fock::MixingParams& p,
                                        int initial_level) {
    if (initial_level < 0) {
        throw std::out_of_range("level out of bounds");
    }
    // The elastic channel promotes the oscillaton one level up and the pair
    // channels add two more oscillatons, so both cutoffs need slack: the level
    // above initial_level must itself have a rung above it, and the basis must
    // hold three-oscillaton states.
    if (initial_level + 1 > space.level_cutoff() - 1 || space.osc_cutoff() < 3) {
        throw std::invalid_argument("insufficient truncation headroom");
    }

    const double cg = std::cos(p.gamma);
    const double sg = std::sin(p.gamma);
    const double b2 = p.beta * p.beta;
    const double pair_coeff = -b2 * cg * sg;

    ChannelDecomposition out;
    out.gamma = p.gamma;
    // Number-conserving channel: the dressed term sqrt(n+1) c'^+_{n+1} c'_n
    // acting on one oscillaton at initial_level, carrying beta^2 cos^2(g).
    out.elastic_amplitude =
        b2 * cg * cg * std::sqrt(static_cast<double>(initial_level) + 1.0);

    // Pair-creating channels: sqrt(n+1) c'^+_{n+1} c'^+_n applied to the same
    // initial state for every ladder rung, each carrying -beta^2 cos(g) sin(g).
    // The dressed operators obey canonical commutators, so on the asymptotic
    // basis they act as the standard ladder matrices.
    std::vector<fock::OperatorMatrix> cre;
    cre.reserve(static_cast<std::size_t>(space.level_cutoff()) + 1);
    for (int n = 0; n <= space.level_cutoff(); ++n) {
        cre.push_back(fock::build_annihilation(space, n).adjoint());
    }

    fock::OperatorMatrix pair_op(space.dim());
    for (int n = 0; n + 1 <= space.level_cutoff(); ++n) {
        const auto& hi = cre[static_cast<std::size_t>(n) + 1];
        const auto& lo = cre[static_cast<std::size_t>(n)];
        pair_op = pair_op + (hi * lo).scaled(std::sqrt(static_cast<double>(n) + 1.0));
    }

    const std::size_t init = space.single_index(initial_level);
    for (std::size_t row = 0; row < space.dim(); ++row) {
        const double amp = pair_coeff * pair_op.at(row, init).real();
        if (amp == 0.0) continue;
        out.pair_amplitudes.push_back(PairChannel{row, amp});
    }
    return out;
}

double inelastic_frequency(const Kinematics& k) {
    if (!std::isfinite(k.omega_in) || k.omega_in <= 0.0) {
        throw std::domain_error("incident frequency not positive");
    }
    if (!(k.mass >= 0.0) || !(k.c_light > 0.0) || !(k.hbar > 0.0)) {
        throw std::domain_error("invalid kinematic constants");
    }
    const double rest = k.mass * k.c_light * k.c_light / k.hbar;
    if (k.omega_in <= 2.0 * rest) {
        throw std::domain_error("below pair-creation threshold");
    }
    return k.omega_in / 2.0 - rest;
}

}  // namespace thirdq::scattering
