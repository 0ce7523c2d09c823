#pragma once

#include <cstddef>
#include <vector>

#include "thirdq/fock.hpp"

namespace thirdq::scattering {

/// Predicted inelastic/elastic scattering-rate ratio R = 4 gamma^2.
struct RatioPrediction {
    double gamma;
    double ratio;
};

RatioPrediction predicted_ratio(double gamma);

/// Inverse of predicted_ratio for gamma >= 0: gamma = sqrt(R/4).
double gamma_from_ratio(double ratio);

/// One pair-creation channel: amplitude to a specific final basis state.
struct PairChannel {
    std::size_t final_state;
    double amplitude;
};

/// Decomposition of the transformed photon creation operator, acting on a
/// one-oscillaton initial state, into its number-conserving matrix element
/// and the pair-creating amplitudes. Writing the bare operators in terms
/// of the dressed ones, each ladder term splits into a number-conserving
/// piece with coefficient beta^2 cos^2(g) and a pair-creating piece with
/// coefficient -beta^2 cos(g) sin(g); the dressed operators act as
/// canonical ladder matrices on the asymptotic basis.
struct ChannelDecomposition {
    double elastic_amplitude;
    std::vector<PairChannel> pair_amplitudes;
    double gamma;
};

ChannelDecomposition decompose_channels(const fock::ModeSpace& space, const fock::MixingParams& p,
                                        int initial_level = 0);

/// Kinematic inputs for the inelastic channel.
struct Kinematics {
    double omega_in;                  // incident photon angular frequency, rad/s
    double mass = 0.0;                // oscillaton mass, kg
    double c_light = 299792458.0;     // m/s
    double hbar = 1.054571817e-34;    // J*s
};

/// Frequency of the inelastically scattered photon:
///   omega' = omega/2 - m c^2 / hbar,
/// defined only above the pair-creation threshold hbar*omega > 2 m c^2.
double inelastic_frequency(const Kinematics& k);

}  // namespace thirdq::scattering
