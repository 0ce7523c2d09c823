#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "thirdq/gaussian.hpp"
#include "thirdq/trace.hpp"

namespace thirdq::analysis {

/// One-standard-deviation uncertainties, field-aligned with GaussianModel.
/// The width entry is zero when the fit held the width fixed.
struct ParameterSigmas {
    double peak = 0.0;      // V
    double center = 0.0;    // GHz
    double width = 0.0;     // GHz
    double baseline = 0.0;  // V
};

struct FitResult {
    GaussianModel model;
    ParameterSigmas sigma;
    double residual_rms = 0.0;   // V
    Eigen::MatrixXd covariance;  // free parameters, ordered peak, center, [width,] baseline
    bool converged = false;
    int iterations = 0;
    bool width_fixed = false;
};

/// Robust starting point for a single emission peak: peak = max - median,
/// center at the voltage maximum, width = span/8, baseline = median.
GaussianModel initial_guess(const trace::ScanTrace& t);

/// Damped least-squares fit of a Gaussian to a scan trace. Free parameters are
/// {peak, center, baseline} plus the width unless fixed_width is given, in
/// which case the width is clamped to that value and dropped from the fit.
/// The center is constrained to the scanned detuning range; a peak cannot be
/// localized outside the data window.
FitResult fit_gaussian(const trace::ScanTrace& t, const GaussianModel& initial,
                       std::optional<double> fixed_width = std::nullopt);

struct ValueWithError {
    double value = 0.0;
    double rel_uncertainty = 0.0;  // fractional, >= 0

    friend bool operator==(const ValueWithError&, const ValueWithError&) = default;
};

/// The experimental parameter set entering the rate-ratio bound: detector
/// outputs V, attenuations A, optical losses L, quantum efficiencies eta, and
/// external gains g at both wavelengths, each with a relative uncertainty.
struct ExperimentParams {
    ValueWithError v_780;    // V
    ValueWithError v_1560;   // V
    ValueWithError a_780;    // dimensionless attenuation
    ValueWithError a_1560;   // dimensionless attenuation
    ValueWithError l_780;    // dimensionless loss
    ValueWithError l_1560;   // dimensionless loss
    ValueWithError eta_780;  // quantum efficiency
    ValueWithError eta_1560; // quantum efficiency
    ValueWithError g_780;    // external gain
    ValueWithError g_1560;   // external gain
    double confidence_multiplier = 3.0;

    friend bool operator==(const ExperimentParams&, const ExperimentParams&) = default;
};

/// The published parameter set, embedded so the bound runs with no input files.
ExperimentParams reference_params();

/// Error factor f_e = 1 + sqrt(sum of squared relative uncertainties) over all
/// ten parameter entries.
double error_factor(const ExperimentParams& params);

struct BoundResult {
    double f_e = 1.0;          // dimensionless
    double r_bound = 0.0;      // dimensionless rate ratio
    double gamma_bound = 0.0;  // rad
    std::string confidence_label;
};

/// Upper bound on the inelastic/elastic rate ratio,
///   R <= cm * (V1560/V780)(A1560/A780)(L1560/L780)(eta780/eta1560)(g780/g1560) * f_e,
/// and the induced bound gamma = sqrt(R/4).
BoundResult ratio_bound(const ExperimentParams& params, double f_e);

/// Full reduction: fit the 780 nm trace with a free width, fit the 1560 nm
/// trace with that width held fixed, take V780 = fitted 780 peak and V1560 =
/// the one-standard-deviation uncertainty of the 1560 peak (the fitted peak
/// itself is consistent with zero and discarded), then form the bound.
BoundResult full_pipeline(const trace::ScanTrace& trace_780, const trace::ScanTrace& trace_1560,
                          const ExperimentParams& params);

/// JSON serialization of ExperimentParams. Numeric values survive a
/// round-trip bit-exactly.
std::string params_to_json(const ExperimentParams& params);
ExperimentParams params_from_json(const std::string& text);
ExperimentParams read_params(const std::filesystem::path& path);
void write_params(const ExperimentParams& params, const std::filesystem::path& path);

}  // namespace thirdq::analysis
