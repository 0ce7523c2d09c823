#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "thirdq/gaussian.hpp"

namespace thirdq::trace {

/// One detector scan: voltage samples over a strictly increasing detuning axis.
struct ScanTrace {
    std::vector<std::pair<double, double>> samples;  // (detuning GHz, voltage V)
    std::string meta;                                // optional label

    std::size_t size() const { return samples.size(); }
};

/// Recipe for a deterministic synthetic scan trace.
struct TraceSpec {
    analysis::GaussianModel model;
    int sign = +1;               // +1 emission peak, -1 absorption dip
    double noise_sigma = 0.0;    // V, >= 0
    int n_samples = 256;         // >= 2
    double span = 5.0;           // GHz, total scan range
    std::uint64_t seed = 0;      // pseudo-random stream selector
    std::string meta;
};

ScanTrace generate_trace(const TraceSpec& spec);

/// Deterministic counter-based unit Gaussian deviate: the value is a pure
/// function of (seed, index), so streams can be sampled in any order.
double gaussian_deviate(std::uint64_t seed, std::uint64_t index);

void write_trace(const ScanTrace& trace, std::ostream& out);
void write_trace(const ScanTrace& trace, const std::filesystem::path& path);

ScanTrace read_trace(std::istream& in);
ScanTrace read_trace(const std::filesystem::path& path);

}  // namespace thirdq::trace
