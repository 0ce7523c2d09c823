#include "thirdq/trace.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace thirdq::trace {

namespace {

constexpr double kTwoPi = 6.2831853071795864769;
constexpr std::string_view kHeader = "detuning_ghz,voltage_v";
constexpr std::string_view kMetaPrefix = "# meta: ";

/// splitmix64 finalizer: avalanches a 64-bit counter into a well-mixed word.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Uniform deviate in the open interval (0, 1), a pure function of (seed, counter).
double uniform01(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t word = mix64(mix64(seed) ^ (counter + 0x632be59bd9b4e019ULL));
    return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
    std::ostringstream msg;
    msg << "trace parse error at line " << line << ": " << what;
    throw std::runtime_error(msg.str());
}

double parse_field(std::string_view field, std::size_t line) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) parse_error(line, "non-numeric field");
    if (!std::isfinite(value)) parse_error(line, "non-finite value");
    return value;
}

void validate(const ScanTrace& t) {
    if (t.samples.size() < 2) throw std::invalid_argument("trace needs at least two samples");
    double prev = t.samples.front().first;
    if (!std::isfinite(prev) || !std::isfinite(t.samples.front().second)) {
        throw std::invalid_argument("trace values must be finite");
    }
    for (std::size_t i = 1; i < t.samples.size(); ++i) {
        const auto [d, v] = t.samples[i];
        if (!std::isfinite(d) || !std::isfinite(v)) {
            throw std::invalid_argument("trace values must be finite");
        }
        if (d <= prev) throw std::invalid_argument("trace detunings must be strictly increasing");
        prev = d;
    }
}

}  // namespace

double gaussian_deviate(std::uint64_t seed, std::uint64_t index) {
    // One Box-Muller deviate per index, spending counters 2i and 2i+1; the
    // sine partner is discarded to keep the counter map stateless.
    const double u1 = uniform01(seed, 2 * index);
    const double u2 = uniform01(seed, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

ScanTrace generate_trace(const TraceSpec& spec) {
    if (spec.n_samples < 2) throw std::invalid_argument("trace spec needs at least two samples");
    if (!(spec.span > 0.0) || !std::isfinite(spec.span)) {
        throw std::invalid_argument("trace span must be positive");
    }
    if (spec.noise_sigma < 0.0 || !std::isfinite(spec.noise_sigma)) {
        throw std::invalid_argument("noise level must be nonnegative");
    }
    if (!(spec.model.width > 0.0)) throw std::invalid_argument("model width must be positive");
    if (spec.sign != 1 && spec.sign != -1) throw std::invalid_argument("trace sign must be +1 or -1");

    ScanTrace out;
    out.meta = spec.meta;
    out.samples.reserve(static_cast<std::size_t>(spec.n_samples));
    const double lo = -0.5 * spec.span;
    const double step = spec.span / static_cast<double>(spec.n_samples - 1);
    for (int i = 0; i < spec.n_samples; ++i) {
        const double delta = lo + step * static_cast<double>(i);
        const double z = (delta - spec.model.center) / spec.model.width;
        double volts = static_cast<double>(spec.sign) * spec.model.peak * std::exp(-0.5 * z * z) +
                       spec.model.baseline;
        if (spec.noise_sigma > 0.0) {
            volts += spec.noise_sigma * gaussian_deviate(spec.seed, static_cast<std::uint64_t>(i));
        }
        out.samples.emplace_back(delta, volts);
    }
    return out;
}

void write_trace(const ScanTrace& trace, std::ostream& out) {
    validate(trace);
    out << kHeader << '\n';
    if (!trace.meta.empty()) out << kMetaPrefix << trace.meta << '\n';
    char buf[64];
    for (const auto& [delta, volts] : trace.samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", delta, volts);
        out << buf << '\n';
    }
    if (!out) throw std::runtime_error("trace write failed");
}

void write_trace(const ScanTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open trace file for writing: " + path.string());
    write_trace(trace, out);
}

ScanTrace read_trace(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) parse_error(1, "missing header");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) parse_error(line_no, "missing header");

    ScanTrace out;
    bool have_prev = false;
    double prev = 0.0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (out.meta.empty() && line.rfind(kMetaPrefix, 0) == 0) {
                out.meta = line.substr(kMetaPrefix.size());
            }
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) parse_error(line_no, "malformed row");
        const std::string_view view(line);
        const double delta = parse_field(view.substr(0, comma), line_no);
        const double volts = parse_field(view.substr(comma + 1), line_no);
        if (have_prev && delta <= prev) parse_error(line_no, "non-monotonic detuning");
        out.samples.emplace_back(delta, volts);
        prev = delta;
        have_prev = true;
    }
    if (out.samples.size() < 2) parse_error(line_no + 1, "fewer than two samples");
    return out;
}

ScanTrace read_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path.string());
    return read_trace(in);
}

}  // namespace thirdq::trace
