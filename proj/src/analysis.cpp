#include "thirdq/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include <json.hpp>

namespace thirdq::analysis {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kJacobianRelStep = 1e-6;
constexpr double kGradientTol = 1e-10;
constexpr double kCostDecreaseTol = 1e-12;

/// Parameter packing for the optimizer: peak, center, [width,] baseline.
Eigen::VectorXd pack(const GaussianModel& m, bool width_free) {
    Eigen::VectorXd th(width_free ? 4 : 3);
    th(0) = m.peak;
    th(1) = m.center;
    if (width_free) {
        th(2) = m.width;
        th(3) = m.baseline;
    } else {
        th(2) = m.baseline;
    }
    return th;
}

GaussianModel unpack(const Eigen::VectorXd& th, bool width_free, double fixed_width) {
    GaussianModel m;
    m.peak = th(0);
    m.center = th(1);
    if (width_free) {
        m.width = th(2);
        m.baseline = th(3);
    } else {
        m.width = fixed_width;
        m.baseline = th(2);
    }
    return m;
}

Eigen::VectorXd residuals(const trace::ScanTrace& t, const GaussianModel& m) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(t.samples.size()));
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        const auto& [delta, volts] = t.samples[static_cast<std::size_t>(i)];
        r(i) = volts - m(delta);
    }
    return r;
}

/// Forward-difference Jacobian of the model values with respect to the free
/// parameters: P(i, j) = d model(delta_i) / d theta_j.
Eigen::MatrixXd model_jacobian(const trace::ScanTrace& t, const Eigen::VectorXd& th,
                               bool width_free, double fixed_width) {
    const Eigen::Index n = static_cast<Eigen::Index>(t.samples.size());
    const Eigen::Index p = th.size();
    const GaussianModel base = unpack(th, width_free, fixed_width);
    Eigen::VectorXd base_vals(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        base_vals(i) = base(t.samples[static_cast<std::size_t>(i)].first);
    }
    Eigen::MatrixXd jac(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double h = kJacobianRelStep * std::max(std::abs(th(j)), 1.0);
        Eigen::VectorXd shifted = th;
        shifted(j) += h;
        const GaussianModel bumped = unpack(shifted, width_free, fixed_width);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double delta = t.samples[static_cast<std::size_t>(i)].first;
            jac(i, j) = (bumped(delta) - base(delta)) / h;
        }
    }
    return jac;
}

double median(std::vector<double> values) {
    const std::size_t n = values.size();
    const std::size_t mid = n / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                     values.end());
    const double hi = values[mid];
    if (n % 2 == 1) return hi;
    const double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

void require_positive(double value) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw std::domain_error("invalid experimental parameter");
    }
}

}  // namespace

GaussianModel initial_guess(const trace::ScanTrace& t) {
    if (t.samples.size() < 2) throw std::invalid_argument("trace needs at least two samples");
    std::vector<double> volts;
    volts.reserve(t.samples.size());
    double vmax = t.samples.front().second;
    double argmax = t.samples.front().first;
    for (const auto& [delta, v] : t.samples) {
        volts.push_back(v);
        if (v > vmax) {
            vmax = v;
            argmax = delta;
        }
    }
    const double base = median(std::move(volts));
    const double span = t.samples.back().first - t.samples.front().first;
    GaussianModel guess;
    guess.peak = vmax - base;
    guess.center = argmax;
    guess.width = span / 8.0;
    guess.baseline = base;
    return guess;
}

FitResult fit_gaussian(const trace::ScanTrace& t, const GaussianModel& initial,
                       std::optional<double> fixed_width) {
    if (t.samples.size() < 8) throw std::invalid_argument("trace too short for fit");
    for (const auto& [delta, volts] : t.samples) {
        if (!std::isfinite(delta) || !std::isfinite(volts)) {
            throw std::invalid_argument("trace values must be finite");
        }
    }
    const bool width_free = !fixed_width.has_value();
    const double clamp_width = fixed_width.value_or(initial.width);
    if (!(clamp_width > 0.0) || !std::isfinite(clamp_width)) {
        throw std::invalid_argument("fit width must be positive");
    }
    const double span = t.samples.back().first - t.samples.front().first;
    if (!(span > 2.0 * clamp_width)) {
        throw std::invalid_argument("trace span too narrow for fit");
    }
    // A peak can only be localized inside the scanned detuning range, so the
    // center is confined to the data window. Without this, noise-dominated
    // traces let the near-dead center direction run off the scan, where the
    // line shape underflows and the normal equations degenerate.
    const double window_lo = t.samples.front().first;
    const double window_hi = t.samples.back().first;

    GaussianModel start = initial;
    start.width = clamp_width;
    start.center = std::clamp(start.center, window_lo, window_hi);
    Eigen::VectorXd th = pack(start, width_free);
    const Eigen::Index n = static_cast<Eigen::Index>(t.samples.size());
    const Eigen::Index p = th.size();

    Eigen::VectorXd r = residuals(t, unpack(th, width_free, clamp_width));
    double cost = r.squaredNorm();

    double lambda = 1e-3;
    bool converged = false;
    int iterations = 0;
    Eigen::MatrixXd jac;

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        jac = model_jacobian(t, th, width_free, clamp_width);
        // Cost C = sum r^2 with r = V - model, so grad C = -2 P^T r.
        const Eigen::VectorXd g = jac.transpose() * r;
        if (2.0 * g.lpNorm<Eigen::Infinity>() < kGradientTol) {
            converged = true;
            break;
        }

        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        Eigen::VectorXd damping = jtj.diagonal();
        for (Eigen::Index j = 0; j < p; ++j) {
            if (!(damping(j) > 0.0)) damping(j) = 1.0;  // keep dead directions pinned
        }

        bool accepted = false;
        double rel_decrease = 0.0;
        while (lambda < 1e16) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += lambda * damping;
            const Eigen::VectorXd step = a.ldlt().solve(g);
            if (!step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            Eigen::VectorXd trial = th + step;
            trial(1) = std::clamp(trial(1), window_lo, window_hi);
            const GaussianModel trial_model = unpack(trial, width_free, clamp_width);
            if (width_free && !(trial_model.width > 0.0)) {
                lambda *= 10.0;
                continue;
            }
            const Eigen::VectorXd r_trial = residuals(t, trial_model);
            const double cost_trial = r_trial.squaredNorm();
            if (std::isfinite(cost_trial) && cost_trial <= cost) {
                rel_decrease = (cost - cost_trial) / std::max(cost, 1e-300);
                // Gain ratio: actual decrease over the decrease predicted by the
                // local quadratic model. Shrink the damping only when the model
                // is trustworthy; grow it when an accepted step badly
                // underperforms, which suppresses zig-zagging between
                // near-degenerate shallow minima on noise-dominated traces.
                const double predicted =
                    step.dot(g) + lambda * step.dot(damping.cwiseProduct(step));
                const double gain = (cost - cost_trial) / std::max(predicted, 1e-300);
                th = trial;
                r = r_trial;
                cost = cost_trial;
                if (gain > 0.75) {
                    lambda = std::max(lambda / 3.0, 1e-12);
                } else if (gain < 0.25) {
                    lambda = std::min(lambda * 2.0, 1e15);
                }
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        ++iterations;
        if (accepted && rel_decrease < kCostDecreaseTol) {
            converged = true;
            break;
        }
        if (!accepted) break;  // damping exhausted; report non-convergence
    }
    if (!converged) throw std::runtime_error("fit did not converge");

    FitResult out;
    out.model = unpack(th, width_free, clamp_width);
    out.converged = true;
    out.iterations = iterations;
    out.width_fixed = !width_free;
    out.residual_rms = std::sqrt(cost / static_cast<double>(n));

    const double dof = static_cast<double>(n - p);
    const double variance = cost / dof;
    if (cost == 0.0) {
        out.covariance = Eigen::MatrixXd::Zero(p, p);
    } else {
        jac = model_jacobian(t, th, width_free, clamp_width);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
        if (!lu.isInvertible()) throw std::runtime_error("degenerate fit geometry");
        out.covariance = variance * lu.inverse();
    }

    auto sigma_at = [&](Eigen::Index j) { return std::sqrt(std::max(out.covariance(j, j), 0.0)); };
    out.sigma.peak = sigma_at(0);
    out.sigma.center = sigma_at(1);
    if (width_free) {
        out.sigma.width = sigma_at(2);
        out.sigma.baseline = sigma_at(3);
    } else {
        out.sigma.width = 0.0;
        out.sigma.baseline = sigma_at(2);
    }
    return out;
}

ExperimentParams reference_params() {
    ExperimentParams p;
    p.v_780 = {1.18, 0.01};
    p.v_1560 = {0.0012, 0.15};
    p.a_780 = {620.0, 0.05};
    p.a_1560 = {1.0, 0.0};
    p.l_780 = {1.60, 0.04};
    p.l_1560 = {2.05, 0.014};
    p.eta_780 = {0.15, 0.05};
    p.eta_1560 = {0.75, 0.02};
    p.g_780 = {10.0, 0.01};
    p.g_1560 = {100.0, 0.01};
    p.confidence_multiplier = 3.0;
    return p;
}

namespace {

using EntryRef = ValueWithError ExperimentParams::*;

constexpr std::array<std::pair<const char*, EntryRef>, 10> kEntries = {{
    {"v_780", &ExperimentParams::v_780},
    {"v_1560", &ExperimentParams::v_1560},
    {"a_780", &ExperimentParams::a_780},
    {"a_1560", &ExperimentParams::a_1560},
    {"l_780", &ExperimentParams::l_780},
    {"l_1560", &ExperimentParams::l_1560},
    {"eta_780", &ExperimentParams::eta_780},
    {"eta_1560", &ExperimentParams::eta_1560},
    {"g_780", &ExperimentParams::g_780},
    {"g_1560", &ExperimentParams::g_1560},
}};

}  // namespace

double error_factor(const ExperimentParams& params) {
    double sum_sq = 0.0;
    for (const auto& [name, ref] : kEntries) {
        const double rel = (params.*ref).rel_uncertainty;
        if (!std::isfinite(rel) || rel < 0.0) {
            throw std::domain_error("invalid experimental parameter");
        }
        sum_sq += rel * rel;
    }
    return 1.0 + std::sqrt(sum_sq);
}

BoundResult ratio_bound(const ExperimentParams& params, double f_e) {
    require_positive(params.v_780.value);
    require_positive(params.a_780.value);
    require_positive(params.a_1560.value);
    require_positive(params.l_780.value);
    require_positive(params.l_1560.value);
    require_positive(params.eta_780.value);
    require_positive(params.eta_1560.value);
    require_positive(params.g_780.value);
    require_positive(params.g_1560.value);
    require_positive(params.confidence_multiplier);
    require_positive(f_e);
    if (!std::isfinite(params.v_1560.value) || params.v_1560.value < 0.0) {
        throw std::domain_error("invalid experimental parameter");
    }

    BoundResult out;
    out.f_e = f_e;
    out.r_bound = params.confidence_multiplier * (params.v_1560.value / params.v_780.value) *
                  (params.a_1560.value / params.a_780.value) *
                  (params.l_1560.value / params.l_780.value) *
                  (params.eta_780.value / params.eta_1560.value) *
                  (params.g_780.value / params.g_1560.value) * f_e;
    out.gamma_bound = std::sqrt(out.r_bound / 4.0);
    if (params.confidence_multiplier == 3.0) {
        out.confidence_label = "99% (3 standard deviations)";
    } else {
        std::ostringstream label;
        label << params.confidence_multiplier << " standard deviations";
        out.confidence_label = label.str();
    }
    return out;
}

BoundResult full_pipeline(const trace::ScanTrace& trace_780, const trace::ScanTrace& trace_1560,
                          const ExperimentParams& params) {
    const FitResult fit_780 = fit_gaussian(trace_780, initial_guess(trace_780));
    const FitResult fit_1560 =
        fit_gaussian(trace_1560, initial_guess(trace_1560), fit_780.model.width);
    ExperimentParams resolved = params;
    resolved.v_780.value = fit_780.model.peak;
    resolved.v_1560.value = fit_1560.sigma.peak;
    return ratio_bound(resolved, error_factor(resolved));
}

namespace {

using nlohmann::ordered_json;

ordered_json entry_to_json(const ValueWithError& e) {
    return ordered_json{{"value", e.value}, {"rel_uncertainty", e.rel_uncertainty}};
}

ValueWithError entry_from_json(const ordered_json& j, const char* name) {
    if (!j.is_object() || !j.contains("value") || !j.contains("rel_uncertainty")) {
        throw std::runtime_error(std::string("parameter parse error: entry '") + name +
                                 "' needs value and rel_uncertainty");
    }
    ValueWithError e;
    if (!j.at("value").is_number() || !j.at("rel_uncertainty").is_number()) {
        throw std::runtime_error(std::string("parameter parse error: entry '") + name +
                                 "' has a non-numeric field");
    }
    e.value = j.at("value").get<double>();
    e.rel_uncertainty = j.at("rel_uncertainty").get<double>();
    if (!std::isfinite(e.value) || !std::isfinite(e.rel_uncertainty) || e.rel_uncertainty < 0.0) {
        throw std::runtime_error(std::string("parameter parse error: entry '") + name +
                                 "' is out of range");
    }
    return e;
}

}  // namespace

std::string params_to_json(const ExperimentParams& params) {
    ordered_json j;
    for (const auto& [name, ref] : kEntries) {
        j[name] = entry_to_json(params.*ref);
    }
    j["confidence_multiplier"] = params.confidence_multiplier;
    return j.dump(2) + "\n";
}

ExperimentParams params_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("parameter parse error: ") + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("parameter parse error: top level is not an object");
    ExperimentParams params;
    for (const auto& [name, ref] : kEntries) {
        if (!j.contains(name)) {
            throw std::runtime_error(std::string("parameter parse error: missing key '") + name +
                                     "'");
        }
        params.*ref = entry_from_json(j.at(name), name);
    }
    if (j.contains("confidence_multiplier")) {
        if (!j.at("confidence_multiplier").is_number()) {
            throw std::runtime_error("parameter parse error: confidence_multiplier is not numeric");
        }
        params.confidence_multiplier = j.at("confidence_multiplier").get<double>();
        if (!std::isfinite(params.confidence_multiplier) || params.confidence_multiplier <= 0.0) {
            throw std::runtime_error("parameter parse error: confidence_multiplier is out of range");
        }
    }
    return params;
}

ExperimentParams read_params(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open parameter file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return params_from_json(buf.str());
}

void write_params(const ExperimentParams& params, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open parameter file for writing: " + path.string());
    out << params_to_json(params);
    if (!out) throw std::runtime_error("parameter write failed");
}

}  // namespace thirdq::analysis
