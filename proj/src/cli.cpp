#include "thirdq/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thirdq/analysis.hpp"
#include "thirdq/fock.hpp"
#include "thirdq/hermite.hpp"
#include "thirdq/scattering.hpp"
#include "thirdq/trace.hpp"

namespace thirdq::cli {

namespace {

using nlohmann::ordered_json;

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
}

ordered_json new_report(const std::string& command) {
    ordered_json doc;
    doc["command"] = command;
    doc["status"] = "ok";
    doc["inputs"] = ordered_json::object();
    doc["outputs"] = ordered_json::object();
    return doc;
}

void put_output(ordered_json& doc, const std::string& key, double value, const std::string& unit) {
    doc["outputs"][key] = ordered_json{{"value", value}, {"unit", unit}};
}

void put_output(ordered_json& doc, const std::string& key, std::int64_t value,
                const std::string& unit) {
    doc["outputs"][key] = ordered_json{{"value", value}, {"unit", unit}};
}

void write_report(const ordered_json& doc, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open report file for writing: " + path);
    f << doc.dump(2) << '\n';
    if (!f) throw std::runtime_error("report write failed");
}

std::string occupation_label(const fock::Occupation& occ) {
    std::ostringstream s;
    s << "m=(";
    for (std::size_t i = 0; i < occ.size(); ++i) {
        if (i > 0) s << ',';
        s << occ[i];
    }
    s << ')';
    return s.str();
}

// ---------------------------------------------------------------------------
// subcommand options
// ---------------------------------------------------------------------------

struct VerifyOpts {
    int levels = 6;
    int osc = 4;
    int gamma_grid = 20;
};

struct PredictOpts {
    double gamma = 0.0;
    int levels = 6;
    int osc = 4;
    int initial_level = 0;
    std::optional<double> mass;
    std::optional<double> omega;
};

struct FitOpts {
    std::string trace_path;
    std::optional<double> fix_width;
};

struct BoundOpts {
    std::string params_path;
    std::optional<double> v780;
    std::optional<double> v1560;
};

struct GenOpts {
    double peak = 0.0;
    double width = 0.0;
    double center = 0.0;
    double baseline = 0.0;
    double noise = 0.0;
    double span = 5.0;
    int samples = 256;
    std::uint64_t seed = 0;
    bool dip = false;
    std::string meta;
    std::string out_path;
};

struct PipelineOpts {
    std::string trace780_path;
    std::string trace1560_path;
    std::string params_path;
};

// ---------------------------------------------------------------------------
// handlers
// ---------------------------------------------------------------------------

void run_verify(const VerifyOpts& o, ordered_json& doc, std::ostream& out) {
    doc["inputs"] = {{"levels", o.levels}, {"osc", o.osc}, {"gamma_grid", o.gamma_grid}};

    const fock::ModeSpace space(o.levels, o.osc);
    const fock::InteriorProjector interior(space, 1);
    const auto& kept = interior.kept_indices();
    const auto id_kept = fock::OperatorMatrix::identity(kept.size());

    // Canonical commutators of the transformed operators on the interior.
    double comm_dev = 0.0;
    for (int i = 0; i < o.gamma_grid; ++i) {
        const double gamma =
            -0.5 + static_cast<double>(i) / static_cast<double>(o.gamma_grid - 1);
        const auto params = fock::mixing_params(gamma);
        for (int n = 0; n <= space.level_cutoff() - 1; ++n) {
            const auto c = fock::build_annihilation(space, n);
            const auto [cp, cpd] = fock::bogoliubov_transform(c, c.adjoint(), params);
            const auto comm = fock::commutator(cp, cpd).restricted(kept);
            comm_dev = std::max(comm_dev, comm.max_abs_diff(id_kept));
        }
    }

    // Photon operator on the one-oscillaton sector vs the textbook matrix.
    const auto sector = space.single_sector();
    const auto [a_op, a_dag] = fock::build_photon_ops(space);
    fock::OperatorMatrix textbook(sector.size());
    for (std::size_t n = 1; n < sector.size(); ++n) {
        textbook.add(n - 1, n, {std::sqrt(static_cast<double>(n)), 0.0});
    }
    const double sector_dev = a_op.restricted(sector).max_abs_diff(textbook);

    // Eigenfunction orthonormality under Gauss-Hermite quadrature.
    const auto rule = fock::gauss_hermite(std::max(4 * o.levels, 24));
    double gram_dev = 0.0;
    for (int n = 0; n <= 10; ++n) {
        for (int m = 0; m <= 10; ++m) {
            const double expected = (n == m) ? 1.0 : 0.0;
            gram_dev = std::max(gram_dev,
                                std::abs(fock::eigenfunction_overlap(n, m, rule) - expected));
        }
    }

    put_output(doc, "commutator_deviation", comm_dev, "dimensionless");
    put_output(doc, "single_sector_deviation", sector_dev, "dimensionless");
    put_output(doc, "orthonormality_deviation", gram_dev, "dimensionless");

    const bool comm_ok = comm_dev < 1e-12;
    const bool sector_ok = sector_dev == 0.0;
    const bool gram_ok = gram_dev < 1e-10;
    out << "commutator deviation      = " << fmt(comm_dev) << "  (limit 1e-12) "
        << (comm_ok ? "[ok]" : "[FAIL]") << '\n';
    out << "single-sector deviation   = " << fmt(sector_dev) << "  (limit exact) "
        << (sector_ok ? "[ok]" : "[FAIL]") << '\n';
    out << "orthonormality deviation  = " << fmt(gram_dev) << "  (limit 1e-10) "
        << (gram_ok ? "[ok]" : "[FAIL]") << '\n';
    if (!(comm_ok && sector_ok && gram_ok)) {
        throw std::runtime_error("algebra verification failed");
    }
}

void run_predict(const PredictOpts& o, ordered_json& doc, std::ostream& out) {
    doc["inputs"] = {{"gamma", o.gamma},
                     {"levels", o.levels},
                     {"osc", o.osc},
                     {"initial_level", o.initial_level}};
    if (o.mass) doc["inputs"]["mass_kg"] = *o.mass;
    if (o.omega) doc["inputs"]["omega_rad_s"] = *o.omega;

    const auto prediction = scattering::predicted_ratio(o.gamma);
    put_output(doc, "ratio", prediction.ratio, "dimensionless");
    out << "R = 4*gamma^2 = " << fmt(prediction.ratio) << '\n';

    const fock::ModeSpace space(o.levels, o.osc);
    const auto params = fock::mixing_params(o.gamma);
    const auto dec = scattering::decompose_channels(space, params, o.initial_level);
    put_output(doc, "elastic_amplitude", dec.elastic_amplitude, "dimensionless");
    out << "elastic amplitude = " << fmt(dec.elastic_amplitude) << '\n';

    const double elastic_sq = dec.elastic_amplitude * dec.elastic_amplitude;
    const double gamma_sq = o.gamma * o.gamma;
    ordered_json channels = ordered_json::array();
    for (const auto& ch : dec.pair_amplitudes) {
        const double ratio = ch.amplitude * ch.amplitude / elastic_sq;
        ordered_json entry;
        entry["final_state"] = ch.final_state;
        entry["final_occupation"] = occupation_label(space.occupation(ch.final_state));
        entry["amplitude"] = ordered_json{{"value", ch.amplitude}, {"unit", "dimensionless"}};
        entry["rate_ratio"] = ordered_json{{"value", ratio}, {"unit", "dimensionless"}};
        if (gamma_sq > 0.0) {
            entry["rate_ratio_over_gamma_sq"] =
                ordered_json{{"value", ratio / gamma_sq}, {"unit", "dimensionless"}};
        }
        channels.push_back(std::move(entry));
    }
    doc["outputs"]["pair_channels"] = channels;
    out << "pair channels: " << channels.size() << '\n';
    for (const auto& entry : channels) {
        out << "  " << entry["final_occupation"].get<std::string>()
            << "  amplitude = " << fmt(entry["amplitude"]["value"].get<double>())
            << "  rate ratio = " << fmt(entry["rate_ratio"]["value"].get<double>());
        if (entry.contains("rate_ratio_over_gamma_sq")) {
            out << "  ratio/gamma^2 = "
                << fmt(entry["rate_ratio_over_gamma_sq"]["value"].get<double>());
        }
        out << '\n';
    }

    if (o.omega) {
        scattering::Kinematics kin;
        kin.omega_in = *o.omega;
        kin.mass = o.mass.value_or(0.0);
        const double omega_out = scattering::inelastic_frequency(kin);
        put_output(doc, "inelastic_frequency", omega_out, "rad/s");
        out << "inelastic frequency = " << fmt(omega_out) << " rad/s\n";
    }
}

void run_fit(const FitOpts& o, ordered_json& doc, std::ostream& out) {
    doc["inputs"] = {{"trace", o.trace_path}};
    if (o.fix_width) doc["inputs"]["fix_width_ghz"] = *o.fix_width;

    const auto trace = trace::read_trace(std::filesystem::path(o.trace_path));
    doc["inputs"]["n_samples"] = trace.samples.size();
    const auto result = analysis::fit_gaussian(trace, analysis::initial_guess(trace), o.fix_width);

    put_output(doc, "peak", result.model.peak, "V");
    put_output(doc, "center", result.model.center, "GHz");
    put_output(doc, "width", result.model.width, "GHz");
    put_output(doc, "baseline", result.model.baseline, "V");
    put_output(doc, "sigma_peak", result.sigma.peak, "V");
    put_output(doc, "sigma_center", result.sigma.center, "GHz");
    put_output(doc, "sigma_width", result.sigma.width, "GHz");
    put_output(doc, "sigma_baseline", result.sigma.baseline, "V");
    put_output(doc, "residual_rms", result.residual_rms, "V");
    put_output(doc, "iterations", static_cast<std::int64_t>(result.iterations), "count");
    doc["outputs"]["width_fixed"] = result.width_fixed;

    out << "peak     = " << fmt(result.model.peak) << " +/- " << fmt(result.sigma.peak) << " V\n";
    out << "center   = " << fmt(result.model.center) << " +/- " << fmt(result.sigma.center)
        << " GHz\n";
    out << "width    = " << fmt(result.model.width);
    if (result.width_fixed) {
        out << " GHz (fixed)\n";
    } else {
        out << " +/- " << fmt(result.sigma.width) << " GHz\n";
    }
    out << "baseline = " << fmt(result.model.baseline) << " +/- " << fmt(result.sigma.baseline)
        << " V\n";
    out << "residual rms = " << fmt(result.residual_rms) << " V after " << result.iterations
        << " iterations\n";
}

analysis::ExperimentParams resolve_params(const std::string& path) {
    if (path.empty()) return analysis::reference_params();
    return analysis::read_params(std::filesystem::path(path));
}

void report_bound(const analysis::ExperimentParams& params, const analysis::BoundResult& res,
                  ordered_json& doc, std::ostream& out) {
    doc["inputs"]["params"] = ordered_json::parse(analysis::params_to_json(params));
    put_output(doc, "f_e", res.f_e, "dimensionless");
    put_output(doc, "r_bound", res.r_bound, "dimensionless");
    put_output(doc, "gamma_bound", res.gamma_bound, "rad");
    doc["outputs"]["confidence"] = res.confidence_label;

    out << "f_e         = " << fmt(res.f_e) << " (dimensionless)\n";
    out << "r_bound     = " << fmt(res.r_bound) << " (dimensionless)\n";
    out << "gamma_bound = " << fmt(res.gamma_bound) << " rad\n";
    out << "confidence  : " << res.confidence_label << '\n';
}

void run_bound(const BoundOpts& o, ordered_json& doc, std::ostream& out) {
    doc["inputs"]["params_file"] = o.params_path.empty() ? "(builtin)" : o.params_path;
    analysis::ExperimentParams params = resolve_params(o.params_path);
    if (o.v780) params.v_780.value = *o.v780;
    if (o.v1560) params.v_1560.value = *o.v1560;
    const auto res = analysis::ratio_bound(params, analysis::error_factor(params));
    report_bound(params, res, doc, out);
}

void run_gen(const GenOpts& o, ordered_json& doc, std::ostream& out) {
    trace::TraceSpec spec;
    spec.model.peak = o.peak;
    spec.model.center = o.center;
    spec.model.width = o.width;
    spec.model.baseline = o.baseline;
    spec.sign = o.dip ? -1 : +1;
    spec.noise_sigma = o.noise;
    spec.n_samples = o.samples;
    spec.span = o.span;
    spec.seed = o.seed;
    spec.meta = o.meta;

    doc["inputs"] = {{"peak_v", o.peak},        {"center_ghz", o.center},
                     {"width_ghz", o.width},    {"baseline_v", o.baseline},
                     {"noise_v", o.noise},      {"span_ghz", o.span},
                     {"samples", o.samples},    {"seed", o.seed},
                     {"dip", o.dip},            {"meta", o.meta},
                     {"out", o.out_path}};

    const auto trace = trace::generate_trace(spec);
    trace::write_trace(trace, std::filesystem::path(o.out_path));

    put_output(doc, "n_samples", static_cast<std::int64_t>(trace.samples.size()), "count");
    put_output(doc, "span", o.span, "GHz");
    doc["outputs"]["path"] = o.out_path;
    out << "wrote " << trace.samples.size() << " samples to " << o.out_path << '\n';
}

void run_pipeline(const PipelineOpts& o, ordered_json& doc, std::ostream& out) {
    doc["inputs"]["trace780"] = o.trace780_path;
    doc["inputs"]["trace1560"] = o.trace1560_path;
    doc["inputs"]["params_file"] = o.params_path.empty() ? "(builtin)" : o.params_path;

    const auto trace780 = trace::read_trace(std::filesystem::path(o.trace780_path));
    const auto trace1560 = trace::read_trace(std::filesystem::path(o.trace1560_path));
    const auto params = resolve_params(o.params_path);
    const auto res = analysis::full_pipeline(trace780, trace1560, params);
    report_bound(params, res, doc, out);
}

}  // namespace

int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"third-quantized field algebra and scan-trace analysis"};
    app.name("thirdq");
    app.require_subcommand(1);

    VerifyOpts verify_opts;
    PredictOpts predict_opts;
    FitOpts fit_opts;
    BoundOpts bound_opts;
    GenOpts gen_opts;
    PipelineOpts pipeline_opts;
    std::string report_path;

    auto* verify_cmd = app.add_subcommand("verify", "check the operator-algebra invariants");
    verify_cmd->add_option("--gamma-grid", verify_opts.gamma_grid, "mixing-angle grid points")
        ->check(CLI::Range(2, 100000));
    verify_cmd->add_option("--levels", verify_opts.levels, "level cutoff")->check(CLI::Range(1, 64));
    verify_cmd->add_option("--osc", verify_opts.osc, "oscillaton-number cutoff")
        ->check(CLI::Range(1, 64));

    auto* predict_cmd =
        app.add_subcommand("predict", "rate ratio, channel decomposition, and kinematics");
    predict_cmd->add_option("--gamma", predict_opts.gamma, "mixing angle, rad")->required();
    predict_cmd->add_option("--levels", predict_opts.levels, "level cutoff")
        ->check(CLI::Range(1, 64));
    predict_cmd->add_option("--osc", predict_opts.osc, "oscillaton-number cutoff")
        ->check(CLI::Range(1, 64));
    predict_cmd->add_option("--initial-level", predict_opts.initial_level, "initial oscillaton level")
        ->check(CLI::Range(0, 64));
    auto* omega_opt =
        predict_cmd->add_option("--omega", predict_opts.omega, "incident frequency, rad/s");
    predict_cmd->add_option("--mass", predict_opts.mass, "oscillaton mass, kg")->needs(omega_opt);

    auto* fit_cmd = app.add_subcommand("fit", "fit a Gaussian to a scan trace");
    fit_cmd->add_option("--trace", fit_opts.trace_path, "trace CSV file")->required();
    fit_cmd->add_option("--fix-width", fit_opts.fix_width, "hold the width fixed, GHz")
        ->check(CLI::PositiveNumber);

    auto* bound_cmd = app.add_subcommand("bound", "rate-ratio and mixing-angle bound");
    bound_cmd->add_option("--params", bound_opts.params_path, "parameter JSON file");
    bound_cmd->add_option("--v780", bound_opts.v780, "override the 780 nm detector output, V");
    bound_cmd->add_option("--v1560", bound_opts.v1560, "override the 1560 nm detector output, V");

    auto* gen_cmd = app.add_subcommand("gen", "write a synthetic scan trace");
    gen_cmd->add_option("--peak", gen_opts.peak, "peak height, V")->required();
    gen_cmd->add_option("--width", gen_opts.width, "Gaussian sigma, GHz")
        ->required()
        ->check(CLI::PositiveNumber);
    gen_cmd->add_option("--center", gen_opts.center, "peak center, GHz");
    gen_cmd->add_option("--baseline", gen_opts.baseline, "baseline, V");
    gen_cmd->add_option("--noise", gen_opts.noise, "noise standard deviation, V")
        ->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--span", gen_opts.span, "scan range, GHz")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--samples", gen_opts.samples, "sample count")
        ->check(CLI::Range(2, 100000000));
    gen_cmd->add_option("--seed", gen_opts.seed, "noise stream seed");
    gen_cmd->add_flag("--dip", gen_opts.dip, "emit an absorption dip instead of a peak");
    gen_cmd->add_option("--meta", gen_opts.meta, "trace label");
    gen_cmd->add_option("--out", gen_opts.out_path, "output CSV file")->required();

    auto* pipeline_cmd = app.add_subcommand("pipeline", "two-trace fit chain and bound");
    pipeline_cmd->add_option("--trace780", pipeline_opts.trace780_path, "780 nm trace CSV")
        ->required();
    pipeline_cmd->add_option("--trace1560", pipeline_opts.trace1560_path, "1560 nm trace CSV")
        ->required();
    pipeline_cmd->add_option("--params", pipeline_opts.params_path, "parameter JSON file");

    for (auto* cmd : {verify_cmd, predict_cmd, fit_cmd, bound_cmd, gen_cmd, pipeline_cmd}) {
        cmd->add_option("--report", report_path, "write a JSON run report to this file");
    }

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
            return app.exit(e, out, err);
        }
        err << "error: " << e.what() << "\n\n";
        const auto parsed = app.get_subcommands();
        err << (parsed.empty() ? app.help() : parsed.front()->help());
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    ordered_json doc = new_report(command);
    int code = 0;
    try {
        if (verify_cmd->parsed()) {
            run_verify(verify_opts, doc, out);
        } else if (predict_cmd->parsed()) {
            run_predict(predict_opts, doc, out);
        } else if (fit_cmd->parsed()) {
            run_fit(fit_opts, doc, out);
        } else if (bound_cmd->parsed()) {
            run_bound(bound_opts, doc, out);
        } else if (gen_cmd->parsed()) {
            run_gen(gen_opts, doc, out);
        } else if (pipeline_cmd->parsed()) {
            run_pipeline(pipeline_opts, doc, out);
        }
    } catch (const std::exception& e) {
        doc["status"] = "error";
        doc["error"] = e.what();
        err << "error: " << e.what() << '\n';
        code = 1;
    }

    if (!report_path.empty()) {
        try {
            write_report(doc, report_path);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            code = 1;
        }
    }
    return code;
}

}  // namespace thirdq::cli
