#include "phm/cli/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "phm/cli/literals.hpp"
#include "phm/cli/matrix_file.hpp"
#include "phm/errors.hpp"
#include "phm/generators.hpp"
#include "phm/metric_family.hpp"
#include "phm/oracle.hpp"
#include "phm/spectral.hpp"

namespace phm::cli {

namespace {

using nlohmann::json;

/// Missing or contradictory command-line input.
class UsageError : public Error {
public:
    using Error::Error;
};

class CapError : public Error {
public:
    using Error::Error;
};

struct Tolerances {
    std::optional<double> eps_real;
    std::optional<double> eps_pair;
    std::optional<double> gap_tol;
};

SpectralOptions spectral_options(const Tolerances& flags) {
    SpectralOptions opts;
    if (const char* env = std::getenv("PHM_DEFAULT_TOL"); env != nullptr && *env != '\0') {
        double tol = 0.0;
        try {
            tol = parse_real(env);
        } catch (const Error&) {
            throw UsageError(std::string("PHM_DEFAULT_TOL='") + env + "' is not a number");
        }
        if (!(tol > 0.0)) throw UsageError("PHM_DEFAULT_TOL must be positive");
        opts.eps_real = opts.eps_pair = opts.gap_tol = opts.ph_tol = tol;
    }
    if (flags.eps_real) opts.eps_real = *flags.eps_real;
    if (flags.eps_pair) opts.eps_pair = *flags.eps_pair;
    if (flags.gap_tol) opts.gap_tol = *flags.gap_tol;
    return opts;
}

json inertia_json(const Inertia& in) {
    return json::array({in.positive, in.negative, in.zero});
}

json vector_json(const ComplexVector& v) {
    json arr = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(complex_json(v(k)));
    return arr;
}

json metric_json(const MetricResult& res) {
    return {{"M", to_matrix_json(res.m)},
            {"inertia", inertia_json(res.inertia)},
            {"residual", res.residual}};
}

/// Runs the spectral stages, recording each stage's output in `doc` before the next.
SpectralData run_spectral(const ComplexMatrix& h, const SpectralOptions& opts, json& doc) {
    doc["n"] = h.rows();
    const auto adm = check_ph_admissible(h, opts.ph_tol);
    doc["is_ph_admissible"] = adm.is_ph;
    doc["max_imag_coeff"] = adm.max_imag_coeff;
    if (!adm.is_ph) {
        std::ostringstream os;
        os << "characteristic polynomial has complex coefficients (relative imaginary part "
           << adm.max_imag_coeff << " > " << opts.ph_tol << ")";
        throw ClassificationError(os.str());
    }
    const auto eig = eigendecompose(h);
    const auto cls = classify_spectrum(eig.values, opts.eps_real, opts.eps_pair);
    doc["r"] = cls.r();
    doc["p"] = cls.p();
    assert_nondegenerate(eig.values, opts.gap_tol);
    SpectralData sd = build_spectral_data(h, cls, eig, opts.cond_cap);
    doc["eigenvalues"] = vector_json(sd.lam);
    doc["min_gap"] = sd.min_gap;
    doc["cond_S"] = sd.cond_s;
    doc["symmetrization_shift"] = sd.symmetrization_shift;
    doc["reconstruction_residual"] = sd.reconstruction_residual;
    return sd;
}

void require_parameter_magnitudes(const MetricParameters& params) {
    for (std::size_t i = 0; i < params.mu.size(); ++i) {
        if (!(std::abs(params.mu[i]) >= kMinParameterMagnitude)) {
            throw InvalidParameterError("--mu entry " + std::to_string(i) +
                                        " has magnitude below 1e-6");
        }
    }
    for (std::size_t s = 0; s < params.tau.size(); ++s) {
        if (!(std::abs(params.tau[s]) >= kMinParameterMagnitude)) {
            throw InvalidParameterError("--tau entry " + std::to_string(s) +
                                        " has magnitude below 1e-6");
        }
    }
}

int exit_for_residual(double residual) {
    return residual <= kResidualThreshold ? kExitOk : kExitCheckFailed;
}

void write_if_requested(const std::string& path, const ComplexMatrix& m, json& doc) {
    if (path.empty()) return;
    write_matrix_file(path, m);
    doc["out"] = path;
}

std::string default_metric_path(const std::string& out) {
    std::filesystem::path p(out);
    if (p.extension() == ".json") p.replace_extension();
    return p.string() + ".metric.json";
}

/// Compact JSON with each element of `key` (an array) on its own line.
std::string dump_with_lines(json doc, const std::string& key) {
    json items = std::move(doc[key]);
    doc.erase(key);
    std::string head = doc.dump();
    head.pop_back();  // closing brace
    std::string out = head + (doc.empty() ? "" : ",") + json(key).dump() + ":[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        out += "\n" + items[i].dump() + (i + 1 < items.size() ? "," : "");
    }
    out += items.empty() ? "]}" : "\n]}";
    return out;
}

struct ErrorInfo {
    int code;
    const char* kind;
};

ErrorInfo classify_exception(const std::exception& e) {
    if (dynamic_cast<const UsageError*>(&e)) return {kExitInput, "usage"};
    if (dynamic_cast<const MatrixFileError*>(&e)) return {kExitInput, "input"};
    if (dynamic_cast<const DimensionError*>(&e)) return {kExitInput, "dimension"};
    if (dynamic_cast<const ClassificationError*>(&e)) return {kExitClassification, "classification"};
    if (dynamic_cast<const DegeneracyError*>(&e)) return {kExitDegenerate, "degenerate"};
    if (dynamic_cast<const IllConditionedError*>(&e)) return {kExitIllConditioned, "ill_conditioned"};
    if (dynamic_cast<const InvalidParameterError*>(&e)) return {kExitParameter, "parameter"};
    if (dynamic_cast<const ContractViolation*>(&e)) return {kExitParameter, "contract"};
    if (dynamic_cast<const CapError*>(&e) || dynamic_cast<const CountOverflowError*>(&e)) {
        return {kExitCapExceeded, "cap_exceeded"};
    }
    if (dynamic_cast<const GenerationError*>(&e)) return {kExitGeneration, "generation"};
    if (dynamic_cast<const FamilyIncompleteError*>(&e)) return {kExitCheckFailed, "family_incomplete"};
    return {kExitNumeric, "numeric"};
}

void add_tolerance_flags(CLI::App* cmd, Tolerances& tol) {
    cmd->add_option("--eps-real", tol.eps_real, "relative tolerance for real eigenvalues");
    cmd->add_option("--eps-pair", tol.eps_pair, "relative tolerance for conjugate matching");
    cmd->add_option("--gap-tol", tol.gap_tol, "relative non-degeneracy threshold");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pseudo-hermitian metric toolkit", "phm"};
    app.require_subcommand(1);

    Tolerances tol;
    std::string path_h;
    std::string path_m;
    std::string out_path;
    std::string metric_out;
    std::string factor_out;
    std::string mu_text;
    std::string tau_text;
    std::string signs_text;
    std::string bits_text;
    std::string theta_text;
    bool no_mod_global = false;
    double rank_tol = kDefaultRankTol;
    std::uint64_t seed = 0;
    std::size_t gen_n = 0;
    std::size_t gen_r = 0;
    std::size_t gen_p = 0;
    double cond_max = 1e6;
    std::string mode = "spectrum";

    auto* analyze = app.add_subcommand("analyze", "classify the spectrum of H");
    analyze->add_option("matrix", path_h, "matrix file")->required();
    add_tolerance_flags(analyze, tol);

    auto* metric = app.add_subcommand("metric", "build M = S† m(μ, τ) S");
    metric->add_option("matrix", path_h, "matrix file")->required();
    metric->add_option("--mu", mu_text, "comma-separated real parameters");
    metric->add_option("--tau", tau_text, "comma-separated complex parameters (a+bi)");
    metric->add_option("--out", out_path, "write M as a matrix file");
    add_tolerance_flags(metric, tol);

    auto* canonical = app.add_subcommand("canonical", "build the canonical metric of a class");
    canonical->add_option("matrix", path_h, "matrix file")->required();
    canonical->add_option("--signs", signs_text, "comma-separated + / - per real eigenvalue");
    canonical->add_option("--n", bits_text, "comma-separated 0 / 1 per conjugate pair");
    canonical->add_option("--theta", theta_text, "comma-separated phases in radians");
    canonical->add_option("--out", out_path, "write M as a matrix file");
    add_tolerance_flags(canonical, tol);

    auto* enumerate = app.add_subcommand("enumerate", "list all metric classes");
    enumerate->add_option("matrix", path_h, "matrix file")->required();
    enumerate->add_flag("--no-mod-global", no_mod_global, "keep both M and -M");
    add_tolerance_flags(enumerate, tol);

    auto* oracle = app.add_subcommand("oracle", "brute-force nullspace of the intertwining map");
    oracle->add_option("matrix", path_h, "matrix file")->required();
    oracle->add_option("--rank-tol", rank_tol, "relative singular-value cutoff");
    oracle->add_option("--seed", seed, "seed for sampled family metrics");
    add_tolerance_flags(oracle, tol);

    auto* generate = app.add_subcommand("generate", "write a random pseudo-hermitian instance");
    generate->add_option("--n", gen_n, "dimension");
    generate->add_option("--r", gen_r, "number of real eigenvalues");
    generate->add_option("--p", gen_p, "number of conjugate pairs");
    generate->add_option("--seed", seed, "RNG seed");
    generate->add_option("--cond-max", cond_max, "cap on cond(S)");
    generate->add_option("--mode", mode, "spectrum | observable")
        ->check(CLI::IsMember({"spectrum", "observable"}));
    generate->add_option("--metric", path_m, "metric file (observable mode)");
    generate->add_option("--out", out_path, "output matrix file")->required();
    generate->add_option("--metric-out", metric_out, "certificate metric output file");
    generate->add_option("--factor-out", factor_out, "hermitian factor A (observable mode)");

    auto* verify = app.add_subcommand("verify", "check H†M = MH");
    verify->add_option("matrix", path_h, "matrix file for H")->required();
    verify->add_option("metric", path_m, "matrix file for M")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "phm: " << e.what() << '\n';
        json doc = {{"schema", kSchemaVersion},
                    {"error", {{"kind", "usage"}, {"message", e.what()}}}};
        out << doc.dump() << '\n';
        return kExitInput;
    }

    json doc = {{"schema", kSchemaVersion}};
    std::function<int()> body;
    std::string list_key;

    if (*analyze) {
        doc["command"] = "analyze";
        body = [&]() {
            const auto sd = run_spectral(read_matrix_file(path_h), spectral_options(tol), doc);
            doc["biorthogonality_residual"] = biorthogonality_check(sd);
            doc["inertia_floor"] = json::array({sd.p, sd.p});
            doc["class_count"] = class_count(sd.r, sd.p, /*mod_global=*/true);
            return kExitOk;
        };
    } else if (*metric) {
        doc["command"] = "metric";
        body = [&]() {
            MetricParameters params{parse_real_list(mu_text), parse_complex_list(tau_text)};
            const auto sd = run_spectral(read_matrix_file(path_h), spectral_options(tol), doc);
            if (params.mu.size() != sd.r || params.tau.size() != sd.p) {
                std::ostringstream os;
                os << "expected (r, p) = (" << sd.r << ", " << sd.p << ") parameters, got ("
                   << params.mu.size() << ", " << params.tau.size() << ")";
                throw InvalidParameterError(os.str());
            }
            require_parameter_magnitudes(params);
            const auto res = build_M(sd, params);
            doc.update(metric_json(res));
            doc["expected_inertia"] = inertia_json(inertia_of_params(params, sd.p));
            write_if_requested(out_path, res.m, doc);
            return exit_for_residual(res.residual);
        };
    } else if (*canonical) {
        doc["command"] = "canonical";
        body = [&]() {
            CanonicalClass cls{parse_sign_list(signs_text), parse_bit_list(bits_text),
                               parse_real_list(theta_text)};
            const auto sd = run_spectral(read_matrix_file(path_h), spectral_options(tol), doc);
            if (cls.signs.size() != sd.r || cls.n.size() != sd.p || cls.theta.size() != sd.p) {
                std::ostringstream os;
                os << "expected " << sd.r << " sign(s), " << sd.p << " bit(s) and " << sd.p
                   << " phase(s); got " << cls.signs.size() << ", " << cls.n.size() << ", "
                   << cls.theta.size();
                throw InvalidParameterError(os.str());
            }
            for (auto& t : cls.theta) t = wrap_phase(t);
            const auto res = canonical_metric(sd, cls);
            doc.update(metric_json(res));
            Inertia expected{static_cast<int>(sd.p), static_cast<int>(sd.p), 0};
            for (int s : cls.signs) ++(s > 0 ? expected.positive : expected.negative);
            doc["expected_inertia"] = inertia_json(expected);
            doc["class"] = {{"signs", cls.signs}, {"n", cls.n}, {"theta", cls.theta}};
            write_if_requested(out_path, res.m, doc);
            return exit_for_residual(res.residual);
        };
    } else if (*enumerate) {
        doc["command"] = "enumerate";
        list_key = "classes";
        body = [&]() {
            const auto sd = run_spectral(read_matrix_file(path_h), spectral_options(tol), doc);
            if (sd.r + sd.p > kEnumerateCap) {
                throw CapError("r + p = " + std::to_string(sd.r + sd.p) + " exceeds the cap of " +
                               std::to_string(kEnumerateCap));
            }
            const bool mod_global = !no_mod_global;
            const auto classes = enumerate_classes(sd.r, sd.p, mod_global);
            doc["mod_global"] = mod_global;
            doc["count"] = classes.size();
            json list = json::array();
            for (const auto& c : classes) {
                Inertia in{static_cast<int>(sd.p), static_cast<int>(sd.p), 0};
                for (int s : c.signs) ++(s > 0 ? in.positive : in.negative);
                list.push_back({{"signs", c.signs}, {"n", c.n}, {"inertia", inertia_json(in)}});
            }
            doc["classes"] = std::move(list);
            return kExitOk;
        };
    } else if (*oracle) {
        doc["command"] = "oracle";
        body = [&]() {
            const ComplexMatrix h = read_matrix_file(path_h);
            const auto n = static_cast<std::size_t>(h.rows());
            doc["n"] = n;
            if (n > kOracleMaxDimension) {
                throw CapError("n = " + std::to_string(n) + " exceeds the oracle cap of " +
                               std::to_string(kOracleMaxDimension));
            }
            const auto report = solution_space(h, rank_tol);
            doc["dimension"] = report.dimension;
            doc["singular_values"] = report.singular_values;
            doc["gap_ratio"] = report.gap_ratio;
            doc["rank_tol"] = report.rank_tol;
            doc["warning"] = report.warning ? json(*report.warning) : json(nullptr);
            json basis = json::array();
            for (const auto& b : report.basis) basis.push_back(to_matrix_json(b));
            doc["basis"] = std::move(basis);
            doc["family_complete"] = report.dimension == n;

            json spectral;
            const auto sd = run_spectral(h, spectral_options(tol), spectral);
            doc["r"] = sd.r;
            doc["p"] = sd.p;
            const auto match = family_vs_kernel(sd, report, seed);
            doc["max_projection_defect"] = match.max_projection_defect;
            doc["max_recovery_defect"] = match.max_recovery_defect;
            doc["params_recovered"] = match.params_recovered;
            const bool ok = report.dimension == n &&
                            match.max_projection_defect <= kOracleDefectThreshold &&
                            match.max_recovery_defect <= kOracleDefectThreshold;
            return ok ? kExitOk : kExitCheckFailed;
        };
    } else if (*generate) {
        doc["command"] = "generate";
        doc["mode"] = mode;
        body = [&]() {
            if (mode == "spectrum") {
                GeneratorConfig cfg;
                cfg.n = gen_n;
                cfg.r = gen_r;
                cfg.p = gen_p;
                cfg.seed = seed;
                cfg.cond_max = cond_max;
                const auto inst = generate_via_spectrum(cfg);
                const std::string mpath = metric_out.empty() ? default_metric_path(out_path)
                                                             : metric_out;
                write_matrix_file(out_path, inst.h);
                write_matrix_file(mpath, inst.certificate_metric.m);
                doc["n"] = cfg.n;
                doc["r"] = cfg.r;
                doc["p"] = cfg.p;
                doc["seed"] = cfg.seed;
                doc["cond_S"] = inst.sd.cond_s;
                doc["min_gap"] = inst.sd.min_gap;
                doc["eigenvalues"] = vector_json(inst.sd.lam);
                json tau = json::array();
                for (auto t : inst.certificate.tau) tau.push_back(complex_json(t));
                doc["certificate"] = {{"mu", inst.certificate.mu}, {"tau", tau}};
                doc["out"] = out_path;
                doc["metric_out"] = mpath;
                doc["residual"] = inst.certificate_metric.residual;
                return exit_for_residual(inst.certificate_metric.residual);
            }
            if (path_m.empty()) throw UsageError("--mode observable requires --metric <file>");
            const ComplexMatrix m = read_matrix_file(path_m);
            const auto inst = generate_via_observable(m, seed);
            write_matrix_file(out_path, inst.phi);
            doc["n"] = m.rows();
            doc["seed"] = seed;
            doc["out"] = out_path;
            if (!metric_out.empty()) {
                write_matrix_file(metric_out, m);
                doc["metric_out"] = metric_out;
            }
            if (!factor_out.empty()) {
                write_matrix_file(factor_out, inst.a);
                doc["factor_out"] = factor_out;
            }
            doc["recovered_factor_hermiticity_defect"] = inst.recovered_hermiticity_defect;
            doc["residual"] = inst.residual;
            return exit_for_residual(inst.residual);
        };
    } else if (*verify) {
        doc["command"] = "verify";
        body = [&]() {
            const ComplexMatrix h = read_matrix_file(path_h);
            const ComplexMatrix m = read_matrix_file(path_m);
            if (h.rows() != m.rows()) {
                throw DimensionError("H is " + std::to_string(h.rows()) + "x" +
                                     std::to_string(h.rows()) + " but M is " +
                                     std::to_string(m.rows()) + "x" + std::to_string(m.rows()));
            }
            const double herm = hermiticity_defect(m);
            doc["n"] = h.rows();
            doc["hermiticity_defect"] = herm;
            const bool hermitian = herm <= kHermiticityThreshold;
            double residual = 0.0;
            if (hermitian) {
                residual = intertwining_residual(h, m, kHermiticityThreshold);
                doc["inertia"] = inertia_json(inertia_of_matrix(m));
            } else {
                const double denom = h.norm() * m.norm();
                const double raw = intertwining_residual_matrix(h, m).norm();
                residual = denom > 0.0 ? raw / denom : raw;
                doc["inertia"] = nullptr;
            }
            doc["residual"] = residual;
            return hermitian && residual <= kResidualThreshold ? kExitOk : kExitCheckFailed;
        };
    }

    int code = kExitOk;
    try {
        code = body();
    } catch (const std::exception& e) {
        const auto info = classify_exception(e);
        code = info.code;
        err << "phm: " << e.what() << '\n';
        doc["error"] = {{"kind", info.kind}, {"message", e.what()}};
    }
    if (code != kExitOk && code != kExitCheckFailed && !list_key.empty()) list_key.clear();
    out << (list_key.empty() || !doc.contains(list_key) ? doc.dump()
                                                         : dump_with_lines(doc, list_key))
        << '\n';
    if (code == kExitCheckFailed && !doc.contains("error")) {
        err << "phm: check failed (threshold exceeded)\n";
    }
    return code;
}

}  // namespace phm::cli
