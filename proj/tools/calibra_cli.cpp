// Command-line front end: every subcommand consumes/produces the JSON
// schemas of the library, all randomness flows from --seed, and identical
// invocations produce byte-identical numeric output.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "calibra/calibra.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using calibra::Json;

struct Manifest {
    std::string command;
    std::uint64_t seed = 0;
    Json parameters = Json::object();
    std::uint64_t input_digest = 0xcbf29ce484222325ULL; // FNV-1a offset basis
    std::vector<std::string> outputs;

    void digest_bytes(const std::string& bytes) {
        for (unsigned char c : bytes) {
            input_digest ^= c;
            input_digest *= 0x100000001b3ULL;
        }
    }

    Json to_json() const {
        char digest_hex[17];
        std::snprintf(digest_hex, sizeof digest_hex, "%016llx",
                      static_cast<unsigned long long>(input_digest));
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%FT%TZ", std::gmtime(&t));
        return Json{{"command", command},   {"version", kVersion},
                    {"seed", seed},         {"parameters", parameters},
                    {"input_digest", digest_hex}, {"timestamp", stamp},
                    {"outputs", outputs}};
    }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw calibra::PreconditionError("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json load_json(const std::string& path, Manifest& manifest) {
    const std::string bytes = read_file(path);
    manifest.digest_bytes(bytes);
    try {
        return Json::parse(bytes);
    } catch (const Json::exception& e) {
        throw calibra::PreconditionError("malformed JSON in " + path + ": " + e.what());
    }
}

void emit(const Json& result, Manifest& manifest, const std::string& out_path) {
    Json wrapped = result;
    if (!out_path.empty()) manifest.outputs.push_back(out_path);
    wrapped["manifest"] = manifest.to_json();
    const std::string text = wrapped.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw calibra::PreconditionError("cannot open output file: " + out_path);
        out << text;
    }
}

Eigen::MatrixXd load_matrix(const std::string& path, Manifest& manifest) {
    return calibra::matrix_from_json(load_json(path, manifest));
}

/// --cylinder accepts "symplectic:k", "lagrangian", or a JSON file with
/// orthonormal basis columns.
Eigen::MatrixXd parse_cylinder(const std::string& arg, int n, Manifest& manifest) {
    if (arg == "lagrangian") return calibra::lagrangian_basis(n);
    if (arg.rfind("symplectic", 0) == 0) {
        int k = 1;
        if (auto colon = arg.find(':'); colon != std::string::npos)
            k = std::stoi(arg.substr(colon + 1));
        return calibra::symplectic_cylinder_basis(n, k);
    }
    return load_matrix(arg, manifest);
}

calibra::GroupSpec parse_group(const std::string& name, int n, int k) {
    if (name == "sp") return calibra::GroupSpec::symplectic(n);
    if (name == "powerstab") return calibra::GroupSpec::power_stabilizer(n, k);
    if (name == "slnc") return calibra::GroupSpec::slnc(n);
    if (name == "iso") return calibra::GroupSpec::isometry(n);
    throw calibra::PreconditionError("unknown group '" + name +
                                     "' (expected sp | powerstab | slnc | iso)");
}

int run(int argc, char** argv) {
    CLI::App app{"Symplectic and calibrated non-squeezing toolkit"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags (--seed, --tol, ...) may follow the subcommand

    std::uint64_t seed = 0;
    double tol = 1e-8;
    int restarts = 32;
    int budget = 2000;
    std::string out_path;
    std::string format = "json";
    app.add_option("--seed", seed, "Seed for all randomness")->capture_default_str();
    app.add_option("--tol", tol, "Residual tolerance")->capture_default_str();
    app.add_option("--restarts", restarts, "Restart count")->capture_default_str();
    app.add_option("--budget", budget, "Iteration budget per restart")->capture_default_str();
    app.add_option("--out", out_path, "Write the result JSON here instead of stdout");
    app.add_option("--format", format, "Output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    std::string matrix_path, ellipsoid_path, form_name, form_path, vectors_path, cylinder_spec,
        group_name, mode, csv_path;
    int dim = 0, k_arg = 0, n_arg = 0, max_iters = 400, attempts = 10000;
    long trials = 10000;
    double theta = 0.0, radius = 1.0;

    auto* williamson_cmd = app.add_subcommand("williamson", "Williamson normal form of an SPD matrix");
    williamson_cmd->add_option("--matrix", matrix_path, "JSON matrix file")->required();

    auto* spectrum_cmd = app.add_subcommand("spectrum", "Symplectic spectrum of an ellipsoid");
    spectrum_cmd->add_option("--ellipsoid", ellipsoid_path, "JSON ellipsoid file")->required();

    auto* width_cmd = app.add_subcommand("width", "Linear symplectic width (and k-width)");
    width_cmd->add_option("--ellipsoid", ellipsoid_path, "JSON ellipsoid file")->required();
    width_cmd->add_option("--k", k_arg, "Also report the k-symplectic width");

    auto* classify_cmd = app.add_subcommand("classify", "Symplectic / anti-symplectic / neither");
    classify_cmd->add_option("--matrix", matrix_path, "JSON matrix file")->required();

    auto* power_cmd = app.add_subcommand("power-classify", "Stabilizer verdict for omega^k");
    power_cmd->add_option("--matrix", matrix_path, "JSON matrix file")->required();
    power_cmd->add_option("--k", k_arg, "Power of omega")->required();

    auto* comass_cmd = app.add_subcommand("comass", "Multi-restart comass lower bound");
    comass_cmd->add_option("--form", form_name, "Catalog name: omega_power | wedge_simple | "
                                                "g2_phi | g2_psi | spin7_phi | slag_re");
    comass_cmd->add_option("--form-file", form_path, "JSON form file (real coefficients)");
    comass_cmd->add_option("--dim", dim, "Ambient dimension for catalog forms");
    comass_cmd->add_option("--k", k_arg, "Catalog parameter k");
    comass_cmd->add_option("--theta", theta, "Catalog phase for slag_re");
    comass_cmd->add_option("--max-iters", max_iters, "Ascent iterations per restart")
        ->capture_default_str();

    auto* squeeze_cmd = app.add_subcommand("squeeze", "Minimize the enclosing cylinder radius");
    squeeze_cmd->add_option("--group", group_name, "sp | powerstab | slnc | iso")->required();
    squeeze_cmd->add_option("--n", n_arg, "Group size parameter")->required();
    squeeze_cmd->add_option("--k", k_arg, "Power for powerstab");
    squeeze_cmd->add_option("--cylinder", cylinder_spec,
                            "symplectic:k | lagrangian | basis JSON file")->required();
    squeeze_cmd->add_option("--r", radius, "Ball radius")->capture_default_str();
    squeeze_cmd->add_option("--csv", csv_path, "Write the per-restart trace CSV here");

    auto* sweep_cmd = app.add_subcommand("sweep", "Random-element non-squeezing sweep");
    sweep_cmd->add_option("--group", group_name, "sp | powerstab | slnc | iso")->required();
    sweep_cmd->add_option("--n", n_arg, "Group size parameter")->required();
    sweep_cmd->add_option("--k", k_arg, "Power for powerstab");
    sweep_cmd->add_option("--cylinder", cylinder_spec,
                          "symplectic:k | lagrangian | basis JSON file")->required();
    sweep_cmd->add_option("--r", radius, "Ball radius")->capture_default_str();
    sweep_cmd->add_option("--trials", trials, "Trial count")->capture_default_str();

    auto* witness_cmd = app.add_subcommand("witness", "Constructive squeezing witness");
    witness_cmd->add_option("--matrix", matrix_path,
                            "Real matrix JSON, or {re, im} complex matrix JSON")->required();
    witness_cmd->add_option("--mode", mode, "symplectic | slag")->required()
        ->check(CLI::IsMember({"symplectic", "slag"}));
    witness_cmd->add_option("--attempts", attempts, "Pair-search attempts")
        ->capture_default_str();

    auto* slag_cmd = app.add_subcommand("slag-check", "Complex-linearity, det_C, Omega stabilizer");
    slag_cmd->add_option("--matrix", matrix_path, "JSON matrix file")->required();

    auto* eval_cmd = app.add_subcommand("forms-eval", "Evaluate a form on vectors");
    eval_cmd->add_option("--form-file", form_path, "JSON form file")->required();
    eval_cmd->add_option("--vectors", vectors_path, "JSON array of vectors")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        std::cerr << Json{{"error", {{"type", "precondition"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 2;
    }

    CLI::App* active = app.get_subcommands().front();
    Manifest manifest;
    manifest.command = active->get_name();
    manifest.seed = seed;
    for (const auto* opt : active->get_options()) {
        if (!opt->results().empty()) manifest.parameters[opt->get_name()] = opt->results().front();
    }
    manifest.parameters["--seed"] = std::to_string(seed);
    manifest.parameters["--tol"] = calibra::Json(tol).dump();

    if (active == williamson_cmd) {
        const Eigen::MatrixXd m = load_matrix(matrix_path, manifest);
        emit(calibra::to_json(calibra::williamson(m), m), manifest, out_path);
    } else if (active == spectrum_cmd) {
        const auto e = calibra::ellipsoid_from_json(load_json(ellipsoid_path, manifest));
        emit(calibra::to_json(calibra::symplectic_spectrum(e)), manifest, out_path);
    } else if (active == width_cmd) {
        const auto e = calibra::ellipsoid_from_json(load_json(ellipsoid_path, manifest));
        Json result{{"width", calibra::linear_symplectic_width(e)}};
        if (k_arg > 0) {
            result["k"] = k_arg;
            result["k_width"] = calibra::k_width_ellipsoid(e, k_arg);
        }
        emit(result, manifest, out_path);
    } else if (active == classify_cmd) {
        const Eigen::MatrixXd a = load_matrix(matrix_path, manifest);
        emit(Json{{"classification", calibra::to_string(calibra::classify_map(a, tol))},
                  {"residual_symplectic", calibra::symplectic_residual(a)},
                  {"residual_anti_symplectic", calibra::anti_symplectic_residual(a)}},
             manifest, out_path);
    } else if (active == power_cmd) {
        const Eigen::MatrixXd a = load_matrix(matrix_path, manifest);
        emit(calibra::to_json(calibra::classify_power_preserver(a, k_arg, tol)), manifest,
             out_path);
    } else if (active == comass_cmd) {
        calibra::KFormD form(2, 1);
        if (!form_path.empty()) {
            const auto parsed = calibra::form_from_json(load_json(form_path, manifest));
            if (!std::holds_alternative<calibra::KFormD>(parsed))
                throw calibra::PreconditionError(
                    "comass expects a real float64 form; use slag_re for phases");
            form = std::get<calibra::KFormD>(parsed);
        } else if (!form_name.empty()) {
            if (dim == 0) {
                if (form_name == "g2_phi" || form_name == "g2_psi") dim = 7;
                else if (form_name == "spin7_phi") dim = 8;
                else throw calibra::PreconditionError("--dim is required for " + form_name);
            }
            const auto entry = calibra::catalog(form_name, dim, k_arg, theta);
            if (!std::holds_alternative<calibra::KFormD>(entry))
                throw calibra::PreconditionError("comass needs a real form; " + form_name +
                                                 " is complex-valued");
            form = std::get<calibra::KFormD>(entry);
        } else {
            throw calibra::PreconditionError("comass: provide --form or --form-file");
        }
        emit(calibra::to_json(calibra::comass_estimate(form, restarts, seed, max_iters)),
             manifest, out_path);
    } else if (active == squeeze_cmd) {
        const auto group = parse_group(group_name, n_arg, k_arg);
        const Eigen::MatrixXd basis = parse_cylinder(cylinder_spec, n_arg, manifest);
        const auto result = calibra::squeeze_search(group, basis, radius, restarts, seed, budget);
        if (!csv_path.empty()) {
            std::ofstream csv(csv_path, std::ios::binary);
            if (!csv) throw calibra::PreconditionError("cannot open output file: " + csv_path);
            csv << calibra::squeeze_trace_csv(result);
            manifest.outputs.push_back(csv_path);
        }
        if (format == "csv" && csv_path.empty()) {
            std::cout << calibra::squeeze_trace_csv(result);
        } else {
            emit(calibra::to_json(result), manifest, out_path);
        }
    } else if (active == sweep_cmd) {
        const auto group = parse_group(group_name, n_arg, k_arg);
        const Eigen::MatrixXd basis = parse_cylinder(cylinder_spec, n_arg, manifest);
        emit(calibra::to_json(calibra::nonsqueezing_sweep(group, basis, radius, trials, seed)),
             manifest, out_path);
    } else if (active == witness_cmd) {
        const Json j = load_json(matrix_path, manifest);
        if (mode == "slag") {
            const auto witness =
                j.is_object() && j.contains("re")
                    ? calibra::slag_squeezing_witness(calibra::complex_matrix_from_json(j), tol)
                    : calibra::slag_squeezing_witness(calibra::matrix_from_json(j), tol);
            emit(calibra::to_json(witness), manifest, out_path);
        } else {
            const auto witness = calibra::rigidity_witness_symplectic(
                calibra::matrix_from_json(j), tol, attempts, seed);
            emit(witness ? calibra::to_json(*witness) : Json{{"found", false}}, manifest,
                 out_path);
        }
    } else if (active == slag_cmd) {
        const Eigen::MatrixXd a = load_matrix(matrix_path, manifest);
        Json result;
        result["linearity_residual"] = calibra::complex_linearity_residual(a);
        const auto det = calibra::complex_det(a, tol);
        result["complex_linear"] = det.has_value();
        if (det) {
            result["det_re"] = det->real();
            result["det_im"] = det->imag();
        }
        result["preserves_omega_form"] = calibra::preserves_omega_form(a, tol);
        result["phase"] = calibra::to_json(calibra::phase_verdict(a, tol));
        emit(result, manifest, out_path);
    } else if (active == eval_cmd) {
        const auto parsed = calibra::form_from_json(load_json(form_path, manifest));
        const Json vecs = load_json(vectors_path, manifest);
        Json result;
        std::visit(
            [&](const auto& form) {
                using Form = std::decay_t<decltype(form)>;
                using Scalar = typename std::conditional_t<
                    std::is_same_v<Form, calibra::KFormD> ||
                        std::is_same_v<Form, calibra::ComplexKFormD>,
                    double, calibra::Rational>;
                std::vector<calibra::Vec<Scalar>> vectors;
                for (const auto& row : vecs) {
                    calibra::Vec<Scalar> v;
                    for (const auto& entry : row)
                        v.push_back(calibra::scalar_from_json<Scalar>(entry));
                    vectors.push_back(std::move(v));
                }
                if constexpr (std::is_same_v<Form, calibra::KFormD> ||
                              std::is_same_v<Form, calibra::KFormQ>) {
                    result["value"] = calibra::scalar_to_json(evaluate(form, vectors));
                } else {
                    const auto [re, im] = evaluate(form, vectors);
                    result["value"] = Json{{"re", calibra::scalar_to_json(re)},
                                           {"im", calibra::scalar_to_json(im)}};
                }
            },
            parsed);
        emit(result, manifest, out_path);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const calibra::TripwireError& e) {
        std::cerr << Json{{"error", {{"type", "tripwire"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 3;
    } catch (const calibra::PreconditionError& e) {
        std::cerr << Json{{"error", {{"type", "precondition"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << Json{{"error", {{"type", "precondition"}, {"message", e.what()}}}}.dump()
                  << "\n";
        return 2;
    }
}
