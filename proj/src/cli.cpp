#include "gw/cli.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gw/curvature.hpp"
#include "gw/error.hpp"
#include "gw/io.hpp"
#include "gw/ot_oracle.hpp"
#include "gw/version.hpp"

namespace gw::cli {

using nlohmann::json;

namespace {

std::size_t parse_index(std::string_view digits, const std::string& token) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) {
        throw ArgumentError("malformed frame vector '" + token + "'");
    }
    return value;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t");
    const auto last = s.find_last_not_of(" \t");
    return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void require_finite(const json& j, const std::string& path) {
    if (j.is_number_float() && !std::isfinite(j.get<double>())) {
        throw NumericalFailure("non-finite value in output at " + path);
    }
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) require_finite(v, path + "." + k);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) require_finite(j[i], path + "[" + std::to_string(i) + "]");
    }
}

void flatten(const json& j, const std::string& prefix, std::ostream& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else if (j.is_number_float()) {
        out << prefix << ',' << format_double(j.get<double>()) << '\n';
    } else if (j.is_string()) {
        out << prefix << ',' << j.get<std::string>() << '\n';
    } else {
        out << prefix << ',' << j.dump() << '\n';
    }
}

json eigen_frame_json(const std::vector<double>& lambda) {
    return json{{"P", "identity"}, {"lambda", lambda}};
}

EigenPair identity_frame(const std::vector<double>& lambda) {
    return EigenPair{Matrix::identity(lambda.size()), lambda};
}

FrameVector to_frame_vector(const EigenPair& eig, const FrameToken& t) {
    return frame_vector(eig, t.kind, t.i, t.j);
}

struct Output {
    json inputs = json::object();
    json outputs = json::object();
    json tolerances = json::object();
    // Set for commands whose payload is a CSV table.
    std::function<void(std::ostream&)> csv;
};

Output cmd_distance(const std::string& a_path, const std::string& b_path) {
    const Gaussian a = io::load_gaussian(a_path);
    const Gaussian b = io::load_gaussian(b_path);
    Output o;
    o.inputs = {{"a", io::to_json(a)}, {"b", io::to_json(b)}};
    o.outputs = {{"w2", w2_distance(a, b)}, {"w2_squared", w2_squared(a, b)}};
    o.tolerances = {{"eps_pd_relative", 1e-12},
                    {"trace_path", a.dim() == 2 ? "2x2 trace identity" : "jacobi eigen"}};
    return o;
}

Output cmd_map(const std::string& a_path, const std::string& b_path) {
    const Gaussian a = io::load_gaussian(a_path);
    const Gaussian b = io::load_gaussian(b_path);
    const AffineMap map = optimal_map(a, b);
    const Matrix pushed = map.linear * a.cov().matrix() * map.linear;
    Output o;
    o.inputs = {{"a", io::to_json(a)}, {"b", io::to_json(b)}};
    o.outputs = {{"linear", io::to_json(map.linear)},
                 {"shift", map.shift},
                 {"pushforward_residual", (pushed - b.cov().matrix()).max_abs()}};
    o.tolerances = {{"eps_pd_relative", 1e-12}, {"ill_conditioned_threshold", 1e12}};
    return o;
}

Output cmd_geodesic(const std::string& a_path, const std::string& b_path, int steps, bool as_csv) {
    if (steps < 1) throw ArgumentError("--steps must be at least 1");
    const Gaussian a = io::load_gaussian(a_path);
    const Gaussian b = io::load_gaussian(b_path);
    const std::size_t d = a.dim();
    if (b.dim() != d) throw DimensionError("geodesic: dimension mismatch");

    std::vector<double> ts;
    std::vector<Gaussian> samples;
    for (int k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) / steps;
        ts.push_back(t);
        samples.push_back(geodesic(a, b, t));
    }

    Output o;
    o.inputs = {{"a", io::to_json(a)}, {"b", io::to_json(b)}, {"steps", steps}};
    o.tolerances = {{"endpoint_tolerance", 1e-10}};
    json rows = json::array();
    for (std::size_t k = 0; k < samples.size(); ++k) {
        json row = {{"t", ts[k]}, {"mean", samples[k].mean()}, {"cov", io::to_json(samples[k].cov().matrix())}};
        if (d == 2) {
            const EllipseParameters e = ellipse_parameters(samples[k].cov());
            row["ellipse"] = {{"alpha", e.alpha}, {"beta", e.beta}, {"theta", e.theta}};
        }
        rows.push_back(std::move(row));
    }
    o.outputs = {{"samples", rows}};

    if (as_csv) {
        o.csv = [rows, d](std::ostream& out) {
            out << 't';
            for (std::size_t i = 0; i < d; ++i) out << ",mean_" << i + 1;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = i; j < d; ++j) out << ",cov_" << i + 1 << j + 1;
            if (d == 2) out << ",alpha,beta,theta";
            out << '\n';
            for (const auto& row : rows) {
                out << format_double(row["t"].get<double>());
                for (std::size_t i = 0; i < d; ++i) out << ',' << format_double(row["mean"][i].get<double>());
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = i; j < d; ++j) out << ',' << format_double(row["cov"][i][j].get<double>());
                if (d == 2) {
                    for (const char* key : {"alpha", "beta", "theta"})
                        out << ',' << format_double(row["ellipse"][key].get<double>());
                }
                out << '\n';
            }
        };
    }
    return o;
}

Output cmd_curvature(const std::string& lambda_text, const std::string& pair_text) {
    const std::vector<double> lambda = parse_lambda(lambda_text);
    const auto [ta, tb] = parse_pair_spec(pair_text, lambda.size());
    const EigenPair eig = identity_frame(lambda);
    const CurvaturePair pair(to_frame_vector(eig, ta), to_frame_vector(eig, tb));
    Output o;
    o.inputs = {{"frame", eigen_frame_json(lambda)}, {"pair", {pair.a().label(), pair.b().label()}}};
    o.outputs = {{"case", case_number(pair.case_id())}, {"K", sectional_curvature(pair)}};
    o.tolerances = {{"evaluation", "closed form"}, {"frame_match", 1e-12}};
    return o;
}

struct VerifyOptions {
    double r0 = 0.0;
    int n_theta = 256;
    double h = kDefaultSpeedStep;
    double rel_tol = 0.05;
    double abs_tol = 1e-3;
};

Output cmd_verify(const std::string& lambda_text, const std::string& pair_text, const VerifyOptions& v) {
    const std::vector<double> lambda = parse_lambda(lambda_text);
    const auto [ta, tb] = parse_pair_spec(pair_text, lambda.size());
    const EigenPair eig = identity_frame(lambda);
    const CurvaturePair pair(to_frame_vector(eig, ta), to_frame_vector(eig, tb));
    const double exact = sectional_curvature(pair);

    // Cases (1) and (5) pair unit vectors that are not orthogonal.
    const auto [u, w] = gram_schmidt_pair(eig, pair.a().as_tangent, pair.b().as_tangent);
    const CurvatureEstimate est = estimate_curvature(eig, u, w, EstimateOptions{v.r0, v.n_theta, v.h});

    const double abs_err = std::abs(est.value - exact);
    const bool zero_case = exact == 0.0;
    const double rel_err = zero_case ? 0.0 : abs_err / std::abs(exact);
    const bool ok = zero_case ? abs_err <= v.abs_tol : rel_err <= v.rel_tol;

    Output o;
    o.inputs = {{"frame", eigen_frame_json(lambda)},
                {"pair", {pair.a().label(), pair.b().label()}},
                {"r0", est.radii.front()},
                {"n_theta", v.n_theta}};
    o.outputs = {{"case", case_number(pair.case_id())},
                 {"K", exact},
                 {"K_estimate", est.value},
                 {"radii", est.radii},
                 {"K_raw", est.raw},
                 {"abs_error", abs_err},
                 {"rel_error", rel_err},
                 {"within_tolerance", ok}};
    o.tolerances = {{"rel_tol", v.rel_tol},
                    {"abs_tol_zero_case", v.abs_tol},
                    {"speed_step", v.h},
                    {"radius_safety_factor", 0.5}};
    return o;
}

Output cmd_angle(double theta, double phi, double alpha, double beta) {
    const double exact = angle_between_families(theta, phi);
    const AngleNumeric numeric = angle_between_families_numeric(theta, phi, alpha, beta);
    const UmbilicProjection proj = projection_to_umbilic(alpha, beta, theta);
    Output o;
    o.inputs = {{"theta", theta}, {"phi", phi}, {"alpha", alpha}, {"beta", beta}};
    o.outputs = {{"angle", exact},
                 {"angle_numeric", numeric.angle},
                 {"cosine_numeric", numeric.cosine},
                 {"gap", std::abs(numeric.angle - exact)},
                 {"projection", io::to_json(proj.rho)},
                 {"distance_to_umbilic", proj.distance}};
    o.tolerances = {{"agreement", 1e-10}};
    return o;
}

Output cmd_oracle(const std::string& a_path, const std::string& b_path, int resolution, double radius) {
    const Gaussian a = io::load_gaussian(a_path);
    const Gaussian b = io::load_gaussian(b_path);
    if (resolution == 0) resolution = a.dim() == 1 ? 64 : 24;
    const OracleResult r = oracle_w2(a, b, resolution, radius);
    Output o;
    o.inputs = {{"a", io::to_json(a)}, {"b", io::to_json(b)}, {"resolution", resolution},
                {"radius_sigmas", radius}};
    o.outputs = {{"closed_form", r.closed_form},
                 {"lp", r.lp},
                 {"gap", std::abs(r.lp - r.closed_form)},
                 {"relative_gap", r.closed_form > 0.0 ? std::abs(r.lp - r.closed_form) / r.closed_form : 0.0},
                 {"atoms", {r.atoms_a, r.atoms_b}},
                 {"shared_frame", r.shared_frame},
                 {"certificate",
                  {{"max_marginal_error", r.certificate.max_marginal_error},
                   {"min_reduced_cost", r.certificate.min_reduced_cost},
                   {"max_slackness", r.certificate.max_slackness},
                   {"duality_gap", r.certificate.duality_gap}}}};
    if (r.quantile) {
        o.outputs["quantile"] = *r.quantile;
        o.outputs["quantile_gap"] = std::abs(*r.quantile - r.closed_form);
    }
    o.tolerances = {{"relative_acceptance", 0.02}, {"reduced_cost_floor", -1e-9}};
    return o;
}

}  // namespace

FrameToken parse_frame_token(const std::string& raw, std::size_t d) {
    const std::string text = trim(raw);
    if (text == "e+") {
        if (d < 2) throw ArgumentError("frame vectors need dimension >= 2");
        return FrameToken{FrameKind::EPlus, 0, d - 1};
    }
    if (text.size() < 3 || (text[0] != 'e' && text[0] != 'f')) {
        throw ArgumentError("malformed frame vector '" + text + "'");
    }
    const FrameKind kind = text[0] == 'e' ? FrameKind::EDiag : FrameKind::FOff;
    const std::string_view rest = std::string_view(text).substr(1);
    std::size_t i = 0, j = 0;
    if (const auto sep = rest.find('_'); sep != std::string_view::npos) {
        i = parse_index(rest.substr(0, sep), text);
        j = parse_index(rest.substr(sep + 1), text);
    } else if (rest.size() == 2 && std::isdigit(static_cast<unsigned char>(rest[0])) &&
               std::isdigit(static_cast<unsigned char>(rest[1]))) {
        i = static_cast<std::size_t>(rest[0] - '0');
        j = static_cast<std::size_t>(rest[1] - '0');
    } else {
        throw ArgumentError("malformed frame vector '" + text + "' (use e<i><j> or e<i>_<j>)");
    }
    if (!(1 <= i && i < j && j <= d)) {
        std::ostringstream os;
        os << "frame vector '" << text << "' needs 1 <= i < j <= " << d;
        throw ArgumentError(os.str());
    }
    return FrameToken{kind, i - 1, j - 1};
}

std::pair<FrameToken, FrameToken> parse_pair_spec(const std::string& text, std::size_t d) {
    const auto comma = text.find(',');
    if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos) {
        throw ArgumentError("pair spec must be two frame vectors separated by a comma, e.g. e12,f12");
    }
    return {parse_frame_token(text.substr(0, comma), d), parse_frame_token(text.substr(comma + 1), d)};
}

std::vector<double> parse_lambda(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
            throw ArgumentError("--lambda: '" + item + "' is not a number");
        }
        if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError("--lambda: eigenvalues must be positive");
        out.push_back(v);
    }
    if (out.size() < 2) throw ArgumentError("--lambda: need at least two eigenvalues");
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Wasserstein geometry of Gaussian measures", "gwtool"};
    app.require_subcommand(1);

    std::string format;
    std::string a_path, b_path, lambda_text, pair_text;
    int steps = 10;
    int resolution = 0;
    double radius = 5.0;
    double theta = 0.0, phi = 0.0, alpha = 2.0, beta = 1.0;
    VerifyOptions verify;

    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    };
    auto add_files = [&](CLI::App* sub) {
        sub->add_option("--a", a_path, "Gaussian JSON file")->required();
        sub->add_option("--b", b_path, "Gaussian JSON file")->required();
    };

    auto* distance = app.add_subcommand("distance", "W2 distance between two Gaussians");
    add_files(distance);
    add_format(distance);

    auto* map = app.add_subcommand("map", "Optimal affine transport map");
    add_files(map);
    add_format(map);

    auto* geo = app.add_subcommand("geodesic", "Sample the displacement interpolation");
    add_files(geo);
    geo->add_option("--steps", steps, "Number of intervals in [0, 1]");
    add_format(geo);

    auto* curv = app.add_subcommand("curvature", "Closed-form sectional curvature");
    curv->add_option("--lambda", lambda_text, "Eigenvalues l1,...,ld")->required();
    curv->add_option("--pair", pair_text, "Frame vector pair, e.g. e12,f12")->required();
    add_format(curv);

    auto* ver = app.add_subcommand("verify-curvature", "Closed form against the geodesic-circle estimator");
    ver->add_option("--lambda", lambda_text, "Eigenvalues l1,...,ld")->required();
    ver->add_option("--pair", pair_text, "Frame vector pair, e.g. e12,f12")->required();
    ver->add_option("--r0", verify.r0, "Largest radius of the ladder r0, r0/2, r0/4 (0 = automatic)");
    ver->add_option("--ntheta", verify.n_theta, "Quadrature nodes per circle");
    ver->add_option("--speed-step", verify.h, "Angular step of the speed finite difference");
    ver->add_option("--rel-tol", verify.rel_tol, "Relative tolerance for nonzero curvature");
    ver->add_option("--abs-tol", verify.abs_tol, "Absolute tolerance for zero curvature");
    add_format(ver);

    auto* ang = app.add_subcommand("angle", "Angle between rotated 2-D flat families");
    ang->add_option("--theta", theta, "First family angle in (-pi/4, pi/4]")->required();
    ang->add_option("--phi", phi, "Second family angle in (-pi/4, pi/4]")->required();
    ang->add_option("--alpha", alpha, "Major axis of the reference ellipse");
    ang->add_option("--beta", beta, "Minor axis of the reference ellipse");
    add_format(ang);

    auto* orc = app.add_subcommand("oracle", "Closed-form W2 against the exact discrete LP");
    add_files(orc);
    orc->add_option("--resolution", resolution, "Grid points per axis (default 64 for d=1, 24 for d=2)");
    orc->add_option("--radius", radius, "Grid half-width in standard deviations");
    add_format(orc);

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidArguments;
    }

    std::vector<std::string> warnings;
    const WarningHandler previous = set_warning_handler([&](const std::string& msg) {
        warnings.push_back(msg);
        err << "warning: " << msg << '\n';
    });
    struct Restore {
        WarningHandler h;
        ~Restore() { set_warning_handler(std::move(h)); }
    } restore{previous};

    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    const bool as_csv = format == "csv" || (format.empty() && command == "geodesic");
    try {
        Output o;
        if (sub == distance) o = cmd_distance(a_path, b_path);
        else if (sub == map) o = cmd_map(a_path, b_path);
        else if (sub == geo) o = cmd_geodesic(a_path, b_path, steps, as_csv);
        else if (sub == curv) o = cmd_curvature(lambda_text, pair_text);
        else if (sub == ver) o = cmd_verify(lambda_text, pair_text, verify);
        else if (sub == ang) o = cmd_angle(theta, phi, alpha, beta);
        else o = cmd_oracle(a_path, b_path, resolution, radius);

        require_finite(o.outputs, "outputs");
        json result = {{"command", command},
                       {"inputs", o.inputs},
                       {"outputs", o.outputs},
                       {"diagnostics",
                        {{"version", kVersion}, {"tolerances", o.tolerances}, {"warnings", warnings}}}};
        if (as_csv) {
            if (o.csv) {
                o.csv(out);
            } else {
                flatten(result["outputs"], "", out);
            }
        } else {
            out << result.dump(2) << '\n';
        }
        return kOk;
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidArguments;
    } catch (const UnsupportedPair& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidArguments;
    } catch (const io::FormatError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidArguments;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

}  // namespace gw::cli
