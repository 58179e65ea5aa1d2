// Command-line front end for the Orthoglide design-synthesis toolkit.
//
// Subcommands:
//   synthesize  compute designs for a prescribed cube and dexterity bound
//   verify      re-run the numerical oracles against the closed forms
//   explore     volume estimates (dextrous workspace, singularity-free ball)
//   contour     global-bound contour table as CSV
//   tables      reference tables (Q-axis landmarks, unit-cube designs)
//
// Exit status: 0 success, 1 usage error, 2 verification failure,
// 3 numeric/kinematic error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <regex>

#include "orthoglide/critical_points.hpp"
#include "orthoglide/explorer.hpp"
#include "orthoglide/kinematics.hpp"
#include "orthoglide/qaxis.hpp"
#include "orthoglide/report.hpp"
#include "orthoglide/synthesis.hpp"

namespace og = orthoglide;

namespace {

struct CubeArg {
    double value = 1.0;
    og::Unit unit = og::Unit::dimensionless;
};

[[noreturn]] void usage_error(const std::string& what) {
    throw og::KinematicError(og::ErrorKind::invalid_bound, what);
}

CubeArg parse_cube(const std::string& text) {
    static const std::regex pattern(R"(^\s*([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*(mm|m)?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, pattern))
        usage_error("--cube expects a number with optional mm/m suffix");
    CubeArg out;
    out.value = std::stod(m[1].str());
    if (m[2].matched) out.unit = m[2].str() == "mm" ? og::Unit::millimeters : og::Unit::meters;
    if (!(out.value > 0.0)) usage_error("--cube edge must be positive");
    return out;
}

std::set<int> parse_strategies(const std::string& text, bool symmetric_bound) {
    if (text == "all") return symmetric_bound ? std::set<int>{1, 2, 3} : std::set<int>{1, 2};
    std::set<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok != "1" && tok != "2" && tok != "3")
            usage_error("--strategy expects 1, 2, 3, a comma list, or 'all'");
        out.insert(tok[0] - '0');
    }
    if (out.empty()) usage_error("--strategy selected nothing");
    return out;
}

/// Writes content to path, removing the file again if the write fails midway.
void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << content) || !out.flush()) {
        out.close();
        std::error_code ec;
        std::filesystem::remove(path, ec);
        throw og::KinematicError(og::ErrorKind::out_of_range, "failed to write " + path);
    }
}

// ---------------------------------------------------------------------------
// synthesize

struct SynthesizeOptions {
    std::string cube = "1";
    std::optional<double> mu;
    std::optional<double> manipulability;
    std::optional<double> condition;
    std::optional<double> lambda_min;
    std::optional<double> lambda_max;
    std::string strategy = "all";
    std::string format = "text";
    std::string json_path;
};

og::DexterityBound bound_from_options(const SynthesizeOptions& opt) {
    int count = 0;
    count += opt.mu.has_value();
    count += opt.manipulability.has_value();
    count += opt.condition.has_value();
    count += opt.lambda_min.has_value() || opt.lambda_max.has_value();
    if (count != 1)
        throw og::KinematicError(og::ErrorKind::invalid_bound,
                                 "choose exactly one criterion: --mu, --manipulability, "
                                 "--condition, or --lambda-min/--lambda-max");
    if (opt.mu) return og::SymmetricFactor{*opt.mu};
    if (opt.manipulability) return og::ManipulabilityFloor{*opt.manipulability};
    if (opt.condition) return og::ConditionCeiling{*opt.condition};
    if (!opt.lambda_min || !opt.lambda_max)
        throw og::KinematicError(og::ErrorKind::invalid_bound,
                                 "--lambda-min and --lambda-max must be given together");
    return og::TransmissionInterval{*opt.lambda_min, *opt.lambda_max};
}

int run_synthesize(const SynthesizeOptions& opt) {
    const CubeArg cube = parse_cube(opt.cube);
    og::DesignSpec spec;
    spec.cube_edge = cube.value;
    spec.unit = cube.unit;
    spec.bound = bound_from_options(opt);
    og::validate(spec.bound);
    spec.strategies =
        parse_strategies(opt.strategy, std::holds_alternative<og::SymmetricFactor>(spec.bound));

    const auto results = og::synthesize(spec);

    nlohmann::json j;
    j["cube_edge"] = spec.cube_edge;
    j["unit"] = og::unit_name(spec.unit);
    j["results"] = nlohmann::json::array();
    for (const auto& r : results) j["results"].push_back(og::to_json(r));

    if (opt.format == "json")
        std::cout << j.dump(2) << "\n";
    else
        std::cout << og::format_design_table(results);
    if (!opt.json_path.empty()) write_file(opt.json_path, j.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
    int pairs = 20;
    int resolution = 41;
    int points = 1000;
    std::uint64_t seed = 20240411;
};

struct CheckReporter {
    int failures = 0;

    void report(const std::string& name, bool ok, const std::string& detail = "") {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name;
        if (!detail.empty()) std::cout << " (" << detail << ")";
        std::cout << "\n";
        if (!ok) ++failures;
    }
};

og::CartesianPoint random_regular_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        og::CartesianPoint p{u(rng), u(rng), u(rng)};
        if (p.squared_norm() >= 0.9 * 0.9) continue;
        og::JointVector r;
        const auto ik = og::inverse_kinematics(p, {}, og::Geometry{});
        r = ik.joints;
        const double expr = p.x / r.x + p.y / r.y + p.z / r.z - 1.0;
        bool clear = expr < -1e-3;
        for (std::size_t a = 0; a < 3 && clear; ++a)
            if (std::abs(p[a] - r[a]) < 1e-3) clear = false;
        if (clear) return p;
    }
}

int run_verify(const VerifyOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    CheckReporter rep;
    const og::Geometry g{};

    {  // round trip and Jacobian consistency on random regular points
        double worst_rt = 0.0, worst_fd = 0.0, worst_det = 0.0;
        const double h = 1e-6;
        for (int i = 0; i < opt.points; ++i) {
            const og::CartesianPoint p = random_regular_point(rng);
            const og::JointVector r = og::inverse_kinematics(p, {}, g).joints;
            const int m = og::branch_index(r, p);
            const og::CartesianPoint back = og::direct_kinematics(r, m, g);
            worst_rt = std::max({worst_rt, std::abs(back.x - p.x), std::abs(back.y - p.y),
                                 std::abs(back.z - p.z)});

            const Eigen::Matrix3d J = og::inverse_jacobian(p, r);
            Eigen::Matrix3d fd;
            for (int col = 0; col < 3; ++col) {
                og::CartesianPoint hi = p, lo = p;
                hi[static_cast<std::size_t>(col)] += h;
                lo[static_cast<std::size_t>(col)] -= h;
                const og::JointVector rh = og::inverse_kinematics(hi, {}, g).joints;
                const og::JointVector rl = og::inverse_kinematics(lo, {}, g).joints;
                for (int row = 0; row < 3; ++row)
                    fd(row, col) = (rh[static_cast<std::size_t>(row)] -
                                    rl[static_cast<std::size_t>(row)]) /
                                   (2.0 * h);
            }
            worst_fd = std::max(worst_fd, ((J - fd).cwiseAbs().maxCoeff()) / J.cwiseAbs().maxCoeff());
            worst_det = std::max(worst_det, std::abs(og::inverse_jacobian_det(p, r) -
                                                     J.determinant()) /
                                                std::abs(J.determinant()));
        }
        rep.report("inverse/direct kinematics round trip <= 1e-10", worst_rt <= 1e-10,
                   "worst " + std::to_string(worst_rt));
        rep.report("analytic Jacobian vs finite differences <= 1e-5", worst_fd <= 1e-5,
                   "worst " + std::to_string(worst_fd));
        rep.report("closed-form det vs numeric det <= 1e-10", worst_det <= 1e-10,
                   "worst " + std::to_string(worst_det));
    }

    {  // critical-point closed forms vs numeric SVD
        double worst = 0.0;
        for (int i = 0; i <= 200; ++i) {
            const double rho = 0.02 + (og::kSqrt15 - 0.04) * i / 200.0;
            for (int fam = 0; fam < 3; ++fam) {
                og::CriticalPoint cp;
                if (fam == 0)
                    cp = og::q_vertex(std::min(rho, og::kSqrt15 * (1 - 1e-9)));
                else if (fam == 1)
                    cp = og::r_edge(rho);
                else
                    cp = og::s_face(rho);
                auto sv = og::singular_values(
                    og::inverse_jacobian(cp.cartesian, cp.joints));
                auto cf = cp.singular_values;
                std::sort(cf.begin(), cf.end(), std::greater<>());
                for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(sv[k] - cf[k]));
            }
        }
        rep.report("critical-point singular values vs numeric SVD <= 1e-10", worst <= 1e-10,
                   "worst " + std::to_string(worst));
    }

    {  // curve agreement, parametric vs explicit
        double worst = 0.0;
        for (int i = 1; i < 200; ++i) {
            const double chi_qq = 0.25 * i / 200.0;
            const auto c = og::phi_qq_parametric(chi_qq);
            worst = std::max(worst, std::abs(og::phi_qq_rho_max(c.rho_min) - c.rho_max));
            worst = std::max(worst, std::abs(og::phi_qq(c.rho_max) - c.rho_min));
            const double chi_rq = -0.5 * i / 200.0 * (1 - 1e-9);
            const auto d = og::phi_rq_parametric(chi_rq);
            worst = std::max(worst, std::abs(og::phi_rq(d.rho_max) - d.rho_min));
        }
        rep.report("phi_QQ / phi_RQ parametric vs explicit <= 1e-10", worst <= 1e-10,
                   "worst " + std::to_string(worst));
    }

    {  // closed-form global bounds vs dense grid scan
        std::uniform_real_distribution<double> umin(0.05, 1.0), umax(1.0, 1.22);
        double worst = 0.0;
        for (int i = 0; i < opt.pairs; ++i) {
            const og::JointLimitPair limits{umin(rng), umax(rng)};
            const auto scan = og::grid_scan_mu(limits, opt.resolution);
            worst = std::max(worst,
                             std::abs(scan.range.mu_min - og::global_mu_min(limits).value));
            worst = std::max(worst,
                             std::abs(scan.range.mu_max - og::global_mu_max(limits).value));
        }
        rep.report("global bounds vs grid scan <= 0.01", worst <= 0.01,
                   "worst " + std::to_string(worst));
    }

    {  // symmetric joint-limit round trip
        bool ok = true;
        for (int i = 1; i < 40; ++i) {
            const double mu = 0.05 + 0.9 * i / 40.0;
            const auto lim = og::joint_limits_symmetric(mu);
            const double lo = og::global_mu_min(lim).value;
            const double hi = og::global_mu_max(lim).value;
            const bool inside = lo >= mu * (1 - 1e-9) && hi <= (1.0 / mu) * (1 + 1e-9);
            const bool tight = std::abs(lo - mu) < 1e-9 || std::abs(hi - 1.0 / mu) < 1e-9;
            if (!(inside && tight)) ok = false;
        }
        rep.report("symmetric limits give factors in [mu, 1/mu], one bound tight", ok);
    }

    {  // the two volume routes agree on the singularity-free fraction
        const double rays = og::workspace_volume(2000, 1e-3).fraction;
        const double mc = og::singularity_free_volume(1000000, opt.seed).fraction;
        rep.report("ray and Monte-Carlo workspace volumes agree <= 0.01",
                   std::abs(rays - mc) <= 0.01,
                   "ray " + std::to_string(rays) + " vs mc " + std::to_string(mc));
    }

    if (rep.failures > 0) {
        std::cout << rep.failures << " check(s) failed\n";
        return 2;
    }
    std::cout << "all checks passed\n";
    return 0;
}

// ---------------------------------------------------------------------------
// explore

struct ExploreOptions {
    bool volume = false;
    bool singularity_free = false;
    std::string bound;
    std::uint64_t rays = 5000;
    double tol = 1e-4;
    std::uint64_t samples = 1000000;
    std::uint64_t seed = 0x6f72746847UL;
    std::string clip = "workspace";
    int threads = 0;
};

og::FactorWindow parse_window(const std::string& text) {
    static const std::regex pattern(R"(^(lower|upper|two-sided):([0-9]*\.?[0-9]+)$)");
    std::smatch m;
    if (!std::regex_match(text, m, pattern))
        usage_error("--bound expects lower:X, upper:Y, or two-sided:MU");
    const double v = std::stod(m[2].str());
    if (m[1] == "lower") {
        if (!(v > 0.0 && v < 1.0)) usage_error("lower factor bound must be in (0,1)");
        return {v, std::numeric_limits<double>::infinity()};
    }
    if (m[1] == "upper") {
        if (!(v > 1.0)) usage_error("upper factor bound must exceed 1");
        return {0.0, v};
    }
    if (!(v > 0.0 && v < 1.0)) usage_error("two-sided factor bound must be in (0,1)");
    return {v, 1.0 / v};
}

int run_explore(const ExploreOptions& opt) {
    if (!opt.volume && !opt.singularity_free)
        throw og::KinematicError(og::ErrorKind::invalid_bound,
                                 "choose --volume and/or --singularity-free");
    if (opt.volume) {
        if (opt.bound.empty())
            throw og::KinematicError(og::ErrorKind::invalid_bound,
                                     "--volume requires --bound");
        const og::FactorWindow window = parse_window(opt.bound);
        og::VolumeOptions vopt;
        vopt.clip_to_workspace = opt.clip != "dexterity";
        vopt.threads = opt.threads;
        const auto est = og::dextrous_volume(window, opt.rays, opt.tol, vopt);
        std::printf("dextrous volume: %.4f V0  (bound %s, %llu rays, tol %g, clip=%s, "
                    "star violations %llu)\n",
                    est.fraction, opt.bound.c_str(),
                    static_cast<unsigned long long>(est.ray_count), est.bisection_tol,
                    est.clipped_to_workspace ? "workspace" : "dexterity",
                    static_cast<unsigned long long>(est.star_violations));
    }
    if (opt.singularity_free) {
        const auto est = og::singularity_free_volume(opt.samples, opt.seed);
        std::printf("singularity-free workspace: %.4f of the unit ball (%llu samples)\n",
                    est.fraction, static_cast<unsigned long long>(est.ray_count));
    }
    return 0;
}

// ---------------------------------------------------------------------------
// contour / tables

int run_contour(int grid, const std::string& output) {
    const std::string csv = og::contour_csv(og::contour_data(grid));
    if (output.empty())
        std::cout << csv;
    else
        write_file(output, csv);
    return 0;
}

int run_tables() {
    std::cout << "Q-axis landmarks (unit manipulator)\n"
              << og::format_landmark_table() << "\n"
              << "designs for cube edge 1, symmetric factor 0.5\n";
    og::DesignSpec spec;
    spec.cube_edge = 1.0;
    spec.bound = og::SymmetricFactor{0.5};
    std::cout << og::format_design_table(og::synthesize(spec));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orthoglide-type manipulator geometric synthesis toolkit"};
    app.require_subcommand(1);

    SynthesizeOptions syn;
    auto* syn_cmd =
        app.add_subcommand("synthesize", "compute designs for a prescribed cubic workspace");
    syn_cmd->add_option("--cube", syn.cube, "cube edge, optionally suffixed mm or m");
    syn_cmd->add_option("--mu", syn.mu, "symmetric transmission factor bound, in (0,1)");
    syn_cmd->add_option("--manipulability", syn.manipulability, "manipulability floor, in (0,1)");
    syn_cmd->add_option("--condition", syn.condition, "condition number ceiling, > 1");
    syn_cmd->add_option("--lambda-min", syn.lambda_min, "transmission interval lower end, < 1");
    syn_cmd->add_option("--lambda-max", syn.lambda_max, "transmission interval upper end, > 1");
    syn_cmd->add_option("--strategy", syn.strategy, "1, 2, 3, comma list, or 'all'");
    syn_cmd->add_option("--format", syn.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    syn_cmd->add_option("--json", syn.json_path, "also write the JSON report to this path");

    VerifyOptions ver;
    auto* ver_cmd = app.add_subcommand("verify", "run the numerical oracles");
    ver_cmd->add_option("--pairs", ver.pairs, "joint-limit pairs for the grid comparison");
    ver_cmd->add_option("--resolution", ver.resolution, "grid resolution per axis");
    ver_cmd->add_option("--points", ver.points, "random points for the Jacobian checks");
    ver_cmd->add_option("--seed", ver.seed, "random seed");

    ExploreOptions exp;
    auto* exp_cmd = app.add_subcommand("explore", "workspace volume estimates");
    exp_cmd->add_flag("--volume", exp.volume, "dextrous-volume fraction of V0");
    exp_cmd->add_flag("--singularity-free", exp.singularity_free,
                      "Monte-Carlo singularity-free fraction of the unit ball");
    exp_cmd->add_option("--bound", exp.bound, "lower:X, upper:Y, or two-sided:MU");
    exp_cmd->add_option("--rays", exp.rays, "ray count (>= 1000)");
    exp_cmd->add_option("--tol", exp.tol, "bisection tolerance");
    exp_cmd->add_option("--samples", exp.samples, "Monte-Carlo samples (>= 1e6)");
    exp_cmd->add_option("--seed", exp.seed, "Monte-Carlo seed");
    exp_cmd->add_option("--clip", exp.clip, "workspace (intersect) or dexterity (bound only)")
        ->check(CLI::IsMember({"workspace", "dexterity"}));
    exp_cmd->add_option("--threads", exp.threads, "worker threads (0 = auto)");

    int contour_grid = 41;
    std::string contour_out;
    auto* con_cmd = app.add_subcommand("contour", "global-bound contour CSV");
    con_cmd->add_option("--grid", contour_grid, "grid nodes per axis");
    con_cmd->add_option("--output", contour_out, "output path (default stdout)");

    auto* tab_cmd = app.add_subcommand("tables", "reference tables");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (syn_cmd->parsed()) return run_synthesize(syn);
        if (ver_cmd->parsed()) return run_verify(ver);
        if (exp_cmd->parsed()) return run_explore(exp);
        if (con_cmd->parsed()) return run_contour(contour_grid, contour_out);
        if (tab_cmd->parsed()) return run_tables();
    } catch (const og::KinematicError& e) {
        const bool usage = e.kind() == og::ErrorKind::invalid_bound ||
                           e.kind() == og::ErrorKind::not_applicable;
        std::cerr << "error: " << e.what() << "\n";
        return usage ? 1 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
