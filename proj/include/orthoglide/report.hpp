#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "orthoglide/explorer.hpp"
#include "orthoglide/qaxis.hpp"
#include "orthoglide/synthesis.hpp"

namespace orthoglide {

inline std::string unit_name(Unit u) {
    switch (u) {
        case Unit::millimeters: return "mm";
        case Unit::meters: return "m";
        default: return "dimensionless";
    }
}

inline Unit unit_from_name(const std::string& name) {
    if (name == "mm") return Unit::millimeters;
    if (name == "m") return Unit::meters;
    if (name.empty() || name == "dimensionless") return Unit::dimensionless;
    throw KinematicError(ErrorKind::out_of_range, "unknown unit: " + name);
}

/// Stable report schema; numbers are emitted at full precision so a parsed
/// report reproduces the result exactly.
inline nlohmann::json to_json(const DesignResult& r) {
    nlohmann::json j{
        {"strategy", r.strategy_id},
        {"link_length", r.link_length},
        {"rho_min", r.rho_min},
        {"rho_max", r.rho_max},
        {"delta_rho", r.delta_rho},
        {"p_min", r.p_min},
        {"p_max", r.p_max},
        {"cube_edge", r.cube_edge},
        {"unit", unit_name(r.unit)},
        {"mu_cube", {r.mu_cube.lo, r.mu_cube.hi}},
        {"rho_to_cube_ratio", r.rho_to_cube_ratio},
        {"notes", r.notes},
    };
    if (r.mu_joint)
        j["mu_joint"] = {r.mu_joint->lo, r.mu_joint->hi};
    else
        j["mu_joint"] = "singular";
    if (r.software_constraint)
        j["software_constraint"] = *r.software_constraint;
    else
        j["software_constraint"] = nullptr;
    return j;
}

inline DesignResult design_result_from_json(const nlohmann::json& j) {
    DesignResult r;
    r.strategy_id = j.at("strategy").get<int>();
    r.link_length = j.at("link_length").get<double>();
    r.rho_min = j.at("rho_min").get<double>();
    r.rho_max = j.at("rho_max").get<double>();
    r.delta_rho = j.at("delta_rho").get<double>();
    r.p_min = j.at("p_min").get<double>();
    r.p_max = j.at("p_max").get<double>();
    r.cube_edge = j.at("cube_edge").get<double>();
    r.delta_p = r.cube_edge;
    r.unit = unit_from_name(j.at("unit").get<std::string>());
    r.mu_cube = {j.at("mu_cube")[0].get<double>(), j.at("mu_cube")[1].get<double>()};
    if (j.at("mu_joint").is_string()) {
        r.joint_space_singular = true;
    } else {
        r.mu_joint = FactorInterval{j.at("mu_joint")[0].get<double>(),
                                    j.at("mu_joint")[1].get<double>()};
    }
    if (!j.at("software_constraint").is_null())
        r.software_constraint = j.at("software_constraint").get<double>();
    r.rho_to_cube_ratio = j.at("rho_to_cube_ratio").get<double>();
    r.notes = j.at("notes").get<std::vector<std::string>>();
    return r;
}

namespace detail {
inline std::string sig4(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}
inline std::string fixed4(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}
}  // namespace detail

/// Per-strategy summary table, four significant digits.
inline std::string format_design_table(const std::vector<DesignResult>& results) {
    std::ostringstream os;
    os << "strategy      L    rho_min  rho_max  delta_rho  c/delta_rho"
          "      mu(Wp)           mu(Wrho)\n";
    for (const auto& r : results) {
        char line[256];
        const std::string cube =
            detail::fixed4(r.mu_cube.lo) + " ... " + detail::fixed4(r.mu_cube.hi);
        const std::string joint =
            r.mu_joint ? detail::fixed4(r.mu_joint->lo) + " ... " + detail::fixed4(r.mu_joint->hi)
                       : std::string("singularity");
        std::snprintf(line, sizeof(line), "#%d       %7s  %7s  %7s  %9s  %11s  %-16s %-16s\n",
                      r.strategy_id, detail::sig4(r.link_length).c_str(),
                      detail::sig4(r.rho_min).c_str(), detail::sig4(r.rho_max).c_str(),
                      detail::sig4(r.delta_rho).c_str(),
                      detail::sig4(r.rho_to_cube_ratio).c_str(), cube.c_str(), joint.c_str());
        os << line;
    }
    const std::string suffix(unit_suffix(results.empty() ? Unit::dimensionless : results[0].unit));
    if (!suffix.empty()) os << "lengths in " << suffix << "\n";
    for (const auto& r : results)
        if (r.software_constraint)
            os << "#" << r.strategy_id
               << " software joint constraint: rx+ry+rz <= " << detail::sig4(*r.software_constraint)
               << (suffix.empty() ? "" : " " + suffix) << "\n";
    for (const auto& r : results)
        for (const auto& note : r.notes) os << "#" << r.strategy_id << " note: " << note << "\n";
    return os.str();
}

/// Named Q-axis landmark table of the unit manipulator.
inline std::string format_landmark_table(const Geometry& g = {}) {
    std::ostringstream os;
    os << "point        p        rho        chi     det(J)\n";
    for (const auto& lm : table1_landmarks(g)) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-5s  %8s  %8s  %8s  %8s\n",
                      std::string(lm.name).c_str(), detail::sig4(lm.p).c_str(),
                      detail::sig4(lm.rho).c_str(),
                      lm.chi_finite ? detail::sig4(lm.chi).c_str() : "-inf",
                      lm.det_finite ? detail::sig4(lm.det).c_str() : "inf");
        os << line;
    }
    return os.str();
}

/// Contour CSV: fixed header, decimal points, LF line endings.
inline std::string contour_csv(const std::vector<ContourRow>& rows) {
    std::ostringstream os;
    os << "rho_min,rho_max,mu_min,mu_max,kind_min,kind_max\n";
    for (const auto& row : rows) {
        char line[256];
        std::snprintf(line, sizeof(line), "%.10g,%.10g,%.10g,%.10g,%s,%s\n", row.rho_min,
                      row.rho_max, row.mu_min, row.mu_max, row.kind_min.c_str(),
                      row.kind_max.c_str());
        os << line;
    }
    return os.str();
}

}  // namespace orthoglide
