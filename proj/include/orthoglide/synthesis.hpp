#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "orthoglide/core.hpp"
#include "orthoglide/critical_points.hpp"
#include "orthoglide/qaxis.hpp"

namespace orthoglide {

enum class Unit { dimensionless, millimeters, meters };

inline std::string_view unit_suffix(Unit u) {
    switch (u) {
        case Unit::millimeters: return "mm";
        case Unit::meters: return "m";
        default: return "";
    }
}

/// Prescribed cubic workspace plus the dexterity requirement.
struct DesignSpec {
    double cube_edge = 1.0;
    Unit unit = Unit::dimensionless;
    DexterityBound bound = SymmetricFactor{0.5};
    std::set<int> strategies = {1, 2, 3};

    void validate() const {
        if (!(cube_edge > 0.0))
            throw KinematicError(ErrorKind::invalid_bound, "cube edge must be positive");
        orthoglide::validate(bound);
        if (strategies.empty())
            throw KinematicError(ErrorKind::invalid_bound, "no strategies requested");
        for (int s : strategies)
            if (s < 1 || s > 3)
                throw KinematicError(ErrorKind::invalid_bound, "strategy ids are 1, 2, 3");
    }
};

/// One synthesized design. Lengths share the unit tag; factor intervals and
/// the rho-to-cube ratio are dimensionless and survive scaling unchanged.
struct DesignResult {
    int strategy_id = 0;
    double link_length = 1.0;
    double rho_min = 1.0;
    double rho_max = 1.0;
    double delta_rho = 0.0;
    double p_min = 0.0;
    double p_max = 0.0;
    double delta_p = 0.0;
    double cube_edge = 0.0;
    Unit unit = Unit::dimensionless;
    FactorInterval mu_cube;
    std::optional<FactorInterval> mu_joint;  // absent when the joint space is singular
    bool joint_space_singular = false;
    std::optional<double> software_constraint;  // strategy 1 only: cap on rx+ry+rz
    double rho_to_cube_ratio = 0.0;             // cube edge over joint range
    std::vector<std::string> notes;
};

namespace detail {

/// Factor interval over a Q-axis-vertexed cube, from the eigenvalue pairs at
/// the two vertices. Interior cube points stay inside this envelope.
inline FactorInterval cube_factor_envelope(double p_lo, double p_hi) {
    FactorInterval env{std::numeric_limits<double>::infinity(), 0.0};
    for (double p : {p_lo, p_hi}) {
        const double chi = chi_from_p(p);
        for (double ev : {std::abs(1.0 + 2.0 * chi), std::abs(1.0 - chi)}) {
            env.lo = std::min(env.lo, 1.0 / ev);
            env.hi = std::max(env.hi, 1.0 / ev);
        }
    }
    return env;
}

inline void finish_common(DesignResult& r) {
    r.delta_rho = r.rho_max - r.rho_min;
    r.delta_p = r.p_max - r.p_min;
    r.cube_edge = r.delta_p;
    r.rho_to_cube_ratio = r.delta_p / r.delta_rho;
    r.mu_cube = cube_factor_envelope(r.p_min, r.p_max);
}

inline std::string factor_note(const FactorInterval& f, const char* what) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s factors in [%.4f, %.4f]", what, f.lo, f.hi);
    return buf;
}

}  // namespace detail

/// Strategy 1: place the cube vertices at the Q-axis points realizing the
/// bound, then widen the upper joint limit to 1 + p_max so the whole cube is
/// reachable. Cheapest links; the widened joint space violates the bound
/// outside the cube and contains parallel singularities once rho_max reaches
/// sqrt(1.5), i.e. for symmetric factors mu <= 1 - sqrt(sqrt(1.5) - 1).
inline DesignResult strategy1(const DexterityBound& bound) {
    const ChiRange chi = chi_range_for(bound);
    DesignResult r;
    r.strategy_id = 1;
    r.p_min = p_from_chi(chi.chi2);
    r.p_max = p_from_chi(chi.chi1);
    r.rho_min = rho_from_chi(chi.chi2);
    r.rho_max = 1.0 + r.p_max;
    detail::finish_common(r);

    const double rho_q_plus = rho_from_chi(chi.chi1);
    r.software_constraint = 3.0 * rho_q_plus;
    r.joint_space_singular = r.rho_max >= kSqrt15;
    if (r.joint_space_singular) {
        const GlobalBound lo = global_mu_min({r.rho_min, rho_q_plus});
        const GlobalBound hi = global_mu_max({r.rho_min, rho_q_plus});
        r.notes.push_back(
            "joint space reaches parallel singularities; the software joint "
            "constraint restores " +
            detail::factor_note({lo.value, hi.value}, "joint-space"));
    } else {
        r.mu_joint = FactorInterval{global_mu_min({r.rho_min, r.rho_max}).value,
                                    global_mu_max({r.rho_min, r.rho_max}).value};
    }
    return r;
}

inline DesignResult strategy1(double mu) { return strategy1(SymmetricFactor{mu}); }

/// Strategy 2: keep the joint limits at the Q-axis points and inscribe the
/// largest cube in the joint-bounded workspace (upper vertex at rho_max - 1).
/// Singularity-free, but the factors between cube and joint boundary may
/// exceed the bound for symmetric factors below mu*.
inline DesignResult strategy2(const DexterityBound& bound) {
    const ChiRange chi = chi_range_for(bound);
    DesignResult r;
    r.strategy_id = 2;
    r.rho_min = rho_from_chi(chi.chi2);
    r.rho_max = rho_from_chi(chi.chi1);
    r.p_min = p_from_chi(chi.chi2);
    r.p_max = r.rho_max - 1.0;
    detail::finish_common(r);
    r.mu_joint = FactorInterval{global_mu_min({r.rho_min, r.rho_max}).value,
                                global_mu_max({r.rho_min, r.rho_max}).value};
    return r;
}

inline DesignResult strategy2(double mu) { return strategy2(SymmetricFactor{mu}); }

/// Strategy 3: joint limits from the whole-workspace symmetric solver, cube
/// inscribed as in strategy 2. Both the joint-bounded and the cubic workspace
/// honor [mu, 1/mu]; defined for the symmetric factor criterion only.
inline DesignResult strategy3(double mu) {
    const JointLimitPair limits = joint_limits_symmetric(mu);
    DesignResult r;
    r.strategy_id = 3;
    r.rho_min = limits.rho_min;
    r.rho_max = limits.rho_max;
    r.p_min = q_vertex(limits.rho_min).cartesian.x;
    r.p_max = limits.rho_max - 1.0;
    detail::finish_common(r);
    r.mu_joint = FactorInterval{global_mu_min(limits).value, global_mu_max(limits).value};
    return r;
}

inline DesignResult strategy3(const DexterityBound& bound) {
    if (const auto* sym = std::get_if<SymmetricFactor>(&bound)) return strategy3(sym->mu);
    throw KinematicError(ErrorKind::not_applicable,
                         "strategy 3 is defined for the symmetric factor criterion only");
}

/// Rescales a design so its cube edge matches the prescribed size. Every
/// length is multiplied by eta = cube_edge / delta_p; dimensionless fields
/// are untouched and p_max - p_min equals the new edge exactly.
inline DesignResult scale(const DesignResult& normalized, double cube_edge,
                          Unit unit = Unit::dimensionless) {
    if (!(cube_edge > 0.0))
        throw KinematicError(ErrorKind::invalid_bound, "cube edge must be positive");
    const double eta = cube_edge / normalized.delta_p;
    DesignResult r = normalized;
    r.link_length *= eta;
    r.rho_min *= eta;
    r.rho_max *= eta;
    r.delta_rho *= eta;
    r.p_min *= eta;
    r.p_max = r.p_min + cube_edge;
    r.delta_p = cube_edge;
    r.cube_edge = cube_edge;
    r.unit = unit;
    if (r.software_constraint) r.software_constraint = *r.software_constraint * eta;
    return r;
}

/// Joint-coordinate cap rx + ry + rz <= 3 rho(Q+) that removes the parallel
/// singularities strategy 1 may admit. Undefined for the other strategies.
inline double software_joint_constraint(const DesignResult& result) {
    if (result.strategy_id != 1 || !result.software_constraint)
        throw KinematicError(ErrorKind::not_applicable,
                             "software joint constraint applies to strategy 1 results");
    return *result.software_constraint;
}

/// Runs the requested strategies and scales each to the prescribed cube.
/// Results come back ordered by strategy id.
inline std::vector<DesignResult> synthesize(const DesignSpec& spec) {
    spec.validate();
    std::vector<DesignResult> out;
    for (int id : spec.strategies) {
        DesignResult normalized;
        switch (id) {
            case 1: normalized = strategy1(spec.bound); break;
            case 2: normalized = strategy2(spec.bound); break;
            default: normalized = strategy3(spec.bound); break;
        }
        out.push_back(scale(normalized, spec.cube_edge, spec.unit));
    }
    return out;
}

}  // namespace orthoglide
