#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string_view>

#include "orthoglide/core.hpp"
#include "orthoglide/qaxis.hpp"

namespace orthoglide {

// Closed-form transmission-factor analysis of the joint-bounded workspace of
// the unit manipulator. The global factor extrema occur at symmetric boundary
// points of three families:
//   Q (vertex): all joints at a limit, point on the Q-axis;
//   R (edge):   two joints at a limit, point on a coordinate-plane diagonal;
//   S (face):   one joint at a limit, point on a coordinate axis.

enum class PointFamily { q_vertex, r_edge, s_face };
enum class BoundSide { plus, minus };  // joints at rho_max vs rho_min

struct CriticalPoint {
    PointFamily family;
    BoundSide side;
    double rho = 1.0;  // the pinned joint coordinate
    double chi = 0.0;
    CartesianPoint cartesian;
    JointVector joints;
    std::array<double, 3> singular_values{1.0, 1.0, 1.0};
    std::array<double, 3> factors{1.0, 1.0, 1.0};  // reciprocal singular values

    double min_factor() const { return *std::min_element(factors.begin(), factors.end()); }
    double max_factor() const { return *std::max_element(factors.begin(), factors.end()); }
};

namespace detail {
inline std::array<double, 3> reciprocals(const std::array<double, 3>& v) {
    return {1.0 / v[0], 1.0 / v[1], 1.0 / v[2]};
}
}  // namespace detail

/// Vertex point: joints (rho, rho, rho), Cartesian p = (rho - sqrt(3-2rho^2))/3
/// on every axis. The inverse Jacobian is the symmetric Q-axis form, so the
/// singular values are {1+2chi, 1-chi, 1-chi} with chi = -p/sqrt(1-2p^2).
inline CriticalPoint q_vertex(double rho) {
    if (!(rho > 0.0 && rho < kSqrt15))
        throw KinematicError(ErrorKind::out_of_range,
                             "q_vertex: rho must lie in (0, sqrt(1.5))");
    CriticalPoint cp;
    cp.family = PointFamily::q_vertex;
    cp.side = rho >= 1.0 ? BoundSide::plus : BoundSide::minus;
    cp.rho = rho;
    const double p = (rho - std::sqrt(3.0 - 2.0 * rho * rho)) / 3.0;
    cp.chi = -p / std::sqrt(1.0 - 2.0 * p * p);
    cp.cartesian = {p, p, p};
    cp.joints = {rho, rho, rho};
    cp.singular_values = {std::abs(1.0 + 2.0 * cp.chi), 1.0 - cp.chi, 1.0 - cp.chi};
    cp.factors = detail::reciprocals(cp.singular_values);
    return cp;
}

/// Edge point in the XY-plane: p = ((rho - sqrt(2-rho^2))/2, same, 0), joints
/// (rho, rho, (rho^2 (2-rho^2))^(1/4)). Singular values come from the cubic
/// factorization of J^-1 J^-T: lambda1 = 1-chi and the two roots of
/// sigma^2 - A sigma + B with A = (1+chi)^2 + (1+chi^2)/(1-chi^2) and
/// B = (1+chi)^2. (B follows from det(J^-1) = 1-chi^2, which forces
/// lambda2 lambda3 = |1+chi|.)
inline CriticalPoint r_edge(double rho) {
    if (!(rho > 0.0 && rho < std::numbers::sqrt2))
        throw KinematicError(ErrorKind::out_of_range,
                             "r_edge: rho must lie in (0, sqrt(2))");
    CriticalPoint cp;
    cp.family = PointFamily::r_edge;
    cp.side = rho >= 1.0 ? BoundSide::plus : BoundSide::minus;
    cp.rho = rho;
    const double p = (rho - std::sqrt(2.0 - rho * rho)) / 2.0;
    const double chi = -p / std::sqrt(1.0 - p * p);
    cp.chi = chi;
    cp.cartesian = {p, p, 0.0};
    cp.joints = {rho, rho, std::pow(rho * rho * (2.0 - rho * rho), 0.25)};
    const double A = (1.0 + chi) * (1.0 + chi) + (1.0 + chi * chi) / (1.0 - chi * chi);
    const double B = (1.0 + chi) * (1.0 + chi);
    const double root = std::sqrt(std::max(A * A - 4.0 * B, 0.0));
    cp.singular_values = {std::abs(1.0 - chi), std::sqrt((A + root) / 2.0),
                          std::sqrt((A - root) / 2.0)};
    cp.factors = detail::reciprocals(cp.singular_values);
    return cp;
}

/// Face point on the X-axis: p = (rho - 1, 0, 0), joints
/// (rho, sqrt(rho(2-rho)), same). Singular values are lambda1 = 1 and
/// sqrt((1+chi^2) +- chi sqrt(2+chi^2)); the pair multiplies to one exactly.
inline CriticalPoint s_face(double rho) {
    if (!(rho > 0.0 && rho < 2.0))
        throw KinematicError(ErrorKind::out_of_range, "s_face: rho must lie in (0, 2)");
    CriticalPoint cp;
    cp.family = PointFamily::s_face;
    cp.side = rho >= 1.0 ? BoundSide::plus : BoundSide::minus;
    cp.rho = rho;
    const double p = rho - 1.0;
    const double chi = -p / std::sqrt(1.0 - p * p);
    cp.chi = chi;
    cp.cartesian = {p, 0.0, 0.0};
    const double other = std::sqrt(rho * (2.0 - rho));
    cp.joints = {rho, other, other};
    const double s = chi * std::sqrt(2.0 + chi * chi);
    cp.singular_values = {1.0, std::sqrt(1.0 + chi * chi + s), std::sqrt(1.0 + chi * chi - s)};
    cp.factors = detail::reciprocals(cp.singular_values);
    return cp;
}

// ---------------------------------------------------------------------------
// Global bounds over the joint-bounded workspace

/// Actuated joint limits of the unit manipulator. Singularity-free workspaces
/// require rho_min in (0, 1] and rho_max in [1, sqrt(1.5)).
struct JointLimitPair {
    double rho_min = 1.0;
    double rho_max = 1.0;

    void validate() const {
        if (!(rho_min > 0.0 && rho_min <= 1.0 && rho_max >= 1.0 && rho_max < kSqrt15))
            throw KinematicError(ErrorKind::invalid_bound,
                                 "joint limits must satisfy 0 < rho_min <= 1 <= rho_max < sqrt(1.5)");
    }
};

enum class CriticalLabel { s_minus, r_minus, q_minus, q_plus };

inline std::string_view to_string(CriticalLabel label) {
    switch (label) {
        case CriticalLabel::s_minus: return "S-";
        case CriticalLabel::r_minus: return "R-";
        case CriticalLabel::q_minus: return "Q-";
        case CriticalLabel::q_plus: return "Q+";
    }
    return "?";
}

struct GlobalBound {
    double value = 1.0;
    CriticalLabel at = CriticalLabel::q_minus;
};

/// Smallest transmission factor over the rho-bounded workspace. The minimum
/// is attained at one of S-, R-, Q-, Q+; all four lie inside the workspace,
/// so the piecewise region structure reduces to a direct comparison.
inline GlobalBound global_mu_min(const JointLimitPair& limits) {
    limits.validate();
    const std::array<std::pair<CriticalLabel, double>, 4> candidates{{
        {CriticalLabel::s_minus, s_face(limits.rho_min).min_factor()},
        {CriticalLabel::r_minus, r_edge(limits.rho_min).min_factor()},
        {CriticalLabel::q_minus, q_vertex(limits.rho_min).min_factor()},
        {CriticalLabel::q_plus, q_vertex(limits.rho_max).min_factor()},
    }};
    GlobalBound best{candidates[0].second, candidates[0].first};
    for (const auto& [label, value] : candidates)
        if (value < best.value) best = {value, label};
    return best;
}

/// Largest transmission factor over the rho-bounded workspace, attained at
/// either R- or Q+.
inline GlobalBound global_mu_max(const JointLimitPair& limits) {
    limits.validate();
    const double at_r = r_edge(limits.rho_min).max_factor();
    const double at_q = q_vertex(limits.rho_max).max_factor();
    if (at_r >= at_q) return {at_r, CriticalLabel::r_minus};
    return {at_q, CriticalLabel::q_plus};
}

// ---------------------------------------------------------------------------
// Region-boundary curves in the (rho_min, rho_max) plane

namespace detail {
/// Generic bisection for a continuous function with a sign change on [a, b].
inline double bisect(const std::function<double(double)>& f, double a, double b,
                     double tol = 1e-14, int max_iter = 200) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0)
        throw KinematicError(ErrorKind::out_of_range, "bisect: no sign change on bracket");
    for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if (fa * fm < 0.0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}
}  // namespace detail

struct CurvePoint {
    double rho_min = 1.0;
    double rho_max = 1.0;
    double factor = 1.0;  // transmission factor along the curve, 1/(1+2chi)
};

/// Parametric locus where the binding minimum-factor point switches between
/// Q- and Q+: equal largest singular values 1+2chi at Q- and 1-chi' at Q+.
/// chi ranges over [0, 1/4); endpoints (1,1) and (sqrt(0.5), sqrt(1.5)).
inline CurvePoint phi_qq_parametric(double chi) {
    if (!(chi >= 0.0 && chi < 0.25))
        throw KinematicError(ErrorKind::out_of_range, "phi_qq_parametric: chi in [0, 1/4)");
    return {(1.0 - chi) / std::sqrt(1.0 + 2.0 * chi * chi),
            (1.0 + 2.0 * chi) / std::sqrt(1.0 + 8.0 * chi * chi), 1.0 / (1.0 + 2.0 * chi)};
}

/// Explicit form of the same curve, mapping rho_min in (sqrt(0.5), 1] to
/// rho_max.
inline double phi_qq_rho_max(double rho_min) {
    if (!(rho_min > std::sqrt(0.5) && rho_min <= 1.0))
        throw KinematicError(ErrorKind::out_of_range,
                             "phi_qq_rho_max: rho_min in (sqrt(0.5), 1]");
    const double r2 = rho_min * rho_min;
    const double w = std::sqrt(3.0 - 2.0 * r2);
    return std::sqrt(3.0 * (3.0 - 2.0 * r2) / ((9.0 - 2.0 * r2) - 4.0 * rho_min * w));
}

/// rho_min on the Q-/Q+ separating curve for a given rho_max in [1, sqrt(1.5)),
/// by inverting the parametric form (rho_max is increasing in chi).
inline double phi_qq(double rho_max) {
    if (!(rho_max >= 1.0 && rho_max < kSqrt15))
        throw KinematicError(ErrorKind::out_of_range, "phi_qq: rho_max in [1, sqrt(1.5))");
    if (rho_max == 1.0) return 1.0;
    const double chi = detail::bisect(
        [rho_max](double c) { return phi_qq_parametric(c).rho_max - rho_max; }, 0.0,
        0.25 - 1e-12);
    return phi_qq_parametric(chi).rho_min;
}

/// Parametric locus where the binding maximum-factor point switches between
/// R- and Q+: equal smallest singular values 1-chi_R at R- and 1+2chi at Q+.
/// chi ranges over (-1/2, 0]; endpoints (1,1) and (0, sqrt(1.5)).
inline CurvePoint phi_rq_parametric(double chi) {
    if (!(chi > -0.5 && chi <= 0.0))
        throw KinematicError(ErrorKind::out_of_range, "phi_rq_parametric: chi in (-1/2, 0]");
    return {(1.0 + 2.0 * chi) / std::sqrt(1.0 + 4.0 * chi * chi),
            (1.0 - chi) / std::sqrt(1.0 + 2.0 * chi * chi), 1.0 / (1.0 + 2.0 * chi)};
}

/// Explicit form of the R-/Q+ separating curve, rho_max in [1, sqrt(1.5)) to
/// rho_min.
inline double phi_rq(double rho_max) {
    if (!(rho_max >= 1.0 && rho_max < kSqrt15))
        throw KinematicError(ErrorKind::out_of_range, "phi_rq: rho_max in [1, sqrt(1.5))");
    const double r2 = rho_max * rho_max;
    const double w = std::sqrt(3.0 - 2.0 * r2);
    return std::sqrt(9.0 * (3.0 - 2.0 * r2) / ((15.0 - 2.0 * r2) - 4.0 * rho_max * w));
}

// ---------------------------------------------------------------------------
// Joint-limit inversion

namespace detail {
/// Q- closed form: smallest factor mu at the vertex with joints at rho.
inline double mu_min_at_q(double rho) {
    return 1.0 / 3.0 + 2.0 * rho / (3.0 * std::sqrt(3.0 - 2.0 * rho * rho));
}
/// Q+ closed form: smallest factor at the vertex with joints at rho (> 1).
inline double mu_min_at_q_plus(double rho) {
    return 2.0 / 3.0 + std::sqrt(3.0 - 2.0 * rho * rho) / (3.0 * rho);
}
/// R- closed form: largest factor at the edge point pinned at rho (< 1).
inline double mu_max_at_r(double rho) {
    return 0.5 + std::sqrt(2.0 - rho * rho) / (2.0 * rho);
}
/// Lower-boundary minimum factor, min over the S-, R-, Q- candidates;
/// increasing in rho on (0, 1].
inline double mu_min_lower_boundary(double rho) {
    return std::min({s_face(rho).min_factor(), r_edge(rho).min_factor(),
                     q_vertex(rho).min_factor()});
}
}  // namespace detail

/// Region constants of the contour structure: the vertical separators where
/// the binding lower critical point changes family, and the symmetric-design
/// switch value mu* with the limits it induces. Solved by bisection at first
/// use; the printed four-digit values are recoverable as roundings.
struct RegionConstants {
    double rho_sr;             // S- / R- separator, ~0.1093
    double mu_at_sr;           // minimum factor there, ~0.3232
    double rho_rq;             // R- / Q- separator, ~0.2240
    double mu_at_rq;           // minimum factor there, ~0.4210
    double mu_star;            // symmetric-design switch, ~0.5387
    double rho_min_at_mu_star; // ~0.4892
    double rho_max_at_mu_star; // ~1.1700
};

namespace detail {
inline double sym_rho_min_q(double mu) {
    return (3.0 * mu - 1.0) / std::sqrt(6.0 * mu * mu - 4.0 * mu + 2.0);
}
inline double sym_rho_min_r(double mu) {
    return mu / std::sqrt(mu * mu - 2.0 * mu + 2.0);
}
inline double sym_rho_max(double mu) {
    return (3.0 - mu) / std::sqrt(2.0 * mu * mu - 4.0 * mu + 6.0);
}

inline RegionConstants compute_region_constants() {
    RegionConstants rc{};
    rc.rho_sr = bisect(
        [](double r) { return s_face(r).min_factor() - r_edge(r).min_factor(); }, 0.02, 0.2,
        1e-13);
    rc.mu_at_sr = s_face(rc.rho_sr).min_factor();
    rc.rho_rq = bisect(
        [](double r) { return r_edge(r).min_factor() - q_vertex(r).min_factor(); }, 0.1, 0.4,
        1e-13);
    rc.mu_at_rq = r_edge(rc.rho_rq).min_factor();
    rc.mu_star = bisect([](double m) { return sym_rho_min_q(m) - sym_rho_min_r(m); }, 0.45,
                        0.7, 1e-13);
    rc.rho_min_at_mu_star = sym_rho_min_q(rc.mu_star);
    rc.rho_max_at_mu_star = sym_rho_max(rc.mu_star);

    const auto near = [](double a, double b) { return std::abs(a - b) < 1e-3; };
    if (!near(rc.rho_sr, 0.1093) || !near(rc.rho_rq, 0.2240) || !near(rc.mu_at_sr, 0.3232) ||
        !near(rc.mu_at_rq, 0.4210) || !near(rc.mu_star, 0.5387))
        throw std::logic_error("region constants drifted from their reference roundings");
    return rc;
}
}  // namespace detail

/// Cached region constants; thread-safe, idempotent initialization.
inline const RegionConstants& critical_region_boundaries() {
    static const RegionConstants rc = detail::compute_region_constants();
    return rc;
}

/// Loosest joint limits with global_mu_min >= mu_min and global_mu_max <=
/// mu_max. Closed forms cover the Q/R-bound regimes; for floors below the
/// S-/R- regime boundary (~0.32) the lower limit is solved numerically.
inline JointLimitPair joint_limits_for_bounds(double mu_min, double mu_max) {
    if (!(mu_min > 0.0 && mu_min < 1.0 && mu_max > 1.0))
        throw KinematicError(ErrorKind::invalid_bound,
                             "bounds must satisfy 0 < mu_min < 1 < mu_max");

    // Upper limit: the Q+ ceiling constraint always binds; the Q+ floor
    // constraint only exists when mu_min exceeds 2/3 (the floor at Q+ never
    // drops below 2/3).
    double rho_max = (3.0 * mu_max - 1.0) / std::sqrt(6.0 * mu_max * mu_max - 4.0 * mu_max + 2.0);
    if (mu_min > 2.0 / 3.0)
        rho_max = std::min(rho_max, 1.0 / std::sqrt(3.0 * mu_min * mu_min - 4.0 * mu_min + 2.0));
    rho_max = std::clamp(rho_max, 1.0, kSqrt15 * (1.0 - 1e-12));

    // Lower limit: R- ceiling constraint always; Q- floor constraint exists
    // for mu_min above 1/3.
    double rho_min = 1.0 / std::sqrt(2.0 * mu_max * mu_max - 2.0 * mu_max + 1.0);
    if (mu_min > 1.0 / 3.0) rho_min = std::max(rho_min, detail::sym_rho_min_q(mu_min));
    rho_min = std::clamp(rho_min, 1e-12, 1.0);

    // When the floor binds through S- or R- instead of Q-, invert the
    // lower-boundary minimum factor numerically.
    if (detail::mu_min_lower_boundary(rho_min) < mu_min - 1e-12) {
        const double lo = rho_min;
        rho_min = detail::bisect(
            [mu_min](double r) { return detail::mu_min_lower_boundary(r) - mu_min; }, lo, 1.0,
            1e-13);
    }
    return {rho_min, rho_max};
}

/// Joint limits for the symmetric specification [mu, 1/mu] over the whole
/// rho-bounded workspace:
///   rho_max = (3-mu)/sqrt(2mu^2-4mu+6)
///   rho_min = (3mu-1)/sqrt(6mu^2-4mu+2)  for mu >= mu*,
///             mu/sqrt(mu^2-2mu+2)        otherwise
/// (the two lower-limit branches cross exactly at mu*, so the switch is the
/// pointwise maximum).
inline JointLimitPair joint_limits_symmetric(double mu) {
    if (!(mu > 0.0 && mu < 1.0))
        throw KinematicError(ErrorKind::invalid_bound, "symmetric factor must lie in (0, 1)");
    const double from_q = 3.0 * mu > 1.0 ? detail::sym_rho_min_q(mu) : 0.0;
    return {std::max(from_q, detail::sym_rho_min_r(mu)), detail::sym_rho_max(mu)};
}

/// Lower joint coordinate of the cube vertex Q- when the cube itself must
/// honor [mu, 1/mu]: the larger of the floor-driven and ceiling-driven
/// closed forms. Identical to rho(chi2) of the Q-axis transmission solver;
/// the first expression binds for mu above one half, the second below.
inline double cube_vertex_rho_min(double mu) {
    if (!(mu > 0.0 && mu < 1.0))
        throw KinematicError(ErrorKind::invalid_bound, "symmetric factor must lie in (0, 1)");
    const double from_floor = 3.0 * mu > 1.0 ? detail::sym_rho_min_q(mu) : 0.0;
    const double from_ceiling = mu / std::sqrt(2.0 * mu * mu - 4.0 * mu + 3.0);
    return std::max(from_floor, from_ceiling);
}

}  // namespace orthoglide
