#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string_view>
#include <variant>

#include "orthoglide/core.hpp"

namespace orthoglide {

// Dexterity calculus along the Q-axis, the first-octant bisector px=py=pz.
// Points are parameterized by the dimensionless chi = -p / sqrt(L^2 - 2 p^2);
// the singularity-free range is chi in (-0.5, 1), chi = 0 at the isotropic
// posture. p(chi) and rho(chi) are strictly decreasing on that range.

inline double p_from_chi(double chi, const Geometry& g = {}) {
    return -chi * g.link_length / std::sqrt(1.0 + 2.0 * chi * chi);
}

inline double rho_from_chi(double chi, const Geometry& g = {}) {
    return (1.0 - chi) * g.link_length / std::sqrt(1.0 + 2.0 * chi * chi);
}

inline double chi_from_p(double p, const Geometry& g = {}) {
    const double L = g.link_length;
    if (!(std::abs(p) < L / std::numbers::sqrt2))
        throw KinematicError(ErrorKind::out_of_range,
                             "chi_from_p: |p| must be below L/sqrt(2)");
    return -p / std::sqrt(L * L - 2.0 * p * p);
}

/// Inverse Jacobian restricted to the Q-axis: unit diagonal, chi elsewhere.
inline Eigen::Matrix3d qaxis_inverse_jacobian(double chi) {
    Eigen::Matrix3d J;
    J.setConstant(chi);
    J.diagonal().setOnes();
    return J;
}

/// Eigenvalues of the Q-axis inverse Jacobian: 1 + 2 chi and a double 1 - chi.
inline std::array<double, 3> qaxis_eigenvalues(double chi) {
    return {1.0 + 2.0 * chi, 1.0 - chi, 1.0 - chi};
}

/// Manipulability along the Q-axis, w = |det| = (1 - chi)^2 |1 + 2 chi|.
/// Equals one at the isotropic posture and vanishes at both interval ends.
inline double manipulability(double chi) {
    return (1.0 - chi) * (1.0 - chi) * std::abs(1.0 + 2.0 * chi);
}

/// Condition number of the Q-axis inverse Jacobian, ratio of the extreme
/// eigenvalues. Defined on the open singularity-free interval only.
inline double condition_number(double chi) {
    if (!(chi > -0.5 && chi < 1.0))
        throw KinematicError(ErrorKind::singular,
                             "condition_number: chi outside the singularity-free range");
    const auto ev = qaxis_eigenvalues(chi);
    const auto [lo, hi] = std::minmax({ev[0], ev[1], ev[2]});
    return hi / lo;
}

/// Chi interval bracketing the isotropic posture, chi1 <= 0 <= chi2.
/// Since p and rho decrease in chi: rho_min = rho(chi2), rho_max = rho(chi1).
struct ChiRange {
    double chi1 = 0.0;
    double chi2 = 0.0;
};

/// Solves (1 - chi)^2 (1 + 2 chi) = delta, i.e. the cubic
/// 2 chi^3 - 3 chi^2 + (1 - delta) = 0, and returns the two real roots
/// closest to zero (one per side). All three roots are real for delta in
/// (0,1); the trigonometric form enumerates them directly.
inline ChiRange chi_range_for_manipulability(double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw KinematicError(ErrorKind::invalid_bound,
                             "manipulability floor must lie in (0, 1)");
    const double theta = std::acos(std::clamp(2.0 * delta - 1.0, -1.0, 1.0));
    const auto root = [theta](int k) {
        return 0.5 + std::cos(theta / 3.0 - 2.0 * std::numbers::pi * k / 3.0);
    };
    // k = 0 yields the root in (1, 1.5); k = 1 the one in (0, 1); k = 2 the
    // one in (-0.5, 0).
    return {root(2), root(1)};
}

/// Inverts the piecewise condition-number expression on each side of zero:
/// chi1 = -(delta - 1)/(2 delta + 1), chi2 = (delta - 1)/(delta + 2).
inline ChiRange chi_range_for_condition(double delta) {
    if (!(delta >= 1.0))
        throw KinematicError(ErrorKind::invalid_bound, "condition ceiling must be >= 1");
    return {-(delta - 1.0) / (2.0 * delta + 1.0), (delta - 1.0) / (delta + 2.0)};
}

/// Keeps both eigenvalue families 1 + 2 chi and 1 - chi inside
/// [lambda_min, lambda_max]:
///   chi1 = max{1 - lambda_max, (lambda_min - 1)/2}
///   chi2 = min{1 - lambda_min, (lambda_max - 1)/2}
/// For the symmetric window [mu, 1/mu] this is the same as bounding the
/// transmission factors themselves, the eigenvalue reciprocals.
inline ChiRange chi_range_for_transmission(double lambda_min, double lambda_max) {
    if (!(lambda_min < 1.0 && 1.0 < lambda_max))
        throw KinematicError(ErrorKind::invalid_bound,
                             "transmission interval must satisfy lambda_min < 1 < lambda_max");
    return {std::max(1.0 - lambda_max, (lambda_min - 1.0) / 2.0),
            std::min(1.0 - lambda_min, (lambda_max - 1.0) / 2.0)};
}

// ---------------------------------------------------------------------------
// Dexterity bound specification

struct ManipulabilityFloor {
    double delta;  // in (0, 1)
};

struct ConditionCeiling {
    double delta;  // > 1
};

struct TransmissionInterval {
    double lambda_min;  // < 1
    double lambda_max;  // > 1
};

struct SymmetricFactor {
    double mu;  // in (0, 1); factors constrained to [mu, 1/mu]
};

using DexterityBound =
    std::variant<ManipulabilityFloor, ConditionCeiling, TransmissionInterval, SymmetricFactor>;

inline void validate(const DexterityBound& bound) {
    std::visit(
        [](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, ManipulabilityFloor>) {
                if (!(b.delta > 0.0 && b.delta < 1.0))
                    throw KinematicError(ErrorKind::invalid_bound,
                                         "manipulability floor must lie in (0, 1)");
            } else if constexpr (std::is_same_v<T, ConditionCeiling>) {
                if (!(b.delta > 1.0))
                    throw KinematicError(ErrorKind::invalid_bound,
                                         "condition ceiling must exceed 1");
            } else if constexpr (std::is_same_v<T, TransmissionInterval>) {
                if (!(b.lambda_min < 1.0 && 1.0 < b.lambda_max))
                    throw KinematicError(ErrorKind::invalid_bound,
                                         "transmission interval must straddle 1");
            } else {
                if (!(b.mu > 0.0 && b.mu < 1.0))
                    throw KinematicError(ErrorKind::invalid_bound,
                                         "symmetric factor must lie in (0, 1)");
            }
        },
        bound);
}

/// Q-axis chi interval realizing the bound, via the matching solver.
inline ChiRange chi_range_for(const DexterityBound& bound) {
    validate(bound);
    return std::visit(
        [](const auto& b) -> ChiRange {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, ManipulabilityFloor>)
                return chi_range_for_manipulability(b.delta);
            else if constexpr (std::is_same_v<T, ConditionCeiling>)
                return chi_range_for_condition(b.delta);
            else if constexpr (std::is_same_v<T, TransmissionInterval>)
                return chi_range_for_transmission(b.lambda_min, b.lambda_max);
            else
                return chi_range_for_transmission(b.mu, 1.0 / b.mu);
        },
        bound);
}

// ---------------------------------------------------------------------------
// Named Q-axis landmarks of the unit manipulator

struct QAxisLandmark {
    std::string_view name;
    double p = 0.0;
    double rho = 0.0;
    double chi = 0.0;        // valid only when chi_finite
    bool chi_finite = true;
    double det = 0.0;        // direct-Jacobian determinant; valid only when det_finite
    bool det_finite = true;
};

/// The five landmark postures: three parallel-singular points, the isotropic
/// point, and the serial-singular end where chi diverges. Lengths scale with
/// the link length.
inline std::array<QAxisLandmark, 5> table1_landmarks(const Geometry& g = {}) {
    g.validate();
    const double L = g.link_length;
    return {{
        {"P1", -std::sqrt(1.0 / 3.0) * L, 0.0, 1.0, true, 0.0, false},
        {"O", 0.0, L, 0.0, true, 1.0, true},
        {"P2", std::sqrt(1.0 / 6.0) * L, std::sqrt(1.5) * L, -0.5, true, 0.0, false},
        {"P3", std::sqrt(1.0 / 3.0) * L, std::sqrt(4.0 / 3.0) * L, -1.0, true, 0.0, false},
        {"P4", std::sqrt(0.5) * L, std::sqrt(0.5) * L, 0.0, false, 0.0, true},
    }};
}

}  // namespace orthoglide
