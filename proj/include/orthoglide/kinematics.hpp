#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "orthoglide/core.hpp"

namespace orthoglide {

struct IkSolution {
    JointVector joints;
    bool serial_singular = false;     // some radicand within the singular margin
    bool within_joint_limits = true;  // 0 < rho <= 2L on every axis
};

/// Inverse kinematics of the simplified model. Each joint coordinate is
///   rho_a = p_a + s_a * sqrt(L^2 - p_b^2 - p_c^2)
/// for the two remaining axes b, c. Throws out_of_reach when a radicand is
/// negative; a radicand below eps_sing^2 marks the serial-singular flag.
inline IkSolution inverse_kinematics(const CartesianPoint& p, const ConfigIndices& s,
                                     const Geometry& g) {
    g.validate();
    const double L = g.link_length;
    const double n2 = p.squared_norm();
    const double eps2 = (kEpsSing * L) * (kEpsSing * L);

    IkSolution out;
    for (std::size_t a = 0; a < 3; ++a) {
        const double radicand = L * L - (n2 - p[a] * p[a]);
        if (radicand < 0.0)
            throw KinematicError(ErrorKind::out_of_reach,
                                 "inverse_kinematics: point beyond link reach on axis " +
                                     std::to_string(a));
        if (radicand < eps2) out.serial_singular = true;
        out.joints[a] = p[a] + static_cast<double>(s.sign(a)) * std::sqrt(radicand);
        if (!(out.joints[a] > 0.0 && out.joints[a] <= 2.0 * L)) out.within_joint_limits = false;
    }
    return out;
}

/// Direct-kinematics branch index: sign of px/rx + py/ry + pz/rz - 1.
/// The zero set of this expression is the flat parallel-singularity surface.
inline int branch_index(const JointVector& r, const CartesianPoint& p) {
    for (std::size_t a = 0; a < 3; ++a)
        if (r[a] == 0.0)
            throw KinematicError(ErrorKind::out_of_range, "branch_index: zero joint coordinate");
    const double expr = p.x / r.x + p.y / r.y + p.z / r.z - 1.0;
    if (std::abs(expr) < kEpsSing)
        throw KinematicError(ErrorKind::parallel_singular,
                             "branch_index: configuration on the flat singularity surface");
    return expr > 0.0 ? +1 : -1;
}

/// Direct kinematics via the auxiliary scalar t:
///   p_a = rho_a / 2 + t / rho_a,  A t^2 + B t + C = 0,
///   t = (-B + m sqrt(B^2 - 4AC)) / (2A).
/// Throws no_solution when the discriminant is negative and parallel_singular
/// when it is within eps_sing of zero (the two branches coincide there).
inline CartesianPoint direct_kinematics(const JointVector& r, int m, const Geometry& g) {
    g.validate();
    if (m != +1 && m != -1)
        throw KinematicError(ErrorKind::out_of_range, "direct_kinematics: branch index must be +-1");
    for (std::size_t a = 0; a < 3; ++a)
        if (!(r[a] > 0.0))
            throw KinematicError(ErrorKind::out_of_range,
                                 "direct_kinematics: joint coordinates must be positive");

    const double L = g.link_length;
    const double xy = r.x * r.y, xz = r.x * r.z, yz = r.y * r.z;
    const double xyz = r.x * r.y * r.z;
    const double A = xy * xy + xz * xz + yz * yz;
    const double B = xyz * xyz;
    const double C = (r.x * r.x + r.y * r.y + r.z * r.z - 4.0 * L * L) * xyz * xyz / 4.0;
    const double disc = B * B - 4.0 * A * C;

    // the discriminant scales like rho^12, so the singularity test is
    // relative to its own terms
    const double scale = std::max(B * B, std::abs(4.0 * A * C));
    if (std::abs(disc) < kEpsSing * scale)
        throw KinematicError(ErrorKind::parallel_singular,
                             "direct_kinematics: discriminant at the parallel singularity");
    if (disc < 0.0)
        throw KinematicError(ErrorKind::no_solution,
                             "direct_kinematics: joints outside the reachable region");

    const double t = (-B + static_cast<double>(m) * std::sqrt(disc)) / (2.0 * A);
    return {r.x / 2.0 + t / r.x, r.y / 2.0 + t / r.y, r.z / 2.0 + t / r.z};
}

/// Analytic inverse Jacobian, mapping Cartesian velocity to joint velocity:
/// unit diagonal, entry (i,j) = p_j / (p_i - rho_i) off the diagonal.
inline Eigen::Matrix3d inverse_jacobian(const CartesianPoint& p, const JointVector& r) {
    Eigen::Matrix3d J = Eigen::Matrix3d::Identity();
    for (int i = 0; i < 3; ++i) {
        const double denom = p[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(i)];
        if (std::abs(denom) < kEpsSing)
            throw KinematicError(ErrorKind::serial_singular,
                                 "inverse_jacobian: link orthogonal to its axis");
        for (int j = 0; j < 3; ++j)
            if (i != j) J(i, j) = p[static_cast<std::size_t>(j)] / denom;
    }
    return J;
}

/// Closed-form determinant of the inverse Jacobian:
///   (px ry rz + rx py rz + rx ry pz - rx ry rz) / ((px-rx)(py-ry)(pz-rz)).
inline double inverse_jacobian_det(const CartesianPoint& p, const JointVector& r) {
    double denom = 1.0;
    for (std::size_t a = 0; a < 3; ++a) {
        const double d = p[a] - r[a];
        if (std::abs(d) < kEpsSing)
            throw KinematicError(ErrorKind::serial_singular,
                                 "inverse_jacobian_det: link orthogonal to its axis");
        denom *= d;
    }
    const double num =
        p.x * r.y * r.z + r.x * p.y * r.z + r.x * r.y * p.z - r.x * r.y * r.z;
    return num / denom;
}

/// Classifies a Cartesian point by its inverse-kinematics solution count.
/// Inside the sphere of radius L the all-plus branch is the unique feasible
/// solution; the first-octant pocket between the sphere and the cylinder
/// intersection admits all eight; the sphere border itself is the serial
/// singularity.
inline PointClass classify_cartesian_point(const CartesianPoint& p, const Geometry& g) {
    g.validate();
    const double L = g.link_length;
    const double n = p.norm();

    bool in_cylinders = true;
    const double n2 = p.squared_norm();
    for (std::size_t a = 0; a < 3; ++a)
        if (n2 - p[a] * p[a] > L * L) in_cylinders = false;

    if (in_cylinders && std::abs(n - L) < kEpsSing * L) return PointClass::serial_singular;
    if (n < L) return PointClass::unique_ik;
    if (in_cylinders && n > L && p.x > 0.0 && p.y > 0.0 && p.z > 0.0)
        return PointClass::eight_ik;
    return PointClass::outside_workspace;
}

struct JointSpaceCheck {
    bool feasible = false;
    double boundary_expression = 0.0;  // (|rho|^2 - 4L^2) * sum rho_a^-2; feasible iff <= 1
};

/// Direct-kinematics existence test. The quadratic discriminant satisfies
/// B^2 - 4AC = B^2 (1 - boundary_expression), so the joint region is the set
/// where the boundary expression does not exceed one.
inline JointSpaceCheck joint_space_feasible(const JointVector& r, const Geometry& g) {
    g.validate();
    for (std::size_t a = 0; a < 3; ++a)
        if (!(r[a] > 0.0))
            throw KinematicError(ErrorKind::out_of_range,
                                 "joint_space_feasible: joint coordinates must be positive");
    const double L = g.link_length;
    const double sum_sq = r.x * r.x + r.y * r.y + r.z * r.z;
    const double sum_inv = 1.0 / (r.x * r.x) + 1.0 / (r.y * r.y) + 1.0 / (r.z * r.z);
    const double expr = (sum_sq - 4.0 * L * L) * sum_inv;
    return {expr <= 1.0, expr};
}

}  // namespace orthoglide
