#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace orthoglide {

/// Residual tolerance for kinematic identities, in units of the link length.
inline constexpr double kEpsKin = 1e-9;

/// Proximity threshold for singularity detection, in units of the link length.
inline constexpr double kEpsSing = 1e-8;

inline const double kSqrt15 = std::sqrt(1.5);  // upper joint limit of the unit manipulator

enum class ErrorKind {
    out_of_reach,       // Cartesian point outside the reachable volume
    no_solution,        // direct kinematics discriminant negative
    serial_singular,    // a leg orthogonal to its prismatic axis
    parallel_singular,  // det of the inverse Jacobian vanishes
    out_of_range,       // argument outside the documented domain
    invalid_bound,      // dexterity bound violates its range constraint
    not_applicable,     // operation undefined for this input kind
    singular            // generic singular configuration
};

class KinematicError : public std::runtime_error {
public:
    KinematicError(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Single physical parameter of the simplified manipulator model: the length
/// of the parallelogram principal links. Normalized analyses use L = 1.
struct Geometry {
    double link_length = 1.0;

    void validate() const {
        if (!(link_length > 0.0))
            throw KinematicError(ErrorKind::invalid_bound, "link_length must be positive");
    }
};

struct CartesianPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
    double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double squared_norm() const { return x * x + y * y + z * z; }
};

/// Actuated prismatic joint coordinates. Feasible values satisfy
/// 0 < rho <= 2L on every axis.
struct JointVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
    double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }
};

/// Inverse-kinematics branch signs (sign of rho_a - p_a per axis) and the
/// direct-kinematics branch index m.
struct ConfigIndices {
    int sx = +1;
    int sy = +1;
    int sz = +1;
    int m = -1;

    int sign(std::size_t axis) const { return axis == 0 ? sx : (axis == 1 ? sy : sz); }
};

enum class PointClass {
    outside_workspace,  // no feasible inverse-kinematic solution
    unique_ik,          // single solution, the all-plus branch
    eight_ik,           // eight solutions (first-octant pocket beyond the sphere)
    serial_singular     // on the sphere border between the two regimes
};

/// Closed interval of velocity transmission factors.
struct FactorInterval {
    double lo = 1.0;
    double hi = 1.0;

    double width() const { return hi - lo; }
};

}  // namespace orthoglide
