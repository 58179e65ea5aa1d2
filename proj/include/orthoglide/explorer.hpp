#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "orthoglide/core.hpp"
#include "orthoglide/critical_points.hpp"
#include "orthoglide/kinematics.hpp"
#include "orthoglide/qaxis.hpp"
#include "orthoglide/synthesis.hpp"

namespace orthoglide {

// Numerical companion to the closed-form modules: SVD-based factor evaluation
// at arbitrary points, volume estimates by ray spanning and Monte Carlo, and
// dense scans backing the analytic global bounds.

struct FactorRange {
    double mu_min = 1.0;
    double mu_max = 1.0;
};

/// Numeric singular values of a 3x3 matrix, descending.
inline std::array<double, 3> singular_values(const Eigen::Matrix3d& m) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m);
    const auto& s = svd.singularValues();
    return {s(0), s(1), s(2)};
}

/// Transmission-factor range at a known configuration: reciprocals of the
/// extreme singular values of the inverse Jacobian.
inline FactorRange factor_range_at(const CartesianPoint& p, const JointVector& r) {
    const auto sv = singular_values(inverse_jacobian(p, r));
    return {1.0 / sv[0], 1.0 / sv[2]};
}

/// Same, resolving the joints through the all-plus inverse-kinematics branch.
inline FactorRange factor_range_at(const CartesianPoint& p, const Geometry& g) {
    const IkSolution ik = inverse_kinematics(p, {}, g);
    if (ik.serial_singular)
        throw KinematicError(ErrorKind::singular, "factor_range_at: serial singularity");
    const double expr =
        p.x / ik.joints.x + p.y / ik.joints.y + p.z / ik.joints.z - 1.0;
    if (std::abs(expr) < kEpsSing)
        throw KinematicError(ErrorKind::singular, "factor_range_at: parallel singularity");
    return factor_range_at(p, ik.joints);
}

// ---------------------------------------------------------------------------
// Worker pool helpers

/// Worker count: the request (or hardware concurrency), capped by the
/// ORTHOGLIDE_THREADS environment variable when set.
inline int worker_count(int requested = 0) {
    int n = requested > 0 ? requested
                          : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("ORTHOGLIDE_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return std::max(1, n);
}

namespace detail {

/// Static block partition of [0, n). Results must be written to
/// index-addressed storage so the outcome is independent of the partition.
/// The lowest-indexed worker exception is rethrown after the join.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t, std::size_t)>& body) {
    const int workers = std::min<std::size_t>(worker_count(threads), std::max<std::size_t>(n, 1));
    if (workers <= 1 || n < 2) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::size_t chunk = (n + static_cast<std::size_t>(workers) - 1) / workers;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const std::size_t begin = static_cast<std::size_t>(w) * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, &errors, w, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Workspace feasibility predicate (normalized manipulator)

namespace detail {

/// All-plus-branch joints for a point strictly inside the unit ball, with the
/// singularity margins applied; empty when the point is infeasible.
inline bool workspace_point(const CartesianPoint& p, JointVector& joints) {
    const double n2 = p.squared_norm();
    if (n2 >= 1.0) return false;
    for (std::size_t a = 0; a < 3; ++a) {
        const double rad = 1.0 - n2 + p[a] * p[a];
        if (rad < kEpsSing * kEpsSing) return false;
        joints[a] = p[a] + std::sqrt(rad);
        if (!(joints[a] > 0.0 && joints[a] <= 2.0)) return false;
    }
    // stay on the nonsingular side of the flat surface
    return p.x / joints.x + p.y / joints.y + p.z / joints.z - 1.0 < -kEpsSing;
}

}  // namespace detail

/// Membership test for the singularity-free workspace: inside the unit ball,
/// on the nonsingular side of the flat surface, with the serial margins
/// respected.
inline bool in_singularity_free_workspace(const CartesianPoint& p) {
    JointVector joints;
    return detail::workspace_point(p, joints);
}

/// Bounds on the transmission factors themselves; one side may be absent.
struct FactorWindow {
    double factor_min = 0.0;
    double factor_max = std::numeric_limits<double>::infinity();
};

/// Checks the dexterity criterion against the singular values of the inverse
/// Jacobian at one configuration.
inline bool satisfies(const DexterityBound& bound, const std::array<double, 3>& sv) {
    return std::visit(
        [&sv](const auto& b) -> bool {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, ManipulabilityFloor>) {
                return sv[0] * sv[1] * sv[2] >= b.delta;
            } else if constexpr (std::is_same_v<T, ConditionCeiling>) {
                return sv[0] / sv[2] <= b.delta;
            } else if constexpr (std::is_same_v<T, TransmissionInterval>) {
                return sv[2] >= b.lambda_min && sv[0] <= b.lambda_max;
            } else {
                return 1.0 / sv[0] >= b.mu && 1.0 / sv[2] <= 1.0 / b.mu;
            }
        },
        bound);
}

inline bool satisfies(const FactorWindow& window, const std::array<double, 3>& sv) {
    return 1.0 / sv[0] >= window.factor_min && 1.0 / sv[2] <= window.factor_max;
}

struct VolumeEstimate {
    double fraction = 0.0;
    enum class Reference { v0, ball } reference = Reference::v0;
    std::uint64_t ray_count = 0;  // rays, or Monte Carlo samples
    double bisection_tol = 0.0;
    std::uint64_t star_violations = 0;  // rays whose predicate was not a single interval
    bool clipped_to_workspace = true;
};

struct VolumeOptions {
    bool clip_to_workspace = true;  // intersect the bound with the singularity-free volume
    int threads = 0;
    int star_scan_steps = 96;  // coarse monotonicity audit along each ray; 0 disables
};

namespace detail {

/// Quasi-uniform unit directions on the golden-angle spiral; deterministic.
inline std::vector<CartesianPoint> fibonacci_directions(std::uint64_t n) {
    std::vector<CartesianPoint> dirs(n);
    const double golden = std::numbers::pi * (1.0 + std::sqrt(5.0));
    for (std::uint64_t i = 0; i < n; ++i) {
        const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * static_cast<double>(i);
        dirs[i] = {s * std::cos(phi), s * std::sin(phi), z};
    }
    return dirs;
}

using PointPredicate = std::function<bool(const CartesianPoint&)>;

struct RayResult {
    double radius = 0.0;
    bool violated = false;
};

/// Largest feasible radius along one direction by bisection. The origin is
/// feasible and the unit sphere is not, so a bracket always exists.
inline RayResult trace_ray(const CartesianPoint& dir, const PointPredicate& pred, double tol,
                           int star_scan_steps) {
    const auto at = [&dir](double r) {
        return CartesianPoint{dir.x * r, dir.y * r, dir.z * r};
    };
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
        const double m = 0.5 * (lo + hi);
        if (pred(at(m)))
            lo = m;
        else
            hi = m;
    }
    RayResult out{lo, false};
    if (star_scan_steps > 1) {
        bool seen_false = false;
        for (int k = 1; k <= star_scan_steps; ++k) {
            const double r = static_cast<double>(k) / (star_scan_steps + 1);
            const bool ok = pred(at(r));
            if (!ok)
                seen_false = true;
            else if (seen_false) {
                out.violated = true;
                break;
            }
        }
    }
    return out;
}

/// Sum of radius cubes over the direction set; proportional to the enclosed
/// volume. Per-ray storage keeps the result independent of the partition.
inline std::pair<double, std::uint64_t> ray_volume_sum(const std::vector<CartesianPoint>& dirs,
                                                       const PointPredicate& pred, double tol,
                                                       const VolumeOptions& opt) {
    std::vector<RayResult> results(dirs.size());
    parallel_for(dirs.size(), opt.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            results[i] = trace_ray(dirs[i], pred, tol, opt.star_scan_steps);
    });
    double sum = 0.0;
    std::uint64_t violations = 0;
    for (const auto& r : results) {
        sum += r.radius * r.radius * r.radius;
        violations += r.violated ? 1 : 0;
    }
    return {sum, violations};
}

inline PointPredicate workspace_only_predicate() {
    return [](const CartesianPoint& p) {
        JointVector r;
        return workspace_point(p, r);
    };
}

template <typename Bound>
PointPredicate bounded_predicate(const Bound& bound, bool clip) {
    return [bound, clip](const CartesianPoint& p) {
        JointVector r;
        if (!workspace_point(p, r)) {
            if (clip) return false;
            // dexterity-only reading: evaluate wherever the branch exists
            const double n2 = p.squared_norm();
            if (n2 >= 1.0) return false;
            for (std::size_t a = 0; a < 3; ++a) {
                const double rad = 1.0 - n2 + p[a] * p[a];
                if (rad < kEpsSing * kEpsSing) return false;
                r[a] = p[a] + std::sqrt(rad);
            }
        }
        return satisfies(bound, singular_values(inverse_jacobian(p, r)));
    };
}

/// Reference sum of radius cubes for the bare singularity-free workspace,
/// cached per (rays, tol) so repeated bound evaluations share one normalizer.
inline double v0_radius_sum(std::uint64_t rays, double tol, const VolumeOptions& opt) {
    static std::map<std::pair<std::uint64_t, double>, double> cache;
    static std::mutex mutex;
    {
        std::lock_guard<std::mutex> lock(mutex);
        if (auto it = cache.find({rays, tol}); it != cache.end()) return it->second;
    }
    VolumeOptions v0_opt = opt;
    v0_opt.star_scan_steps = 0;
    const double sum =
        ray_volume_sum(fibonacci_directions(rays), workspace_only_predicate(), tol, v0_opt)
            .first;
    std::lock_guard<std::mutex> lock(mutex);
    cache.insert({{rays, tol}, sum});
    return sum;
}

template <typename Bound>
VolumeEstimate dextrous_volume_impl(const Bound& bound, std::uint64_t rays, double tol,
                                    const VolumeOptions& opt) {
    if (rays < 1000)
        throw KinematicError(ErrorKind::out_of_range, "dextrous_volume: need at least 1000 rays");
    if (!(tol > 0.0 && tol <= 1e-3))
        throw KinematicError(ErrorKind::out_of_range,
                             "dextrous_volume: bisection tolerance must be in (0, 1e-3]");
    const auto dirs = fibonacci_directions(rays);
    const auto [sum, violations] =
        ray_volume_sum(dirs, bounded_predicate(bound, opt.clip_to_workspace), tol, opt);
    VolumeEstimate est;
    est.fraction = sum / v0_radius_sum(rays, tol, opt);
    est.reference = VolumeEstimate::Reference::v0;
    est.ray_count = rays;
    est.bisection_tol = tol;
    est.star_violations = violations;
    est.clipped_to_workspace = opt.clip_to_workspace;
    return est;
}

}  // namespace detail

/// Volume of the region satisfying the dexterity bound, as a fraction of the
/// singularity-free workspace volume V0. Rays fan out from the isotropic
/// point; a dichotomic search per ray locates the feasibility boundary.
inline VolumeEstimate dextrous_volume(const DexterityBound& bound, std::uint64_t rays,
                                      double tol, const VolumeOptions& opt = {}) {
    validate(bound);
    return detail::dextrous_volume_impl(bound, rays, tol, opt);
}

/// Same with one-sided or asymmetric factor windows (the bound forms used by
/// the workspace-shape studies).
inline VolumeEstimate dextrous_volume(const FactorWindow& window, std::uint64_t rays, double tol,
                                      const VolumeOptions& opt = {}) {
    if (!(window.factor_min < 1.0 && window.factor_max > 1.0))
        throw KinematicError(ErrorKind::invalid_bound,
                             "factor window must contain 1 (the isotropic point)");
    return detail::dextrous_volume_impl(window, rays, tol, opt);
}

/// Singularity-free workspace volume V0 itself, as a fraction of the unit
/// ball (ray method, deterministic).
inline VolumeEstimate workspace_volume(std::uint64_t rays, double tol,
                                       const VolumeOptions& opt = {}) {
    if (rays < 1000)
        throw KinematicError(ErrorKind::out_of_range, "workspace_volume: need at least 1000 rays");
    VolumeEstimate est;
    est.fraction = detail::v0_radius_sum(rays, tol, opt) / static_cast<double>(rays);
    est.reference = VolumeEstimate::Reference::ball;
    est.ray_count = rays;
    est.bisection_tol = tol;
    est.clipped_to_workspace = true;
    return est;
}

/// Monte-Carlo estimate of the singularity-free fraction of the unit ball:
/// points where the all-plus branch exists and the branch expression stays
/// below zero (the nonsingular side of the flat surface).
inline VolumeEstimate singularity_free_volume(std::uint64_t samples,
                                              std::uint64_t seed = 0x6f72746847UL) {
    if (samples < 1000000)
        throw KinematicError(ErrorKind::out_of_range,
                             "singularity_free_volume: need at least 1e6 samples");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uint64_t feasible = 0;
    for (std::uint64_t i = 0; i < samples;) {
        const CartesianPoint p{u(rng), u(rng), u(rng)};
        if (p.squared_norm() >= 1.0) continue;  // rejection: sample the ball uniformly
        ++i;
        JointVector r;
        if (detail::workspace_point(p, r)) ++feasible;
    }
    VolumeEstimate est;
    est.fraction = static_cast<double>(feasible) / static_cast<double>(samples);
    est.reference = VolumeEstimate::Reference::ball;
    est.ray_count = samples;
    return est;
}

// ---------------------------------------------------------------------------
// Dense scans

struct GridScanResult {
    FactorRange range;
    CartesianPoint argmin_point, argmax_point;
    JointVector argmin_joints, argmax_joints;
};

/// Scans the joint box [rho_min, rho_max]^3 on a cubic grid, mapping each
/// node through the m = -1 direct-kinematics branch. The independent check
/// behind the closed-form global bounds.
inline GridScanResult grid_scan_mu(const JointLimitPair& limits, int resolution,
                                   int threads = 0) {
    limits.validate();
    if (resolution < 21)
        throw KinematicError(ErrorKind::out_of_range,
                             "grid_scan_mu: resolution must be at least 21");
    const int n = resolution;
    const Geometry g{1.0};

    struct Slice {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        CartesianPoint lo_p, hi_p;
        JointVector lo_r, hi_r;
    };
    std::vector<Slice> slices(static_cast<std::size_t>(n));

    const auto coord = [&](int k) {
        if (n == 1) return limits.rho_min;
        return limits.rho_min + (limits.rho_max - limits.rho_min) * k / (n - 1.0);
    };
    detail::parallel_for(static_cast<std::size_t>(n), threads,
                         [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Slice& s = slices[i];
            for (int j = 0; j < n; ++j) {
                for (int k = 0; k < n; ++k) {
                    const JointVector r{coord(static_cast<int>(i)), coord(j), coord(k)};
                    const CartesianPoint p = direct_kinematics(r, -1, g);
                    const FactorRange f = factor_range_at(p, r);
                    if (f.mu_min < s.lo) {
                        s.lo = f.mu_min;
                        s.lo_p = p;
                        s.lo_r = r;
                    }
                    if (f.mu_max > s.hi) {
                        s.hi = f.mu_max;
                        s.hi_p = p;
                        s.hi_r = r;
                    }
                }
            }
        }
    });

    GridScanResult out;
    out.range = {std::numeric_limits<double>::infinity(),
                 -std::numeric_limits<double>::infinity()};
    for (const auto& s : slices) {
        if (s.lo < out.range.mu_min) {
            out.range.mu_min = s.lo;
            out.argmin_point = s.lo_p;
            out.argmin_joints = s.lo_r;
        }
        if (s.hi > out.range.mu_max) {
            out.range.mu_max = s.hi;
            out.argmax_point = s.hi_p;
            out.argmax_joints = s.hi_r;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Contour table for the (rho_min, rho_max) plane

struct ContourRow {
    double rho_min = 0.0;
    double rho_max = 0.0;
    double mu_min = 0.0;
    double mu_max = 0.0;
    std::string kind_min;  // binding critical point, or a locus tag
    std::string kind_max;
};

/// Closed-form global bounds tabulated over the joint-limit rectangle
/// [0,1] x [1, sqrt(1.5)], plus the region-boundary and symmetric-design
/// loci as flagged rows. Edge nodes carry their limit values (0 or inf).
inline std::vector<ContourRow> contour_data(int grid_n) {
    if (grid_n < 2)
        throw KinematicError(ErrorKind::out_of_range, "contour_data: need grid_n >= 2");
    std::vector<ContourRow> rows;
    rows.reserve(static_cast<std::size_t>(grid_n) * grid_n + 3 * grid_n);

    const double inf = std::numeric_limits<double>::infinity();
    const auto evaluate = [&](double rmin, double rmax) {
        ContourRow row;
        row.rho_min = rmin;
        row.rho_max = rmax;
        const bool min_edge = rmin <= 0.0;
        const bool max_edge = rmax >= kSqrt15;
        const JointLimitPair inner{std::max(rmin, 1e-9),
                                   std::min(rmax, kSqrt15 * (1.0 - 1e-12))};
        const GlobalBound lo = global_mu_min(inner);
        const GlobalBound hi = global_mu_max(inner);
        row.mu_min = min_edge ? 0.0 : lo.value;
        row.kind_min = std::string(to_string(lo.at));
        row.mu_max = (min_edge || max_edge) ? inf : hi.value;
        row.kind_max = std::string(to_string(hi.at));
        return row;
    };

    for (int i = 0; i < grid_n; ++i) {
        const double rmin = static_cast<double>(i) / (grid_n - 1);
        for (int j = 0; j < grid_n; ++j) {
            const double rmax = 1.0 + (kSqrt15 - 1.0) * j / (grid_n - 1);
            rows.push_back(evaluate(rmin, rmax));
        }
    }

    // region-boundary curves
    for (int k = 0; k < grid_n; ++k) {
        const double chi = 0.25 * k / grid_n;
        const CurvePoint c = phi_qq_parametric(chi);
        rows.push_back({c.rho_min, c.rho_max, c.factor, c.factor, "phi_QQ", "phi_QQ"});
    }
    for (int k = 0; k < grid_n; ++k) {
        const double chi = -0.5 * k / grid_n;
        const CurvePoint c = phi_rq_parametric(chi);
        rows.push_back({c.rho_min, c.rho_max, c.factor, c.factor, "phi_RQ", "phi_RQ"});
    }
    // symmetric-design loci: whole workspace and Q-axis-only
    for (int k = 1; k <= grid_n; ++k) {
        const double mu = 0.3 + 0.7 * (k - 0.5) / grid_n;
        const JointLimitPair lim = joint_limits_symmetric(mu);
        rows.push_back({lim.rho_min, lim.rho_max, mu, 1.0 / mu, "symmetric_wrho",
                        "symmetric_wrho"});
        const ChiRange chi = chi_range_for_transmission(mu, 1.0 / mu);
        rows.push_back({rho_from_chi(chi.chi2), rho_from_chi(chi.chi1), mu, 1.0 / mu,
                        "symmetric_qaxis", "symmetric_qaxis"});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Encoder-offset sensitivity

/// Factor range over the commanded cube when every encoder reads a common
/// offset: commanded point -> commanded joints (inverse kinematics), true
/// joints = commanded + offset, true point by direct kinematics, factors at
/// the true configuration. Works in the design's own length units.
inline FactorRange offset_sensitivity(const DesignResult& design, const JointVector& offsets,
                                      int samples_per_axis = 21) {
    if (samples_per_axis < 2)
        throw KinematicError(ErrorKind::out_of_range,
                             "offset_sensitivity: need at least 2 samples per axis");
    const Geometry g{design.link_length};
    FactorRange range{std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity()};
    const int n = samples_per_axis;
    const auto coord = [&](int k) {
        return design.p_min + (design.p_max - design.p_min) * k / (n - 1.0);
    };
    try {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                for (int k = 0; k < n; ++k) {
                    const CartesianPoint commanded{coord(i), coord(j), coord(k)};
                    const JointVector rc = inverse_kinematics(commanded, {}, g).joints;
                    const JointVector rt{rc.x + offsets.x, rc.y + offsets.y, rc.z + offsets.z};
                    const CartesianPoint pt = direct_kinematics(rt, -1, g);
                    const FactorRange f = factor_range_at(pt, rt);
                    range.mu_min = std::min(range.mu_min, f.mu_min);
                    range.mu_max = std::max(range.mu_max, f.mu_max);
                }
            }
        }
    } catch (const KinematicError& e) {
        throw KinematicError(ErrorKind::singular,
                             std::string("offset_sensitivity: offset drives a sampled "
                                         "configuration past a singularity (") +
                                 e.what() + ")");
    }
    return range;
}

inline FactorRange offset_sensitivity(const DesignResult& design, double offset,
                                      int samples_per_axis = 21) {
    if (!(offset >= 0.0))
        throw KinematicError(ErrorKind::out_of_range,
                             "offset_sensitivity: offset must be nonnegative");
    return offset_sensitivity(design, JointVector{offset, offset, offset}, samples_per_axis);
}

}  // namespace orthoglide
