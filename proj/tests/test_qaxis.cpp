#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "orthoglide/kinematics.hpp"
#include "orthoglide/qaxis.hpp"
#include "oracles.hpp"

using namespace orthoglide;
using Catch::Matchers::WithinAbs;

TEST_CASE("chi parameterization of the bisector") {
    const Geometry g{};
    REQUIRE_THAT(p_from_chi(0.0), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(rho_from_chi(0.0), WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(p_from_chi(-0.5), WithinAbs(std::sqrt(1.0 / 6.0), 1e-15));
    REQUIRE_THAT(rho_from_chi(-0.5), WithinAbs(std::sqrt(1.5), 1e-15));
    REQUIRE_THAT(p_from_chi(1.0), WithinAbs(-std::sqrt(1.0 / 3.0), 1e-15));
    REQUIRE_THAT(rho_from_chi(1.0), WithinAbs(0.0, 1e-15));

    REQUIRE_THAT(chi_from_p(0.0), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(chi_from_p(-1.0 / std::sqrt(3.0)), WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(chi_from_p(std::sqrt(1.0 / 6.0)), WithinAbs(-0.5, 1e-12));
    REQUIRE_THROWS_AS(chi_from_p(1.0 / std::numbers::sqrt2, g), KinematicError);
    REQUIRE_THROWS_AS(chi_from_p(-0.9, g), KinematicError);

    SECTION("round trip and monotonicity") {
        double prev_p = std::numeric_limits<double>::infinity();
        double prev_rho = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 1000; ++i) {
            const double chi = -0.5 + 1.5 * i / 1000.0;
            const double p = p_from_chi(chi);
            if (i > 0 && i < 1000) REQUIRE_THAT(chi_from_p(p), WithinAbs(chi, 1e-12));
            const double rho = rho_from_chi(chi);
            REQUIRE(p < prev_p);
            if (i > 0) REQUIRE(rho < prev_rho);
            prev_p = p;
            prev_rho = rho;
        }
    }

    SECTION("scales with link length") {
        const Geometry big{3.0};
        REQUIRE_THAT(p_from_chi(-0.5, big), WithinAbs(3.0 * std::sqrt(1.0 / 6.0), 1e-14));
        REQUIRE_THAT(chi_from_p(3.0 * std::sqrt(1.0 / 6.0), big), WithinAbs(-0.5, 1e-12));
    }
}

TEST_CASE("Q-axis inverse Jacobian and its eigenvalues") {
    REQUIRE((qaxis_inverse_jacobian(0.0) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <
            1e-15);

    SECTION("eigenvalue law against a numeric eigensolver") {
        std::mt19937_64 rng(42);
        std::uniform_real_distribution<double> u(-0.49, 0.99);
        for (int i = 0; i < 1000; ++i) {
            const double chi = u(rng);
            auto expected = qaxis_eigenvalues(chi);
            std::sort(expected.begin(), expected.end());
            const auto numeric = oracles::symmetric_eigenvalues(qaxis_inverse_jacobian(chi));
            for (int k = 0; k < 3; ++k)
                REQUIRE_THAT(numeric[static_cast<std::size_t>(k)],
                             WithinAbs(expected[static_cast<std::size_t>(k)], 1e-10));
        }
    }

    SECTION("reference eigentriples") {
        const auto a = qaxis_eigenvalues(0.5);
        REQUIRE_THAT(a[0], WithinAbs(2.0, 1e-15));
        REQUIRE_THAT(a[1], WithinAbs(0.5, 1e-15));
        const auto b = qaxis_eigenvalues(-0.25);
        REQUIRE_THAT(b[0], WithinAbs(0.5, 1e-15));
        REQUIRE_THAT(b[1], WithinAbs(1.25, 1e-15));
        const auto c = qaxis_eigenvalues(0.4648);
        REQUIRE_THAT(c[0], WithinAbs(1.9296, 1e-3));
        const auto d = qaxis_eigenvalues(-0.5);
        REQUIRE_THAT(d[0], WithinAbs(0.0, 1e-15));
        REQUIRE_THAT(d[1], WithinAbs(1.5, 1e-15));
    }
}

TEST_CASE("manipulability along the bisector") {
    REQUIRE_THAT(manipulability(0.0), WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(manipulability(0.5), WithinAbs(0.5, 1e-15));
    REQUIRE_THAT(manipulability(-0.5), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(manipulability(1.0), WithinAbs(0.0, 1e-15));

    SECTION("equals |det| of the full inverse Jacobian on the bisector") {
        for (int i = 1; i < 100; ++i) {
            const double chi = -0.5 + 1.5 * i / 100.0;
            if (std::abs(rho_from_chi(chi)) < 1e-3) continue;
            const double p = p_from_chi(chi), r = rho_from_chi(chi);
            const double det = inverse_jacobian_det({p, p, p}, {r, r, r});
            REQUIRE_THAT(manipulability(chi), WithinAbs(std::abs(det), 1e-10));
        }
    }
}

TEST_CASE("manipulability interval solver") {
    SECTION("the cubic factors cleanly at delta = 0.5") {
        const auto range = chi_range_for_manipulability(0.5);
        REQUIRE_THAT(range.chi2, WithinAbs(0.5, 1e-12));
        REQUIRE_THAT(range.chi1, WithinAbs((1.0 - std::sqrt(3.0)) / 2.0, 1e-12));
    }
    SECTION("roots collapse to zero as the floor tightens") {
        const auto range = chi_range_for_manipulability(1.0 - 1e-12);
        REQUIRE_THAT(range.chi1, WithinAbs(0.0, 1e-5));
        REQUIRE_THAT(range.chi2, WithinAbs(0.0, 1e-5));
    }
    SECTION("agrees with a bisection oracle across the floor range") {
        for (double delta : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
            const auto range = chi_range_for_manipulability(delta);
            REQUIRE(range.chi1 > -0.5);
            REQUIRE(range.chi1 < 0.0);
            REQUIRE(range.chi2 > 0.0);
            REQUIRE(range.chi2 < 1.0);
            REQUIRE_THAT(manipulability(range.chi1), WithinAbs(delta, 1e-10));
            REQUIRE_THAT(manipulability(range.chi2), WithinAbs(delta, 1e-10));
            const double lo = oracles::bisect(
                [delta](double c) { return manipulability(c) - delta; }, -0.5 + 1e-9, 0.0);
            const double hi = oracles::bisect(
                [delta](double c) { return delta - manipulability(c); }, 0.0, 1.0 - 1e-9);
            REQUIRE_THAT(range.chi1, WithinAbs(lo, 1e-10));
            REQUIRE_THAT(range.chi2, WithinAbs(hi, 1e-10));
        }
    }
    REQUIRE_THROWS_AS(chi_range_for_manipulability(0.0), KinematicError);
    REQUIRE_THROWS_AS(chi_range_for_manipulability(1.5), KinematicError);
}

TEST_CASE("condition number and its interval solver") {
    REQUIRE_THAT(condition_number(0.0), WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(condition_number(0.5), WithinAbs(4.0, 1e-12));
    REQUIRE_THAT(condition_number(-0.25), WithinAbs(2.5, 1e-12));
    REQUIRE_THROWS_AS(condition_number(-0.5), KinematicError);
    REQUIRE_THROWS_AS(condition_number(1.0), KinematicError);

    const auto range = chi_range_for_condition(4.0);
    REQUIRE_THAT(range.chi1, WithinAbs(-1.0 / 3.0, 1e-14));
    REQUIRE_THAT(range.chi2, WithinAbs(0.5, 1e-14));
    for (double delta : {1.2, 2.0, 5.0, 25.0}) {
        const auto rg = chi_range_for_condition(delta);
        REQUIRE_THAT(condition_number(rg.chi1), WithinAbs(delta, 1e-10));
        REQUIRE_THAT(condition_number(rg.chi2), WithinAbs(delta, 1e-10));
    }
    const auto unit = chi_range_for_condition(1.0);
    REQUIRE_THAT(unit.chi1, WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(unit.chi2, WithinAbs(0.0, 1e-15));
    const auto wide = chi_range_for_condition(1e12);
    REQUIRE_THAT(wide.chi1, WithinAbs(-0.5, 1e-6));
    REQUIRE_THAT(wide.chi2, WithinAbs(1.0, 1e-6));
    REQUIRE_THROWS_AS(chi_range_for_condition(0.9), KinematicError);
}

TEST_CASE("transmission interval solver") {
    SECTION("the symmetric window [0.5, 2] reproduces the reference joint range") {
        const auto range = chi_range_for_transmission(0.5, 2.0);
        REQUIRE_THAT(range.chi1, WithinAbs(-0.25, 1e-14));
        REQUIRE_THAT(range.chi2, WithinAbs(0.5, 1e-14));
        REQUIRE_THAT(rho_from_chi(range.chi2), WithinAbs(0.4082, 5e-5));
        REQUIRE_THAT(rho_from_chi(range.chi1), WithinAbs(1.1785, 5e-5));
    }
    SECTION("feasibility clipping comes out of the max/min structure") {
        const auto range = chi_range_for_transmission(1.0 / 3.0, 3.0);
        REQUIRE_THAT(range.chi1, WithinAbs(-1.0 / 3.0, 1e-14));
        REQUIRE_THAT(range.chi2, WithinAbs(2.0 / 3.0, 1e-14));
    }
    SECTION("degenerate window collapses to the isotropic point") {
        const auto range = chi_range_for_transmission(1.0 - 1e-9, 1.0 + 1e-9);
        REQUIRE_THAT(range.chi1, WithinAbs(0.0, 1e-9));
        REQUIRE_THAT(range.chi2, WithinAbs(0.0, 1e-9));
    }
    SECTION("both eigenvalue families stay inside the window, tight at the ends") {
        for (auto [lmin, lmax] : {std::pair{0.5, 2.0}, {0.8, 1.3}, {0.3, 5.0}}) {
            const auto range = chi_range_for_transmission(lmin, lmax);
            double seen_lo = 1.0, seen_hi = 1.0;
            for (int i = 0; i <= 400; ++i) {
                const double chi = range.chi1 + (range.chi2 - range.chi1) * i / 400.0;
                for (double ev : {1.0 + 2.0 * chi, 1.0 - chi}) {
                    REQUIRE(ev >= lmin - 1e-12);
                    REQUIRE(ev <= lmax + 1e-12);
                    seen_lo = std::min(seen_lo, ev);
                    seen_hi = std::max(seen_hi, ev);
                }
            }
            const bool lo_tight = seen_lo <= lmin + 1e-9;
            const bool hi_tight = seen_hi >= lmax - 1e-9;
            REQUIRE((lo_tight || hi_tight));
        }
    }
    REQUIRE_THROWS_AS(chi_range_for_transmission(1.1, 2.0), KinematicError);
    REQUIRE_THROWS_AS(chi_range_for_transmission(0.5, 0.9), KinematicError);
}

TEST_CASE("all three interval solvers agree at the isotropic posture") {
    REQUIRE_THAT(manipulability(0.0), WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(condition_number(0.0), WithinAbs(1.0, 1e-15));
    const auto ev = qaxis_eigenvalues(0.0);
    REQUIRE_THAT(ev[0], WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(ev[1], WithinAbs(1.0, 1e-15));

    for (const DexterityBound& bound :
         {DexterityBound{ManipulabilityFloor{0.8}}, DexterityBound{ConditionCeiling{3.0}},
          DexterityBound{TransmissionInterval{0.6, 1.7}}, DexterityBound{SymmetricFactor{0.7}}}) {
        const auto range = chi_range_for(bound);
        REQUIRE(range.chi1 < 0.0);
        REQUIRE(range.chi2 > 0.0);
    }
}

TEST_CASE("dexterity bound validation") {
    REQUIRE_THROWS_AS(validate(DexterityBound{SymmetricFactor{1.5}}), KinematicError);
    REQUIRE_THROWS_AS(validate(DexterityBound{ManipulabilityFloor{-0.1}}), KinematicError);
    REQUIRE_THROWS_AS(validate(DexterityBound{ConditionCeiling{1.0}}), KinematicError);
    REQUIRE_THROWS_AS(validate(DexterityBound{TransmissionInterval{1.2, 2.0}}), KinematicError);
    REQUIRE_NOTHROW(validate(DexterityBound{SymmetricFactor{0.5}}));
}

TEST_CASE("Q-axis landmark table") {
    const auto rows = table1_landmarks();
    REQUIRE(rows.size() == 5);

    REQUIRE(rows[1].name == "O");
    REQUIRE_THAT(rows[1].p, WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(rows[1].rho, WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(rows[1].chi, WithinAbs(0.0, 1e-15));
    REQUIRE(rows[1].det_finite);
    REQUIRE_THAT(rows[1].det, WithinAbs(1.0, 1e-15));

    REQUIRE(rows[2].name == "P2");
    REQUIRE_THAT(rows[2].p, WithinAbs(std::sqrt(1.0 / 6.0), 1e-12));
    REQUIRE_THAT(rows[2].rho, WithinAbs(std::sqrt(1.5), 1e-12));
    REQUIRE_THAT(rows[2].chi, WithinAbs(-0.5, 1e-12));
    REQUIRE_FALSE(rows[2].det_finite);

    REQUIRE(rows[4].name == "P4");
    REQUIRE_THAT(rows[4].p, WithinAbs(std::sqrt(0.5), 1e-12));
    REQUIRE_THAT(rows[4].rho, WithinAbs(std::sqrt(0.5), 1e-12));
    REQUIRE_FALSE(rows[4].chi_finite);
    REQUIRE(rows[4].det_finite);
    REQUIRE_THAT(rows[4].det, WithinAbs(0.0, 1e-15));

    // landmarks sit on the kinematic constraint: residual check via joints
    for (const auto& lm : {rows[1], rows[2], rows[3]}) {
        const double d = lm.p - lm.rho;
        REQUIRE_THAT(d * d + 2.0 * lm.p * lm.p, WithinAbs(1.0, 1e-12));
    }
}
