#include <doctest.h>

#include "rstab/errors.hpp"
#include "rstab/sls.hpp"
#include "rstab/youla_iop.hpp"
#include "test_support.hpp"

using namespace rstab;

namespace {

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

StateSpacePlant scalar_plant(double a, double b = 1.0, double c = 1.0, double d = 0.0) {
    return StateSpacePlant(scalar(a), scalar(b), scalar(c), scalar(d));
}

}  // namespace

TEST_CASE("deadbeat plant needs no control") {
    const SlsStateFeedback p = sls_sf_synthesize(scalar(0.0), scalar(1.0), 1);
    CHECK(probe_distance(p.phi_x, TransferMatrix::scalar(RationalFunction::delay(1))) < 1e-12);
    CHECK(p.phi_u.is_zero());
    CHECK(sls_sf_controller(p).is_zero());
}

TEST_CASE("integrator deadbeat at horizon one") {
    const SlsStateFeedback p = sls_sf_synthesize(scalar(1.0), scalar(1.0), 1);
    // The only feasible point: phi_x = 1/z, phi_u = -1/z, K = -1 exactly.
    CHECK(probe_distance(p.phi_x, TransferMatrix::scalar(RationalFunction::delay(1))) < 1e-12);
    CHECK(probe_distance(p.phi_u, TransferMatrix::scalar(RationalFunction::delay(1) * -1.0)) <
          1e-12);
    const TransferMatrix K = sls_sf_controller(p);
    CHECK(K.at(0, 0).num().degree() == 0);
    CHECK(K.at(0, 0).den().degree() == 0);
    CHECK(K.at(0, 0).num().coeff(0) == doctest::Approx(-1.0));
}

TEST_CASE("longer horizons keep the affine identity and memberships") {
    const SlsStateFeedback p = sls_sf_synthesize(scalar(0.5), scalar(1.0), 10);
    CHECK(p.affine_residual(scalar(0.5), scalar(1.0)) < 1e-10);
    CHECK(p.memberships_ok());
    CHECK(p.horizon == 10);
}

TEST_CASE("FIR taps follow the one-step recursion") {
    auto rng = testsup::make_rng(193);
    for (int t = 0; t < 10; ++t) {
        const int n = std::uniform_int_distribution<int>(1, 3)(rng);
        const Eigen::MatrixXd A = testsup::random_matrix(rng, n, n);
        const Eigen::MatrixXd B = testsup::random_matrix(rng, n, 1);
        const int T = 2 * n;
        SlsStateFeedback p;
        try {
            p = sls_sf_synthesize(A, B, T);
        } catch (const InfeasibleError&) {
            continue;
        }
        const auto hx = p.phi_x.impulse(T + 1);
        const auto hu = p.phi_u.impulse(T + 1);
        CHECK((hx.coefficients[1] - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <
              1e-12);
        for (int tau = 1; tau <= T; ++tau) {
            const Eigen::MatrixXd next = A * hx.coefficients[static_cast<size_t>(tau)] +
                                         B * hu.coefficients[static_cast<size_t>(tau)];
            const Eigen::MatrixXd actual = (tau + 1 <= T + 1)
                                               ? hx.coefficients[static_cast<size_t>(tau + 1)]
                                               : Eigen::MatrixXd::Zero(n, n);
            CHECK((next - actual).cwiseAbs().maxCoeff() < 1e-9);
        }
        // Structural identity phi_u = K phi_x.
        const TransferMatrix K = sls_sf_controller(p);
        CHECK(probe_distance(K * p.phi_x, p.phi_u) < 1e-8);
        // Closed-loop reproduction through the realization.
        const Realization loop = state_feedback_realization(A, B, K);
        const TransferMatrix S = stability_of(loop);
        CHECK(probe_distance(S.block(0, 0, n, n), p.phi_x) < 1e-7);
        CHECK(probe_distance(S.block(n, 0, 1, n), p.phi_u) < 1e-7);
    }
}

TEST_CASE("unreachable terminal condition is infeasible") {
    // Two integrators driven by one input cannot deadbeat in one step.
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd B(2, 1);
    B << 1.0, 0.0;
    CHECK_THROWS_AS(sls_sf_synthesize(A, B, 1), InfeasibleError);
}

TEST_CASE("output feedback blocks satisfy both affine identities") {
    const StateSpacePlant plant = scalar_plant(0.5);
    const TransferMatrix K = TransferMatrix::scalar(RationalFunction::constant(0.2));
    const SlsOutputFeedback p = sls_of_from_controller(plant, K);
    CHECK(p.affine_residual_1(plant.A, plant.B) < 1e-8);
    CHECK(p.affine_residual_2(plant.A, plant.C) < 1e-8);
    CHECK(p.memberships_ok());

    // Full-inverse oracle: the blocks are read straight from S.
    const Realization loop = output_feedback_realization(plant.A, plant.B, plant.C, plant.D, K);
    const TransferMatrix S = stability_of(loop);
    CHECK(probe_distance(p.phi_xx, S.block(0, 0, 1, 1)) == 0.0);
    CHECK(probe_distance(p.phi_uy, S.block(1, 2, 1, 1)) == 0.0);

    // D = 0 reduces the controller map to K0.
    const TransferMatrix back = sls_of_controller(p, Eigen::MatrixXd::Zero(1, 1));
    CHECK(probe_distance(back, K) < 1e-8);
}

TEST_CASE("output feedback with feedthrough round-trips the controller") {
    auto rng = testsup::make_rng(197);
    for (int t = 0; t < 10; ++t) {
        const StateSpacePlant plant = scalar_plant(0.5, 1.0, 1.0, 0.5);
        const double k = testsup::uniform(rng, -0.3, 0.3);
        const TransferMatrix K = TransferMatrix::scalar(RationalFunction::constant(k));
        if (!check_internal(
                 output_feedback_realization(plant.A, plant.B, plant.C, plant.D, K))
                 .stable_ok)
            continue;
        const SlsOutputFeedback p = sls_of_from_controller(plant, K);
        const TransferMatrix back = sls_of_controller(p, plant.D);
        CHECK(probe_distance(back, K) < 1e-7);
    }
}

TEST_CASE("mixed parameterizations verify and recover the controller") {
    const StateSpacePlant plant = scalar_plant(0.5);
    const TransferMatrix K = TransferMatrix::scalar(RationalFunction::constant(0.2));

    const MixedExtraction m6 = mixed_extract(plant, K, MixedFlavor::kCor6);
    CHECK(m6.residual_1 < 1e-8);
    CHECK(m6.residual_2 < 1e-8);
    CHECK(m6.recovery_residual < 1e-8);

    const MixedExtraction m7 = mixed_extract(plant, K, MixedFlavor::kCor7);
    CHECK(m7.residual_1 < 1e-8);
    CHECK(m7.residual_2 < 1e-8);
    CHECK(m7.recovery_residual < 1e-8);

    // Both flavors recover the same controller.
    CHECK(probe_distance(m6.recovered_K, m7.recovered_K) < 1e-8);

    // Open loop: phi_uy = 0 and the recovery yields zero.
    const MixedExtraction open6 = mixed_extract(plant, TransferMatrix::zero(1, 1), MixedFlavor::kCor6);
    CHECK(open6.bottom_right.is_zero());
    CHECK(open6.recovered_K.is_zero());
}

TEST_CASE("mixed identities hold with feedthrough on random instances") {
    auto rng = testsup::make_rng(199);
    for (int t = 0; t < 8; ++t) {
        const StateSpacePlant plant = scalar_plant(testsup::uniform(rng, -0.6, 0.6), 1.0, 1.0,
                                                   testsup::uniform(rng, -0.4, 0.4));
        const double k = testsup::uniform(rng, -0.25, 0.25);
        const TransferMatrix K = TransferMatrix::scalar(RationalFunction::constant(k));
        if (!check_internal(
                 output_feedback_realization(plant.A, plant.B, plant.C, plant.D, K))
                 .stable_ok)
            continue;
        for (MixedFlavor flavor : {MixedFlavor::kCor6, MixedFlavor::kCor7}) {
            const MixedExtraction m = mixed_extract(plant, K, flavor);
            CHECK(m.residual_1 < 1e-8);
            CHECK(m.residual_2 < 1e-8);
            CHECK(m.recovery_residual < 1e-7);
        }
    }
}

TEST_CASE("generalized extraction on the scalar instance") {
    const TransferMatrix G =
        TransferMatrix::scalar(RationalFunction(Polynomial::one(), Polynomial({-0.5, 1.0})));
    const TransferMatrix one = TransferMatrix::identity(1);
    const TransferMatrix K = TransferMatrix::scalar(RationalFunction::constant(0.3));
    // G = 1/(z-0.5), P_zu = 1, P_yw = 1, P_zw = 0; the loop u = -K y must be
    // stable: pole of (1 + GK)^{-1} sits at 0.5 - 0.3 = 0.2.
    const Realization gen =
        generalized_realization(G, one, one, TransferMatrix::zero(1, 1), K);
    const GslsExtraction g = gsls_extract(gen);
    CHECK(g.residual_1 < 1e-8);
    CHECK(g.residual_2 < 1e-8);
    CHECK(g.recovery_residual < 1e-8);

    // The z-column of S is exactly e_z and the w-row exactly e_w.
    CHECK(g.structure_residual == 0.0);

    // K = 0 zeroes the uy block of Psi.
    const GslsExtraction g0 = gsls_extract(
        generalized_realization(G, one, one, TransferMatrix::zero(1, 1), TransferMatrix::zero(1, 1)));
    CHECK(g0.psi.block(1, 0, 1, 1).is_zero());
}
