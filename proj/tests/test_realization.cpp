#include <doctest.h>

#include <cmath>

#include "rstab/errors.hpp"
#include "rstab/realization.hpp"
#include "rstab/state_space.hpp"
#include "test_support.hpp"

using namespace rstab;

namespace {

RationalFunction lag(double pole_at) {
    return RationalFunction(Polynomial::one(), Polynomial({-pole_at, 1.0}));
}

Realization scalar_loop(double pole_at, double gain) {
    return plant_controller_realization(TransferMatrix::scalar(lag(pole_at)),
                                        TransferMatrix::scalar(RationalFunction::constant(gain)));
}

}  // namespace

TEST_CASE("stability of the empty loop is the identity") {
    Realization r(SignalSpace({{"x", 2}, {"u", 1}}), TransferMatrix::zero(3, 3));
    double residual = 1.0;
    const TransferMatrix S = stability_of(r, &residual);
    CHECK(probe_distance(S, TransferMatrix::identity(3)) == 0.0);
    CHECK(residual < 1e-12);
}

TEST_CASE("scalar plant/controller loop matches the adjugate oracle") {
    const Realization r = scalar_loop(0.5, 0.3);
    double residual = 1.0;
    const TransferMatrix S = stability_of(r, &residual);
    CHECK(residual < 1e-8);

    const TransferMatrix ImR = TransferMatrix::identity(2) - r.R;
    const TransferMatrix oracle = testsup::adjugate_inverse_2x2(ImR);
    CHECK(probe_distance(S, oracle) < 1e-10);

    // Explicit form (1/(1-GK)) [[1, G],[K, 1]].
    const RationalFunction G = lag(0.5);
    const RationalFunction w = (RationalFunction::one() - G * 0.3).inverse();
    CHECK(testsup::circle_distance(S.at(0, 0), w, 2.0) < 1e-10);
    CHECK(testsup::circle_distance(S.at(0, 1), w * G, 2.0) < 1e-10);
    CHECK(testsup::circle_distance(S.at(1, 0), w * 0.3, 2.0) < 1e-10);
    CHECK(testsup::circle_distance(S.at(1, 1), w, 2.0) < 1e-10);
}

TEST_CASE("deadbeat state feedback has S_xx = 1/z") {
    Eigen::MatrixXd A(1, 1), B(1, 1);
    A << 0.5;
    B << 1.0;
    const Realization r = state_feedback_realization(
        A, B, TransferMatrix::constant(Eigen::MatrixXd::Constant(1, 1, -0.5)));
    const TransferMatrix S = stability_of(r);
    // (z - A - BK)^{-1} z / z = 1/z by hand; confirmed through the impulse.
    const auto h = S.at(0, 0).impulse(4);
    CHECK(h[0] == doctest::Approx(0.0));
    CHECK(h[1] == doctest::Approx(1.0));
    CHECK(h[2] == doctest::Approx(0.0));
    CHECK(h[3] == doctest::Approx(0.0));
    CHECK(S.at(0, 0).den() == Polynomial::z());
}

TEST_CASE("Lemma 1 double identity on random stable loops") {
    auto rng = testsup::make_rng(131);
    for (int t = 0; t < 20; ++t) {
        const RationalFunction G = testsup::random_stable_rf(rng, 3, 0.8, true);
        const Realization r = plant_controller_realization(
            TransferMatrix::scalar(G), TransferMatrix::scalar(RationalFunction::constant(0.2)));
        TransferMatrix S;
        try {
            S = stability_of(r);
        } catch (const SingularError&) {
            continue;
        }
        const TransferMatrix ImR = TransferMatrix::identity(2) - r.R;
        CHECK(probe_distance(ImR * S, TransferMatrix::identity(2)) < 1e-8);
        CHECK(probe_distance(S * ImR, TransferMatrix::identity(2)) < 1e-8);
    }
}

TEST_CASE("internal stability verdicts") {
    CHECK(check_internal(scalar_loop(0.5, 0.3)).stable_ok);  // pole moves to 0.8

    const StabilityReport open_loop = check_internal(scalar_loop(2.0, 0.0));
    CHECK_FALSE(open_loop.stable_ok);
    CHECK(open_loop.causal_ok);
    CHECK(!open_loop.unstable_entries.empty());

    // A one-step diagonal block is improper as a transfer function but does
    // not fail causality: the condition covers off-diagonal blocks only.
    Eigen::MatrixXd A(1, 1), B(1, 1);
    A << 0.5;
    B << 1.0;
    const Realization sf =
        state_feedback_realization(A, B, TransferMatrix::constant(Eigen::MatrixXd::Zero(1, 1)));
    const StabilityReport rep = check_internal(sf);
    CHECK(rep.causal_ok);
    CHECK(rep.stable_ok);

    // An improper off-diagonal block does fail causality.
    TransferMatrix R(2, 2);
    R.at(0, 1) = RationalFunction(Polynomial({0.0, 1.0}), Polynomial::one());  // z
    const StabilityReport bad = check_internal(Realization(SignalSpace({{"a", 1}, {"b", 1}}), R));
    CHECK_FALSE(bad.causal_ok);
    REQUIRE(bad.improper_blocks.size() == 1);
    CHECK(bad.improper_blocks[0].first == "a");
    CHECK(bad.improper_blocks[0].second == "b");
}

TEST_CASE("singular I - R reports no stability matrix") {
    // R = I makes I - R identically zero.
    const Realization r(SignalSpace({{"x", 1}}), TransferMatrix::identity(1));
    CHECK_THROWS_WITH_AS(stability_of(r), "no stability matrix exists", SingularError);
    const StabilityReport rep = check_internal(r);
    CHECK_FALSE(rep.stable_ok);
    CHECK(rep.failure == "no stability matrix exists");
}

TEST_CASE("dependent column reproduces the u-columns of the full inverse") {
    // Plant/controller pattern: S_{:,u} = e_u + S_{:,x} K.
    const Realization loop = scalar_loop(0.5, 0.3);
    const TransferMatrix S = stability_of(loop);
    const TransferMatrix col = dependent_column(loop, {{"x", loop.columns_of(S, "x")}}, "u");
    CHECK(probe_distance(col, loop.columns_of(S, "u")) < 1e-8);

    // State feedback: [S_xu; S_uu] = [O; I] + [phi_x; phi_u] B.
    auto rng = testsup::make_rng(137);
    for (int t = 0; t < 10; ++t) {
        const Eigen::MatrixXd A = testsup::random_stable_matrix(rng, 2, 0.8);
        const Eigen::MatrixXd B = testsup::random_matrix(rng, 2, 1);
        const Eigen::MatrixXd K = testsup::random_matrix(rng, 1, 2, 0.3);
        const Realization sf = state_feedback_realization(A, B, TransferMatrix::constant(K));
        TransferMatrix S2;
        try {
            S2 = stability_of(sf);
        } catch (const SingularError&) {
            continue;
        }
        const TransferMatrix col_u = dependent_column(sf, {{"x", sf.columns_of(S2, "x")}}, "u");
        CHECK(probe_distance(col_u, sf.columns_of(S2, "u")) < 1e-8);
    }

    // Single signal with R = 0: the column is e_a.
    const Realization trivial(SignalSpace({{"a", 2}}), TransferMatrix::zero(2, 2));
    const TransferMatrix ea = dependent_column(trivial, {}, "a");
    CHECK(probe_distance(ea, TransferMatrix::identity(2)) == 0.0);

    // Lemma 2 requires a vanishing diagonal block.
    CHECK_THROWS_WITH_AS(
        dependent_column(Realization(SignalSpace({{"a", 1}}), TransferMatrix::identity(1) * 0.5),
                         {}, "a"),
        "Lemma 2 requires R_aa = O", Error);
}

TEST_CASE("transform by T = I is the identity") {
    const Realization r = scalar_loop(0.5, 0.3);
    const Realization same = transform(r, TransferMatrix::identity(2));
    CHECK(probe_distance(same.R, r.R) < 1e-12);
}

TEST_CASE("state feedback transforms into the plant/controller shape") {
    Eigen::MatrixXd A(2, 2), B(2, 1);
    A << 0.3, 0.1, -0.2, 0.4;
    B << 1.0, 0.5;
    const Eigen::MatrixXd K = (Eigen::MatrixXd(1, 2) << -0.1, 0.2).finished();
    const Realization sf = state_feedback_realization(A, B, TransferMatrix::constant(K));

    const TransferMatrix T = TransferMatrix::from_blocks({
        {z_identity_minus(A), TransferMatrix::zero(2, 1)},
        {TransferMatrix::zero(1, 2), TransferMatrix::identity(1)},
    });
    const Realization eq = transform(sf, T);

    // The result must be the plant/controller loop with G = (zI - A)^{-1} B.
    const TransferMatrix G = resolvent(A) * TransferMatrix::constant(B);
    const Realization gk = plant_controller_realization(G, TransferMatrix::constant(K));
    CHECK(probe_distance(eq.R, gk.R) < 1e-9);

    const EquivalenceReport rep = equiv_check(sf, gk, T);
    CHECK(rep.equivalent);
    CHECK(rep.realization_residual < 1e-9);
    CHECK(rep.stability_residual < 1e-9);
}

TEST_CASE("composing transforms equals transforming by the product") {
    auto rng = testsup::make_rng(139);
    const Realization r = scalar_loop(0.5, 0.3);
    for (int t = 0; t < 8; ++t) {
        TransferMatrix T1 = testsup::random_stable_tm(rng, 2, 2, 1, 0.7);
        TransferMatrix T2 = testsup::random_stable_tm(rng, 2, 2, 1, 0.7);
        for (int i = 0; i < 2; ++i) {
            T1.at(i, i) = T1.at(i, i) + RationalFunction::constant(2.0);
            T2.at(i, i) = T2.at(i, i) + RationalFunction::constant(2.0);
        }
        const Realization a = transform(transform(r, T1), T2);
        const Realization b = transform(r, T1 * T2);
        CHECK(probe_distance(a.R, b.R) < 1e-7);
    }
}

TEST_CASE("equivalence check rejects unrelated realizations") {
    const EquivalenceReport self =
        equiv_check(scalar_loop(0.5, 0.3), scalar_loop(0.5, 0.3), TransferMatrix::identity(2));
    CHECK(self.equivalent);

    const EquivalenceReport wrong =
        equiv_check(scalar_loop(0.5, 0.3), scalar_loop(0.4, 0.2), TransferMatrix::identity(2));
    CHECK_FALSE(wrong.equivalent);
    CHECK(wrong.realization_residual > 1e-3);
}

TEST_CASE("builders lay out the documented block patterns") {
    const TransferMatrix G = TransferMatrix::scalar(lag(0.5));
    const TransferMatrix K = TransferMatrix::scalar(RationalFunction::constant(0.3));
    const Realization gk = plant_controller_realization(G, K);
    CHECK(gk.block("x", "x").is_zero());
    CHECK(gk.block("u", "u").is_zero());
    CHECK(probe_distance(gk.block("x", "u"), G) == 0.0);
    CHECK(probe_distance(gk.block("u", "x"), K) == 0.0);

    Eigen::MatrixXd A(2, 2), B(2, 1), C(1, 2), D(1, 1);
    A << 0.3, 0.1, 0.0, 0.4;
    B << 1.0, 0.5;
    C << 1.0, 0.0;
    D << 0.25;
    const Realization sf = state_feedback_realization(A, B, TransferMatrix::zero(1, 2));
    // R_xx = A + (1-z) I.
    CHECK(sf.block("x", "x").at(0, 0).num().coeff(1) == doctest::Approx(-1.0));
    CHECK(sf.block("x", "x").at(0, 0).num().coeff(0) == doctest::Approx(A(0, 0) + 1.0));
    CHECK(sf.block("x", "x").at(0, 1).num().coeff(0) == doctest::Approx(A(0, 1)));
    CHECK(sf.block("x", "u").at(1, 0).num().coeff(0) == doctest::Approx(0.5));

    const Realization of = output_feedback_realization(A, B, C, D, TransferMatrix::zero(1, 1));
    CHECK(of.space.name(0) == "x");
    CHECK(of.space.name(1) == "u");
    CHECK(of.space.name(2) == "y");
    CHECK(probe_distance(of.block("y", "x"), TransferMatrix::constant(C)) == 0.0);
    CHECK(probe_distance(of.block("y", "u"), TransferMatrix::constant(D)) == 0.0);
    CHECK(of.block("x", "y").is_zero());

    const TransferMatrix P1 = TransferMatrix::scalar(lag(0.4));
    const Realization gen = generalized_realization(G, P1, P1, TransferMatrix::zero(1, 1), K);
    CHECK(gen.space.name(0) == "y");
    CHECK(gen.space.name(3) == "w");
    // The z-row reads [0, -P_zu, 0, -P_zw].
    CHECK(gen.block("z", "y").is_zero());
    CHECK(probe_distance(gen.block("z", "u"), -P1) == 0.0);
    CHECK(gen.block("z", "z").is_zero());
    CHECK(gen.block("z", "w").is_zero());
    CHECK(probe_distance(gen.block("y", "u"), -G) == 0.0);
    CHECK(probe_distance(gen.block("u", "y"), -K) == 0.0);
    // The w-row is all zero.
    CHECK(gen.block("w", "y").is_zero());
    CHECK(gen.block("w", "u").is_zero());
    CHECK(gen.block("w", "z").is_zero());
    CHECK(gen.block("w", "w").is_zero());
}

TEST_CASE("equal realizations produce equal stability matrices") {
    auto rng = testsup::make_rng(149);
    const RationalFunction G = testsup::random_stable_rf(rng, 3, 0.8, true);
    const Realization a = plant_controller_realization(
        TransferMatrix::scalar(G), TransferMatrix::scalar(RationalFunction::constant(0.25)));
    const Realization b = plant_controller_realization(
        TransferMatrix::scalar(G), TransferMatrix::scalar(RationalFunction::constant(0.25)));
    CHECK(probe_distance(stability_of(a), stability_of(b)) == 0.0);
}
