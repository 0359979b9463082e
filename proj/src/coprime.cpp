#include "rstab/coprime.hpp"

#include "rstab/errors.hpp"

namespace rstab {

TransferMatrix CoprimeFactors::left_factor() const {
    return TransferMatrix::from_blocks({{Ml, -Nl}, {-Vl, Ul}});
}

TransferMatrix CoprimeFactors::right_factor() const {
    return TransferMatrix::from_blocks({{Ur, Nr}, {Vr, Mr}});
}

double CoprimeFactors::bezout_residual() const {
    return identity_residual(left_factor() * right_factor());
}

TransferMatrix CoprimeFactors::plant() const { return Ml.inverse() * Nl; }

CoprimeFactors dcf(const StateSpacePlant& plant) {
    const int n = plant.n();
    const Eigen::MatrixXd eye_n = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd eye_m = Eigen::MatrixXd::Identity(plant.m(), plant.m());
    const Eigen::MatrixXd eye_p = Eigen::MatrixXd::Identity(plant.p(), plant.p());
    const Eigen::MatrixXd F = riccati_gain(plant.A, plant.B, eye_n, eye_m);
    const Eigen::MatrixXd L =
        riccati_gain(plant.A.transpose(), plant.C.transpose(), eye_n, eye_p).transpose();
    return dcf(plant, F, L);
}

CoprimeFactors dcf(const StateSpacePlant& plant, const Eigen::MatrixXd& F,
                   const Eigen::MatrixXd& L) {
    const Eigen::MatrixXd AF = plant.A + plant.B * F;
    const Eigen::MatrixXd AL = plant.A + L * plant.C;
    if (spectral_radius(AF) >= 1.0) throw Error("dcf: A + BF is not Schur stable");
    if (spectral_radius(AL) >= 1.0) throw Error("dcf: A + LC is not Schur stable");

    const TransferMatrix resF = resolvent(AF);
    const TransferMatrix resL = resolvent(AL);
    const TransferMatrix Bc = TransferMatrix::constant(plant.B);
    const TransferMatrix Cc = TransferMatrix::constant(plant.C);
    const TransferMatrix Dc = TransferMatrix::constant(plant.D);
    const TransferMatrix Fc = TransferMatrix::constant(F);
    const TransferMatrix Lc = TransferMatrix::constant(L);
    const TransferMatrix CDF = TransferMatrix::constant(plant.C + plant.D * F);
    const TransferMatrix BLD = TransferMatrix::constant(plant.B + L * plant.D);
    const TransferMatrix Im = TransferMatrix::identity(plant.m());
    const TransferMatrix Ip = TransferMatrix::identity(plant.p());

    CoprimeFactors cf{
        .Ml = Ip + Cc * resL * Lc,
        .Nl = Dc + Cc * resL * BLD,
        .Vl = -(Fc * resL * Lc),
        .Ul = Im - Fc * resL * BLD,
        .Ur = Ip - CDF * resF * Lc,
        .Nr = Dc + CDF * resF * Bc,
        .Vr = -(Fc * resF * Lc),
        .Mr = Im + Fc * resF * Bc,
    };
    return cf;
}

}  // namespace rstab
