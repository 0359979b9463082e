#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "rstab/coprime.hpp"
#include "rstab/errors.hpp"
#include "rstab/json_io.hpp"
#include "rstab/robust.hpp"
#include "rstab/simulate.hpp"
#include "rstab/sls.hpp"
#include "rstab/youla_iop.hpp"

namespace {

using rstab::Json;

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty())
        std::cout << text;
    else
        rstab::write_text_file(out_path, text);
}

void emit_json(const std::string& out_path, const Json& j) { emit(out_path, j.dump(2) + "\n"); }

Json poles_json(const rstab::TransferMatrix& S) {
    std::vector<rstab::Complex> poles;
    for (int i = 0; i < S.rows(); ++i)
        for (int j = 0; j < S.cols(); ++j)
            for (const rstab::Complex& p : S.at(i, j).poles()) poles.push_back(p);
    std::sort(poles.begin(), poles.end(), [](const rstab::Complex& a, const rstab::Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    std::vector<rstab::Complex> unique;
    for (const rstab::Complex& p : poles)
        if (unique.empty() || std::abs(p - unique.back()) > 1e-9) unique.push_back(p);
    Json out = Json::array();
    for (const rstab::Complex& p : unique) out.push_back(Json::array({p.real(), p.imag()}));
    return out;
}

Json robust_report_json(const rstab::RobustReport& r) {
    Json j{{"well_posed", r.well_posed}, {"stable", r.stable}};
    Json entries = Json::array();
    for (const auto& [i, k] : r.witness_entries) entries.push_back(Json::array({i, k}));
    j["witness_entries"] = std::move(entries);
    Json poles = Json::array();
    for (const rstab::Complex& p : r.witness_poles) poles.push_back(Json::array({p.real(), p.imag()}));
    j["witness_poles"] = std::move(poles);
    if (!r.well_posed) j["failure"] = "perturbation destroys well-posedness";
    return j;
}

int run_synth(const std::string& plant_path, const std::string& method, int horizon,
              const std::string& q_path, const std::string& out_path) {
    const rstab::StateSpacePlant plant = rstab::plant_from_json(rstab::load_json_file(plant_path));
    Json result;
    result["method"] = method;
    if (method == "sls-sf") {
        const rstab::SlsStateFeedback phi = rstab::sls_sf_synthesize(plant.A, plant.B, horizon);
        const rstab::TransferMatrix K = rstab::sls_sf_controller(phi);
        result["horizon"] = horizon;
        result["controller"] = rstab::tm_to_json(K);
        result["phi_x"] = rstab::tm_to_json(phi.phi_x);
        result["phi_u"] = rstab::tm_to_json(phi.phi_u);
        result["residuals"] = Json{{"affine", phi.affine_residual(plant.A, plant.B)}};
        result["metadata"] =
            Json{{"objective", "fir-h2"}, {"strictly_proper_stable", phi.memberships_ok()}};
    } else if (method == "youla" || method == "iop") {
        const rstab::CoprimeFactors cf = rstab::dcf(plant);
        rstab::TransferMatrix Q = q_path.empty()
                                      ? rstab::TransferMatrix::zero(plant.m(), plant.p())
                                      : rstab::tm_from_json(rstab::load_json_file(q_path));
        const rstab::TransferMatrix K = rstab::youla_controller(cf, Q);
        result["controller"] = rstab::tm_to_json(K);
        result["residuals"] = Json{{"bezout", cf.bezout_residual()}};
        if (method == "youla") {
            result["factors"] = Json{
                {"Ml", rstab::tm_to_json(cf.Ml)}, {"Nl", rstab::tm_to_json(cf.Nl)},
                {"Vl", rstab::tm_to_json(cf.Vl)}, {"Ul", rstab::tm_to_json(cf.Ul)},
                {"Ur", rstab::tm_to_json(cf.Ur)}, {"Nr", rstab::tm_to_json(cf.Nr)},
                {"Vr", rstab::tm_to_json(cf.Vr)}, {"Mr", rstab::tm_to_json(cf.Mr)},
            };
        } else {
            const rstab::IopQuadruple quad = rstab::youla_iop_bridge(cf, Q);
            result["quadruple"] = Json{
                {"Y", rstab::tm_to_json(quad.Y)}, {"U", rstab::tm_to_json(quad.U)},
                {"W", rstab::tm_to_json(quad.W)}, {"Z", rstab::tm_to_json(quad.Z)},
            };
            result["residuals"]["affine"] = quad.affine_residual(cf.plant());
        }
    } else {
        throw rstab::ParseError("unknown synthesis method: " + method);
    }
    emit_json(out_path, result);
    return 0;
}

int run_check(const std::string& realization_path, const std::string& out_path) {
    const rstab::Realization r =
        rstab::realization_from_json(rstab::load_json_file(realization_path));
    const rstab::StabilityReport report = rstab::check_internal(r);
    Json j;
    j["causal"] = report.causal_ok;
    Json improper = Json::array();
    for (const auto& [a, b] : report.improper_blocks) improper.push_back(Json::array({a, b}));
    j["improper_blocks"] = std::move(improper);
    j["stable"] = report.stable_ok;
    if (!report.failure.empty()) {
        j["failure"] = "no stability matrix";
    } else {
        j["residual"] = report.residual;
        j["poles"] = poles_json(*report.S);
        if (!report.stable_ok) {
            Json witness = Json::array();
            for (const auto& [i, k] : report.unstable_entries) witness.push_back(Json::array({i, k}));
            j["witness"] = std::move(witness);
        }
    }
    emit_json(out_path, j);
    return 0;
}

int run_equiv(const std::string& r1_path, const std::string& r2_path, const std::string& t_path,
              double tolerance, const std::string& out_path) {
    const rstab::Realization r1 = rstab::realization_from_json(rstab::load_json_file(r1_path));
    const rstab::Realization r2 = rstab::realization_from_json(rstab::load_json_file(r2_path));
    const rstab::TransferMatrix T = rstab::tm_from_json(rstab::load_json_file(t_path));
    if (r1.R.rows() != r2.R.rows() || T.rows() != r1.R.rows() || T.rows() != T.cols())
        throw rstab::ParseError("equiv shapes disagree");
    const rstab::EquivalenceReport rep = rstab::equiv_check(r1, r2, T, tolerance);
    emit_json(out_path, Json{{"equivalent", rep.equivalent},
                             {"realization_residual", rep.realization_residual},
                             {"stability_residual", rep.stability_residual}});
    return 0;
}

int run_robust(const std::string& nominal_path, const std::string& delta_path,
               const std::string& margin_block, double epsilon, int grid_size,
               const std::string& out_path) {
    const rstab::Realization nominal =
        rstab::realization_from_json(rstab::load_json_file(nominal_path));
    if (!margin_block.empty()) {
        const auto comma = margin_block.find(',');
        if (comma == std::string::npos)
            throw rstab::ParseError("--margin expects 'row,col' block coordinates");
        const std::string a = margin_block.substr(0, comma);
        const std::string b = margin_block.substr(comma + 1);
        const double margin = rstab::block_margin(nominal, a, b, grid_size);
        Json j{{"block", Json::array({a, b})}, {"margin", margin}};
        if (epsilon > 0.0) j["within"] = epsilon <= margin;
        emit_json(out_path, j);
        return 0;
    }
    if (delta_path.empty())
        throw rstab::ParseError("robust needs a perturbation file or --margin");
    const rstab::Perturbation delta =
        rstab::perturbation_from_json(rstab::load_json_file(delta_path), nominal.space);
    const rstab::TransferMatrix S = rstab::stability_of(nominal);
    const rstab::RobustReport report = rstab::robust_check(S, delta);
    emit_json(out_path, robust_report_json(report));
    return 0;
}

int run_sim(const std::string& realization_path, const std::string& d_path, int steps,
            const std::string& out_path) {
    const rstab::Realization r =
        rstab::realization_from_json(rstab::load_json_file(realization_path));
    std::ifstream din(d_path);
    if (!din) throw rstab::ParseError("cannot open file: " + d_path);
    const Eigen::MatrixXd d = rstab::disturbance_from_csv(din, r.space);
    if (d.rows() < steps) throw rstab::ParseError("disturbance CSV has fewer rows than --steps");
    const rstab::SimTrace trace = rstab::compile(r).simulate(d, steps);
    emit(out_path, rstab::trace_to_csv(trace));
    return 0;
}

int run_impulse(const std::string& realization_path, int horizon, double tolerance,
                const std::string& out_path) {
    const rstab::Realization r =
        rstab::realization_from_json(rstab::load_json_file(realization_path));
    const rstab::ImpulseMatchReport report = rstab::impulse_match(r, horizon, tolerance);
    emit_json(out_path, Json{{"match", report.match},
                             {"max_deviation", report.max_deviation},
                             {"horizon", horizon},
                             {"tolerance", tolerance}});
    return 0;
}

int fail(int code, const std::string& kind, const std::string& message) {
    std::cerr << Json{{"error", Json{{"code", code}, {"kind", kind}, {"message", message}}}}.dump()
              << std::endl;
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete-time closed-loop realization and stability toolkit"};
    app.require_subcommand(1);

    std::string plant_path, method = "sls-sf", q_path, out_path;
    std::string realization_path, r2_path, t_path, d_path, delta_path, margin_block;
    int horizon = 20, steps = 50, grid_size = 512;
    double tolerance = 1e-7, epsilon = 0.0;
    int seed = 42;

    CLI::App* synth = app.add_subcommand("synth", "Synthesize a controller from a plant file");
    synth->add_option("plant", plant_path)->required();
    synth->add_option("--method", method)->check(CLI::IsMember({"sls-sf", "youla", "iop"}));
    synth->add_option("--horizon", horizon);
    synth->add_option("--q", q_path);
    synth->add_option("--out", out_path);

    CLI::App* check = app.add_subcommand("check", "Internal stability of a realization");
    check->add_option("realization", realization_path)->required();
    check->add_option("--out", out_path);

    CLI::App* equiv = app.add_subcommand("equiv", "Equivalence of two realizations under T");
    equiv->add_option("r1", realization_path)->required();
    equiv->add_option("r2", r2_path)->required();
    equiv->add_option("t", t_path)->required();
    equiv->add_option("--tol", tolerance);
    equiv->add_option("--out", out_path);

    CLI::App* robust = app.add_subcommand("robust", "Perturbed stability or small-gain margins");
    robust->add_option("nominal", realization_path)->required();
    robust->add_option("delta", delta_path);
    robust->add_option("--margin", margin_block);
    robust->add_option("--epsilon", epsilon);
    robust->add_option("--grid-size", grid_size);
    robust->add_option("--out", out_path);

    CLI::App* sim = app.add_subcommand("sim", "Time-domain simulation to a trace CSV");
    sim->add_option("realization", realization_path)->required();
    sim->add_option("d", d_path)->required();
    sim->add_option("--steps", steps);
    sim->add_option("--out", out_path);

    CLI::App* impulse = app.add_subcommand("impulse", "Impulse response match report");
    impulse->add_option("realization", realization_path)->required();
    impulse->add_option("--horizon", horizon);
    impulse->add_option("--tol", tolerance);
    impulse->add_option("--out", out_path);

    app.add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::ostringstream silence;
        app.exit(e, silence, silence);
        return fail(2, "parse", e.what());
    }

    try {
        if (synth->parsed()) return run_synth(plant_path, method, horizon, q_path, out_path);
        if (check->parsed()) return run_check(realization_path, out_path);
        if (equiv->parsed()) return run_equiv(realization_path, r2_path, t_path, tolerance, out_path);
        if (robust->parsed())
            return run_robust(realization_path, delta_path, margin_block, epsilon, grid_size,
                              out_path);
        if (sim->parsed()) return run_sim(realization_path, d_path, steps, out_path);
        if (impulse->parsed()) return run_impulse(realization_path, horizon, tolerance, out_path);
    } catch (const rstab::ParseError& e) {
        return fail(2, "parse", e.what());
    } catch (const rstab::IllPosedError& e) {
        return fail(3, "ill-posed", e.what());
    } catch (const rstab::InfeasibleError& e) {
        return fail(4, "infeasible", e.what());
    } catch (const rstab::SingularError& e) {
        return fail(5, "singular", e.what());
    } catch (const std::exception& e) {
        return fail(1, "internal", e.what());
    }
    return 0;
}
