#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "rstab/realization.hpp"
#include "rstab/robust.hpp"
#include "rstab/simulate.hpp"
#include "rstab/state_space.hpp"

namespace rstab {

using Json = nlohmann::json;

// Rational functions travel as {"num": [c0, ...], "den": [c0, ...]},
// ascending powers of z.
Json rational_to_json(const RationalFunction& r);
RationalFunction rational_from_json(const Json& j);

// Transfer matrices are 2D arrays of rational objects.
Json tm_to_json(const TransferMatrix& m);
TransferMatrix tm_from_json(const Json& j);

Json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j);

// {"signals": [{"name": ..., "dim": ...}, ...], "entries": [[rf, ...], ...]}
Json realization_to_json(const Realization& r);
Realization realization_from_json(const Json& j);

// {"A": [[...]], "B": [[...]], "C": [[...]], "D": [[...]]}
Json plant_to_json(const StateSpacePlant& p);
StateSpacePlant plant_from_json(const Json& j);

// {"blocks": [{"block": ["x", "u"], "entries": [[rf, ...], ...]}, ...]}
Json perturbation_to_json(const Perturbation& p);
Perturbation perturbation_from_json(const Json& j, const SignalSpace& space);

// Trace CSV: header signal[index] per column, one row per step. The
// disturbance reader requires the header to match the space exactly.
std::string trace_to_csv(const SimTrace& trace);
Eigen::MatrixXd disturbance_from_csv(std::istream& in, const SignalSpace& space);

Json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace rstab
