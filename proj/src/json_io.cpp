#include "rstab/json_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rstab/errors.hpp"

namespace rstab {

namespace {

std::vector<double> coeffs_from_json(const Json& j) {
    if (!j.is_array()) throw ParseError("coefficient list must be an array");
    std::vector<double> v;
    v.reserve(j.size());
    for (const Json& c : j) {
        if (!c.is_number()) throw ParseError("coefficient must be a number");
        v.push_back(c.get<double>());
    }
    return v;
}

Json coeffs_to_json(const Polynomial& p) {
    if (p.is_zero()) return Json::array({0.0});
    return Json(p.coeffs());
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "0";
    return std::string(buf, ptr);
}

}  // namespace

Json rational_to_json(const RationalFunction& r) {
    return Json{{"num", coeffs_to_json(r.num())}, {"den", coeffs_to_json(r.den())}};
}

RationalFunction rational_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("num") || !j.contains("den"))
        throw ParseError("rational function must carry num and den arrays");
    return RationalFunction(Polynomial(coeffs_from_json(j["num"])),
                            Polynomial(coeffs_from_json(j["den"])));
}

Json tm_to_json(const TransferMatrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(rational_to_json(m.at(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

TransferMatrix tm_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("transfer matrix must be a non-empty 2D array");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    TransferMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (!j[static_cast<size_t>(i)].is_array() ||
            static_cast<int>(j[static_cast<size_t>(i)].size()) != cols)
            throw ParseError("transfer matrix rows must have equal length");
        for (int c = 0; c < cols; ++c)
            m.at(i, c) = rational_from_json(j[static_cast<size_t>(i)][static_cast<size_t>(c)]);
    }
    return m;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
    if (!j.is_array()) throw ParseError("matrix must be a 2D array");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return Eigen::MatrixXd(0, 0);
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Json& row = j[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ParseError("matrix rows must have equal length");
        for (Eigen::Index c = 0; c < cols; ++c) {
            const Json& cell = row[static_cast<size_t>(c)];
            if (!cell.is_number()) throw ParseError("matrix entries must be numbers");
            m(i, c) = cell.get<double>();
        }
    }
    return m;
}

Json realization_to_json(const Realization& r) {
    Json signals = Json::array();
    for (const auto& [name, dim] : r.space.signals())
        signals.push_back(Json{{"name", name}, {"dim", dim}});
    return Json{{"signals", std::move(signals)}, {"entries", tm_to_json(r.R)}};
}

Realization realization_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("signals") || !j.contains("entries"))
        throw ParseError("realization must carry signals and entries");
    std::vector<std::pair<std::string, int>> signals;
    for (const Json& s : j["signals"]) {
        if (!s.contains("name") || !s.contains("dim"))
            throw ParseError("signal must carry name and dim");
        signals.emplace_back(s["name"].get<std::string>(), s["dim"].get<int>());
    }
    SignalSpace space(std::move(signals));
    TransferMatrix R = tm_from_json(j["entries"]);
    if (R.rows() != space.total_dim() || R.cols() != space.total_dim())
        throw ParseError("realization entries must be square of the total signal dimension");
    return Realization(std::move(space), std::move(R));
}

Json plant_to_json(const StateSpacePlant& p) {
    return Json{{"A", matrix_to_json(p.A)},
                {"B", matrix_to_json(p.B)},
                {"C", matrix_to_json(p.C)},
                {"D", matrix_to_json(p.D)}};
}

StateSpacePlant plant_from_json(const Json& j) {
    for (const char* key : {"A", "B", "C", "D"})
        if (!j.contains(key)) throw ParseError(std::string("plant missing matrix ") + key);
    try {
        return StateSpacePlant(matrix_from_json(j["A"]), matrix_from_json(j["B"]),
                               matrix_from_json(j["C"]), matrix_from_json(j["D"]));
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
}

Json perturbation_to_json(const Perturbation& p) {
    Json blocks = Json::array();
    for (const auto& [key, blk] : p.blocks()) {
        blocks.push_back(Json{{"block", Json::array({key.first, key.second})},
                              {"entries", tm_to_json(blk)}});
    }
    return Json{{"blocks", std::move(blocks)}};
}

Perturbation perturbation_from_json(const Json& j, const SignalSpace& space) {
    if (!j.is_object() || !j.contains("blocks"))
        throw ParseError("perturbation must carry a blocks array");
    std::map<Perturbation::BlockKey, TransferMatrix> blocks;
    for (const Json& b : j["blocks"]) {
        if (!b.contains("block") || !b.contains("entries") || b["block"].size() != 2)
            throw ParseError("perturbation block must carry [row, col] and entries");
        Perturbation::BlockKey key{b["block"][0].get<std::string>(),
                                   b["block"][1].get<std::string>()};
        blocks.emplace(std::move(key), tm_from_json(b["entries"]));
    }
    try {
        return Perturbation(space, std::move(blocks));
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
}

std::string trace_to_csv(const SimTrace& trace) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [name, dim] : trace.space.signals()) {
        for (int k = 0; k < dim; ++k) {
            if (!first) out << ",";
            out << name << "[" << k << "]";
            first = false;
        }
    }
    out << "\n";
    for (int t = 0; t < trace.steps; ++t) {
        for (int c = 0; c < trace.values.cols(); ++c) {
            if (c) out << ",";
            out << format_double(trace.values(t, c));
        }
        out << "\n";
    }
    return out.str();
}

Eigen::MatrixXd disturbance_from_csv(std::istream& in, const SignalSpace& space) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("disturbance CSV is empty");
    std::string expected;
    bool first = true;
    for (const auto& [name, dim] : space.signals()) {
        for (int k = 0; k < dim; ++k) {
            if (!first) expected += ",";
            expected += name + "[" + std::to_string(k) + "]";
            first = false;
        }
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected)
        throw ParseError("disturbance CSV header must be '" + expected + "'");

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ParseError("disturbance CSV cell is not a number: '" + cell + "'");
            }
        }
        if (static_cast<int>(row.size()) != space.total_dim())
            throw ParseError("disturbance CSV row width mismatch");
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd d(static_cast<Eigen::Index>(rows.size()), space.total_dim());
    for (size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < space.total_dim(); ++j)
            d(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<size_t>(j)];
    return d;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("JSON parse failure in ") + path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << text;
}

}  // namespace rstab
