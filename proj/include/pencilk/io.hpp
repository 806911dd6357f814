#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pencilk/dae.hpp"
#include "pencilk/errors.hpp"
#include "pencilk/numeric.hpp"

namespace pencilk {
namespace io {

// %.{precision}g with the negative zero snapped away, so formatted output is
// a pure function of the value.
inline std::string format_real(double v, int precision) {
    if (v == 0.0) v = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

// JSON entry: a plain number when the imaginary part is exactly zero,
// otherwise a [re, im] pair.
inline std::string format_entry_json(const Complex& v, int precision) {
    if (v.imag() == 0.0) return format_real(v.real(), precision);
    return "[" + format_real(v.real(), precision) + ", " +
           format_real(v.imag(), precision) + "]";
}

// CSV cell: drops an imaginary part below the floor (rounding dirt on a
// real-valued object), otherwise renders re+imi / re-imi.
inline std::string format_entry_csv(const Complex& v, int precision, double floor) {
    if (std::abs(v.imag()) <= floor) return format_real(v.real(), precision);
    const double im = v.imag();
    return format_real(v.real(), precision) + (im < 0.0 ? "-" : "+") +
           format_real(std::abs(im), precision) + "i";
}

// Imaginary-part floor for CSV rendering of one object: dirt-scale relative
// to its largest entry.
inline double imag_drop_floor(const Matrix& m) {
    const double scale = (m.size() == 0) ? 0.0 : m.cwiseAbs().maxCoeff();
    return 1e-12 * scale;
}

inline Matrix parse_matrix_json(const std::string& text, const std::string& origin) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(origin + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("rows") || !doc.contains("cols") ||
        !doc.contains("data"))
        throw ParseError(origin + ": expected an object with rows, cols, data");
    if (!doc["rows"].is_number_integer() || !doc["cols"].is_number_integer())
        throw ParseError(origin + ": rows and cols must be integers");
    const auto rows = doc["rows"].get<Eigen::Index>();
    const auto cols = doc["cols"].get<Eigen::Index>();
    if (rows < 0 || cols < 0) throw ParseError(origin + ": negative dimensions");
    const nlohmann::json& data = doc["data"];
    if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows)
        throw ParseError(origin + ": data must be an array of " + std::to_string(rows) +
                         " rows");
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const nlohmann::json& row = data[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ParseError(origin + ": row " + std::to_string(i) + " must have " +
                             std::to_string(cols) + " entries");
        for (Eigen::Index j = 0; j < cols; ++j) {
            const nlohmann::json& cell = row[static_cast<std::size_t>(j)];
            const std::string at =
                " at (" + std::to_string(i) + "," + std::to_string(j) + ")";
            if (cell.is_number()) {
                m(i, j) = Complex(cell.get<double>(), 0.0);
            } else if (cell.is_array() && cell.size() == 2 && cell[0].is_number() &&
                       cell[1].is_number()) {
                m(i, j) = Complex(cell[0].get<double>(), cell[1].get<double>());
            } else {
                throw ParseError(origin + ": entry must be a number or [re, im]" + at);
            }
        }
    }
    if (!m.allFinite()) throw ParseError(origin + ": non-finite entry");
    return m;
}

inline Matrix read_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_matrix_json(buf.str(), path);
}

inline std::string write_matrix_json(const Matrix& m, int precision) {
    std::string out = "{\n  \"rows\": " + std::to_string(m.rows()) +
                      ",\n  \"cols\": " + std::to_string(m.cols()) + ",\n  \"data\": [";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out += (i == 0) ? "\n    [" : ",\n    [";
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += ", ";
            out += format_entry_json(m(i, j), precision);
        }
        out += "]";
    }
    out += m.rows() ? "\n  ]\n}\n" : "]\n}\n";
    return out;
}

inline std::string csv_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ",";
        out += cells[i];
    }
    out += "\n";
    return out;
}

// Matrix as CSV with a c1..cN header row.
inline std::string write_matrix_csv(const Matrix& m, int precision) {
    const double floor = imag_drop_floor(m);
    std::vector<std::string> header;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        header.push_back("c" + std::to_string(j + 1));
    std::string out = csv_row(header);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<std::string> cells;
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            cells.push_back(format_entry_csv(m(i, j), precision, floor));
        out += csv_row(cells);
    }
    return out;
}

// Trajectory as CSV: j, x_1..x_n, residual (step residual; 0 for the first row).
inline std::string trajectory_csv(const Trajectory& tr, int precision) {
    Matrix all(tr.states.empty() ? 0 : tr.states.front().size(),
               static_cast<Eigen::Index>(tr.states.size()));
    for (std::size_t j = 0; j < tr.states.size(); ++j)
        all.col(static_cast<Eigen::Index>(j)) = tr.states[j];
    const double floor = imag_drop_floor(all);
    std::vector<std::string> header{"j"};
    for (Eigen::Index i = 0; i < all.rows(); ++i)
        header.push_back("x" + std::to_string(i + 1));
    header.push_back("residual");
    std::string out = csv_row(header);
    for (std::size_t j = 0; j < tr.states.size(); ++j) {
        std::vector<std::string> cells{std::to_string(tr.times[j])};
        for (Eigen::Index i = 0; i < all.rows(); ++i)
            cells.push_back(format_entry_csv(tr.states[j](i), precision, floor));
        cells.push_back(format_real(j == 0 ? 0.0 : tr.residuals[j - 1], precision));
        out += csv_row(cells);
    }
    return out;
}

// Volume trace as CSV: j, volume, y_1..y_m.
inline std::string volume_csv(const VolumeTrace& vt, int precision) {
    Matrix all(vt.compound_states.empty() ? 0 : vt.compound_states.front().size(),
               static_cast<Eigen::Index>(vt.compound_states.size()));
    for (std::size_t j = 0; j < vt.compound_states.size(); ++j)
        all.col(static_cast<Eigen::Index>(j)) = vt.compound_states[j];
    const double floor = imag_drop_floor(all);
    std::vector<std::string> header{"j", "volume"};
    for (Eigen::Index i = 0; i < all.rows(); ++i)
        header.push_back("y" + std::to_string(i + 1));
    std::string out = csv_row(header);
    for (std::size_t j = 0; j < vt.compound_states.size(); ++j) {
        std::vector<std::string> cells{std::to_string(j),
                                       format_real(vt.volumes[j], precision)};
        for (Eigen::Index i = 0; i < all.rows(); ++i)
            cells.push_back(format_entry_csv(vt.compound_states[j](i), precision, floor));
        out += csv_row(cells);
    }
    return out;
}

} // namespace io
} // namespace pencilk
