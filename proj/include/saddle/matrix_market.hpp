#pragma once

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "saddle/errors.hpp"
#include "saddle/sparse.hpp"
#include "saddle/vec.hpp"

namespace saddle {

namespace detail {

/// 17 significant digits: the shortest width that round-trips every double
/// through decimal text exactly.
inline std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline bool next_data_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        std::size_t i = line.find_first_not_of(" \t\r\n");
        if (i == std::string::npos) continue;
        if (line[i] == '%') continue;
        return true;
    }
    return false;
}

}  // namespace detail

/// Write a sparse matrix in Matrix Market coordinate format (real). With
/// as_symmetric, only the lower triangle is stored; the caller is responsible
/// for the matrix actually being symmetric.
inline void write_matrix_market(std::ostream& out, const SparseMatrix& m,
                                bool as_symmetric = false) {
    out << "%%MatrixMarket matrix coordinate real "
        << (as_symmetric ? "symmetric" : "general") << "\n";
    std::size_t count = 0;
    if (as_symmetric) {
        for (int i = 0; i < m.rows(); ++i)
            for (int k = m.row_ptr()[i]; k < m.row_ptr()[i + 1]; ++k)
                if (m.col_idx()[k] <= i) ++count;
    } else {
        count = m.nnz();
    }
    out << m.rows() << " " << m.cols() << " " << count << "\n";
    for (int i = 0; i < m.rows(); ++i)
        for (int k = m.row_ptr()[i]; k < m.row_ptr()[i + 1]; ++k) {
            const int j = m.col_idx()[k];
            if (as_symmetric && j > i) continue;
            out << (i + 1) << " " << (j + 1) << " " << detail::format_value(m.values()[k])
                << "\n";
        }
}

inline SparseMatrix read_matrix_market(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw IoError("matrix market: empty stream");
    std::istringstream hs(header);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || detail::lower(object) != "matrix")
        throw IoError("matrix market: bad banner: " + header);
    format = detail::lower(format);
    field = detail::lower(field);
    symmetry = detail::lower(symmetry);
    if (format != "coordinate") throw IoError("matrix market: expected coordinate format");
    if (field != "real" && field != "integer")
        throw IoError("matrix market: unsupported field " + field);
    if (symmetry != "general" && symmetry != "symmetric")
        throw IoError("matrix market: unsupported symmetry " + symmetry);

    std::string line;
    if (!detail::next_data_line(in, line)) throw IoError("matrix market: missing size line");
    std::istringstream ss(line);
    long rows = 0, cols = 0, nnz = 0;
    if (!(ss >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
        throw IoError("matrix market: bad size line: " + line);

    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(nnz));
    for (long k = 0; k < nnz; ++k) {
        if (!detail::next_data_line(in, line))
            throw IoError("matrix market: unexpected end of data");
        std::istringstream es(line);
        long i = 0, j = 0;
        double v = 0.0;
        if (!(es >> i >> j >> v)) throw IoError("matrix market: bad entry: " + line);
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw IoError("matrix market: index out of range: " + line);
        trips.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), v});
        if (symmetry == "symmetric" && i != j)
            trips.push_back({static_cast<int>(j - 1), static_cast<int>(i - 1), v});
    }
    return SparseMatrix::from_triplets(static_cast<int>(rows), static_cast<int>(cols),
                                       std::move(trips));
}

/// Dense vector as a Matrix Market array (n x 1).
inline void write_vector_market(std::ostream& out, const Vec& v) {
    out << "%%MatrixMarket matrix array real general\n";
    out << v.size() << " 1\n";
    for (double x : v) out << detail::format_value(x) << "\n";
}

inline Vec read_vector_market(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw IoError("matrix market: empty stream");
    std::istringstream hs(header);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket") throw IoError("matrix market: bad banner: " + header);
    format = detail::lower(format);
    std::string line;
    if (!detail::next_data_line(in, line)) throw IoError("matrix market: missing size line");
    std::istringstream ss(line);
    long rows = 0, cols = 0;
    if (!(ss >> rows >> cols) || rows < 0 || cols != 1)
        throw IoError("matrix market: expected an n x 1 array: " + line);
    if (format == "array") {
        Vec v;
        v.reserve(static_cast<std::size_t>(rows));
        for (long k = 0; k < rows; ++k) {
            if (!detail::next_data_line(in, line))
                throw IoError("matrix market: unexpected end of data");
            v.push_back(std::stod(line));
        }
        return v;
    }
    if (format == "coordinate") {
        long nnz = 0;
        std::istringstream rs(line);
        rs >> rows >> cols >> nnz;
        Vec v(static_cast<std::size_t>(rows), 0.0);
        for (long k = 0; k < nnz; ++k) {
            if (!detail::next_data_line(in, line))
                throw IoError("matrix market: unexpected end of data");
            std::istringstream es(line);
            long i = 0, j = 0;
            double x = 0.0;
            if (!(es >> i >> j >> x)) throw IoError("matrix market: bad entry: " + line);
            v.at(static_cast<std::size_t>(i - 1)) = x;
        }
        return v;
    }
    throw IoError("matrix market: unsupported vector format " + format);
}

// File-path conveniences.
inline void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m,
                                bool as_symmetric = false) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    write_matrix_market(out, m, as_symmetric);
}

inline SparseMatrix read_matrix_market(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    return read_matrix_market(in);
}

inline void write_vector_market(const std::filesystem::path& path, const Vec& v) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    write_vector_market(out, v);
}

inline Vec read_vector_market(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    return read_vector_market(in);
}

}  // namespace saddle
