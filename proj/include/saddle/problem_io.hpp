#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "saddle/errors.hpp"
#include "saddle/matrix_market.hpp"
#include "saddle/problem.hpp"

namespace saddle {

/// Write the problem as a Matrix Market bundle plus a JSON manifest naming
/// the files and the block dimensions. P is always written, so a bundle
/// round-trips value-identically even when P was defaulted.
inline void export_problem(const DoubleSaddleProblem& problem,
                           const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_matrix_market(dir / "A.mtx", problem.A());
    write_matrix_market(dir / "B.mtx", problem.B());
    write_matrix_market(dir / "C.mtx", problem.C());
    write_matrix_market(dir / "D.mtx", problem.D());
    write_matrix_market(dir / "P.mtx", problem.P());
    write_vector_market(dir / "rhs.mtx", problem.rhs());

    nlohmann::ordered_json manifest;
    manifest["n"] = problem.n();
    manifest["m"] = problem.m();
    manifest["p"] = problem.p();
    manifest["A"] = "A.mtx";
    manifest["B"] = "B.mtx";
    manifest["C"] = "C.mtx";
    manifest["D"] = "D.mtx";
    manifest["P"] = "P.mtx";
    manifest["rhs"] = "rhs.mtx";
    std::ofstream out(dir / "manifest.json");
    if (!out) throw IoError("cannot open manifest for writing");
    out << manifest.dump(2) << "\n";
}

inline DoubleSaddleProblem import_problem(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open manifest: " + manifest_path.string());
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("manifest parse error: ") + e.what());
    }
    const auto dir = manifest_path.parent_path();
    const auto need = [&](const char* key) -> nlohmann::json {
        if (!manifest.contains(key))
            throw IoError(std::string("manifest missing field: ") + key);
        return manifest.at(key);
    };
    const int n = need("n").get<int>();
    const int m = need("m").get<int>();
    const int p = need("p").get<int>();

    const auto load = [&](const char* key) {
        return read_matrix_market(dir / need(key).get<std::string>());
    };
    SparseMatrix A = load("A");
    SparseMatrix B = load("B");
    SparseMatrix C = load("C");
    SparseMatrix D = load("D");
    std::optional<SparseMatrix> P;
    if (manifest.contains("P")) P = read_matrix_market(dir / manifest["P"].get<std::string>());

    const auto check = [](const char* name, const SparseMatrix& mat, int r, int c) {
        if (mat.rows() != r || mat.cols() != c)
            throw IoError(std::string("manifest dimension mismatch for block ") + name);
    };
    check("A", A, n, n);
    check("B", B, m, n);
    check("C", C, p, n);
    check("D", D, p, p);
    if (P) check("P", *P, m, m);

    Vec rhs = read_vector_market(dir / need("rhs").get<std::string>());
    if (static_cast<int>(rhs.size()) != n + m + p)
        throw IoError("manifest dimension mismatch for rhs");
    Vec f, g, h;
    unstack3(rhs, n, m, p, f, g, h);
    return DoubleSaddleProblem(std::move(A), std::move(B), std::move(C), std::move(D),
                               std::move(P), std::move(f), std::move(g), std::move(h));
}

}  // namespace saddle
