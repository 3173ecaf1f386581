#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "saddle/generate.hpp"
#include "saddle/problem.hpp"
#include "saddle/rng.hpp"
#include "saddle/sparse.hpp"

namespace saddle::testing {

/// The scalar instance used throughout the operation examples:
/// A=2, B=1, C=1, D=1, P=1, rhs (f, g, h) configurable.
inline DoubleSaddleProblem scalar_problem(double f = 2.0, double g = 0.0, double h = 0.0) {
    auto A = SparseMatrix::from_triplets(1, 1, {{0, 0, 2.0}});
    auto B = SparseMatrix::from_triplets(1, 1, {{0, 0, 1.0}});
    auto C = SparseMatrix::from_triplets(1, 1, {{0, 0, 1.0}});
    auto D = SparseMatrix::from_triplets(1, 1, {{0, 0, 1.0}});
    auto P = SparseMatrix::from_triplets(1, 1, {{0, 0, 1.0}});
    return DoubleSaddleProblem(A, B, C, D, P, {f}, {g}, {h});
}

/// Random desk-scale problem with dimensions and regimes drawn from the seed.
/// total_lo/total_hi bound n + m + p.
inline DoubleSaddleProblem random_problem(std::uint64_t seed, int total_lo = 30,
                                          int total_hi = 90) {
    Rng rng(seed * 0x9E3779B97F4A7C15ULL + 12345);
    const int total =
        total_lo + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(
                       std::max(1, total_hi - total_lo))));
    int m = 2 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(total / 4)));
    int p = 2 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(total / 4)));
    int n = total - m - p;
    if (n < m) n = m;  // problem requires m <= n

    GeneratorOptions opts;
    const auto shapes = {SpectrumShape::Uniform, SpectrumShape::Clustered,
                         SpectrumShape::IllConditioned};
    opts.shape = *(shapes.begin() + static_cast<int>(rng.next_below(3)));
    const auto pchoices = {PChoice::SchurDefault, PChoice::DiagSchur, PChoice::ScaledIdentity};
    opts.p_choice = *(pchoices.begin() + static_cast<int>(rng.next_below(3)));
    const double nus[] = {0.15, 0.6, 0.95, 1.4, -1.0};
    opts.target_nu = nus[rng.next_below(5)];
    return generate_synthetic(seed, n, m, p, opts);
}

inline std::string cli_path() {
    const char* p = std::getenv("SADDLE_CLI");
    return p ? p : "";
}

/// Unique scratch directory under the system temp root.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() /
               ("saddle_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace saddle::testing
