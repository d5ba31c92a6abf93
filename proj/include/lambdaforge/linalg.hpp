#pragma once

#include <optional>
#include <vector>

#include "lambdaforge/scalar.hpp"

namespace lf {

/// Dense exact matrix over Scalar.
struct Mat {
    size_t nr = 0, nc = 0;
    std::vector<Scalar> a; // row major

    Mat() = default;
    Mat(size_t r, size_t c) : nr(r), nc(c), a(r * c) {}
    Scalar& at(size_t r, size_t c) { return a[r * nc + c]; }
    const Scalar& at(size_t r, size_t c) const { return a[r * nc + c]; }
    static Mat identity(size_t n);
};

/// Row reduce in place to reduced row echelon form; returns pivot columns.
std::vector<size_t> rref(Mat& m);

Scalar det(Mat m);

/// Solve M x = b; nullopt if inconsistent. Underdetermined systems get the
/// solution with all free variables set to zero (deterministic gauge).
std::optional<std::vector<Scalar>> solve(const Mat& m, const std::vector<Scalar>& b,
                                         std::vector<size_t>* free_cols = nullptr);

/// Basis of the right nullspace of M.
std::vector<std::vector<Scalar>> nullspace(const Mat& m);

std::optional<Mat> inverse(const Mat& m);

} // namespace lf
