#include "lambdaforge/linalg.hpp"

namespace lf {

Mat Mat::identity(size_t n) {
    Mat m(n, n);
    for (size_t i = 0; i < n; i++) m.at(i, i) = Scalar(1);
    return m;
}

std::vector<size_t> rref(Mat& m) {
    std::vector<size_t> pivots;
    size_t row = 0;
    for (size_t col = 0; col < m.nc && row < m.nr; col++) {
        size_t p = row;
        while (p < m.nr && m.at(p, col).is_zero()) p++;
        if (p == m.nr) continue;
        if (p != row)
            for (size_t c = 0; c < m.nc; c++) std::swap(m.at(p, c), m.at(row, c));
        Scalar inv = m.at(row, col).inv();
        for (size_t c = col; c < m.nc; c++) m.at(row, c) = m.at(row, c) * inv;
        for (size_t r = 0; r < m.nr; r++) {
            if (r == row || m.at(r, col).is_zero()) continue;
            Scalar f = m.at(r, col);
            for (size_t c = col; c < m.nc; c++) m.at(r, c) = m.at(r, c) - f * m.at(row, c);
        }
        pivots.push_back(col);
        row++;
    }
    return pivots;
}

Scalar det(Mat m) {
    if (m.nr != m.nc) fail(Errc::BadArgument, "det of non-square matrix");
    Scalar d(1);
    for (size_t col = 0; col < m.nc; col++) {
        size_t p = col;
        while (p < m.nr && m.at(p, col).is_zero()) p++;
        if (p == m.nr) return Scalar(0);
        if (p != col) {
            for (size_t c = 0; c < m.nc; c++) std::swap(m.at(p, c), m.at(col, c));
            d = d.neg();
        }
        d = d * m.at(col, col);
        Scalar inv = m.at(col, col).inv();
        for (size_t r = col + 1; r < m.nr; r++) {
            if (m.at(r, col).is_zero()) continue;
            Scalar f = m.at(r, col) * inv;
            for (size_t c = col; c < m.nc; c++) m.at(r, c) = m.at(r, c) - f * m.at(col, c);
        }
    }
    return d;
}

std::optional<std::vector<Scalar>> solve(const Mat& m, const std::vector<Scalar>& b,
                                         std::vector<size_t>* free_cols) {
    Mat aug(m.nr, m.nc + 1);
    for (size_t r = 0; r < m.nr; r++) {
        for (size_t c = 0; c < m.nc; c++) aug.at(r, c) = m.at(r, c);
        aug.at(r, m.nc) = b[r];
    }
    auto piv = rref(aug);
    // inconsistent if a pivot lands in the augmented column
    if (!piv.empty() && piv.back() == m.nc) return std::nullopt;
    std::vector<Scalar> x(m.nc, Scalar(0));
    for (size_t i = 0; i < piv.size(); i++) {
        // find the row of this pivot: rref puts pivot i in row i
        x[piv[i]] = aug.at(i, m.nc);
    }
    if (free_cols) {
        free_cols->clear();
        size_t pi = 0;
        for (size_t c = 0; c < m.nc; c++) {
            if (pi < piv.size() && piv[pi] == c)
                pi++;
            else
                free_cols->push_back(c);
        }
    }
    return x;
}

std::vector<std::vector<Scalar>> nullspace(const Mat& m) {
    Mat r = m;
    auto piv = rref(r);
    std::vector<bool> is_piv(m.nc, false);
    for (auto c : piv) is_piv[c] = true;
    std::vector<std::vector<Scalar>> basis;
    for (size_t fc = 0; fc < m.nc; fc++) {
        if (is_piv[fc]) continue;
        std::vector<Scalar> v(m.nc, Scalar(0));
        v[fc] = Scalar(1);
        for (size_t i = 0; i < piv.size(); i++) v[piv[i]] = r.at(i, fc).neg();
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<Mat> inverse(const Mat& m) {
    if (m.nr != m.nc) fail(Errc::BadArgument, "inverse of non-square matrix");
    Mat aug(m.nr, 2 * m.nc);
    for (size_t r = 0; r < m.nr; r++) {
        for (size_t c = 0; c < m.nc; c++) aug.at(r, c) = m.at(r, c);
        aug.at(r, m.nc + r) = Scalar(1);
    }
    auto piv = rref(aug);
    if (piv.size() != m.nc || piv.back() != m.nc - 1) return std::nullopt;
    Mat inv(m.nr, m.nc);
    for (size_t r = 0; r < m.nr; r++)
        for (size_t c = 0; c < m.nc; c++) inv.at(r, c) = aug.at(r, m.nc + c);
    return inv;
}

} // namespace lf
