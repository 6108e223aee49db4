#include "affdim/linalg.hpp"

#include "affdim/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace affdim {

void require_finite(const Matrix& A, const char* what) {
    if (!A.allFinite()) throw InvalidInput(std::string(what) + " has non-finite entries");
}

SingularData svd(const Matrix& A) {
    require_finite(A);
    Eigen::JacobiSVD<Matrix> solver(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {solver.singularValues(), solver.matrixU(), solver.matrixV()};
}

Vector singular_values(const Matrix& A) {
    require_finite(A);
    Eigen::JacobiSVD<Matrix> solver(A);
    return solver.singularValues();
}

SmallVector log_singular_values(const SmallMatrix& A) {
    const int d = static_cast<int>(A.rows());
    SmallVector out(d);
    if (d == 1) {
        out(0) = std::log(std::abs(A(0, 0)));
        return out;
    }
    if (d == 2) {
        // sigma_1^2 = (F + sqrt((F - 2|D|)(F + 2|D|))) / 2 with F the squared Frobenius norm.
        const double a = A(0, 0), b = A(0, 1), c = A(1, 0), e = A(1, 1);
        const double det = std::abs(a * e - b * c);
        const double f = a * a + b * b + c * c + e * e;
        // f - 2|det| written as a sum of squares to avoid cancellation.
        const double minus = (a * e - b * c >= 0) ? (a - e) * (a - e) + (b + c) * (b + c)
                                                  : (a + e) * (a + e) + (b - c) * (b - c);
        const double s1sq = 0.5 * (f + std::sqrt(minus * (f + 2 * det)));
        out(0) = 0.5 * std::log(s1sq);
        out(1) = std::log(det) - out(0);
        return out;
    }
    Eigen::JacobiSVD<SmallMatrix> solver(A);
    const auto& sv = solver.singularValues();
    for (int i = 0; i < d; ++i) out(i) = std::log(sv(i));
    return out;
}

double log_abs_det(const Matrix& A) {
    Eigen::PartialPivLU<Matrix> lu(A);
    const Matrix& m = lu.matrixLU();
    double acc = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) acc += std::log(std::abs(m(i, i)));
    return acc;
}

std::size_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::size_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
    return r;
}

std::vector<std::vector<int>> k_subsets(int d, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(k);
    for (int i = 0; i < k; ++i) cur[i] = i;
    while (true) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[i] == d - k + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

namespace {

double minor_det(const Matrix& A, const std::vector<int>& rows, const std::vector<int>& cols) {
    const int k = static_cast<int>(rows.size());
    if (k == 1) return A(rows[0], cols[0]);
    if (k == 2) return A(rows[0], cols[0]) * A(rows[1], cols[1]) - A(rows[0], cols[1]) * A(rows[1], cols[0]);
    Matrix sub(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub(i, j) = A(rows[i], cols[j]);
    return sub.partialPivLu().determinant();
}

}  // namespace

Matrix exterior_power(const Matrix& A, int k) {
    const int d = static_cast<int>(A.rows());
    if (A.cols() != d) throw InvalidInput("exterior_power needs a square matrix");
    if (k < 1 || k > d) throw InvalidInput("exterior power degree " + std::to_string(k) + " outside [1, " + std::to_string(d) + "]");
    require_finite(A);
    if (k == 1) return A;
    const auto subsets = k_subsets(d, k);
    const auto D = static_cast<Eigen::Index>(subsets.size());
    Matrix out(D, D);
    for (Eigen::Index i = 0; i < D; ++i)
        for (Eigen::Index j = 0; j < D; ++j) out(i, j) = minor_det(A, subsets[i], subsets[j]);
    return out;
}

Vector wedge_columns(const Matrix& F) {
    const int d = static_cast<int>(F.rows());
    const int k = static_cast<int>(F.cols());
    const auto subsets = k_subsets(d, k);
    std::vector<int> all(k);
    for (int j = 0; j < k; ++j) all[j] = j;
    Vector out(static_cast<Eigen::Index>(subsets.size()));
    for (std::size_t i = 0; i < subsets.size(); ++i) out(static_cast<Eigen::Index>(i)) = minor_det(F, subsets[i], all);
    return out;
}

double proj_distance(const Vector& x, const Vector& y) {
    const double nx = x.norm(), ny = y.norm();
    if (nx == 0 || ny == 0) return 0;
    const Vector a = x / nx, b = y / ny;
    // Angle via atan2 stays accurate for nearly parallel and nearly orthogonal lines.
    const double theta = 2.0 * std::atan2((a - b).norm(), (a + b).norm());
    return std::min(1.0, std::abs(std::sin(theta)));
}

double point_hyperplane_distance(const Vector& x, const Vector& normal) {
    const double nx = x.norm(), nn = normal.norm();
    if (nx == 0 || nn == 0) return 0;
    return std::min(1.0, std::abs(x.dot(normal)) / (nx * nn));
}

Vector normalize_sign(const Vector& v) {
    const double n = v.norm();
    if (n == 0) return v;
    Vector u = v / n;
    const double cutoff = 1e-12 * u.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (std::abs(u(i)) > cutoff) {
            if (u(i) < 0) u = -u;
            break;
        }
    }
    return u;
}

double q_operator_norm(const Matrix& A, const Matrix& L) {
    const Matrix Lt = L.transpose();
    const Matrix M = Lt * A * Lt.inverse();
    return singular_values(M)(0);
}

double q_norm(const Vector& x, const Matrix& L) { return (L.transpose() * x).norm(); }

}  // namespace affdim
