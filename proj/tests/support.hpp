#pragma once

// Fixture builders and hand-rolled random generators shared by the tests.

#include "affdim/ifs.hpp"
#include "affdim/rng.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace testing_support {

using affdim::AffineIFS;
using affdim::AffineMap;
using affdim::CounterRng;
using affdim::Matrix;
using affdim::Vector;

inline std::string data_path(const std::string& name) { return std::string(AFFDIM_TEST_DATA) + "/" + name; }

inline Matrix diag2(double a, double b) {
    Matrix A = Matrix::Zero(2, 2);
    A(0, 0) = a;
    A(1, 1) = b;
    return A;
}

inline Matrix rotation(double theta) {
    Matrix R(2, 2);
    R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return R;
}

inline AffineIFS make_ifs(const std::vector<Matrix>& linear, const std::vector<Vector>& translations = {}) {
    AffineIFS ifs;
    ifs.dim = static_cast<int>(linear.front().rows());
    for (std::size_t i = 0; i < linear.size(); ++i) {
        AffineMap m;
        m.A = linear[i];
        m.v = i < translations.size() ? translations[i] : Vector::Zero(ifs.dim);
        ifs.maps.push_back(m);
    }
    return ifs;
}

inline AffineIFS similarity_ifs(int count, double ratio) {
    std::vector<Matrix> linear;
    std::vector<Vector> shifts;
    for (int i = 0; i < count; ++i) {
        linear.push_back(ratio * rotation(0.7 + 1.3 * i));
        Vector v(2);
        v << std::cos(2.0 * i), std::sin(2.0 * i);
        shifts.push_back(v);
    }
    return make_ifs(linear, shifts);
}

inline AffineIFS interval_ifs(const std::vector<std::pair<double, double>>& maps) {
    std::vector<Matrix> linear;
    std::vector<Vector> shifts;
    for (auto [a, b] : maps) {
        linear.push_back(Matrix::Constant(1, 1, a));
        shifts.push_back(Vector::Constant(1, b));
    }
    return make_ifs(linear, shifts);
}

// A_1 = diag(0.8, 0.2), A_2 = R(pi/4) A_1 R(-pi/4), translations 0 and e1.
inline AffineIFS rotated_diagonal() {
    const Matrix A1 = diag2(0.8, 0.2);
    const Matrix A2 = rotation(M_PI / 4) * A1 * rotation(-M_PI / 4);
    Vector e1 = Vector::Zero(2);
    e1(0) = 1;
    return make_ifs({A1, A2}, {Vector::Zero(2), e1});
}

inline Matrix random_matrix(CounterRng& rng, int d, double scale = 1.0) {
    Matrix A(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = scale * rng.normal();
    return A;
}

// Random invertible matrix with operator norm exactly tau.
inline Matrix random_contraction(CounterRng& rng, int d, double tau) {
    for (;;) {
        Matrix A = random_matrix(rng, d);
        Eigen::JacobiSVD<Matrix> svd(A);
        const double top = svd.singularValues()(0);
        const double bottom = svd.singularValues()(d - 1);
        if (bottom > 0.05 * top) return A * (tau / top);
    }
}

inline AffineIFS random_contracting_ifs(CounterRng& rng, int d, int m) {
    std::vector<Matrix> linear;
    std::vector<Vector> shifts;
    for (int i = 0; i < m; ++i) {
        linear.push_back(random_contraction(rng, d, 0.2 + 0.6 * rng.uniform()));
        Vector v(d);
        for (int j = 0; j < d; ++j) v(j) = rng.normal();
        shifts.push_back(v);
    }
    return make_ifs(linear, shifts);
}

inline affdim::Word random_word(CounterRng& rng, int alphabet, int length) {
    affdim::Word w(static_cast<std::size_t>(length));
    for (auto& letter : w) letter = static_cast<int>(rng.below(static_cast<std::uint64_t>(alphabet)));
    return w;
}

}  // namespace testing_support
