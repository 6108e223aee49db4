#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace affdim {

constexpr int kMaxDim = 8;

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Heap-free storage for the d <= 8 matrices used in word enumeration.
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

struct SingularData {
    Vector sigmas;  // non-increasing
    Matrix U;
    Matrix V;
};

// Throws InvalidInput if any entry is NaN or infinite.
void require_finite(const Matrix& A, const char* what = "matrix");

SingularData svd(const Matrix& A);
Vector singular_values(const Matrix& A);

// log sigma_1, ..., log sigma_d (the Cartan vector). Requires A invertible.
SmallVector log_singular_values(const SmallMatrix& A);

double log_abs_det(const Matrix& A);

// Sorted k-subsets of {0,...,d-1} in lexicographic order.
std::vector<std::vector<int>> k_subsets(int d, int k);
std::size_t binomial(int n, int k);

// k-th exterior power: the matrix of k x k minors, rows and columns indexed by
// lexicographically ordered k-subsets.
Matrix exterior_power(const Matrix& A, int k);

// Vector representative of the k-plane spanned by the columns of F (d x k).
Vector wedge_columns(const Matrix& F);

// sin of the angle between the lines through x and y.
double proj_distance(const Vector& x, const Vector& y);

// Distance from the line through x to the hyperplane ker(normal^T).
double point_hyperplane_distance(const Vector& x, const Vector& normal);

// Unit vector whose first entry of magnitude above a relative cutoff is positive.
Vector normalize_sign(const Vector& v);

// Operator norm of A with respect to |x|_Q = sqrt(x^T Q x); L is the Cholesky factor of Q.
double q_operator_norm(const Matrix& A, const Matrix& L);
double q_norm(const Vector& x, const Matrix& L);

}  // namespace affdim
