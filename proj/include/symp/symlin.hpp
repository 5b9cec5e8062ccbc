#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <vector>

namespace symp {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using cplx = std::complex<double>;

inline constexpr double kDefaultTol = 1e-8;

// Coordinates are ordered (p1, q1, p2, q2, ...). Each plane carries [[0,-1],[1,0]],
// so exp(2*pi*J*t) turns counterclockwise.
Mat standard_J(int m);

struct SymplecticCheckReport {
    bool is_symplectic = false;
    double defect = 0.0;
};

SymplecticCheckReport check_symplectic(const Mat& A, double tol = kDefaultTol);

struct EllipticPair {
    double theta = 0.0;  // first-kind angle in (-pi, pi]
    int multiplicity = 1;
};

struct HyperbolicPair {
    int sign = 1;
    double modulus = 1.0;
    int multiplicity = 1;
};

struct EigenClassification {
    std::vector<EllipticPair> elliptic;
    std::vector<HyperbolicPair> hyperbolic;
    int unit_block_dim = 0;
    int complex_quadruples = 0;

    int elliptic_count() const;
    int hyperbolic_count() const;
};

EigenClassification eigen_classify(const Mat& A, double tol = kDefaultTol);
cplx rho(const Mat& A, double tol = kDefaultTol);
cplx rho(const EigenClassification& c);

// Dimension of the generalized eigenspace of A at the real eigenvalue lambda.
int generalized_kernel_dim(const Mat& A, double lambda, double tol = kDefaultTol);

int signature(const Mat& Q, double tol = kDefaultTol);

struct QuadraticFormInvariants {
    int sgn = 0;
    int nullity = 0;
    int half_dim = 0;
};

QuadraticFormInvariants quad_invariants(const Mat& Q, double tol = kDefaultTol);

// exp(J Q t) without integration; used as an oracle and for short extensions.
Mat symplectic_exp(const Mat& H, double t);

// Random symmetric matrix with N(0, scale) entries, and exp(J Q) of one.
Mat random_symmetric(int dim, double scale, std::mt19937_64& rng);
Mat random_symplectic(int m, double scale, std::mt19937_64& rng);

}  // namespace symp
