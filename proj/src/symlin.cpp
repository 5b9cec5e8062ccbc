#include "symp/symlin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "symp/errors.hpp"

namespace symp {

namespace {

using CMat = Eigen::MatrixXcd;

// Eigenvalues closer than this are treated as one cluster.
constexpr double kClusterRadius = 1e-6;
// Krein form eigenvalues below this (for orthonormal bases) count as zero.
constexpr double kKreinZero = 1e-6;
// Clusters this close to +-1 skip the Krein form and count as first kind.
constexpr double kNearRealAxis = 1e-6;

void require_even_square(const Mat& A) {
    if (A.rows() != A.cols()) throw InputError("matrix is not square");
    if (A.rows() == 0 || A.rows() % 2 != 0)
        throw InputError("symplectic dimension must be a positive even number, got " +
                         std::to_string(A.rows()));
}

double scale_of(const Mat& A) { return std::max(1.0, A.cwiseAbs().maxCoeff()); }

std::string cluster_text(cplx c, int size) {
    std::ostringstream os;
    os << "cluster at " << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i of size " << size;
    return os.str();
}

}  // namespace

Mat standard_J(int m) {
    if (m < 1) throw InputError("standard_J needs m >= 1");
    Mat J = Mat::Zero(2 * m, 2 * m);
    for (int i = 0; i < m; ++i) {
        J(2 * i, 2 * i + 1) = -1.0;
        J(2 * i + 1, 2 * i) = 1.0;
    }
    return J;
}

SymplecticCheckReport check_symplectic(const Mat& A, double tol) {
    require_even_square(A);
    Mat J = standard_J(static_cast<int>(A.rows() / 2));
    SymplecticCheckReport r;
    r.defect = (A.transpose() * J * A - J).cwiseAbs().maxCoeff();
    if (!std::isfinite(r.defect)) r.defect = std::numeric_limits<double>::infinity();
    r.is_symplectic = r.defect <= tol;
    return r;
}

int EigenClassification::elliptic_count() const {
    int n = 0;
    for (const auto& e : elliptic) n += e.multiplicity;
    return n;
}

int EigenClassification::hyperbolic_count() const {
    int n = 0;
    for (const auto& h : hyperbolic) n += h.multiplicity;
    return n;
}

// W_j = { x : (A - lambda) x in W_{j-1} }, grown until it stops.
int generalized_kernel_dim(const Mat& A, double lambda, double tol) {
    const Eigen::Index n = A.rows();
    const double thr = tol * scale_of(A);
    Mat B = A - lambda * Mat::Identity(n, n);
    Mat W(n, 0);
    for (Eigen::Index step = 0; step <= n; ++step) {
        Mat M = B;
        if (W.cols() > 0) M = (Mat::Identity(n, n) - W * W.transpose()) * B;
        Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        Eigen::Index k = 0;
        while (k < n && s(n - 1 - k) <= thr) ++k;
        if (k <= W.cols()) break;
        W = svd.matrixV().rightCols(k);
        if (k == n) break;
    }
    return static_cast<int>(W.cols());
}

EigenClassification eigen_classify(const Mat& A, double tol) {
    require_even_square(A);
    const int n = static_cast<int>(A.rows());
    if (!A.allFinite()) throw NumericalError("matrix has non-finite entries");

    EigenClassification out;
    // The real QR iteration can stall on matrices close to a multiple of the identity;
    // a diagonal shift separates the cluster and leaves the eigenvectors alone.
    Eigen::EigenSolver<Mat> es(A, true);
    double shift = 0.0;
    for (double c : {A.trace() / n, 1.0, -1.0}) {
        if (es.info() == Eigen::Success) break;
        shift = c;
        es.compute(A - c * Mat::Identity(n, n), true);
    }
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalue computation failed");
    std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
    for (cplx& z : ev) z += shift;

    // A kernel perturbed by tol moves a Jordan chain of length n by at most about tol^(1/n),
    // so the SVD counts are only needed when some eigenvalue is that close to +-1.
    const double reach = 2.0 * std::max(1e-3, std::pow(tol * scale_of(A), 1.0 / n));
    auto near = [&](double target) {
        return std::any_of(ev.begin(), ev.end(), [&](cplx z) { return std::abs(z - target) <= reach; });
    };
    const int g_plus = near(1.0) ? generalized_kernel_dim(A, 1.0, tol) : 0;
    const int g_minus = near(-1.0) ? generalized_kernel_dim(A, -1.0, tol) : 0;
    if (g_plus % 2 != 0 || g_minus % 2 != 0)
        throw DegeneracyError("odd generalized multiplicity at " +
                              std::string(g_plus % 2 ? "+1" : "-1") +
                              "; eigenvalue cluster cannot be separated at this tolerance");
    out.unit_block_dim = g_plus;
    const std::vector<cplx> all_ev = ev;

    auto remove_nearest = [&ev](cplx target, int count) {
        for (int c = 0; c < count; ++c) {
            auto it = std::min_element(ev.begin(), ev.end(), [&](cplx a, cplx b) {
                return std::abs(a - target) < std::abs(b - target);
            });
            ev.erase(it);
        }
    };
    remove_nearest(1.0, g_plus);
    remove_nearest(-1.0, g_minus);
    if (g_minus > 0) out.elliptic.push_back({M_PI, g_minus / 2});

    // Real eigenvalues come out of the real Schur form with exactly zero imaginary part.
    std::vector<double> pos, neg;
    std::vector<cplx> upper;
    for (cplx z : ev) {
        if (z.imag() == 0.0) {
            (z.real() > 0 ? pos : neg).push_back(z.real());
        } else if (z.imag() > 0) {
            upper.push_back(z);
        }
    }
    auto add_hyperbolic = [&](std::vector<double>& v, int sign) {
        if (v.size() % 2 != 0)
            throw DegeneracyError("unpaired real eigenvalue near " + std::to_string(v.front()) +
                                  "; cluster cannot be separated at this tolerance");
        std::sort(v.begin(), v.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
        for (size_t i = 0; i < v.size() / 2; ++i) out.hyperbolic.push_back({sign, std::abs(v[i]), 1});
    };
    add_hyperbolic(pos, 1);
    add_hyperbolic(neg, -1);

    // Cluster the upper half-plane eigenvalues; each cluster gets its Krein signature.
    std::sort(upper.begin(), upper.end(), [](cplx a, cplx b) { return std::arg(a) < std::arg(b); });
    std::vector<std::vector<cplx>> clusters;
    for (cplx z : upper) {
        bool placed = false;
        for (auto& cl : clusters) {
            for (cplx w : cl)
                if (std::abs(z - w) <= kClusterRadius) {
                    placed = true;
                    break;
                }
            if (placed) {
                cl.push_back(z);
                break;
            }
        }
        if (!placed) clusters.push_back({z});
    }

    const Mat J = standard_J(n / 2);
    const CMat Ac = A.cast<cplx>();
    for (const auto& cl : clusters) {
        const int c = static_cast<int>(cl.size());
        cplx centre = std::accumulate(cl.begin(), cl.end(), cplx(0.0)) / static_cast<double>(c);
        const double alpha = std::arg(centre);
        if (std::abs(std::abs(centre) - 1.0) > kClusterRadius) {
            if (std::abs(centre) > 1.0) out.complex_quadruples += c;
            continue;
        }
        if (alpha < kNearRealAxis || M_PI - alpha < kNearRealAxis) {
            out.elliptic.push_back({alpha, c});
            continue;
        }
        if (c == 1) {
            // Simple eigenvalue: its eigenvector spans the space.
            const auto idx = std::find(all_ev.begin(), all_ev.end(), cl[0]) - all_ev.begin();
            CMat v = es.eigenvectors().col(idx).normalized();
            const double k = (cplx(0.0, 1.0) * v.adjoint() * (-J).cast<cplx>() * v)(0, 0).real();
            if (std::abs(k) <= kKreinZero) {
                if (std::abs(centre) > 1.0) out.complex_quadruples += c;
                continue;
            }
            out.elliptic.push_back({k > 0 ? alpha : -alpha, 1});
            continue;
        }
        // Range of the product over all other eigenvalues is the cluster's generalized eigenspace.
        CMat P = CMat::Identity(n, n);
        for (int i = 0; i < g_plus; ++i) P = P * (Ac - CMat::Identity(n, n));
        for (int i = 0; i < g_minus; ++i) P = P * (Ac + CMat::Identity(n, n));
        for (cplx z : ev) {
            bool inside = false;
            for (cplx w : cl)
                if (z == w) inside = true;
            if (!inside) P = P * (Ac - z * CMat::Identity(n, n));
        }
        Eigen::JacobiSVD<CMat> svd(P, Eigen::ComputeThinU);
        CMat Z = svd.matrixU().leftCols(c);
        CMat K = cplx(0.0, 1.0) * Z.adjoint() * (-J).cast<cplx>() * Z;
        K = 0.5 * (K + K.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<CMat> ks(K);
        int p = 0, q = 0, z0 = 0;
        for (Eigen::Index i = 0; i < ks.eigenvalues().size(); ++i) {
            double k = ks.eigenvalues()(i);
            if (k > kKreinZero) ++p;
            else if (k < -kKreinZero) ++q;
            else ++z0;
        }
        if (z0 == c) {
            if (std::abs(centre) > 1.0) out.complex_quadruples += c;
            continue;
        }
        if (z0 != 0) throw DegeneracyError("indefinite Krein form on " + cluster_text(centre, c));
        if (p > 0) out.elliptic.push_back({alpha, p});
        if (q > 0) out.elliptic.push_back({-alpha, q});
    }

    std::sort(out.elliptic.begin(), out.elliptic.end(),
              [](const EllipticPair& a, const EllipticPair& b) { return a.theta < b.theta; });
    std::sort(out.hyperbolic.begin(), out.hyperbolic.end(), [](const HyperbolicPair& a, const HyperbolicPair& b) {
        return a.sign != b.sign ? a.sign > b.sign : a.modulus < b.modulus;
    });
    return out;
}

cplx rho(const EigenClassification& c) {
    double phase = 0.0;
    for (const auto& e : c.elliptic) phase += e.theta * e.multiplicity;
    cplx r = std::polar(1.0, phase);
    for (const auto& h : c.hyperbolic)
        if (h.sign < 0 && h.multiplicity % 2 != 0) r = -r;
    return r;
}

// Near a collision at +-1 the kernel count can see one eigenvalue of a pair. rho is
// continuous there, so widen the cluster tolerance a few times before giving up.
cplx rho(const Mat& A, double tol) {
    for (double t = tol;; t *= 10.0) {
        try {
            return rho(eigen_classify(A, t));
        } catch (const DegeneracyError&) {
            if (t >= 1e4 * tol) throw;
        }
    }
}

int signature(const Mat& Q, double tol) {
    if (Q.rows() != Q.cols()) throw InputError("quadratic form matrix is not square");
    if (Q.rows() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (Q + Q.transpose()), Eigen::EigenvaluesOnly);
    int s = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double v = es.eigenvalues()(i);
        if (v > tol) ++s;
        else if (v < -tol) --s;
    }
    return s;
}

QuadraticFormInvariants quad_invariants(const Mat& Q, double tol) {
    if (Q.rows() != Q.cols()) throw InputError("quadratic form matrix is not square");
    if (Q.rows() % 2 != 0) throw InputError("quadratic form must live on an even-dimensional space");
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (Q + Q.transpose()), Eigen::EigenvaluesOnly);
    QuadraticFormInvariants r;
    r.half_dim = static_cast<int>(Q.rows() / 2);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double v = es.eigenvalues()(i);
        if (v > tol) ++r.sgn;
        else if (v < -tol) --r.sgn;
        else ++r.nullity;
    }
    return r;
}

Mat symplectic_exp(const Mat& H, double t) {
    Mat J = standard_J(static_cast<int>(H.rows() / 2));
    Mat X = (J * H * t).eval();
    return X.exp();
}

Mat random_symmetric(int dim, double scale, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, scale);
    Mat Q(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) Q(i, j) = Q(j, i) = g(rng);
    return Q;
}

Mat random_symplectic(int m, double scale, std::mt19937_64& rng) {
    return symplectic_exp(random_symmetric(2 * m, scale, rng), 1.0);
}

}  // namespace symp
