#include "symp/pathindex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "symp/errors.hpp"

namespace symp {

namespace {

constexpr double kTimeEps = 1e-14;
constexpr double kBisectTol = 1e-10;
constexpr double kMergeDist = 1e-8;
constexpr int kSubSteps = 16;
constexpr int kExtensionSamples = 8;

Mat resymplectify(const Mat& A, const Mat& J) {
    Mat B = A;
    for (int it = 0; it < 2; ++it) {
        Mat E = B.transpose() * J * B - J;
        B = B * (Mat::Identity(B.rows(), B.cols()) + 0.5 * J * E);
    }
    return B;
}

Mat rk4_step(const GeneratedPath& gen, const Mat& J, const Mat& Phi, double a, double b) {
    const double h = b - a;
    const double mid = a + 0.5 * h;
    Mat JHa = J * gen.hamiltonian(a, +1);
    Mat JHm = J * gen.hamiltonian(mid, 0);
    Mat JHb = J * gen.hamiltonian(b, -1);
    Mat k1 = JHa * Phi;
    Mat k2 = JHm * (Phi + 0.5 * h * k1);
    Mat k3 = JHm * (Phi + 0.5 * h * k2);
    Mat k4 = JHb * (Phi + h * k3);
    return Phi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::vector<double> time_grid(const GeneratedPath& gen) {
    std::vector<double> g;
    g.reserve(gen.steps + 8);
    for (int i = 0; i <= gen.steps; ++i) g.push_back(static_cast<double>(i) / gen.steps);
    for (size_t i = 1; i < gen.samples.size(); ++i)
        if (gen.samples[i].t == gen.samples[i - 1].t) g.push_back(gen.samples[i].t);
    std::sort(g.begin(), g.end());
    std::vector<double> out;
    for (double t : g)
        if (out.empty() || t - out.back() > kTimeEps) out.push_back(t);
    out.back() = 1.0;
    return out;
}

double sigma_min(const Mat& M) {
    Eigen::JacobiSVD<Mat> svd(M);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

double spectral_norm(const Mat& M) {
    Eigen::JacobiSVD<Mat> svd(M);
    return svd.singularValues()(0);
}

// Phi at an arbitrary time, integrated from the nearest earlier sample.
Mat phi_at(const GeneratedPath& gen, const SampledPath& path, const Mat& J, double t) {
    auto it = std::upper_bound(path.times.begin(), path.times.end(), t);
    size_t j = (it == path.times.begin()) ? 0 : static_cast<size_t>(it - path.times.begin()) - 1;
    if (j >= path.times.size() - 1) j = path.times.size() - 1;
    Mat Phi = path.matrices[j];
    const double t0 = path.times[j];
    if (t - t0 <= 0.0) return Phi;
    const double h = (t - t0) / kSubSteps;
    for (int s = 0; s < kSubSteps; ++s) Phi = rk4_step(gen, J, Phi, t0 + s * h, t0 + (s + 1) * h);
    return resymplectify(Phi, J);
}

struct KernelForm {
    int dim = 0;
    int sig = 0;
    bool degenerate = false;
};

KernelForm kernel_form(const Mat& Phi, const Mat& H, double tol) {
    const Eigen::Index n = Phi.rows();
    Eigen::JacobiSVD<Mat> svd(Phi - Mat::Identity(n, n), Eigen::ComputeFullV);
    const double thr = 1e-6 * std::max(1.0, spectral_norm(Phi));
    Eigen::Index k = 0;
    while (k < n && svd.singularValues()(n - 1 - k) <= thr) ++k;
    KernelForm f;
    f.dim = static_cast<int>(k);
    if (k == 0) return f;
    Mat V = svd.matrixV().rightCols(k);
    Mat Q = V.transpose() * (0.5 * (H + H.transpose())) * V;
    Eigen::SelfAdjointEigenSolver<Mat> es(Q, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < k; ++i) {
        double v = es.eigenvalues()(i);
        if (std::abs(v) <= tol) f.degenerate = true;
        f.sig += (v > tol) - (v < -tol);
    }
    return f;
}

std::string tau_text(double tau) {
    std::ostringstream os;
    os.precision(12);
    os << tau;
    return os.str();
}

std::vector<cplx> extension_rhos(const Mat& end, double signed_eps, double tol) {
    const Eigen::Index n = end.rows();
    std::vector<cplx> r;
    Mat I = Mat::Identity(n, n);
    for (int j = 1; j <= kExtensionSamples; ++j) {
        Mat R = symplectic_exp(I, signed_eps * j / kExtensionSamples);
        r.push_back(rho(R * end, tol));
    }
    return r;
}

int geometric_kernel(const Mat& A) {
    const Eigen::Index n = A.rows();
    Eigen::JacobiSVD<Mat> svd(A - Mat::Identity(n, n));
    const double thr = 1e-6 * std::max(1.0, spectral_norm(A));
    int k = 0;
    while (k < n && svd.singularValues()(n - 1 - k) <= thr) ++k;
    return k;
}

MuPm mu_pm_core(const std::vector<cplx>& base_rhos, const Mat& end, double eps, const Tolerances& tol) {
    if (eps <= 0.0) eps = auto_eps(end, tol.cluster);
    MuPm r;
    r.eps = eps;
    for (int sgn : {-1, +1}) {
        std::vector<cplx> rh = base_rhos;
        auto ext = extension_rhos(end, sgn * eps, tol.cluster);
        rh.insert(rh.end(), ext.begin(), ext.end());
        const double mean = mean_index_from_rho(rh);
        Mat R = symplectic_exp(Mat::Identity(end.rows(), end.cols()), sgn * eps);
        int v;
        try {
            v = cz_from_endpoint(mean, R * end, tol.cluster);
        } catch (const DegeneracyError&) {
            throw DegeneracyError("extended endpoint still degenerate at eps=" + tau_text(eps) +
                                  "; try a larger eps");
        }
        (sgn < 0 ? r.minus : r.plus) = v;
    }
    r.kernel_dim = geometric_kernel(end);
    r.gap_consistent = (r.plus - r.minus == r.kernel_dim);
    return r;
}

}  // namespace

void SampledPath::validate(double tol) const {
    if (m < 1) throw InputError("path needs m >= 1");
    if (times.size() < 2 || times.size() != matrices.size())
        throw InputError("path needs at least two samples with one matrix per time");
    if (times.front() != 0.0 || times.back() != 1.0) throw InputError("path times must run from 0 to 1");
    for (size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw InputError("path times must be strictly increasing");
    for (size_t i = 0; i < matrices.size(); ++i) {
        const Mat& A = matrices[i];
        if (A.rows() != 2 * m || A.cols() != 2 * m)
            throw InputError("sample " + std::to_string(i) + " has the wrong dimension");
        auto rep = check_symplectic(A, std::max(tol, 1e-6));
        if (!rep.is_symplectic)
            throw InputError("sample " + std::to_string(i) + " is not symplectic (defect " +
                             tau_text(rep.defect) + ")");
    }
    if ((matrices.front() - Mat::Identity(2 * m, 2 * m)).cwiseAbs().maxCoeff() > std::max(tol, 1e-12))
        throw InputError("path must start at the identity");
}

void GeneratedPath::validate() const {
    if (m < 1) throw InputError("generator needs m >= 1");
    if (steps < 1) throw InputError("integration_steps must be >= 1");
    if (samples.empty()) throw InputError("generator needs at least one Hamiltonian sample");
    for (size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!(s.t >= 0.0 && s.t <= 1.0)) throw InputError("generator times must lie in [0, 1]");
        if (i > 0 && s.t < samples[i - 1].t) throw InputError("generator times must be non-decreasing");
        if (i > 1 && s.t == samples[i - 2].t) throw InputError("at most two samples may share a time");
        if (s.H.rows() != 2 * m || s.H.cols() != 2 * m)
            throw InputError("Hamiltonian sample " + std::to_string(i) + " has the wrong dimension");
        if (!s.H.allFinite()) throw InputError("Hamiltonian sample has non-finite entries");
        if ((s.H - s.H.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, s.H.cwiseAbs().maxCoeff()))
            throw InputError("Hamiltonian sample " + std::to_string(i) + " is not symmetric");
    }
}

Mat GeneratedPath::hamiltonian(double t, int side) const {
    auto lo = std::lower_bound(samples.begin(), samples.end(), t,
                               [](const HamiltonianSample& s, double v) { return s.t < v; });
    auto hi = std::upper_bound(samples.begin(), samples.end(), t,
                               [](double v, const HamiltonianSample& s) { return v < s.t; });
    if (lo != hi) return side < 0 ? lo->H : (hi - 1)->H;
    if (hi == samples.begin()) return samples.front().H;
    if (hi == samples.end()) return samples.back().H;
    const auto& a = *(hi - 1);
    const auto& b = *hi;
    const double w = (t - a.t) / (b.t - a.t);
    return (1.0 - w) * a.H + w * b.H;
}

SampledPath integrate(const GeneratedPath& gen) {
    gen.validate();
    const Mat J = standard_J(gen.m);
    SampledPath out;
    out.m = gen.m;
    out.times = time_grid(gen);
    out.matrices.reserve(out.times.size());
    Mat Phi = Mat::Identity(2 * gen.m, 2 * gen.m);
    out.matrices.push_back(Phi);
    for (size_t i = 1; i < out.times.size(); ++i) {
        Phi = resymplectify(rk4_step(gen, J, Phi, out.times[i - 1], out.times[i]), J);
        if (!Phi.allFinite())
            throw NumericalError("non-finite value during integration at t=" + tau_text(out.times[i]));
        out.matrices.push_back(Phi);
    }
    return out;
}

std::vector<cplx> rho_samples_serial(const SampledPath& path, double tol) {
    std::vector<cplx> r(path.matrices.size());
    for (size_t i = 0; i < r.size(); ++i) r[i] = rho(path.matrices[i], tol);
    return r;
}

std::vector<cplx> rho_samples_parallel(const SampledPath& path, double tol) {
    const long n = static_cast<long>(path.matrices.size());
    std::vector<cplx> r(n);
    std::string first_error;
    bool failed = false;
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        try {
            r[i] = rho(path.matrices[i], tol);
        } catch (const std::exception& e) {
#pragma omp critical
            {
                if (!failed) first_error = "sample " + std::to_string(i) + ": " + e.what();
                failed = true;
            }
        }
    }
    if (failed) throw DegeneracyError(first_error);
    return r;
}

double mean_index_from_rho(const std::vector<cplx>& rhos) {
    if (rhos.empty()) throw InputError("no samples");
    double theta = 0.0;
    for (size_t i = 1; i < rhos.size(); ++i) {
        const double d = std::arg(rhos[i] / rhos[i - 1]);
        if (std::abs(d) >= M_PI / 2)
            throw UnwrapError("rho argument jumps by " + tau_text(d) + " between samples " +
                              std::to_string(i - 1) + " and " + std::to_string(i) + "; refine the sampling");
        theta += d;
    }
    return theta / M_PI;
}

double mean_index(const SampledPath& path, double tol) {
    path.validate(tol);
    return mean_index_from_rho(rho_samples_parallel(path, tol));
}

int cz_from_endpoint(double mean, const Mat& endpoint, double tol) {
    const auto c = eigen_classify(endpoint, tol);
    if (c.unit_block_dim > 0)
        throw DegeneracyError("degenerate endpoint: unit_block_dim=" + std::to_string(c.unit_block_dim));
    // Push every first-kind elliptic angle to +-pi inside Sp*; the normal form then has integer mean index.
    double v = mean;
    for (const auto& e : c.elliptic) {
        if (e.theta == M_PI) continue;
        const double target = e.theta > 0 ? M_PI : -M_PI;
        v += e.multiplicity * (target - e.theta) / M_PI;
    }
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-6)
        throw NumericalError("normal-form index " + tau_text(v) + " is not near an integer");
    return static_cast<int>(r);
}

int cz_index(const SampledPath& path, double tol) {
    path.validate(tol);
    const double mean = mean_index_from_rho(rho_samples_parallel(path, tol));
    return cz_from_endpoint(mean, path.matrices.back(), tol);
}

RsResult rs_index(const GeneratedPath& gen, const Tolerances& tol) {
    return rs_index(gen, integrate(gen), tol);
}

RsResult rs_index(const GeneratedPath& gen, const SampledPath& path, const Tolerances& tol) {
    const int n = 2 * gen.m;
    const Mat J = standard_J(gen.m);
    const Mat I = Mat::Identity(n, n);
    RsResult res;

    const Mat H0 = gen.hamiltonian(0.0, +1);
    {
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (H0 + H0.transpose()), Eigen::EigenvaluesOnly);
        int sig = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double v = es.eigenvalues()(i);
            if (std::abs(v) <= tol.crossing) {
                res.crossings.push_back({0.0, n, signature(H0, tol.crossing), true});
                throw DegeneracyError("degenerate crossing at tau=0 (H_0 singular)");
            }
            sig += v > 0 ? 1 : -1;
        }
        res.crossings.push_back({0.0, n, sig, false});
        res.index += 0.5 * sig;
    }

    const size_t N = path.times.size() - 1;
    std::vector<double> s(N + 1);
    for (size_t i = 0; i <= N; ++i) s[i] = sigma_min(path.matrices[i] - I);

    auto s_at = [&](double t) { return sigma_min(phi_at(gen, path, J, t) - I); };
    std::vector<Crossing> interior;
    for (size_t i = 1; i < N; ++i) {
        if (!(s[i] < s[i - 1] && s[i] <= s[i + 1])) continue;
        const double h = path.times[i + 1] - path.times[i - 1];
        const double slope = spectral_norm(J * gen.hamiltonian(path.times[i]) * path.matrices[i]);
        if (s[i] > 4.0 * h * std::max(slope, 1.0)) continue;
        // Golden-section search for the minimum of sigma_min on the bracket.
        double a = path.times[i - 1], b = path.times[i + 1];
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = s_at(c), fd = s_at(d);
        while (b - a > kBisectTol) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = s_at(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = s_at(d);
            }
        }
        const double tau = 0.5 * (a + b);
        const Mat Phi = phi_at(gen, path, J, tau);
        const double smin = sigma_min(Phi - I);
        if (smin > 1e-7 * std::max(1.0, spectral_norm(Phi))) continue;
        if (tau > 1.0 - kMergeDist) continue;  // belongs to the endpoint check
        if (tau < kMergeDist) throw DegeneracyError("crossing at tau=" + tau_text(tau) + " merges with tau=0");
        auto f = kernel_form(Phi, gen.hamiltonian(tau), tol.crossing);
        Crossing cr{tau, std::max(f.dim, 1), f.sig, f.degenerate};
        if (f.degenerate) throw DegeneracyError("degenerate crossing at tau=" + tau_text(tau));
        interior.push_back(cr);
    }
    std::sort(interior.begin(), interior.end(), [](const Crossing& x, const Crossing& y) { return x.tau < y.tau; });
    for (size_t i = 1; i < interior.size(); ++i)
        if (interior[i].tau - interior[i - 1].tau < kMergeDist)
            throw DegeneracyError("crossings at tau=" + tau_text(interior[i - 1].tau) +
                                  " closer than 1e-8; merged and reported degenerate");
    for (const auto& c : interior) {
        res.index += c.crossing_signature;
        res.crossings.push_back(c);
    }

    const Mat& end = path.matrices.back();
    if (s[N] <= 1e-7 * std::max(1.0, spectral_norm(end))) {
        auto f = kernel_form(end, gen.hamiltonian(1.0, -1), tol.crossing);
        if (f.degenerate) throw DegeneracyError("degenerate crossing at tau=1");
        res.crossings.push_back({1.0, f.dim, f.sig, false});
        res.index += 0.5 * f.sig;
    }
    return res;
}

double auto_eps(const Mat& endpoint, double tol) {
    const auto c = eigen_classify(endpoint, tol);
    double gap = M_PI;
    for (const auto& e : c.elliptic) gap = std::min(gap, std::abs(e.theta));
    for (const auto& h : c.hyperbolic) gap = std::min(gap, std::log(h.modulus));
    const double eps = std::min(1e-3, 0.25 * gap);
    if (eps < 1e-5) throw NumericalError("spectral gap of the endpoint too small for the eps-extension");
    return eps;
}

MuPm mu_pm(const GeneratedPath& gen, double eps, const Tolerances& tol) {
    const SampledPath path = integrate(gen);
    MuPm r = mu_pm_core(rho_samples_parallel(path, tol.cluster), path.matrices.back(), eps, tol);
    try {
        r.rs = rs_index(gen, path, tol).index;
        const double g2 = 0.5 * r.kernel_dim;
        r.rs_consistent = (r.minus == *r.rs - g2) && (r.plus == *r.rs + g2);
    } catch (const NumericalError&) {
        r.rs.reset();
    }
    return r;
}

MuPm mu_pm_sampled(const SampledPath& path, double eps, const Tolerances& tol) {
    path.validate(tol.symplectic);
    return mu_pm_core(rho_samples_parallel(path, tol.cluster), path.matrices.back(), eps, tol);
}

int nullity(const SampledPath& path, double tol) {
    return eigen_classify(path.matrices.back(), tol).unit_block_dim / 2;
}

IndexReport full_report(const GeneratedPath& gen, double eps, const Tolerances& tol) {
    const SampledPath path = integrate(gen);
    IndexReport rep;
    rep.tol = tol;
    auto rhos = rho_samples_parallel(path, tol.cluster);
    rep.mean_index = mean_index_from_rho(rhos);
    rep.nullity = nullity(path, tol.cluster);
    try {
        auto rs = rs_index(gen, path, tol);
        rep.rs_index = rs.index;
        rep.crossings = rs.crossings;
    } catch (const NumericalError&) {
    }
    if (rep.nullity == 0) {
        const int cz = cz_from_endpoint(rep.mean_index, path.matrices.back(), tol.cluster);
        rep.cz_index = cz;
        rep.mu_minus = rep.mu_plus = cz;
    } else {
        auto pm = mu_pm_core(rhos, path.matrices.back(), eps, tol);
        rep.mu_minus = pm.minus;
        rep.mu_plus = pm.plus;
    }
    return rep;
}

IndexReport full_report(const SampledPath& path, const Tolerances& tol) {
    path.validate(tol.symplectic);
    IndexReport rep;
    rep.tol = tol;
    auto rhos = rho_samples_parallel(path, tol.cluster);
    rep.mean_index = mean_index_from_rho(rhos);
    rep.nullity = nullity(path, tol.cluster);
    if (rep.nullity == 0) {
        const int cz = cz_from_endpoint(rep.mean_index, path.matrices.back(), tol.cluster);
        rep.cz_index = cz;
        rep.mu_minus = rep.mu_plus = cz;
    }
    return rep;
}

GeneratedPath time_reversed_inverse(const GeneratedPath& gen) {
    GeneratedPath out;
    out.m = gen.m;
    out.steps = gen.steps;
    for (auto it = gen.samples.rbegin(); it != gen.samples.rend(); ++it) out.samples.push_back({1.0 - it->t, -it->H});
    return out;
}

SampledPath iterate_path(const SampledPath& path, int k) {
    if (k < 1) throw InputError("iterate needs k >= 1");
    SampledPath out;
    out.m = path.m;
    const Mat& A = path.matrices.back();
    Mat Ak = Mat::Identity(A.rows(), A.cols());
    for (int j = 0; j < k; ++j) {
        for (size_t i = (j == 0 ? 0 : 1); i < path.times.size(); ++i) {
            out.times.push_back((j + path.times[i]) / k);
            out.matrices.push_back(path.matrices[i] * Ak);
        }
        Ak = A * Ak;
    }
    out.times.back() = 1.0;
    return out;
}

GeneratedPath iterate_generator(const GeneratedPath& gen, int k) {
    if (k < 1) throw InputError("iterate needs k >= 1");
    GeneratedPath out;
    out.m = gen.m;
    out.steps = gen.steps * k;
    std::vector<HamiltonianSample> one = gen.samples;
    if (one.front().t > 0.0) one.insert(one.begin(), {0.0, one.front().H});
    if (one.back().t < 1.0) one.push_back({1.0, one.back().H});
    for (int j = 0; j < k; ++j)
        for (const auto& s : one) out.samples.push_back({(j + s.t) / k, static_cast<double>(k) * s.H});
    // Copies meet at j/k; keep at most two samples per time.
    std::vector<HamiltonianSample> cleaned;
    for (const auto& s : out.samples) {
        size_t same = 0;
        for (auto it = cleaned.rbegin(); it != cleaned.rend() && it->t == s.t; ++it) ++same;
        if (same >= 2) cleaned.back() = s;
        else cleaned.push_back(s);
    }
    out.samples = std::move(cleaned);
    return out;
}

}  // namespace symp
