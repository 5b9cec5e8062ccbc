#pragma once

#include <optional>
#include <vector>

#include "symp/symlin.hpp"

namespace symp {

struct Tolerances {
    double symplectic = kDefaultTol;
    double cluster = kDefaultTol;
    double crossing = kDefaultTol;
};

struct SampledPath {
    int m = 1;
    std::vector<double> times;
    std::vector<Mat> matrices;

    void validate(double tol) const;
};

struct HamiltonianSample {
    double t = 0.0;
    Mat H;
};

// Phi' = J H_t Phi, Phi(0) = I. H is linear between samples; a repeated time marks a jump.
struct GeneratedPath {
    int m = 1;
    std::vector<HamiltonianSample> samples;
    int steps = 1000;

    void validate() const;
    // side < 0 takes the left limit at a jump, side > 0 the right limit.
    Mat hamiltonian(double t, int side = 0) const;
};

struct Crossing {
    double tau = 0.0;
    int kernel_dim = 0;
    int crossing_signature = 0;
    bool degenerate = false;
};

struct RsResult {
    double index = 0.0;  // half-integer
    std::vector<Crossing> crossings;
};

struct MuPm {
    int minus = 0;
    int plus = 0;
    int kernel_dim = 0;      // g = dim ker(Phi(1) - I)
    bool gap_consistent = true;  // mu_+ - mu_- == g
    std::optional<double> rs;
    bool rs_consistent = true;   // mu_pm == RS -+ g/2 when RS is available
    double eps = 0.0;
};

struct IndexReport {
    double mean_index = 0.0;
    std::optional<double> rs_index;
    std::optional<int> cz_index;
    std::optional<int> mu_plus;
    std::optional<int> mu_minus;
    int nullity = 0;
    std::vector<Crossing> crossings;
    Tolerances tol;
};

SampledPath integrate(const GeneratedPath& gen);

// rho at every sample. The parallel version splits the samples across OpenMP threads.
std::vector<cplx> rho_samples_serial(const SampledPath& path, double tol);
std::vector<cplx> rho_samples_parallel(const SampledPath& path, double tol);

double mean_index(const SampledPath& path, double tol = kDefaultTol);
double mean_index_from_rho(const std::vector<cplx>& rhos);

RsResult rs_index(const GeneratedPath& gen, const Tolerances& tol = {});
RsResult rs_index(const GeneratedPath& gen, const SampledPath& integrated, const Tolerances& tol = {});

int cz_index(const SampledPath& path, double tol = kDefaultTol);
int cz_from_endpoint(double mean, const Mat& endpoint, double tol);

// eps <= 0 picks a value from the spectral gap of Phi(1).
MuPm mu_pm(const GeneratedPath& gen, double eps = 0.0, const Tolerances& tol = {});
MuPm mu_pm_sampled(const SampledPath& path, double eps, const Tolerances& tol = {});
double auto_eps(const Mat& endpoint, double tol = kDefaultTol);

int nullity(const SampledPath& path, double tol = kDefaultTol);

IndexReport full_report(const GeneratedPath& gen, double eps = 0.0, const Tolerances& tol = {});
IndexReport full_report(const SampledPath& path, const Tolerances& tol = {});

// H'_t = -H_{1-t}; generates Phi(1-t) Phi(1)^{-1}, ending at the inverse.
GeneratedPath time_reversed_inverse(const GeneratedPath& gen);
// Phi(t_i) A^j on k consecutive copies, rescaled to [0, 1].
SampledPath iterate_path(const SampledPath& path, int k);
// Same iterate as a generator: the Hamiltonian is repeated k times and scaled by k.
GeneratedPath iterate_generator(const GeneratedPath& gen, int k);

}  // namespace symp
