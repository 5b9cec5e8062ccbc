#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "symp/pathindex.hpp"

namespace symp {

struct RotationBlock {
    bool rational = false;
    long long p = 0;  // rational: reduced p/q with 0 < |p| < q
    long long q = 1;
    double lambda = 0.0;  // irrational value, or p/q as a double

    static RotationBlock irrational(double x);
    static RotationBlock ratio(long long p, long long q);
    double value() const { return rational ? static_cast<double>(p) / q : lambda; }
};

struct DegenerateBlock {
    int half_dim = 1;
    int sgn = 0;
    int nullity = 1;
};

struct OrbitModel {
    std::string label;
    long long loop_index = 0;  // 2w
    std::vector<RotationBlock> rotations;
    long long hyperbolic_index = 0;
    int hyperbolic_planes = 0;
    std::optional<DegenerateBlock> degenerate;
    std::optional<double> action;

    int half_dim() const;
    void validate() const;
    bool has_rational() const;
    int irrational_count() const;
};

// Rational part kept exactly; the irrational rotations add a double.
struct ExactMean {
    mpq_class rational;
    double irrational = 0.0;
    double value() const { return rational.get_d() + irrational; }
};

struct IndexPair {
    long long minus = 0;
    long long plus = 0;
    bool operator==(const IndexPair&) const = default;
};

struct IterIndex {
    long long k = 1;
    ExactMean mean;
    long long mu_minus = 0;
    long long mu_plus = 0;
    int nu = 0;
    std::optional<long long> cz;
};

// floor(k x) and the distance of k x to the nearest integer, using an exact two-product.
struct MultipleSplit {
    long long floor = 0;
    long long nearest = 0;
    double dist = 0.0;  // signed: k x - nearest
};
MultipleSplit split_multiple(double x, long long k);
inline constexpr double kResonanceGuard = 1e-12;

ExactMean mean_index(const OrbitModel& model, long long k);
IndexPair mu_pm(const OrbitModel& model, long long k);
long long cz_index(const OrbitModel& model, long long k);
int nullity(const OrbitModel& model, long long k);
int b_correction(const OrbitModel& model, long long k);
IterIndex iter_index(const OrbitModel& model, long long k);

bool is_dynamically_convex(const OrbitModel& model, int m);

struct DcReport {
    bool ok = true;
    long long first_violation = 0;
    std::string rule;  // which inequality failed
    long long checked = 0;
};
DcReport verify_dc_iteration(const OrbitModel& model, int m, long long k_max);

// Direct sum of two models (loops add, blocks concatenate).
OrbitModel merge(const OrbitModel& a, const OrbitModel& b);

// The step count is raised when the generator is stiff enough to need it.
GeneratedPath model_to_path(const OrbitModel& model, int steps);
// Symmetric matrix of the degenerate block's quadratic form (one realization).
Mat degenerate_form(const DegenerateBlock& b);

}  // namespace symp
