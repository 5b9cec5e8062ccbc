#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "symp/homalg.hpp"
#include "symp/mult.hpp"
#include "symp/orbitmodel.hpp"
#include "symp/pathindex.hpp"
#include "symp/recurrence.hpp"

namespace testsupport {

using namespace symp;

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Irrational-looking value in (lo, hi), kept away from low-denominator rationals.
inline double irrational_in(std::mt19937_64& rng, double lo, double hi) {
    for (;;) {
        const double x = uniform(rng, lo, hi);
        if (std::abs(x) < 0.02) continue;
        if (rational_guard(x, 1000, 1e-4).resonant) continue;
        return x;
    }
}

inline RotationBlock random_rotation(std::mt19937_64& rng, double rational_prob, int max_q = 6) {
    if (uniform(rng, 0, 1) < rational_prob) {
        for (;;) {
            const long long q = uniform_int(rng, 2, max_q);
            long long p = uniform_int(rng, 1, static_cast<int>(q) - 1);
            if (std::gcd(p, q) != 1) continue;
            if (uniform(rng, 0, 1) < 0.5) p = -p;
            return RotationBlock::ratio(p, q);
        }
    }
    return RotationBlock::irrational(irrational_in(rng, -0.98, 0.98));
}

inline DegenerateBlock random_degenerate(std::mt19937_64& rng, int d) {
    for (;;) {
        const int u = uniform_int(rng, 1, 2 * d);
        const int s = uniform_int(rng, -u, u);
        if (std::abs(s) > 2 * d - u || (s - u) % 2 != 0) continue;
        return DegenerateBlock{d, s, u};
    }
}

struct ModelOptions {
    int max_m = 3;
    double rational_prob = 0.3;
    double degenerate_prob = 0.3;
    double hyperbolic_prob = 0.3;
    int max_loop = 2;  // loop index in [-2 max_loop, 2 max_loop]
    int max_h = 3;
};

inline OrbitModel random_model(std::mt19937_64& rng, const ModelOptions& o = {}) {
    OrbitModel m;
    const int dim = uniform_int(rng, 1, o.max_m);
    int left = dim;
    if (uniform(rng, 0, 1) < o.degenerate_prob) {
        const int d = uniform_int(rng, 1, left);
        m.degenerate = random_degenerate(rng, d);
        left -= d;
    }
    if (left > 0 && uniform(rng, 0, 1) < o.hyperbolic_prob) {
        m.hyperbolic_planes = uniform_int(rng, 1, left);
        m.hyperbolic_index = uniform_int(rng, -o.max_h, o.max_h);
        left -= m.hyperbolic_planes;
    }
    for (int i = 0; i < left; ++i) m.rotations.push_back(random_rotation(rng, o.rational_prob));
    m.loop_index = 2 * uniform_int(rng, -o.max_loop, o.max_loop);
    return m;
}

// Raise the loop until the model is dynamically convex.
inline OrbitModel make_dc(OrbitModel m) {
    const int dim = m.half_dim();
    const long long need = dim + 2 - mu_pm(m, 1).minus;
    if (need > 0) m.loop_index += 2 * ((need + 1) / 2);
    return m;
}

inline OrbitModel random_dc_model(std::mt19937_64& rng, int m) {
    for (;;) {
        ModelOptions o;
        o.max_m = m;
        OrbitModel x = random_model(rng, o);
        if (x.half_dim() != m) continue;
        return make_dc(x);
    }
}

// Random path generated by a piecewise-linear Hamiltonian.
inline GeneratedPath random_generated_path(std::mt19937_64& rng, int m, double scale, int pieces = 2) {
    GeneratedPath g;
    g.m = m;
    for (int i = 0; i <= pieces; ++i)
        g.samples.push_back({static_cast<double>(i) / pieces, random_symmetric(2 * m, scale, rng)});
    double norm = 0.0;
    for (const auto& s : g.samples) norm = std::max(norm, s.H.norm());
    g.steps = std::max(400, static_cast<int>(std::ceil(250.0 * norm)));
    return g;
}

// Heuristic number of certificates in the scan: each irrational rotation passes with
// probability 2 eps, each further model matches the 1/8 window with probability
// 1/(4 N_eff |Delta_i|), and d lands on a multiple of N with probability 1/N.
inline double expected_hits(const RecurrenceQuery& q, double e0) {
    long long neff = q.divisor;
    for (const auto& x : q.models)
        for (const auto& r : x.rotations)
            if (r.rational) neff = std::lcm(neff, r.q);
    const double eps = std::min(e0, q.eta / (2.0 * q.half_dim()));
    double p = 1.0;
    for (const auto& x : q.models)
        for (const auto& r : x.rotations)
            if (!r.rational) p *= 2.0 * eps;
    for (size_t i = 1; i < q.models.size(); ++i)
        p *= std::min(1.0, 1.0 / (4.0 * neff * std::abs(mean_index(q.models[i], 1).value())));
    if (q.d_divisible) p /= static_cast<double>(q.divisor);
    return p * static_cast<double>(q.k_max);
}

// Query shape used by the certificate suite: small denominators, at most three
// irrational rotations in total, all mean indices positive.
inline RecurrenceQuery random_recurrence_query(std::mt19937_64& rng) {
    for (;;) {
        RecurrenceQuery q;
        const int m = uniform_int(rng, 1, 3);
        const int r = uniform_int(rng, 1, 3);
        q.ell0 = uniform_int(rng, 1, 4);
        q.eta = uniform(rng, 0.2, 0.45);
        q.divisor = uniform_int(rng, 1, 2);
        int irrational = 0;
        for (int i = 0; i < r; ++i) {
            OrbitModel x;
            int left = m;
            if (uniform(rng, 0, 1) < 0.3) {
                const int d = uniform_int(rng, 1, left);
                x.degenerate = random_degenerate(rng, d);
                left -= d;
            }
            if (left > 0 && uniform(rng, 0, 1) < 0.3) {
                x.hyperbolic_planes = uniform_int(rng, 1, left);
                x.hyperbolic_index = uniform_int(rng, 0, 3);
                left -= x.hyperbolic_planes;
            }
            for (int j = 0; j < left; ++j) {
                const bool rational = irrational >= 3 || uniform(rng, 0, 1) < 0.4;
                RotationBlock b = random_rotation(rng, rational ? 1.0 : 0.0, 4);
                if (!b.rational) ++irrational;
                x.rotations.push_back(b);
            }
            x.loop_index = 2 * uniform_int(rng, 0, 2);
            x.label = "x" + std::to_string(i + 1);
            while (mean_index(x, 1).value() <= 0.1) x.loop_index += 2;
            q.models.push_back(x);
        }
        const double e0 = epsilon0(q.models, q.ell0);
        if (e0 < 0.04) continue;
        if (expected_hits(q, e0) < 20.0) continue;
        return q;
    }
}

inline std::vector<double> random_radii_sq(std::mt19937_64& rng, int n) {
    for (;;) {
        std::vector<double> r;
        for (int i = 0; i < n; ++i) r.push_back(uniform(rng, 1.0, 3.0));
        try {
            EllipsoidModel{r}.validate(true);
            ellipsoid_orbit_models(EllipsoidModel{r});
        } catch (const std::exception&) {
            continue;
        }
        return r;
    }
}

// Random filtered complex built from elementary pieces, then mixed by a filtration-preserving change of basis.
inline FilteredComplex random_filtered_complex(std::mt19937_64& rng, int max_gens = 30, int levels = 5) {
    const int target = uniform_int(rng, 1, max_gens);
    std::vector<Generator> gens;
    std::vector<std::pair<int, int>> pairs;  // (source, target)
    while (static_cast<int>(gens.size()) < target) {
        const int deg = uniform_int(rng, 0, 3);
        const int f = uniform_int(rng, 0, levels - 1);
        if (static_cast<int>(gens.size()) + 2 <= target && uniform(rng, 0, 1) < 0.6) {
            const int f2 = uniform_int(rng, 0, f);
            const int a = static_cast<int>(gens.size());
            gens.push_back({"g" + std::to_string(a), deg, f2});
            gens.push_back({"g" + std::to_string(a + 1), deg + 1, f});
            pairs.push_back({a + 1, a});
        } else {
            gens.push_back({"g" + std::to_string(gens.size()), deg, f});
        }
    }
    const int n = static_cast<int>(gens.size());
    RationalMatrix D(n, n);
    for (auto [s, t] : pairs) D(t, s) = 1;
    // T upper-triangular in the (filtration, degree) preserving sense: T_ij != 0 only if same degree and f_i <= f_j.
    RationalMatrix T = RationalMatrix::identity(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && gens[i].degree == gens[j].degree && gens[i].filtration <= gens[j].filtration && i < j &&
                uniform(rng, 0, 1) < 0.4)
                T(i, j) = mpq_class(uniform_int(rng, -3, 3), uniform_int(rng, 1, 3));
    // Conjugate: boundary in the new basis is T^{-1} D T, filtration still respected.
    FilteredComplex fc;
    fc.generators = gens;
    fc.boundary = T.inverse() * D * T;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) fc.boundary(i, j).canonicalize();
    return fc;
}

}  // namespace testsupport
