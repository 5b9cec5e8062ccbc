#include "symp/mult.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "symp/errors.hpp"

namespace symp {

namespace {

long long ceil_half(long long n) { return (n + 1) / 2; }
bool odd(long long x) { return x % 2 != 0; }

}  // namespace

void ContactSetting::validate() const {
    if (kind == Manifold::Sphere) {
        if (n < 2) throw InputError("sphere setting needs n >= 2");
        if (q < 1 || q > n + 1) throw InputError("sphere setting needs 0 < q <= n+1, got q=" + std::to_string(q));
    } else {
        if (n < 3) throw InputError("ST*S^n setting needs n >= 3");
        if (q < 1 || q > n - 1) throw InputError("ST*S^n setting needs 0 < q <= n-1, got q=" + std::to_string(q));
    }
}

MultiplicityBound lower_bound(const ContactSetting& s) {
    s.validate();
    MultiplicityBound b;
    const long long n = s.n, q = s.q;
    if (s.kind == Manifold::Sphere) {
        if (q == n + 1) {
            b.theorem = "sphere-dynamically-convex";
            if (s.nondegenerate) {
                b.r = n;
                b.rule = "r = n";
            } else {
                b.r = ceil_half(n) + 1;
                b.rule = "r = ceil(n/2) + 1";
            }
        } else {
            b.theorem = "sphere-index-bound";
            if (s.nondegenerate) {
                const bool same = (n - q) % 2 == 0;
                b.r = same ? q + 1 : q;
                b.rule = same ? "r = q + 1 (n, q same parity)" : "r = q (n, q opposite parity)";
            } else {
                const bool both_odd = odd(n) && odd(q);
                b.r = both_odd ? q - ceil_half(n) : q + 1 - ceil_half(n);
                b.rule = both_odd ? "r = q - ceil(n/2) (n, q odd)" : "r = q + 1 - ceil(n/2)";
            }
        }
    } else {
        if (q == n - 1) {
            b.theorem = "stsn-index-bound";
            if (s.nondegenerate) {
                b.r = odd(n) ? n + 1 : n;
                b.rule = odd(n) ? "r = n + 1 (n odd)" : "r = n (n even)";
            } else {
                b.r = n / 2 - 1;
                b.rule = "r = floor(n/2) - 1";
            }
        } else {
            b.theorem = "stsn-weak-index-bound";
            if (s.nondegenerate) {
                const bool plus = odd(n) || !odd(q);
                b.r = plus ? q + 1 : q;
                b.rule = plus ? "r = q + 1 (n odd, or n and q even)" : "r = q (n even, q odd)";
            } else {
                const bool both_odd = odd(n) && odd(q);
                b.r = both_odd ? q - ceil_half(n) : q + 1 - ceil_half(n);
                b.rule = both_odd ? "r = q - ceil(n/2) (n, q odd)" : "r = q + 1 - ceil(n/2)";
            }
        }
    }
    b.vacuous = b.r <= 0;
    return b;
}

ResonanceGuard rational_guard(double x, long long q_max, double tol) {
    // Best approximations of the second kind are continued-fraction convergents.
    ResonanceGuard g;
    g.dist = std::numeric_limits<double>::infinity();
    long double a = x;
    long long p0 = 1, q0 = 0, p1 = static_cast<long long>(std::floor(a)), q1 = 1;
    long double frac = a - std::floor(a);
    for (int it = 0; it < 64; ++it) {
        const double d = std::abs(static_cast<double>(q1) * x - static_cast<double>(p1));
        if (d < g.dist) {
            g.dist = d;
            g.p = p1;
            g.q = q1;
        }
        if (d <= tol) break;
        if (frac < 1e-18L) break;
        const long double inv = 1.0L / frac;
        const long long ai = static_cast<long long>(std::floor(inv));
        frac = inv - ai;
        if (ai > q_max) break;
        const long long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
        if (q2 > q_max) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    g.resonant = g.dist <= tol;
    return g;
}

void EllipsoidModel::validate(bool isolated) const {
    if (radii_sq.empty()) throw InputError("ellipsoid needs at least one radius");
    for (double r : radii_sq)
        if (!(r > 0.0) || !std::isfinite(r)) throw InputError("squared radii must be positive and finite");
    if (!isolated) return;
    for (size_t i = 0; i < radii_sq.size(); ++i)
        for (size_t j = i + 1; j < radii_sq.size(); ++j) {
            const auto g = rational_guard(radii_sq[i] / radii_sq[j]);
            if (g.resonant)
                throw InputError("resonant radii: r" + std::to_string(i + 1) + "^2/r" + std::to_string(j + 1) +
                                 "^2 is within 1e-9 of " + std::to_string(g.p) + "/" + std::to_string(g.q));
        }
}

double EllipsoidModel::chat() const {
    double s = 0.0;
    for (double r : radii_sq) s += 1.0 / r;
    return M_PI / (2.0 * s);
}

std::vector<OrbitModel> ellipsoid_orbit_models(const EllipsoidModel& e) {
    e.validate(true);
    std::vector<OrbitModel> out;
    double inv_sum = 0.0;
    for (double r : e.radii_sq) inv_sum += 1.0 / r;
    for (int i = 0; i < e.n(); ++i) {
        OrbitModel m;
        m.label = "x" + std::to_string(i + 1);
        m.action = M_PI * e.radii_sq[i];
        long long loops = 1;
        for (int j = 0; j < e.n(); ++j) {
            if (j == i) continue;
            const double ratio = e.radii_sq[i] / e.radii_sq[j];
            const double fl = std::floor(ratio);
            loops += static_cast<long long>(fl);
            m.rotations.push_back(RotationBlock::irrational(ratio - fl));
        }
        m.loop_index = 2 * loops;
        const double expect = 2.0 * e.radii_sq[i] * inv_sum;
        const double got = mean_index(m, 1).value();
        if (std::abs(got - expect) > 1e-10 * std::max(1.0, std::abs(expect)))
            throw VerificationError("ellipsoid model " + m.label + " mean index " + std::to_string(got) +
                                    " does not reproduce 2 r_i^2 sum r_j^-2 = " + std::to_string(expect));
        out.push_back(std::move(m));
    }
    return out;
}

SpectralInvariantSequence ellipsoid_spectral_invariants(const EllipsoidModel& e, long long count) {
    e.validate(false);
    if (count < 1) throw InputError("count must be >= 1");
    using Item = std::pair<double, std::pair<int, long long>>;
    auto cmp = [](const Item& a, const Item& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second > b.second;
    };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
    for (int i = 0; i < e.n(); ++i) pq.push({M_PI * e.radii_sq[i], {i, 1}});
    SpectralInvariantSequence s;
    s.values.reserve(count);
    s.carriers.reserve(count);
    while (static_cast<long long>(s.values.size()) < count) {
        const auto [v, ik] = pq.top();
        pq.pop();
        s.values.push_back(v);
        s.carriers.push_back({ik.first, ik.second});
        pq.push({M_PI * e.radii_sq[ik.first] * static_cast<double>(ik.second + 1), {ik.first, ik.second + 1}});
    }
    return s;
}

CarrierReport verify_carrier_indices(const EllipsoidModel& e, long long count) {
    const auto models = ellipsoid_orbit_models(e);
    const auto seq = ellipsoid_spectral_invariants(e, count);
    const long long n = e.n();
    CarrierReport rep;
    for (long long k = 1; k <= count; ++k) {
        const Carrier c = seq.carriers[k - 1];
        const auto& m = models[c.orbit];
        CarrierCheck chk;
        chk.k = k;
        chk.carrier = c;
        chk.cz = cz_index(m, c.iterate);
        chk.mean = mean_index(m, c.iterate).value();
        const long long deg = n + 2 * k - 1;
        chk.index_ok = chk.cz == deg;
        chk.mean_ok = std::abs(chk.mean - static_cast<double>(deg)) <= static_cast<double>(n - 1) + 1e-9;
        rep.ok = rep.ok && chk.index_ok && chk.mean_ok;
        rep.checks.push_back(chk);
    }
    return rep;
}

ResonanceReport resonance_check(const std::vector<OrbitModel>& models, double tol) {
    ResonanceReport rep;
    for (const auto& m : models) {
        if (!m.action) throw InputError("resonance check needs an action on every model");
        const double mu = mean_index(m, 1).value();
        if (mu == 0.0) {
            rep.chat.push_back(std::numeric_limits<double>::infinity());
            rep.infinite.push_back(true);
        } else {
            rep.chat.push_back(*m.action / mu);
            rep.infinite.push_back(false);
        }
    }
    for (size_t i = 0; i < rep.chat.size(); ++i)
        for (size_t j = i + 1; j < rep.chat.size(); ++j) {
            if (rep.infinite[i] || rep.infinite[j]) {
                if (rep.infinite[i] != rep.infinite[j]) {
                    rep.max_deviation = std::numeric_limits<double>::infinity();
                }
                continue;
            }
            rep.max_deviation = std::max(rep.max_deviation, std::abs(rep.chat[i] - rep.chat[j]));
        }
    rep.pass = rep.max_deviation <= tol;
    return rep;
}

LimitReport chat_limit_check(const EllipsoidModel& e, long long count) {
    const auto seq = ellipsoid_spectral_invariants(e, count);
    LimitReport r;
    r.count = count;
    r.degree = e.n() + 2 * count - 1;
    r.value = seq.values.back() / static_cast<double>(r.degree);
    r.limit = e.chat();
    r.deviation = std::abs(r.value - r.limit);
    return r;
}

MultiplicityBound mult_witness(const std::vector<OrbitModel>& models, const ContactSetting& s, const WitnessParams& p) {
    MultiplicityBound b = lower_bound(s);
    if (models.empty()) throw InputError("witness needs at least one orbit model");
    const int m = s.n - 1;
    for (const auto& M : models) {
        M.validate();
        const std::string name = M.label.empty() ? std::string("model") : M.label;
        if (M.half_dim() != m)
            throw InputError(name + ": half-dimension " + std::to_string(M.half_dim()) + " but the setting needs " +
                             std::to_string(m));
        for (int k = 1; k <= p.precondition_iterates; ++k)
            if (mu_pm(M, k).minus < s.q)
                throw InputError(name + ": precondition failed, mu_- of iterate " + std::to_string(k) + " is below q=" +
                                 std::to_string(s.q));
        if (s.nondegenerate && (M.degenerate || M.has_rational()))
            throw InputError(name + ": setting is non-degenerate but the model has degenerate iterates");
    }

    RecurrenceQuery rq;
    rq.models = models;
    rq.ell0 = p.ell0;
    rq.eta = p.eta;
    rq.divisor = 2;
    rq.k_max = p.k_max;
    rq.count = 1;
    rq.d_divisible = true;
    const SearchResult sr = find_recurrence(rq);
    if (sr.certificates.empty()) {
        b.witness_note = "recurrence search exhausted after " + std::to_string(sr.scanned) + " candidates; formula value only";
        return b;
    }

    MultiplicityWitness w;
    w.certificate = sr.certificates.front();
    const long long d = w.certificate.d;
    const long long n = s.n, q = s.q;
    if (s.nondegenerate) {
        w.lo = d - q + 1;
        w.hi = d + q - 1;
    } else {
        w.lo = d - q + n;
        w.hi = d + q - 1;
    }
    const long long parity = s.kind == Manifold::Sphere ? (n + 1) % 2 : (n - 1) % 2;
    std::vector<IndexPair> windows;
    for (size_t i = 0; i < models.size(); ++i) {
        windows.push_back(mu_pm(models[i], w.certificate.k[i]));
        w.even_iterates = w.even_iterates && w.certificate.k[i] % 2 == 0;
    }
    for (long long deg = w.lo; deg <= w.hi; ++deg) {
        if (((deg % 2) + 2) % 2 != parity) continue;
        WitnessDegree wd;
        wd.degree = deg;
        if (s.kind == Manifold::Sphere) {
            wd.weight = deg >= n + 1 ? 1 : 0;
        } else {
            wd.weight = deg > std::numeric_limits<int>::max() ? 1 : stsn_dim(s.n, static_cast<int>(deg));
        }
        if (wd.weight == 0) continue;
        for (size_t i = 0; i < models.size(); ++i)
            if (windows[i].minus <= deg && deg <= windows[i].plus)
                wd.carriers.push_back({static_cast<int>(i), w.certificate.k[i]});
        w.complete = w.complete && !wd.carriers.empty();
        ++w.count;
        w.weighted += wd.weight;
        w.degrees.push_back(std::move(wd));
    }

    const long long have = s.nondegenerate ? w.weighted : w.count;
    if (have >= b.r) {
        w.status = "consistent";
    } else if (!s.nondegenerate && s.dynamically_convex() && odd(n) && have == b.r - 1) {
        w.status = "sdm_branch";
    } else if (s.nondegenerate && s.kind == Manifold::Stsn && q == n - 1 && have >= b.r - 2) {
        w.status = "extra_two_orbits";
    } else if (s.nondegenerate && !s.dynamically_convex() && have >= b.r - 1) {
        w.status = "extra_orbit";
    } else if (!s.nondegenerate && !s.dynamically_convex()) {
        w.status = "formula_exceeds_interval_count";
    } else {
        w.status = "inconsistent";
    }
    if (s.dynamically_convex()) {
        bool dc = true;
        for (const auto& M : models) dc = dc && is_dynamically_convex(M, m);
        if (dc)
            w.jump = jump_intervals(w.certificate, models, p.ell0,
                                    s.nondegenerate ? JumpMode::StronglyNondegenerate : JumpMode::General);
    }
    b.witness = std::move(w);
    return b;
}

}  // namespace symp
