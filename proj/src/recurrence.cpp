#include "symp/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "symp/errors.hpp"

namespace symp {

namespace {

constexpr double kMatchBound = 1.0 / 8.0;
constexpr long long kChunk = 1 << 15;

struct ScanSetup {
    std::vector<double> delta;  // mean index per period
    std::vector<bool> zero;
    long long neff = 1;
    double eps = 0.0;
    int ref = 0;
    bool all_zero = false;
};

ScanSetup setup(const RecurrenceQuery& q) {
    q.validate();
    ScanSetup s;
    s.neff = q.divisor;
    for (const auto& m : q.models)
        for (const auto& r : m.rotations)
            if (r.rational) s.neff = std::lcm(s.neff, r.q);
    const double e0 = epsilon0(q.models, q.ell0);
    s.eps = std::min(e0, q.eta / (2.0 * q.half_dim()));
    s.all_zero = true;
    s.ref = -1;
    for (size_t i = 0; i < q.models.size(); ++i) {
        const double dl = mean_index(q.models[i], 1).value();
        s.delta.push_back(dl);
        s.zero.push_back(std::abs(dl) < 1e-12);
        if (!s.zero.back()) {
            s.all_zero = false;
            if (s.ref < 0) s.ref = static_cast<int>(i);
        }
    }
    if (s.ref < 0) s.ref = 0;
    return s;
}

double residual(const OrbitModel& m, long long k) {
    double r = 0.0;
    for (const auto& rot : m.rotations)
        if (!rot.rational) r = std::max(r, std::abs(split_multiple(rot.lambda, k).dist));
    return r;
}

bool irrationals_close(const OrbitModel& m, long long k, double eps) {
    for (const auto& rot : m.rotations) {
        if (rot.rational) continue;
        const auto s = split_multiple(rot.lambda, k);
        if (!(std::abs(s.dist) < eps)) return false;
        if (std::abs(s.dist) < kResonanceGuard)
            throw NearResonanceError("k*lambda within 1e-12 of an integer at k=" + std::to_string(k));
    }
    return true;
}

// Stateless test of one scan position; the d-repeat filter is applied by the caller in order.
std::optional<RecurrenceCertificate> candidate(const RecurrenceQuery& q, const ScanSetup& s, long long t) {
    const size_t r = q.models.size();
    const long long kref = s.neff * t;
    if (!irrationals_close(q.models[s.ref], kref, s.eps)) return std::nullopt;
    const double x = static_cast<double>(kref) * s.delta[s.ref];
    std::vector<long long> k(r);
    for (size_t i = 0; i < r; ++i) {
        if (static_cast<int>(i) == s.ref || s.zero[i]) {
            k[i] = kref;
        } else {
            const double ratio = x / (static_cast<double>(s.neff) * s.delta[i]);
            k[i] = s.neff * std::llround(ratio);
            if (k[i] <= 0) return std::nullopt;
            if (!(std::abs(x - static_cast<double>(k[i]) * s.delta[i]) < kMatchBound)) return std::nullopt;
            if (!irrationals_close(q.models[i], k[i], s.eps)) return std::nullopt;
        }
        if (k[i] <= q.ell0) return std::nullopt;
    }
    const long long d = std::llround(x);
    if (q.d_divisible && d % q.divisor != 0) return std::nullopt;
    RecurrenceCertificate c;
    c.d = d;
    c.k = k;
    c.epsilon_used = s.eps;
    c.eta = q.eta;
    for (size_t i = 0; i < r; ++i) {
        const auto mean = mean_index(q.models[i], k[i]);
        const mpq_class diff = mean.rational - mpq_class(static_cast<long>(d));
        const double gap = std::abs(diff.get_d() + mean.irrational);
        if (!(gap < q.eta)) return std::nullopt;
        c.mean_gaps.push_back(gap);
        c.residuals.push_back(residual(q.models[i], k[i]));
    }
    return c;
}

bool accept_in_order(SearchResult& res, RecurrenceCertificate&& c) {
    if (!res.bounded_d && !res.certificates.empty() && res.certificates.back().d == c.d) return false;
    res.certificates.push_back(std::move(c));
    return true;
}

SearchResult finish(SearchResult res, const RecurrenceQuery& q) {
    res.exhausted = static_cast<int>(res.certificates.size()) < q.count;
    return res;
}

}  // namespace

int RecurrenceQuery::half_dim() const { return models.empty() ? 0 : models.front().half_dim(); }

void RecurrenceQuery::validate() const {
    if (models.empty()) throw InputError("recurrence query needs at least one model");
    for (const auto& m : models) {
        m.validate();
        if (m.half_dim() != half_dim()) throw InputError("all models must share the same half-dimension");
    }
    if (ell0 < 1) throw InputError("ell0 must be >= 1");
    if (!(eta > 0.0 && eta < 0.5)) throw InputError("eta must lie in (0, 1/2)");
    if (divisor < 1) throw InputError("divisor must be >= 1");
    if (k_max < 1) throw InputError("k_max must be >= 1");
    if (count < 1) throw InputError("count must be >= 1");
}

double epsilon0(const std::vector<OrbitModel>& models, int ell0) {
    double e = std::numeric_limits<double>::infinity();
    for (const auto& m : models)
        for (const auto& r : m.rotations) {
            if (r.rational) continue;
            for (int l = 1; l <= ell0; ++l) {
                const double d = std::abs(split_multiple(r.lambda, l).dist);
                if (d < kResonanceGuard)
                    throw NearResonanceError("lambda=" + std::to_string(r.lambda) + " is within 1e-12 of a rational with denominator " +
                                             std::to_string(l));
                e = std::min(e, d);
            }
        }
    return e;
}

SearchResult find_recurrence_serial(const RecurrenceQuery& q) {
    const ScanSetup s = setup(q);
    SearchResult res;
    res.effective_divisor = s.neff;
    res.epsilon = s.eps;
    res.reference = s.ref;
    res.bounded_d = s.all_zero;
    for (long long t = 1; t <= q.k_max; ++t) {
        res.scanned = t;
        auto c = candidate(q, s, t);
        if (c && accept_in_order(res, std::move(*c)) && static_cast<int>(res.certificates.size()) >= q.count) break;
    }
    return finish(std::move(res), q);
}

SearchResult find_recurrence_parallel(const RecurrenceQuery& q) {
    const ScanSetup s = setup(q);
    SearchResult res;
    res.effective_divisor = s.neff;
    res.epsilon = s.eps;
    res.reference = s.ref;
    res.bounded_d = s.all_zero;
    for (long long base = 1; base <= q.k_max; base += kChunk) {
        const long long n = std::min(kChunk, q.k_max - base + 1);
        std::vector<std::optional<RecurrenceCertificate>> hits(n);
        long long err_at = -1;
        std::string err_msg;
#pragma omp parallel for schedule(dynamic, 1024)
        for (long long j = 0; j < n; ++j) {
            try {
                hits[j] = candidate(q, s, base + j);
            } catch (const std::exception& e) {
#pragma omp critical
                if (err_at < 0 || j < err_at) {
                    err_at = j;
                    err_msg = e.what();
                }
            }
        }
        for (long long j = 0; j < n; ++j) {
            res.scanned = base + j;
            if (j == err_at) throw NearResonanceError(err_msg);
            if (hits[j] && accept_in_order(res, std::move(*hits[j])) &&
                static_cast<int>(res.certificates.size()) >= q.count)
                return finish(std::move(res), q);
        }
    }
    return finish(std::move(res), q);
}

VerificationReport verify_certificate(const RecurrenceCertificate& cert, const std::vector<OrbitModel>& models,
                                      int ell0, long long divisor, bool d_divisible, BackwardRule rule) {
    if (cert.k.size() != models.size()) throw InputError("certificate has " + std::to_string(cert.k.size()) +
                                                         " iterates for " + std::to_string(models.size()) + " models");
    for (size_t i = 0; i < models.size(); ++i)
        if (cert.k[i] - ell0 <= 0)
            throw InputError("certificate too early: k_" + std::to_string(i) + " - ell0 <= 0");
    VerificationReport rep;
    auto add = [&rep](CheckLine l) {
        if (!l.pass) {
            rep.ok = false;
            ++rep.failures;
        }
        rep.lines.push_back(std::move(l));
    };
    const double d = static_cast<double>(cert.d);
    for (size_t i = 0; i < models.size(); ++i) {
        const auto& M = models[i];
        const long long k = cert.k[i];
        const int mi = static_cast<int>(i);
        const auto mean = mean_index(M, k);
        const double gap = std::abs(mpq_class(mean.rational - mpq_class(static_cast<long>(cert.d))).get_d() + mean.irrational);
        add({"i", mi, 0, "", gap, cert.eta, gap < cert.eta});
        if (k % divisor != 0) add({"divisor", mi, 0, "k", double(k), double(divisor), false});
        for (int l = 1; l <= ell0; ++l) {
            const auto fwd = mu_pm(M, k + l);
            const auto base = mu_pm(M, l);
            add({"ii", mi, l, "-", double(fwd.minus), d + base.minus, fwd.minus == cert.d + base.minus});
            add({"ii", mi, l, "+", double(fwd.plus), d + base.plus, fwd.plus == cert.d + base.plus});
            const auto back = mu_pm(M, k - l);
            const auto inv = mu_pm(M, -l);  // (-mu_+(l), -mu_-(l))
            const long long b = b_correction(M, l);
            const long long rhs_plus = cert.d + inv.plus + b;
            const long long rhs_minus = cert.d + inv.minus + (rule == BackwardRule::Corrected ? b : -b);
            add({"iii", mi, l, "+", double(back.plus), double(rhs_plus), back.plus == rhs_plus});
            add({"iii", mi, l, "-", double(back.minus), double(rhs_minus), back.minus == rhs_minus});
            const long long bound = cert.d - base.minus + nullity(M, l);
            add({"mu+ bound", mi, l, "", double(back.plus), double(bound), back.plus <= bound});
        }
    }
    if (d_divisible && cert.d % divisor != 0) add({"divisor", -1, 0, "d", d, double(divisor), false});
    return rep;
}

JumpReport jump_intervals(const RecurrenceCertificate& cert, const std::vector<OrbitModel>& models, int ell0,
                          JumpMode mode) {
    if (models.empty()) throw InputError("no models");
    if (cert.k.size() != models.size()) throw InputError("certificate does not match the model list");
    const int m = models.front().half_dim();
    for (const auto& M : models) {
        if (!is_dynamically_convex(M, m))
            throw InputError((M.label.empty() ? std::string("model") : M.label) +
                             ": precondition failed, model is not dynamically convex");
        if (mode == JumpMode::StronglyNondegenerate && (M.degenerate || M.has_rational()))
            throw InputError((M.label.empty() ? std::string("model") : M.label) +
                             ": strongly non-degenerate mode needs every iterate non-degenerate");
    }
    JumpReport rep;
    rep.interval.mode = mode;
    rep.interval.hi = cert.d + m + 1;
    rep.interval.lo = mode == JumpMode::General ? cert.d - 1 : cert.d - m - 1;
    for (size_t i = 0; i < models.size(); ++i) {
        for (int l = 1; l <= ell0; ++l) {
            for (int side : {-1, +1}) {
                const long long k = cert.k[i] + side * l;
                if (k <= 0) throw InputError("certificate too early for ell0");
                const auto pm = mu_pm(models[i], k);
                JumpEntry e{static_cast<int>(i), l, side, pm.minus, pm.plus,
                            pm.plus < rep.interval.lo || pm.minus > rep.interval.hi};
                rep.disjoint = rep.disjoint && e.disjoint;
                rep.entries.push_back(e);
            }
        }
    }
    return rep;
}

}  // namespace symp
