#include "symp/orbitmodel.hpp"

#include <cmath>
#include <numeric>

#include "symp/errors.hpp"

namespace symp {

namespace {

long long floor_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::string label_of(const OrbitModel& m) { return m.label.empty() ? std::string("model") : m.label; }

// k > 0 only; rotations contribute 2 floor(k lambda) + 1 off resonance.
IndexPair mu_pm_positive(const OrbitModel& model, long long k) {
    IndexPair r;
    r.minus = r.plus = model.loop_index * k + model.hyperbolic_index * k;
    for (const auto& rot : model.rotations) {
        if (rot.rational) {
            if (k % rot.q == 0) {
                const long long x2 = 2 * (k / rot.q) * rot.p;
                r.minus += x2 - 1;
                r.plus += x2 + 1;
            } else {
                const long long v = 2 * floor_div(k * rot.p, rot.q) + 1;
                r.minus += v;
                r.plus += v;
            }
        } else {
            const auto s = split_multiple(rot.lambda, k);
            if (std::abs(s.dist) < kResonanceGuard)
                throw NearResonanceError(label_of(model) + ": k*lambda within 1e-12 of an integer at k=" +
                                         std::to_string(k));
            r.minus += 2 * s.floor + 1;
            r.plus += 2 * s.floor + 1;
        }
    }
    if (model.degenerate) {
        r.minus += (model.degenerate->sgn - model.degenerate->nullity) / 2;
        r.plus += (model.degenerate->sgn + model.degenerate->nullity) / 2;
    }
    return r;
}

}  // namespace

RotationBlock RotationBlock::irrational(double x) {
    RotationBlock b;
    b.rational = false;
    b.lambda = x;
    return b;
}

RotationBlock RotationBlock::ratio(long long p, long long q) {
    if (q <= 0) throw InputError("rotation denominator must be positive");
    const long long g = std::gcd(p, q);
    if (g == 0) throw InputError("rotation number must be non-zero");
    RotationBlock b;
    b.rational = true;
    b.p = p / g;
    b.q = q / g;
    b.lambda = static_cast<double>(b.p) / b.q;
    return b;
}

int OrbitModel::half_dim() const {
    return static_cast<int>(rotations.size()) + hyperbolic_planes + (degenerate ? degenerate->half_dim : 0);
}

bool OrbitModel::has_rational() const {
    for (const auto& r : rotations)
        if (r.rational) return true;
    return false;
}

int OrbitModel::irrational_count() const {
    int n = 0;
    for (const auto& r : rotations) n += !r.rational;
    return n;
}

void OrbitModel::validate() const {
    const std::string who = label_of(*this) + ": ";
    if (loop_index % 2 != 0) throw InputError(who + "loop_index must be even");
    for (const auto& r : rotations) {
        if (r.rational) {
            if (r.q <= 0 || r.p == 0 || std::abs(r.p) >= r.q || std::gcd(r.p, r.q) != 1)
                throw InputError(who + "rational rotation must be a reduced p/q with 0 < |p| < q");
        } else if (!std::isfinite(r.lambda) || r.lambda == 0.0 || std::abs(r.lambda) >= 1.0) {
            throw InputError(who + "irrational rotation must lie in (-1, 1) minus 0");
        }
    }
    if (hyperbolic_planes < 0) throw InputError(who + "hyperbolic_planes must be >= 0");
    if (hyperbolic_index != 0 && hyperbolic_planes == 0)
        throw InputError(who + "non-zero hyperbolic_index needs at least one hyperbolic plane");
    if (degenerate) {
        const auto& d = *degenerate;
        if (d.half_dim < 1) throw InputError(who + "degenerate half_dim must be >= 1");
        if (d.nullity < 0 || d.nullity > 2 * d.half_dim) throw InputError(who + "degenerate nullity out of range");
        if (std::abs(d.sgn) > 2 * d.half_dim - d.nullity)
            throw InputError(who + "degenerate block needs |sgn| <= 2 half_dim - nullity");
        // exp(JQ) unipotent forces a singular Q with |sgn| <= nullity and matching parity.
        if (d.nullity < 1 || std::abs(d.sgn) > d.nullity || (d.sgn - d.nullity) % 2 != 0)
            throw InputError(who + "degenerate block (sgn " + std::to_string(d.sgn) + ", nullity " +
                             std::to_string(d.nullity) + ") is not realizable by a totally degenerate map");
    }
    if (half_dim() < 1) throw InputError(who + "model has zero dimension");
    if (action && !(*action > 0.0)) throw InputError(who + "action must be positive");
}

MultipleSplit split_multiple(double x, long long k) {
    const double kd = static_cast<double>(k);
    const double hi = kd * x;
    const double lo = std::fma(kd, x, -hi);
    double r = std::nearbyint(hi);
    double dist = (hi - r) + lo;
    if (dist > 0.5) {
        r += 1.0;
        dist -= 1.0;
    } else if (dist < -0.5) {
        r -= 1.0;
        dist += 1.0;
    }
    MultipleSplit s;
    s.nearest = static_cast<long long>(r);
    s.dist = dist;
    s.floor = dist >= 0.0 ? s.nearest : s.nearest - 1;
    return s;
}

ExactMean mean_index(const OrbitModel& model, long long k) {
    if (k == 0) throw InputError("iterate k must be non-zero");
    ExactMean m;
    mpq_class per(static_cast<long>(model.loop_index + model.hyperbolic_index));
    double irr = 0.0;
    for (const auto& r : model.rotations) {
        if (r.rational) per += mpq_class(static_cast<long>(2 * r.p), static_cast<unsigned long>(r.q));
        else irr += 2.0 * r.lambda;
    }
    per.canonicalize();
    m.rational = per * mpq_class(static_cast<long>(k));
    m.irrational = irr * static_cast<double>(k);
    return m;
}

IndexPair mu_pm(const OrbitModel& model, long long k) {
    if (k == 0) throw InputError("iterate k must be non-zero");
    if (k > 0) return mu_pm_positive(model, k);
    const IndexPair p = mu_pm_positive(model, -k);
    return {-p.plus, -p.minus};
}

int nullity(const OrbitModel& model, long long k) {
    if (k == 0) throw InputError("iterate k must be non-zero");
    const long long a = std::llabs(k);
    int n = model.degenerate ? model.degenerate->half_dim : 0;
    for (const auto& r : model.rotations)
        if (r.rational && a % r.q == 0) ++n;
    return n;
}

long long cz_index(const OrbitModel& model, long long k) {
    if (nullity(model, k) != 0) {
        std::string why;
        const long long a = std::llabs(k);
        for (const auto& r : model.rotations)
            if (r.rational && a % r.q == 0) why += " rotation " + std::to_string(r.p) + "/" + std::to_string(r.q) + ";";
        if (model.degenerate) why += " degenerate block;";
        throw DegeneracyError(label_of(model) + ": iterate k=" + std::to_string(k) + " is degenerate:" + why);
    }
    return mu_pm(model, k).minus;
}

int b_correction(const OrbitModel& model, long long k) {
    if (k == 0) throw InputError("iterate k must be non-zero");
    return model.degenerate ? model.degenerate->sgn : 0;
}

IterIndex iter_index(const OrbitModel& model, long long k) {
    IterIndex it;
    it.k = k;
    it.mean = mean_index(model, k);
    const auto pm = mu_pm(model, k);
    it.mu_minus = pm.minus;
    it.mu_plus = pm.plus;
    it.nu = nullity(model, k);
    if (it.nu == 0) it.cz = pm.minus;
    return it;
}

bool is_dynamically_convex(const OrbitModel& model, int m) {
    if (model.half_dim() != m)
        throw InputError(label_of(model) + ": half-dimension " + std::to_string(model.half_dim()) +
                         " does not match m=" + std::to_string(m));
    return mu_pm(model, 1).minus >= m + 2;
}

DcReport verify_dc_iteration(const OrbitModel& model, int m, long long k_max) {
    if (!is_dynamically_convex(model, m))
        throw InputError(label_of(model) + ": precondition failed, model is not dynamically convex");
    DcReport rep;
    const long long step = mu_pm(model, 1).minus - m;
    long long prev = mu_pm(model, 1).minus;
    for (long long k = 1; k <= k_max; ++k) {
        const long long next = mu_pm(model, k + 1).minus;
        rep.checked = k;
        if (prev < 2 * k + m) {
            rep = {false, k, "mu_-(k) >= 2k+m", k};
            return rep;
        }
        if (next < prev + step) {
            rep = {false, k, "mu_-(k+1) >= mu_-(k) + mu_-(1) - m", k};
            return rep;
        }
        if (next <= prev) {
            rep = {false, k, "strict monotonicity", k};
            return rep;
        }
        prev = next;
    }
    return rep;
}

OrbitModel merge(const OrbitModel& a, const OrbitModel& b) {
    OrbitModel r = a;
    r.label = a.label + "+" + b.label;
    r.loop_index += b.loop_index;
    r.rotations.insert(r.rotations.end(), b.rotations.begin(), b.rotations.end());
    r.hyperbolic_index += b.hyperbolic_index;
    r.hyperbolic_planes += b.hyperbolic_planes;
    if (a.degenerate && b.degenerate) {
        r.degenerate->half_dim += b.degenerate->half_dim;
        r.degenerate->sgn += b.degenerate->sgn;
        r.degenerate->nullity += b.degenerate->nullity;
    } else if (!a.degenerate) {
        r.degenerate = b.degenerate;
    }
    return r;
}

Mat degenerate_form(const DegenerateBlock& b) {
    const int d = b.half_dim;
    const int s = std::abs(b.sgn);
    const int zero_chains = (b.nullity - s) / 2;
    const int blocks = s + zero_chains;
    Mat Q = Mat::Zero(2 * d, 2 * d);
    int plane = 0;
    for (int i = 0; i < blocks; ++i) {
        const int len = 1 + (i == 0 ? d - blocks : 0);
        // p_j q_{j+1} links along the chain; a signed p^2/2 caps a Q+- block.
        for (int j = 0; j + 1 < len; ++j) {
            const int p = 2 * (plane + j), q = 2 * (plane + j + 1) + 1;
            Q(p, q) = Q(q, p) = 1.0;
        }
        if (i < s) Q(2 * (plane + len - 1), 2 * (plane + len - 1)) = b.sgn > 0 ? 1.0 : -1.0;
        plane += len;
    }
    return Q;
}

GeneratedPath model_to_path(const OrbitModel& model, int steps) {
    model.validate();
    const int m = model.half_dim();
    const int n = 2 * m;
    const double w = static_cast<double>(model.loop_index) / 2.0;
    const Mat I2 = Mat::Identity(2, 2);
    Mat X(2, 2);
    X << 0.0, 1.0, 1.0, 0.0;
    const double a = 1.0;  // hyperbolic stretch rate

    Mat Hconst = Mat::Zero(n, n);
    int plane = 0;
    for (size_t i = 0; i < model.rotations.size(); ++i, ++plane) {
        const double lam = model.rotations[i].value() + (i == 0 ? w : 0.0);
        Hconst.block(2 * plane, 2 * plane, 2, 2) = 2.0 * M_PI * lam * I2;
    }
    const int hyp_first = plane;
    // Plane hyp_first carries R(theta t) diag(e^{at}, e^{-at}); theta is added below.
    double theta = 0.0;
    if (model.hyperbolic_planes > 0) {
        theta = M_PI * static_cast<double>(model.hyperbolic_index + (model.rotations.empty() ? model.loop_index : 0));
        for (int j = 0; j < model.hyperbolic_planes; ++j, ++plane)
            Hconst.block(2 * plane, 2 * plane, 2, 2) = -a * X;
    }
    const int deg_first = plane;
    if (model.degenerate) Hconst.block(2 * plane, 2 * plane, 2 * model.degenerate->half_dim, 2 * model.degenerate->half_dim) =
        degenerate_form(*model.degenerate);

    const bool split = model.rotations.empty() && model.hyperbolic_planes == 0 && model.loop_index != 0;
    GeneratedPath g;
    g.m = m;
    g.steps = std::max(steps, 1);

    double omega = Hconst.norm() + std::abs(theta) + (split ? 4.0 * M_PI * std::abs(w) : 0.0);
    g.steps = std::max(g.steps, static_cast<int>(std::ceil(250.0 * omega)));

    if (split) {
        // First half winds the loop on one plane, second half runs exp(J Q t) at double speed.
        Mat H1 = Mat::Zero(n, n);
        H1.block(2 * deg_first, 2 * deg_first, 2, 2) = 4.0 * M_PI * w * I2;
        g.samples = {{0.0, H1}, {0.5, H1}, {0.5, 2.0 * Hconst}, {1.0, 2.0 * Hconst}};
        return g;
    }
    if (theta == 0.0) {
        g.samples = {{0.0, Hconst}, {1.0, Hconst}};
        return g;
    }
    const int S = g.steps;
    for (int i = 0; i <= S; ++i) {
        const double t = static_cast<double>(i) / S;
        Mat R(2, 2);
        R << std::cos(theta * t), -std::sin(theta * t), std::sin(theta * t), std::cos(theta * t);
        Mat H = Hconst;
        H.block(2 * hyp_first, 2 * hyp_first, 2, 2) = theta * I2 - a * R * X * R.transpose();
        g.samples.push_back({t, H});
    }
    return g;
}

}  // namespace symp
