#include "symp/shdim.hpp"

#include <regex>

#include "symp/errors.hpp"

namespace symp {

namespace {

void check_range(int lo, int hi) {
    if (lo > hi) throw InputError("empty degree range " + std::to_string(lo) + ".." + std::to_string(hi));
}

void check_stsn(int n) {
    if (n < 3) throw InputError("ST*S^n tables need n >= 3, got n=" + std::to_string(n));
}

}  // namespace

std::map<int, int> grassmannian_dims(int n) {
    if (n < 2) throw InputError("Grassmannian needs n >= 2");
    std::map<int, int> d;
    for (int k = 0; k <= 2 * n - 2; k += 2) d[k] = 1;
    if ((n - 1) % 2 == 0) d[n - 1] += 1;
    return d;
}

ShTable sphere_sh_dims(int n, int lo, int hi) {
    if (n < 2) throw InputError("sphere tables need n >= 2");
    check_range(lo, hi);
    ShTable t{Manifold::Sphere, n, lo, hi, {}};
    for (int k = lo; k <= hi; ++k) t.dims[k] = (k >= n + 1 && (k - n - 1) % 2 == 0) ? 1 : 0;
    return t;
}

int stsn_dim(int n, int k) {
    check_stsn(n);
    const int m = n - 1;
    if (k < m) return 0;
    if (((k - m) % 2 + 2) % 2 != 0) return 0;
    if (k % m == 0) {
        const int j = k / m;
        if (j > 1 && (n % 2 == 1 || j % 2 == 1)) return 2;
    }
    return 1;
}

ShTable stsn_sh_dims_cases(int n, int lo, int hi) {
    check_stsn(n);
    check_range(lo, hi);
    ShTable t{Manifold::Stsn, n, lo, hi, {}};
    for (int k = lo; k <= hi; ++k) t.dims[k] = stsn_dim(n, k);
    return t;
}

ShTable stsn_sh_dims_morsebott(int n, int lo, int hi) {
    check_stsn(n);
    check_range(lo, hi);
    ShTable t{Manifold::Stsn, n, lo, hi, {}};
    for (int k = lo; k <= hi; ++k) t.dims[k] = 0;
    const auto gr = grassmannian_dims(n);
    for (int j = 1; (2 * j - 1) * (n - 1) <= hi; ++j) {
        const int shift = (2 * j - 1) * (n - 1);
        for (const auto& [deg, dim] : gr) {
            const int k = deg + shift;
            if (k >= lo && k <= hi) t.dims[k] += dim;
        }
    }
    return t;
}

DChain d_chain_sphere(int n, int k_max) {
    if (n < 2) throw InputError("sphere chains need n >= 2");
    DChain c;
    for (int k = 1; k <= k_max; ++k) c.degrees.push_back(n + 2 * k - 1);
    return c;
}

DChain d_chain_stsn(int n, int j) {
    check_stsn(n);
    if (j < 1) throw InputError("band index j must be >= 1");
    DChain c;
    for (int i = 0; i < n; ++i) c.degrees.push_back(2 * i + (2 * j - 1) * (n - 1));
    return c;
}

std::pair<int, int> parse_range(const std::string& s) {
    static const std::regex re(R"(^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$)");
    std::smatch m;
    if (!std::regex_match(s, m, re)) throw InputError("range must look like a..b, got '" + s + "'");
    const int a = std::stoi(m[1]), b = std::stoi(m[2]);
    check_range(a, b);
    return {a, b};
}

}  // namespace symp
