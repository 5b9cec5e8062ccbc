#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "symp/errors.hpp"
#include "symp/homalg.hpp"

using namespace symp;
using namespace testsupport;

namespace {

FilteredComplex acyclic_pair() {
    FilteredComplex fc;
    fc.generators = {{"a", 0, 0}, {"b", 1, 1}};
    fc.boundary = RationalMatrix(2, 2);
    fc.boundary(0, 1) = 1;
    return fc;
}

FilteredComplex zero_complex() {
    FilteredComplex fc;
    fc.generators = {{"x", 0, 0}, {"y", 1, 1}, {"z", 1, 2}};
    fc.boundary = RationalMatrix(3, 3);
    return fc;
}

std::map<int, int> by_degree(const std::map<Bidegree, int>& m) {
    std::map<int, int> out;
    for (auto [bd, d] : m)
        if (d) out[bd.second] += d;
    return out;
}

std::map<Bidegree, int> nonzero(const std::map<Bidegree, int>& m) {
    std::map<Bidegree, int> out;
    for (auto [bd, d] : m)
        if (d) out[bd] = d;
    return out;
}

std::map<int, int> nonzero(const std::map<int, int>& m) {
    std::map<int, int> out;
    for (auto [k, d] : m)
        if (d) out[k] = d;
    return out;
}

std::vector<int> degrees_of(const FilteredComplex& fc) {
    std::vector<int> d;
    for (const auto& g : fc.generators) d.push_back(g.degree);
    return d;
}

// Every column of A orthogonal to every column of B.
bool orthogonal(const RationalMatrix& A, const RationalMatrix& B) {
    if (A.cols() == 0 || B.cols() == 0) return true;
    return (A.transpose() * B).is_zero();
}

// Rebase every page above r0 by a random invertible map inside each bidegree.
SpectralPages scramble(SpectralPages sp, std::mt19937_64& rng) {
    for (size_t i = 1; i < sp.pages.size(); ++i) {
        Page& pg = sp.pages[i];
        const int n = static_cast<int>(pg.basis.size());
        if (n == 0) continue;
        RationalMatrix S = RationalMatrix::identity(n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (a < b && pg.basis[a].filtration == pg.basis[b].filtration && pg.basis[a].degree == pg.basis[b].degree)
                    S(a, b) = uniform_int(rng, -2, 2);
        S(0, 0) = 2;
        const RationalMatrix Si = S.inverse();
        sp.pages[i - 1].next = sp.pages[i - 1].next * S;
        pg.differential = Si * pg.differential * S;
        if (pg.next.cols() > 0) pg.next = Si * pg.next;
    }
    return sp;
}

void check_collapse(const FilteredComplex& fc, int r0, const SpectralPages& sp, const CollapsedComplex& cc) {
    const RationalMatrix& D = cc.dbar;
    REQUIRE((D * D).is_zero());
    CHECK(nonzero(harmonic_dims(cc)) == nonzero(sp.infinity_dims()));
    std::vector<int> degs;
    for (const auto& e : cc.basis) degs.push_back(e.degree);
    CHECK(nonzero(homology(D, degs).dims) == nonzero(by_degree(sp.infinity_dims())));
    if (cc.harmonic_basis.cols() > 0) {
        CHECK((D * cc.harmonic_basis).is_zero());
        CHECK((D.transpose() * cc.harmonic_basis).is_zero());
    }
    std::vector<RationalMatrix> parts = cc.summands_v;
    parts.insert(parts.end(), cc.summands_im.begin(), cc.summands_im.end());
    parts.push_back(cc.harmonic_basis);
    for (size_t a = 0; a < parts.size(); ++a)
        for (size_t b = a + 1; b < parts.size(); ++b) CHECK(orthogonal(parts[a], parts[b]));
    (void)fc;
    (void)r0;
}

}  // namespace

TEST_CASE("rational matrix basics") {
    RationalMatrix A(2, 2);
    A(0, 0) = 1;
    A(0, 1) = mpq_class(1, 2);
    A(1, 0) = 3;
    A(1, 1) = 4;
    CHECK(A.rank() == 2);
    CHECK(A * A.inverse() == RationalMatrix::identity(2));
    RationalMatrix B(2, 2);
    B(0, 0) = 1;
    B(0, 1) = 2;
    B(1, 0) = 2;
    B(1, 1) = 4;
    CHECK(B.rank() == 1);
    auto N = B.nullspace();
    CHECK(N.cols() == 1);
    CHECK((B * N).is_zero());
    CHECK(parse_rational("-3/6") == mpq_class(-1, 2));
    CHECK(parse_rational("7") == 7);
    CHECK_THROWS_AS(parse_rational("1/0"), InputError);
}

TEST_CASE("acyclic pair") {
    auto fc = acyclic_pair();
    auto sp = pages(fc, 0);
    auto d1 = sp.page(1).dims();
    CHECK(d1[{0, 0}] == 1);
    CHECK(d1[{1, 1}] == 1);
    CHECK(sp.page(1).differential(0, 1) == 1);
    CHECK(nonzero(sp.page(2).dims()).empty());
    CHECK(nonzero(sp.infinity_dims()).empty());

    auto sp1 = pages(fc, 1);
    auto cc = collapse(sp1, 1);
    REQUIRE(cc.dbar.rows() == 2);
    CHECK(cc.dbar(0, 1) == 1);
    CHECK(cc.dbar(1, 0) == 0);
    CHECK(cc.harmonic_basis.cols() == 0);
    CHECK(homology(cc.dbar, {0, 1}).dims[0] == 0);
}

TEST_CASE("zero boundary") {
    auto fc = zero_complex();
    auto sp = pages(fc, 0);
    for (const auto& pg : sp.pages) {
        CHECK(pg.differential.is_zero());
        CHECK(pg.basis.size() == 3);
    }
    auto cc = collapse(sp, 0);
    CHECK(cc.dbar.is_zero());
    CHECK(cc.harmonic_basis.cols() == 3);
    auto h = homology(RationalMatrix(3, 3), {0, 0, 0});
    CHECK(h.dims[0] == 3);
    CHECK(h.harmonic == RationalMatrix::identity(3));
}

TEST_CASE("homology of a single boundary") {
    RationalMatrix d(2, 2);
    d(0, 1) = 1;
    auto h = homology(d, {0, 1});
    CHECK(nonzero(h.dims).empty());
    CHECK(h.harmonic.cols() == 0);
}

TEST_CASE("invalid complexes are rejected") {
    FilteredComplex up = acyclic_pair();
    up.generators[0].filtration = 2;  // boundary would raise filtration
    CHECK_THROWS_AS(up.validate(), InputError);

    FilteredComplex sq;
    sq.generators = {{"a", 0, 0}, {"b", 1, 0}, {"c", 2, 0}};
    sq.boundary = RationalMatrix(3, 3);
    sq.boundary(0, 1) = 1;
    sq.boundary(1, 2) = 1;
    CHECK_THROWS_AS(sq.validate(), InputError);
    CHECK_THROWS_AS(homology(sq.boundary, {0, 1, 2}), InputError);

    FilteredComplex deg = acyclic_pair();
    deg.generators[1].degree = 2;
    CHECK_THROWS_AS(deg.validate(), InputError);
}

TEST_CASE("property: homology from a random chain contraction") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 100; ++trial) {
        // Free part of known size plus cancelling pairs, conjugated by a random invertible map.
        const int free = uniform_int(rng, 0, 5), pairs = uniform_int(rng, 0, 5);
        std::vector<int> degs;
        std::map<int, int> want;
        for (int i = 0; i < free; ++i) {
            degs.push_back(uniform_int(rng, 0, 3));
            want[degs.back()]++;
        }
        std::vector<std::pair<int, int>> bd;
        for (int i = 0; i < pairs; ++i) {
            const int d = uniform_int(rng, 0, 3);
            bd.push_back({static_cast<int>(degs.size()) + 1, static_cast<int>(degs.size())});
            degs.push_back(d);
            degs.push_back(d + 1);
        }
        const int n = static_cast<int>(degs.size());
        if (n == 0) continue;
        RationalMatrix D(n, n);
        for (auto [s, t] : bd) D(t, s) = 1;
        RationalMatrix T = RationalMatrix::identity(n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (a != b && degs[a] == degs[b] && uniform(rng, 0, 1) < 0.5) T(a, b) = uniform_int(rng, -2, 2);
        if (T.rank() < n) continue;
        auto h = homology(T * D * T.inverse(), degs);
        CHECK(nonzero(h.dims) == want);
    }
}

TEST_CASE("property: pages agree with the direct Z/B oracle and converge to homology") {
    std::mt19937_64 rng(52);
    int long_lived = 0;  // complexes with a non-zero d_r for some r >= 2
    for (int trial = 0; trial < 100; ++trial) {
        auto fc = random_filtered_complex(rng, 20, 5);
        auto sp = pages(fc, 0);
        CHECK(sp.stabilized_at <= sp.width + 1);
        if (sp.stabilized_at >= 3) ++long_lived;
        for (int r = 0; r <= sp.width + 1; ++r) CHECK(nonzero(sp.page(r).dims()) == nonzero(page_dims_direct(fc, r)));
        auto h = homology(fc.boundary, degrees_of(fc));
        CHECK(nonzero(by_degree(sp.infinity_dims())) == nonzero(h.dims));
        for (const auto& pg : sp.pages) CHECK((pg.differential * pg.differential).is_zero());
    }
    CHECK(long_lived >= 20);
}

TEST_CASE("property: collapse on random complexes") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 200; ++trial) {
        auto fc = random_filtered_complex(rng, 30, 5);
        const int r0 = uniform_int(rng, 0, 3);
        auto sp = pages(fc, r0);
        check_collapse(fc, r0, sp, collapse(sp, r0));
    }
}

TEST_CASE("property: collapse does not depend on the chosen page bases") {
    std::mt19937_64 rng(54);
    for (int trial = 0; trial < 60; ++trial) {
        auto fc = random_filtered_complex(rng, 20, 4);
        const int r0 = uniform_int(rng, 0, 2);
        auto sp = pages(fc, r0);
        auto plain = collapse(sp, r0);
        auto mixed = collapse(scramble(sp, rng), r0);
        check_collapse(fc, r0, sp, mixed);
        // The inner product is fixed on E^{r0}, so the collapsed differential is canonical.
        CHECK(plain.dbar == mixed.dbar);
    }
}
