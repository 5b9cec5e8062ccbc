#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "symp/errors.hpp"
#include "symp/shdim.hpp"

using namespace symp;

TEST_CASE("sphere table") {
    auto t = sphere_sh_dims(2, 0, 8);
    for (int k = 0; k <= 8; ++k) CHECK(t.dims.at(k) == ((k == 3 || k == 5 || k == 7) ? 1 : 0));
    CHECK(sphere_sh_dims(4, 5, 5).dims.at(5) == 1);
    CHECK(sphere_sh_dims(4, 4, 4).dims.at(4) == 0);
}

TEST_CASE("Grassmannian homology") {
    auto g3 = grassmannian_dims(3);
    CHECK(g3 == std::map<int, int>{{0, 1}, {2, 2}, {4, 1}});
    for (int n = 2; n <= 12; ++n) {
        int total = 0;
        for (auto [d, v] : grassmannian_dims(n)) {
            total += v;
            CHECK(d % 2 == 0);
        }
        CHECK(total == ((n - 1) % 2 == 0 ? n + 1 : n));
    }
}

TEST_CASE("unit cotangent bundle: case formula examples") {
    auto t = stsn_sh_dims_cases(3, 1, 10);
    CHECK(t.dims.at(2) == 1);
    CHECK(t.dims.at(4) == 2);
    CHECK(t.dims.at(6) == 2);
    CHECK(t.dims.at(8) == 2);
    CHECK(t.dims.at(3) == 0);
    CHECK(t.dims.at(1) == 0);
    CHECK(stsn_dim(4, 9) == 2);
    // k = 6 has the parity of n = 4, so it is empty; an even multiple j(n-1) never carries a class for even n.
    CHECK(stsn_dim(4, 6) == 0);
    CHECK(stsn_sh_dims_morsebott(4, 6, 6).dims.at(6) == 0);
    CHECK(stsn_dim(4, 7) == 1);
    CHECK_THROWS_AS(stsn_sh_dims_cases(2, 1, 10), InputError);
    CHECK_THROWS_AS(stsn_sh_dims_morsebott(2, 1, 10), InputError);
}

TEST_CASE("unit cotangent bundle: Morse-Bott sum examples") {
    auto t = stsn_sh_dims_morsebott(3, 1, 12);
    CHECK(t.dims.at(2) == 1);
    CHECK(t.dims.at(4) == 2);
    CHECK(t.dims.at(6) == 2);
    CHECK(stsn_sh_dims_morsebott(5, 16, 16).dims.at(16) == 2);
    CHECK(stsn_sh_dims_cases(5, 16, 16).dims.at(16) == 2);
}

TEST_CASE("shift chains") {
    CHECK(d_chain_sphere(2, 3).degrees == std::vector<int>{3, 5, 7});
    CHECK(d_chain_sphere(4, 1).degrees == std::vector<int>{5});
    CHECK(d_chain_stsn(3, 1).degrees == std::vector<int>{2, 4, 6});
    CHECK(d_chain_stsn(4, 2).degrees == std::vector<int>{9, 11, 13, 15});
}

TEST_CASE("range parsing") {
    CHECK(parse_range("0..8") == std::pair<int, int>{0, 8});
    CHECK(parse_range("-3..4") == std::pair<int, int>{-3, 4});
    CHECK_THROWS_AS(parse_range("3-4"), InputError);
    CHECK_THROWS_AS(parse_range("5..2"), InputError);
}

TEST_CASE("property: the two unit cotangent bundle computations agree") {
    for (int n = 3; n <= 10; ++n) CHECK(stsn_sh_dims_cases(n, 1, 60).dims == stsn_sh_dims_morsebott(n, 1, 60).dims);
}

TEST_CASE("property: chain classes are non-zero and step by two") {
    for (int n = 3; n <= 10; ++n)
        for (int j = 1; j <= 5; ++j) {
            auto c = d_chain_stsn(n, j);
            CHECK(static_cast<int>(c.degrees.size()) == n);
            for (size_t i = 0; i < c.degrees.size(); ++i) {
                CHECK(stsn_dim(n, c.degrees[i]) >= 1);
                if (i) CHECK(c.degrees[i] - c.degrees[i - 1] == 2);
            }
        }
    for (int n = 2; n <= 10; ++n) {
        auto c = d_chain_sphere(n, 20);
        for (size_t i = 1; i < c.degrees.size(); ++i) CHECK(c.degrees[i] - c.degrees[i - 1] == 2);
        for (int d : c.degrees) CHECK(sphere_sh_dims(n, d, d).dims.at(d) == 1);
    }
}

TEST_CASE("property: sphere parity") {
    for (int n = 2; n <= 12; ++n)
        for (auto [k, d] : sphere_sh_dims(n, -10, 80).dims)
            if (d > 0) CHECK(((k - n - 1) % 2 + 2) % 2 == 0);
}
