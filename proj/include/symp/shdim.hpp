#pragma once

#include <map>
#include <string>
#include <vector>

namespace symp {

enum class Manifold { Sphere, Stsn };

struct ShTable {
    Manifold manifold = Manifold::Sphere;
    int n = 0;
    int lo = 0;
    int hi = 0;
    std::map<int, int> dims;  // every degree in [lo, hi]
};

struct DChain {
    std::vector<int> degrees;
};

// Rational homology of the oriented Grassmannian of 2-planes in R^{n+1}.
std::map<int, int> grassmannian_dims(int n);

ShTable sphere_sh_dims(int n, int lo, int hi);
ShTable stsn_sh_dims_cases(int n, int lo, int hi);
ShTable stsn_sh_dims_morsebott(int n, int lo, int hi);
int stsn_dim(int n, int k);

DChain d_chain_sphere(int n, int k_max);
DChain d_chain_stsn(int n, int j);

// "a..b" -> (a, b)
std::pair<int, int> parse_range(const std::string& s);

}  // namespace symp
