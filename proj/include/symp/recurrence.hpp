#pragma once

#include <limits>
#include <string>
#include <vector>

#include "symp/orbitmodel.hpp"

namespace symp {

struct RecurrenceQuery {
    std::vector<OrbitModel> models;
    int ell0 = 1;
    double eta = 0.4;
    long long divisor = 1;
    long long k_max = 1000000;  // number of multiples of the effective divisor scanned
    int count = 3;
    bool d_divisible = true;

    void validate() const;
    int half_dim() const;
};

struct RecurrenceCertificate {
    long long d = 0;
    std::vector<long long> k;
    double epsilon_used = 0.0;
    double eta = 0.0;
    std::vector<double> residuals;   // max ||k_i lambda|| over irrational rotations
    std::vector<double> mean_gaps;   // |mean(Phi_i^{k_i}) - d|
};

struct SearchResult {
    std::vector<RecurrenceCertificate> certificates;
    long long effective_divisor = 1;  // lcm of N and every rational denominator
    double epsilon = 0.0;
    int reference = 0;                // model whose iterate drives the scan
    bool bounded_d = false;           // every mean index is zero, so d stays 0
    long long scanned = 0;
    bool exhausted = false;
};

double epsilon0(const std::vector<OrbitModel>& models, int ell0);

SearchResult find_recurrence_serial(const RecurrenceQuery& q);
SearchResult find_recurrence_parallel(const RecurrenceQuery& q);
inline SearchResult find_recurrence(const RecurrenceQuery& q) { return find_recurrence_parallel(q); }

// Corrected: mu_pm(k - l) = d - mu_-+(l) + (b+ - b-) for both signs.
// Literal: the sign in front of the correction follows the upper/lower index.
enum class BackwardRule { Corrected, Literal };

struct CheckLine {
    std::string check;  // "i", "ii", "iii", "mu+ bound", "divisor"
    int model = 0;
    int ell = 0;
    std::string side;   // "+", "-" or ""
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = true;
};

struct VerificationReport {
    bool ok = true;
    int failures = 0;
    std::vector<CheckLine> lines;
};

VerificationReport verify_certificate(const RecurrenceCertificate& cert, const std::vector<OrbitModel>& models,
                                      int ell0, long long divisor = 1, bool d_divisible = false,
                                      BackwardRule rule = BackwardRule::Corrected);

enum class JumpMode { General, StronglyNondegenerate };

struct JumpInterval {
    long long lo = 0;
    long long hi = 0;
    JumpMode mode = JumpMode::General;
};

struct JumpEntry {
    int model = 0;
    int ell = 0;
    int side = 0;  // +1 for k + l, -1 for k - l
    long long mu_minus = 0;
    long long mu_plus = 0;
    bool disjoint = true;
};

struct JumpReport {
    JumpInterval interval;
    std::vector<JumpEntry> entries;
    bool disjoint = true;
};

JumpReport jump_intervals(const RecurrenceCertificate& cert, const std::vector<OrbitModel>& models, int ell0,
                          JumpMode mode);

}  // namespace symp
