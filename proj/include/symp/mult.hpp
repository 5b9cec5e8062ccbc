#pragma once

#include <optional>
#include <string>
#include <vector>

#include "symp/orbitmodel.hpp"
#include "symp/recurrence.hpp"
#include "symp/shdim.hpp"

namespace symp {

struct ContactSetting {
    Manifold kind = Manifold::Sphere;
    int n = 2;
    int q = 3;  // lower bound on mu_- of every closed orbit
    bool nondegenerate = false;

    void validate() const;
    bool dynamically_convex() const { return kind == Manifold::Sphere && q == n + 1; }
};

struct WitnessDegree {
    long long degree = 0;
    int weight = 1;  // homology dimension in this degree (non-degenerate counts)
    std::vector<std::pair<int, long long>> carriers;  // (model, iterate) whose window contains the degree
};

struct MultiplicityWitness {
    RecurrenceCertificate certificate;
    long long lo = 0;
    long long hi = 0;  // closed integer range after resolving open ends
    std::vector<WitnessDegree> degrees;
    long long count = 0;     // plain number of lattice points in L
    long long weighted = 0;  // sum of homology dimensions over L
    bool complete = true;    // every degree has at least one carrier
    bool even_iterates = true;
    std::string status;      // consistent | sdm_branch | extra_orbit | extra_two_orbits | formula_exceeds_interval_count | inconsistent
    std::optional<JumpReport> jump;
};

struct MultiplicityBound {
    long long r = 0;
    bool vacuous = false;
    std::string theorem;
    std::string rule;
    std::optional<MultiplicityWitness> witness;
    std::string witness_note;
};

MultiplicityBound lower_bound(const ContactSetting& s);

struct ResonanceGuard {
    bool resonant = false;
    long long p = 0;
    long long q = 0;
    double dist = 0.0;  // |q x - p|
};
// Smallest |q x - p| over q <= q_max, flagged when within tol.
ResonanceGuard rational_guard(double x, long long q_max = 1000000, double tol = 1e-9);

struct EllipsoidModel {
    std::vector<double> radii_sq;
    void validate(bool isolated = true) const;
    int n() const { return static_cast<int>(radii_sq.size()); }
    double chat() const;  // pi / (2 sum r^-2)
};

std::vector<OrbitModel> ellipsoid_orbit_models(const EllipsoidModel& e);

struct Carrier {
    int orbit = 0;
    long long iterate = 1;
};

struct SpectralInvariantSequence {
    std::vector<double> values;
    std::vector<Carrier> carriers;
};

SpectralInvariantSequence ellipsoid_spectral_invariants(const EllipsoidModel& e, long long count);

struct CarrierCheck {
    long long k = 0;
    Carrier carrier;
    long long cz = 0;
    double mean = 0.0;
    bool index_ok = true;
    bool mean_ok = true;
};

struct CarrierReport {
    bool ok = true;
    std::vector<CarrierCheck> checks;
};

CarrierReport verify_carrier_indices(const EllipsoidModel& e, long long count);

struct ResonanceReport {
    std::vector<double> chat;
    std::vector<bool> infinite;
    double max_deviation = 0.0;
    bool pass = true;
};

ResonanceReport resonance_check(const std::vector<OrbitModel>& models, double tol);

struct LimitReport {
    long long count = 0;
    long long degree = 0;  // n + 2 count - 1
    double value = 0.0;    // c at that degree divided by the degree
    double limit = 0.0;
    double deviation = 0.0;
};

LimitReport chat_limit_check(const EllipsoidModel& e, long long count);

struct WitnessParams {
    int ell0 = 1;
    double eta = 0.4;
    long long k_max = 1000000;
    int precondition_iterates = 100;
};

MultiplicityBound mult_witness(const std::vector<OrbitModel>& models, const ContactSetting& s,
                               const WitnessParams& p = {});

}  // namespace symp
