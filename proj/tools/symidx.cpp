#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "symp/errors.hpp"
#include "symp/json_io.hpp"

using namespace symp;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Run {
    std::vector<std::string> argv;
    json inputs = json::array();
    Tolerances tol;
    unsigned long long seed = 0;
    std::string output;
    std::string format = "json";
    int exit_code = 0;
};

std::string fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json load(Run& run, const std::string& path) {
    std::string raw;
    json j = read_json(path, &raw);
    run.inputs.push_back({{"path", path}, {"fnv1a64", fnv1a64(raw)}, {"bytes", raw.size()}});
    return j;
}

json manifest(const Run& run) {
    return {{"command_line", run.argv}, {"inputs", run.inputs}, {"tolerances", to_json(run.tol)},
            {"seed", run.seed},         {"version", kVersion}};
}

void flatten(const json& j, const std::string& prefix, std::ostream& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (j.is_array()) {
        bool scalars = std::all_of(j.begin(), j.end(), [](const json& v) { return v.is_primitive(); });
        if (scalars) {
            out << prefix << " = " << j.dump() << "\n";
        } else {
            for (size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
        }
    } else {
        out << prefix << " = " << j.dump() << "\n";
    }
}

void emit(const Run& run, json result) {
    result["manifest"] = manifest(run);
    std::string text;
    if (run.format == "text") {
        json c = parse_json(dump_json(result), "report");  // same rounding as the JSON form
        std::ostringstream ss;
        flatten(c, "", ss);
        text = ss.str();
    } else {
        text = dump_json(result);
    }
    if (run.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(run.output, std::ios::binary);
        if (!f) throw InputError("cannot write '" + run.output + "'");
        f << text;
    }
}

// ---- subcommands ----

void cmd_index(Run& run, const std::string& path, double eps, int iterate) {
    const json j = load(run, path);
    const AnyPath p = path_from_json(j);
    json out;
    if (const auto* g = std::get_if<GeneratedPath>(&p)) {
        const GeneratedPath gen = iterate > 1 ? iterate_generator(*g, iterate) : *g;
        out["report"] = to_json(full_report(gen, eps, run.tol));
        out["kind"] = "generator";
    } else {
        const SampledPath& s = std::get<SampledPath>(p);
        s.validate(run.tol.symplectic);
        const SampledPath it = iterate > 1 ? iterate_path(s, iterate) : s;
        out["report"] = to_json(full_report(it, run.tol));
        out["kind"] = "samples";
    }
    out["iterate"] = iterate;
    emit(run, out);
}

void cmd_iterate(Run& run, const std::string& path, const std::string& range, int dc_m, bool numeric, int steps) {
    const auto models = models_from_json(load(run, path));
    const auto [a, b] = parse_range(range);
    if (a == 0) throw InputError("iterate range must not contain 0");
    json out = json::array();
    bool ok = true;
    for (const auto& m : models) {
        json rows = json::array();
        for (long long k = a; k <= b; ++k) {
            if (k == 0) continue;
            json row = to_json(iter_index(m, k));
            if (numeric && k > 0) {
                const GeneratedPath gen = iterate_generator(model_to_path(m, steps), static_cast<int>(k));
                const IndexReport rep = full_report(gen, 0.0, run.tol);
                const auto exact = iter_index(m, k);
                const bool match = std::abs(rep.mean_index - exact.mean.value()) < 1e-6 && rep.mu_minus &&
                                   *rep.mu_minus == exact.mu_minus && rep.mu_plus && *rep.mu_plus == exact.mu_plus &&
                                   rep.nullity == exact.nu;
                ok = ok && match;
                row["numeric"] = to_json(rep);
                row["numeric_match"] = match;
            }
            rows.push_back(row);
        }
        json entry{{"model", to_json(m)}, {"iterates", rows}};
        if (dc_m > 0) {
            const auto r = verify_dc_iteration(m, dc_m, std::max<long long>(b, 1));
            entry["dynamical_convexity"] = {{"ok", r.ok}, {"first_violation", r.first_violation}, {"rule", r.rule}, {"checked", r.checked}};
            ok = ok && r.ok;
        }
        out.push_back(entry);
    }
    emit(run, {{"orbits", out}, {"ok", ok}});
    if (!ok) run.exit_code = 3;
}

// Verify certificates supplied by the caller instead of searching.
void cmd_recur_check(Run& run, const std::vector<OrbitModel>& models, const std::string& cert_path, int l0, double eta,
                     long long divisor, bool d_div) {
    const json j = load(run, cert_path);
    std::vector<RecurrenceCertificate> given;
    if (j.is_array()) {
        for (const auto& c : j) given.push_back(certificate_from_json(c, eta));
    } else if (j.is_object() && j.contains("certificates")) {
        for (const auto& c : j.at("certificates")) given.push_back(certificate_from_json(c, eta));
    } else {
        given.push_back(certificate_from_json(j, eta));
    }
    json certs = json::array();
    bool ok = true;
    for (const auto& c : given) {
        if (c.k.size() != models.size()) throw InputError("certificate has " + std::to_string(c.k.size()) + " iterates for " +
                                                          std::to_string(models.size()) + " models");
        const auto v = verify_certificate(c, models, l0, divisor, d_div);
        ok = ok && v.ok;
        json cj = to_json(c);
        cj["verification"] = to_json(v);
        certs.push_back(cj);
    }
    emit(run, {{"certificates", certs}, {"verified", ok}});
    if (!ok) run.exit_code = 3;
}

void cmd_recur(Run& run, const std::string& path, int l0, double eta, long long divisor, long long kmax, int count,
               bool no_d_div, bool serial, const std::string& jump, const std::string& cert_path) {
    RecurrenceQuery q;
    q.models = models_from_json(load(run, path));
    if (!cert_path.empty()) {
        cmd_recur_check(run, q.models, cert_path, l0, eta, divisor, !no_d_div);
        return;
    }
    q.ell0 = l0;
    q.eta = eta;
    q.divisor = divisor;
    q.k_max = kmax;
    q.count = count;
    q.d_divisible = !no_d_div;
    const SearchResult sr = serial ? find_recurrence_serial(q) : find_recurrence_parallel(q);
    json certs = json::array();
    bool ok = true;
    for (const auto& c : sr.certificates) {
        const auto v = verify_certificate(c, q.models, q.ell0, sr.effective_divisor, q.d_divisible);
        ok = ok && v.ok;
        json cj = to_json(c);
        cj["verification"] = to_json(v);
        if (!jump.empty()) {
            const auto mode = jump == "strong" ? JumpMode::StronglyNondegenerate : JumpMode::General;
            const auto jr = jump_intervals(c, q.models, q.ell0, mode);
            ok = ok && jr.disjoint;
            cj["jump"] = to_json(jr);
        }
        certs.push_back(cj);
    }
    emit(run, {{"certificates", certs},
               {"effective_divisor", sr.effective_divisor},
               {"epsilon", sr.epsilon},
               {"reference_model", sr.reference},
               {"bounded_d", sr.bounded_d},
               {"scanned", sr.scanned},
               {"exhausted", sr.exhausted},
               {"verified", ok}});
    if (!ok) run.exit_code = 3;
    else if (sr.exhausted) run.exit_code = 2;
}

void cmd_collapse(Run& run, const std::string& path, int r0) {
    const FilteredComplex fc = complex_from_json(load(run, path));
    const SpectralPages sp = pages(fc, 0);
    const CollapsedComplex cc = collapse(sp, r0);
    std::vector<int> degs;
    for (const auto& e : cc.basis) degs.push_back(e.degree);
    const GradedHomology h = homology(cc.dbar, degs);
    const bool ok = (cc.dbar * cc.dbar).is_zero() && harmonic_dims(cc) == sp.infinity_dims();
    json hd = json::object();
    for (const auto& [d, n] : h.dims) hd[std::to_string(d)] = n;
    emit(run, {{"pages", to_json(sp)}, {"collapsed", to_json(cc)}, {"homology_dims", hd}, {"consistent", ok}});
    if (!ok) run.exit_code = 3;
}

void cmd_shdim(Run& run, const std::string& manifold, int n, const std::string& range, bool check, int chains) {
    const auto [lo, hi] = parse_range(range);
    json out;
    if (manifold == "sphere") {
        out["table"] = to_json(sphere_sh_dims(n, lo, hi));
        if (chains > 0) out["d_chain"] = d_chain_sphere(n, chains).degrees;
    } else {
        const ShTable cases = stsn_sh_dims_cases(n, lo, hi);
        out["table"] = to_json(cases);
        if (check) {
            const ShTable mb = stsn_sh_dims_morsebott(n, lo, hi);
            json diff = json::array();
            for (const auto& [k, v] : cases.dims)
                if (mb.dims.at(k) != v) diff.push_back({{"degree", k}, {"cases", v}, {"morse_bott", mb.dims.at(k)}});
            out["check"] = {{"pass", diff.empty()}, {"mismatches", diff}};
            if (!diff.empty()) run.exit_code = 3;
        }
        if (chains > 0) out["d_chain"] = d_chain_stsn(n, chains).degrees;
    }
    emit(run, out);
}

Manifold parse_kind(const std::string& k) {
    if (k == "sphere") return Manifold::Sphere;
    if (k == "stsn") return Manifold::Stsn;
    throw InputError("kind must be sphere or stsn");
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError("not a number in list: '" + item + "'");
        }
    }
    if (v.empty()) throw InputError("empty list");
    return v;
}

void cmd_mult_ellipsoid(Run& run, const std::string& radii, long long count, int show, bool carriers, bool limit) {
    EllipsoidModel e{parse_list(radii)};
    const auto models = ellipsoid_orbit_models(e);
    const auto seq = ellipsoid_spectral_invariants(e, count);
    json inv = json::array();
    for (long long i = 0; i < std::min<long long>(count, show); ++i)
        inv.push_back({{"k", i + 1}, {"value", seq.values[i]}, {"orbit", seq.carriers[i].orbit}, {"iterate", seq.carriers[i].iterate}});
    json ms = json::array();
    for (const auto& m : models) ms.push_back(to_json(m));
    const auto rc = resonance_check(models, 1e-12);
    json out{{"models", ms},
             {"spectral_invariants", inv},
             {"count", count},
             {"chat_formula", e.chat()},
             {"resonance", {{"chat", rc.chat}, {"max_deviation", rc.max_deviation}, {"pass", rc.pass}}}};
    bool ok = rc.pass;
    if (carriers) {
        const auto cr = verify_carrier_indices(e, count);
        json bad = json::array();
        for (const auto& c : cr.checks)
            if (!c.index_ok || !c.mean_ok)
                bad.push_back({{"k", c.k}, {"orbit", c.carrier.orbit}, {"iterate", c.carrier.iterate}, {"cz", c.cz}, {"mean", c.mean}});
        out["carriers"] = {{"ok", cr.ok}, {"checked", cr.checks.size()}, {"failures", bad}};
        ok = ok && cr.ok;
    }
    if (limit) {
        const auto lr = chat_limit_check(e, count);
        out["limit"] = {{"degree", lr.degree}, {"value", lr.value}, {"limit", lr.limit}, {"deviation", lr.deviation}};
    }
    emit(run, out);
    if (!ok) run.exit_code = 3;
}

void cmd_mult_witness(Run& run, const std::string& path, const std::string& kind, int n, int q, bool nondeg,
                      const WitnessParams& p) {
    const auto models = models_from_json(load(run, path));
    ContactSetting s{parse_kind(kind), n, q < 0 ? (kind == "sphere" ? n + 1 : n - 1) : q, nondeg};
    const auto b = mult_witness(models, s, p);
    emit(run, {{"setting", {{"kind", kind}, {"n", s.n}, {"q", s.q}, {"nondegenerate", nondeg}}}, {"bound", to_json(b)}});
    if (b.witness && b.witness->status == "inconsistent") run.exit_code = 3;
    else if (!b.witness) run.exit_code = 2;
}

double default_tol() {
    if (const char* env = std::getenv("SYMIDX_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(v > 0.0)) throw InputError("SYMIDX_TOL must be a positive number");
        return v;
    }
    return kDefaultTol;
}

}  // namespace

int main(int argc, char** argv) {
    Run run;
    for (int i = 0; i < argc; ++i) run.argv.push_back(i == 0 ? "symidx" : argv[i]);
    try {
        CLI::App app{"Symplectic path indices, index recurrence, spectral-sequence collapse and multiplicity bounds"};
        app.require_subcommand(1);
        app.fallthrough();
        double tol = -1.0;
        app.add_option("--output,-o", run.output, "Write the report to a file");
        app.add_option("--format", run.format, "json or text")->check(CLI::IsMember({"json", "text"}));
        app.add_option("--tol", tol, "Tolerance for symplectic, cluster and crossing checks (env SYMIDX_TOL)");
        app.add_option("--seed", run.seed, "Seed recorded in the manifest");

        auto* idx = app.add_subcommand("index", "Indices of a sampled or generated path");
        std::string path;
        double eps = 0.0;
        int iterate = 1;
        idx->add_option("--path", path, "Path JSON ('-' for stdin)")->required();
        idx->add_option("--eps", eps, "Perturbation size for mu_pm (0 picks one)");
        idx->add_option("--iterate", iterate, "Index of the k-th iterate")->check(CLI::PositiveNumber);

        auto* it = app.add_subcommand("iterate", "Exact iterated indices of orbit models");
        std::string orbits, krange = "1..10";
        int dc_m = 0, steps = 400;
        bool numeric = false;
        it->add_option("--orbits", orbits, "Orbit-model JSON ('-' for stdin)")->required();
        it->add_option("--k", krange, "Iterate range a..b");
        it->add_option("--dc", dc_m, "Check dynamical convexity with this half-dimension");
        it->add_flag("--numeric", numeric, "Cross-check against the integrated path");
        it->add_option("--steps", steps, "Integrator steps for --numeric");

        auto* rc = app.add_subcommand("recur", "Search and verify index-recurrence certificates");
        int l0 = 1, count = 3;
        double eta = 0.4;
        long long divisor = 1, kmax = 1000000;
        bool no_d_div = false, serial = false;
        std::string jump, cert_path;
        rc->add_option("--orbits", orbits, "Orbit-model JSON ('-' for stdin)")->required();
        rc->add_option("--certificate", cert_path, "Verify these certificates instead of searching");
        rc->add_option("--l0", l0, "Window half-width ell0");
        rc->add_option("--eta", eta, "Mean-index tolerance");
        rc->add_option("--divisor", divisor, "Divisor N for the iterates");
        rc->add_option("--kmax", kmax, "Number of multiples scanned");
        rc->add_option("--count", count, "Certificates wanted");
        rc->add_flag("--no-d-divisible", no_d_div, "Only require N | k");
        rc->add_flag("--serial", serial, "Use the serial scan");
        rc->add_option("--jump", jump, "Also check jump intervals (general|strong)")->check(CLI::IsMember({"general", "strong"}));

        auto* co = app.add_subcommand("collapse", "Spectral sequence pages and their collapse into one complex");
        int r0 = 1;
        co->add_option("--complex", path, "Filtered complex JSON ('-' for stdin)")->required();
        co->add_option("--r0", r0, "First page of the collapse");

        auto* sh = app.add_subcommand("shdim", "Equivariant SH dimension tables");
        std::string manifold, range;
        int n = 0, chains = 0;
        bool check = false;
        sh->add_option("--manifold", manifold)->required()->check(CLI::IsMember({"sphere", "stsn"}));
        sh->add_option("--n", n)->required();
        sh->add_option("--range", range, "Degree range a..b")->required();
        sh->add_flag("--check", check, "Cross-check the two ST*S^n computations");
        sh->add_option("--chain", chains, "Also print a D-chain (k_max for the sphere, band j for ST*S^n)");

        auto* mu = app.add_subcommand("mult", "Multiplicity bounds, ellipsoids and witnesses");
        mu->require_subcommand(1);
        mu->fallthrough();
        auto* mb = mu->add_subcommand("bound", "Lower bound on the number of simple orbits");
        std::string kind;
        int q = -1;
        bool nondeg = false;
        mb->add_option("--kind", kind)->required()->check(CLI::IsMember({"sphere", "stsn"}));
        mb->add_option("--n", n)->required();
        mb->add_option("--q", q, "Lower bound on mu_- (default: n+1 sphere, n-1 stsn)");
        mb->add_flag("--nondeg", nondeg);
        auto* me = mu->add_subcommand("ellipsoid", "Ellipsoid orbit models and spectral invariants");
        std::string radii;
        long long ecount = 10;
        int show = 20;
        bool carriers = false, limit = false;
        me->add_option("--radii-sq", radii, "Comma-separated squared radii")->required();
        me->add_option("--count", ecount, "Number of spectral invariants")->check(CLI::PositiveNumber);
        me->add_option("--show", show, "How many invariants to print");
        me->add_flag("--check-carriers", carriers);
        me->add_flag("--check-limit", limit);
        auto* mw = mu->add_subcommand("witness", "Common-jump witness for the bound");
        WitnessParams wp;
        mw->add_option("--orbits", orbits)->required();
        mw->add_option("--kind", kind)->required()->check(CLI::IsMember({"sphere", "stsn"}));
        mw->add_option("--n", n)->required();
        mw->add_option("--q", q);
        mw->add_flag("--nondeg", nondeg);
        mw->add_option("--l0", wp.ell0);
        mw->add_option("--eta", wp.eta);
        mw->add_option("--kmax", wp.k_max);

        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            return 1;
        }

        const double t = tol > 0.0 ? tol : default_tol();
        run.tol = Tolerances{t, t, t};

        if (idx->parsed()) cmd_index(run, path, eps, iterate);
        else if (it->parsed()) cmd_iterate(run, orbits, krange, dc_m, numeric, steps);
        else if (rc->parsed()) cmd_recur(run, orbits, l0, eta, divisor, kmax, count, no_d_div, serial, jump, cert_path);
        else if (co->parsed()) cmd_collapse(run, path, r0);
        else if (sh->parsed()) cmd_shdim(run, manifold, n, range, check, chains);
        else if (mb->parsed()) {
            ContactSetting s{parse_kind(kind), n, q < 0 ? (kind == "sphere" ? n + 1 : n - 1) : q, nondeg};
            emit(run, {{"setting", {{"kind", kind}, {"n", s.n}, {"q", s.q}, {"nondegenerate", nondeg}}}, {"bound", to_json(lower_bound(s))}});
        } else if (me->parsed()) cmd_mult_ellipsoid(run, radii, ecount, show, carriers, limit);
        else if (mw->parsed()) cmd_mult_witness(run, orbits, kind, n, q, nondeg, wp);
        return run.exit_code;
    } catch (const Error& e) {
        std::cerr << "symidx: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "symidx: " << e.what() << "\n";
        return 1;
    }
}
