#include "symp/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "symp/errors.hpp"

namespace symp {

json parse_json(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(where + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

json read_json(const std::string& path, std::string* raw) {
    std::string text;
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw InputError("cannot open '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    if (raw) *raw = text;
    return parse_json(text, path == "-" ? std::string("<stdin>") : path);
}

double round15(double x) {
    if (!std::isfinite(x)) return x;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return std::strtod(buf, nullptr);
}

namespace {

void normalize(json& j) {
    if (j.is_number_float()) {
        j = round15(j.get<double>());
    } else if (j.is_structured()) {
        for (auto& v : j) normalize(v);
    }
}

template <class T>
T get_field(const json& j, const char* key, const std::string& who) {
    if (!j.contains(key)) throw InputError(who + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(who + ": field '" + key + "' has the wrong type");
    }
}

}  // namespace

std::string dump_json(const json& j) {
    json c = j;
    normalize(c);
    return c.dump(2) + "\n";
}

json to_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (int k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
        rows.push_back(r);
    }
    return {{"dim", m.rows()}, {"rows", rows}};
}

Mat matrix_from_json(const json& j) {
    const json& rows = j.is_object() ? j.at("rows") : j;
    if (!rows.is_array() || rows.empty()) throw InputError("matrix must be a non-empty array of rows");
    const int n = static_cast<int>(rows.size());
    Mat m(n, n);
    for (int i = 0; i < n; ++i) {
        if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != n) throw InputError("matrix must be square");
        for (int k = 0; k < n; ++k) {
            const json& v = rows[i][k];
            if (v.is_number()) m(i, k) = v.get<double>();
            else if (v.is_string()) m(i, k) = std::stod(v.get<std::string>());
            else throw InputError("matrix entries must be numbers");
        }
    }
    if (j.is_object() && j.contains("dim") && j.at("dim").get<int>() != n)
        throw InputError("matrix dim does not match the row count");
    return m;
}

json to_json(const OrbitModel& m) {
    json rot = json::array();
    for (const auto& r : m.rotations) {
        if (r.rational) rot.push_back({{"rational", {r.p, r.q}}});
        else rot.push_back({{"irrational", r.lambda}});
    }
    json j{{"label", m.label},
           {"loop_index", m.loop_index},
           {"rotations", rot},
           {"hyperbolic_index", m.hyperbolic_index},
           {"hyperbolic_planes", m.hyperbolic_planes}};
    if (m.degenerate) j["degenerate"] = {{"half_dim", m.degenerate->half_dim}, {"sgn", m.degenerate->sgn}, {"nullity", m.degenerate->nullity}};
    else j["degenerate"] = nullptr;
    j["action"] = m.action ? json(*m.action) : json(nullptr);
    return j;
}

OrbitModel model_from_json(const json& j) {
    if (!j.is_object()) throw InputError("orbit model must be a JSON object");
    OrbitModel m;
    m.label = j.value("label", std::string());
    const std::string who = m.label.empty() ? std::string("orbit model") : "orbit model '" + m.label + "'";
    m.loop_index = j.contains("loop_index") ? get_field<long long>(j, "loop_index", who) : 0;
    if (j.contains("rotations")) {
        for (const auto& r : j.at("rotations")) {
            if (r.contains("rational")) {
                const auto& pq = r.at("rational");
                if (!pq.is_array() || pq.size() != 2) throw InputError(who + ": rational rotation must be [p, q]");
                m.rotations.push_back(RotationBlock::ratio(pq[0].get<long long>(), pq[1].get<long long>()));
            } else if (r.contains("irrational")) {
                m.rotations.push_back(RotationBlock::irrational(get_field<double>(r, "irrational", who)));
            } else {
                throw InputError(who + ": rotation needs 'rational' or 'irrational'");
            }
        }
    }
    m.hyperbolic_index = j.contains("hyperbolic_index") ? get_field<long long>(j, "hyperbolic_index", who) : 0;
    m.hyperbolic_planes = j.contains("hyperbolic_planes") ? get_field<int>(j, "hyperbolic_planes", who) : 0;
    if (j.contains("degenerate") && !j.at("degenerate").is_null()) {
        const auto& d = j.at("degenerate");
        m.degenerate = DegenerateBlock{get_field<int>(d, "half_dim", who), get_field<int>(d, "sgn", who),
                                       get_field<int>(d, "nullity", who)};
    }
    if (j.contains("action") && !j.at("action").is_null()) m.action = get_field<double>(j, "action", who);
    m.validate();
    return m;
}

std::vector<OrbitModel> models_from_json(const json& j) {
    std::vector<OrbitModel> out;
    if (j.is_array()) {
        for (const auto& e : j) out.push_back(model_from_json(e));
    } else if (j.is_object() && j.contains("orbits")) {
        for (const auto& e : j.at("orbits")) out.push_back(model_from_json(e));
    } else {
        out.push_back(model_from_json(j));
    }
    if (out.empty()) throw InputError("no orbit models in input");
    return out;
}

AnyPath path_from_json(const json& j) {
    if (!j.is_object()) throw InputError("path must be a JSON object");
    const int m = get_field<int>(j, "m", "path");
    if (j.contains("samples")) {
        SampledPath p;
        p.m = m;
        for (const auto& s : j.at("samples")) {
            p.times.push_back(get_field<double>(s, "t", "path sample"));
            p.matrices.push_back(matrix_from_json(s.at("matrix")));
        }
        return p;
    }
    if (j.contains("generator")) {
        GeneratedPath g;
        g.m = m;
        g.steps = j.value("steps", 1000);
        for (const auto& s : j.at("generator"))
            g.samples.push_back({get_field<double>(s, "t", "generator sample"), matrix_from_json(s.at("H"))});
        g.validate();
        return g;
    }
    throw InputError("path needs 'samples' or 'generator'");
}

json to_json(const GeneratedPath& g) {
    json s = json::array();
    for (const auto& h : g.samples) s.push_back({{"t", h.t}, {"H", to_json(h.H)["rows"]}});
    return {{"m", g.m}, {"generator", s}, {"steps", g.steps}};
}

json to_json(const SampledPath& p) {
    json s = json::array();
    for (size_t i = 0; i < p.times.size(); ++i) s.push_back({{"t", p.times[i]}, {"matrix", to_json(p.matrices[i])["rows"]}});
    return {{"m", p.m}, {"samples", s}};
}

json to_json(const Tolerances& t) {
    return {{"symplectic", t.symplectic}, {"cluster", t.cluster}, {"crossing", t.crossing}};
}

json to_json(const IndexReport& r) {
    json cr = json::array();
    for (const auto& c : r.crossings)
        cr.push_back({{"t", c.tau}, {"kernel_dim", c.kernel_dim}, {"signature", c.crossing_signature}, {"degenerate", c.degenerate}});
    auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
    return {{"mean_index", r.mean_index}, {"rs_index", opt(r.rs_index)}, {"cz_index", opt(r.cz_index)},
            {"mu_plus", opt(r.mu_plus)},   {"mu_minus", opt(r.mu_minus)}, {"nullity", r.nullity},
            {"crossings", cr},             {"tolerances", to_json(r.tol)}};
}

json to_json(const MuPm& r) {
    return {{"mu_minus", r.minus}, {"mu_plus", r.plus}, {"kernel_dim", r.kernel_dim}, {"gap_consistent", r.gap_consistent},
            {"rs", r.rs ? json(*r.rs) : json(nullptr)}, {"rs_consistent", r.rs_consistent}, {"eps", r.eps}};
}

json to_json(const IterIndex& it) {
    return {{"k", it.k},
            {"mean_index", it.mean.value()},
            {"mean_index_rational", rational_string(it.mean.rational)},
            {"mean_index_irrational", it.mean.irrational},
            {"mu_minus", it.mu_minus},
            {"mu_plus", it.mu_plus},
            {"nullity", it.nu},
            {"cz_index", it.cz ? json(*it.cz) : json(nullptr)}};
}

json to_json(const RecurrenceCertificate& c) {
    return {{"d", c.d}, {"k", c.k}, {"epsilon", c.epsilon_used}, {"eta", c.eta}, {"residuals", c.residuals}, {"mean_gaps", c.mean_gaps}};
}

RecurrenceCertificate certificate_from_json(const json& j, double default_eta) {
    if (!j.is_object()) throw InputError("certificate must be a JSON object");
    RecurrenceCertificate c;
    c.d = get_field<long long>(j, "d", "certificate");
    if (!j.contains("k") || !j.at("k").is_array()) throw InputError("certificate needs an array 'k'");
    for (const auto& k : j.at("k")) {
        if (!k.is_number_integer()) throw InputError("certificate iterates must be integers");
        c.k.push_back(k.get<long long>());
    }
    c.eta = j.contains("eta") ? get_field<double>(j, "eta", "certificate") : default_eta;
    c.epsilon_used = j.value("epsilon", 0.0);
    return c;
}

json to_json(const VerificationReport& r) {
    json lines = json::array();
    for (const auto& l : r.lines)
        lines.push_back({{"check", l.check}, {"model", l.model}, {"ell", l.ell}, {"side", l.side}, {"lhs", l.lhs}, {"rhs", l.rhs}, {"pass", l.pass}});
    return {{"ok", r.ok}, {"failures", r.failures}, {"lines", lines}};
}

json to_json(const JumpReport& r) {
    json e = json::array();
    for (const auto& x : r.entries)
        e.push_back({{"model", x.model}, {"ell", x.ell}, {"side", x.side}, {"mu_minus", x.mu_minus}, {"mu_plus", x.mu_plus}, {"disjoint", x.disjoint}});
    return {{"interval", {r.interval.lo, r.interval.hi}},
            {"mode", r.interval.mode == JumpMode::General ? "general" : "strongly_nondegenerate"},
            {"entries", e},
            {"disjoint", r.disjoint}};
}

FilteredComplex complex_from_json(const json& j) {
    if (!j.is_object()) throw InputError("complex must be a JSON object");
    FilteredComplex fc;
    for (const auto& g : j.at("generators"))
        fc.generators.push_back({get_field<std::string>(g, "id", "generator"), get_field<int>(g, "degree", "generator"),
                                 get_field<int>(g, "filtration", "generator")});
    const int n = fc.size();
    fc.boundary = RationalMatrix(n, n);
    if (j.contains("boundary")) {
        for (const auto& e : j.at("boundary").at("entries")) {
            if (!e.is_array() || e.size() != 3) throw InputError("boundary entry must be [row, col, \"p/q\"]");
            const int r = e[0].get<int>(), c = e[1].get<int>();
            if (r < 0 || r >= n || c < 0 || c >= n) throw InputError("boundary entry index out of range");
            fc.boundary(r, c) = e[2].is_string() ? parse_rational(e[2].get<std::string>())
                                                 : mpq_class(static_cast<long>(e[2].get<long long>()));
        }
    }
    fc.validate();
    return fc;
}

std::string rational_string(const mpq_class& q) { return q.get_str(); }

json to_json(const RationalMatrix& m) {
    json e = json::array();
    for (int c = 0; c < m.cols(); ++c)
        for (int r = 0; r < m.rows(); ++r)
            if (sgn(m(r, c)) != 0) e.push_back({r, c, rational_string(m(r, c))});
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", e}};
}

json to_json(const FilteredComplex& fc) {
    json g = json::array();
    for (const auto& x : fc.generators) g.push_back({{"id", x.id}, {"degree", x.degree}, {"filtration", x.filtration}});
    json b = to_json(fc.boundary);
    return {{"generators", g}, {"boundary", {{"entries", b["entries"]}}}};
}

namespace {

json dims_json(const std::map<Bidegree, int>& d) {
    json a = json::array();
    for (const auto& [bd, n] : d) a.push_back({{"filtration", bd.first}, {"degree", bd.second}, {"dim", n}});
    return a;
}

json basis_json(const std::vector<PageElement>& basis) {
    json a = json::array();
    for (const auto& e : basis) {
        json ch = json::array();
        for (size_t i = 0; i < e.chain.size(); ++i)
            if (sgn(e.chain[i]) != 0) ch.push_back({i, rational_string(e.chain[i])});
        a.push_back({{"filtration", e.filtration}, {"degree", e.degree}, {"chain", ch}});
    }
    return a;
}

}  // namespace

json to_json(const SpectralPages& sp) {
    json pages = json::array();
    for (const auto& p : sp.pages)
        pages.push_back({{"r", p.r}, {"dims", dims_json(p.dims())}, {"differential", to_json(p.differential)}});
    return {{"r0", sp.r0}, {"stabilized_at", sp.stabilized_at}, {"pages", pages}, {"infinity", dims_json(sp.infinity_dims())}};
}

json to_json(const CollapsedComplex& cc) {
    return {{"r0", cc.r0},
            {"basis", basis_json(cc.basis)},
            {"dbar", to_json(cc.dbar)},
            {"harmonic_basis", to_json(cc.harmonic_basis)},
            {"harmonic_dims", dims_json(harmonic_dims(cc))}};
}

json to_json(const ShTable& t) {
    json d = json::object();
    for (const auto& [k, v] : t.dims) d[std::to_string(k)] = v;
    return {{"manifold", t.manifold == Manifold::Sphere ? "sphere" : "stsn"}, {"n", t.n}, {"range", {t.lo, t.hi}}, {"dims", d}};
}

json to_json(const MultiplicityBound& b) {
    json j{{"r", b.r}, {"vacuous", b.vacuous}, {"theorem", b.theorem}, {"rule", b.rule}};
    if (!b.witness_note.empty()) j["witness_note"] = b.witness_note;
    if (b.witness) {
        const auto& w = *b.witness;
        json deg = json::array();
        for (const auto& d : w.degrees) {
            json car = json::array();
            for (const auto& [i, k] : d.carriers) car.push_back({{"model", i}, {"iterate", k}});
            deg.push_back({{"degree", d.degree}, {"weight", d.weight}, {"carriers", car}});
        }
        json wj{{"certificate", to_json(w.certificate)},
                {"interval", {w.lo, w.hi}},
                {"degrees", deg},
                {"count", w.count},
                {"weighted", w.weighted},
                {"complete", w.complete},
                {"even_iterates", w.even_iterates},
                {"status", w.status}};
        if (w.jump) wj["jump"] = to_json(*w.jump);
        j["witness"] = wj;
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

}  // namespace symp
