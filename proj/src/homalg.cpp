#include "symp/homalg.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "symp/errors.hpp"

namespace symp {

// ---- RationalMatrix ----

RationalMatrix RationalMatrix::identity(int n) {
    RationalMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

RationalMatrix RationalMatrix::from_columns(int rows, const std::vector<std::vector<mpq_class>>& cols) {
    RationalMatrix m(rows, static_cast<int>(cols.size()));
    for (int c = 0; c < m.cols(); ++c)
        for (int r = 0; r < rows; ++r) m(r, c) = cols[c][r];
    return m;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& o) const {
    if (cols_ != o.rows_) throw InputError("matrix product shape mismatch");
    RationalMatrix out(rows_, o.cols_);
    mpq_class t;
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const mpq_class& a = (*this)(i, k);
            if (sgn(a) == 0) continue;
            for (int j = 0; j < o.cols_; ++j) {
                const mpq_class& b = o(k, j);
                if (sgn(b) == 0) continue;
                t = a * b;
                out(i, j) += t;
            }
        }
    return out;
}

RationalMatrix RationalMatrix::operator+(const RationalMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw InputError("matrix sum shape mismatch");
    RationalMatrix out = *this;
    for (size_t i = 0; i < data_.size(); ++i) out.data_[i] += o.data_[i];
    return out;
}

RationalMatrix RationalMatrix::operator-(const RationalMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw InputError("matrix difference shape mismatch");
    RationalMatrix out = *this;
    for (size_t i = 0; i < data_.size(); ++i) out.data_[i] -= o.data_[i];
    return out;
}

RationalMatrix RationalMatrix::transpose() const {
    RationalMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool RationalMatrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const mpq_class& x) { return sgn(x) == 0; });
}

bool RationalMatrix::operator==(const RationalMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

std::vector<mpq_class> RationalMatrix::column(int c) const {
    std::vector<mpq_class> v(rows_);
    for (int r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

RationalMatrix RationalMatrix::select_columns(const std::vector<int>& idx) const {
    RationalMatrix m(rows_, static_cast<int>(idx.size()));
    for (int c = 0; c < m.cols_; ++c)
        for (int r = 0; r < rows_; ++r) m(r, c) = (*this)(r, idx[c]);
    return m;
}

RationalMatrix RationalMatrix::select_rows(const std::vector<int>& idx) const {
    RationalMatrix m(static_cast<int>(idx.size()), cols_);
    for (int r = 0; r < m.rows_; ++r)
        for (int c = 0; c < cols_; ++c) m(r, c) = (*this)(idx[r], c);
    return m;
}

RationalMatrix RationalMatrix::vstack(const RationalMatrix& below) const {
    if (cols_ != below.cols_) throw InputError("vstack column mismatch");
    RationalMatrix m(rows_ + below.rows_, cols_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) m(r, c) = (*this)(r, c);
    for (int r = 0; r < below.rows_; ++r)
        for (int c = 0; c < cols_; ++c) m(rows_ + r, c) = below(r, c);
    return m;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(RationalMatrix& m) {
    std::vector<int> piv;
    int row = 0;
    for (int c = 0; c < m.cols() && row < m.rows(); ++c) {
        int sel = -1;
        for (int r = row; r < m.rows(); ++r)
            if (sgn(m(r, c)) != 0) {
                sel = r;
                break;
            }
        if (sel < 0) continue;
        if (sel != row)
            for (int j = 0; j < m.cols(); ++j) std::swap(m(sel, j), m(row, j));
        const mpq_class inv = 1 / m(row, c);
        for (int j = c; j < m.cols(); ++j) m(row, j) *= inv;
        for (int r = 0; r < m.rows(); ++r) {
            if (r == row || sgn(m(r, c)) == 0) continue;
            const mpq_class f = m(r, c);
            for (int j = c; j < m.cols(); ++j) m(r, j) -= f * m(row, j);
        }
        piv.push_back(c);
        ++row;
    }
    return piv;
}

// Indices of a maximal independent subset of columns.
std::vector<int> independent_columns(const RationalMatrix& m) {
    RationalMatrix t = m;
    return rref(t);
}

RationalMatrix column_basis(const RationalMatrix& m) { return m.select_columns(independent_columns(m)); }

}  // namespace

int RationalMatrix::rank() const {
    RationalMatrix t = *this;
    return static_cast<int>(rref(t).size());
}

RationalMatrix RationalMatrix::nullspace() const {
    RationalMatrix t = *this;
    const auto piv = rref(t);
    std::vector<bool> is_piv(cols_, false);
    for (int p : piv) is_piv[p] = true;
    std::vector<std::vector<mpq_class>> vecs;
    for (int f = 0; f < cols_; ++f) {
        if (is_piv[f]) continue;
        std::vector<mpq_class> v(cols_);
        v[f] = 1;
        for (size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -t(static_cast<int>(i), f);
        vecs.push_back(std::move(v));
    }
    return from_columns(cols_, vecs);
}

RationalMatrix RationalMatrix::solve(const RationalMatrix& B) const {
    if (B.rows_ != rows_) throw InputError("solve shape mismatch");
    RationalMatrix aug(rows_, cols_ + B.cols_);
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) aug(r, c) = (*this)(r, c);
        for (int c = 0; c < B.cols_; ++c) aug(r, cols_ + c) = B(r, c);
    }
    const auto piv = rref(aug);
    RationalMatrix X(cols_, B.cols_);
    for (size_t i = 0; i < piv.size(); ++i) {
        if (piv[i] >= cols_) throw VerificationError("linear system is inconsistent");
        for (int c = 0; c < B.cols_; ++c) X(piv[i], c) = aug(static_cast<int>(i), cols_ + c);
    }
    return X;
}

RationalMatrix RationalMatrix::inverse() const {
    if (rows_ != cols_ || rank() != rows_) throw VerificationError("matrix is not invertible");
    return solve(identity(rows_));
}

mpq_class parse_rational(const std::string& s) {
    mpq_class q;
    if (s.empty() || q.set_str(s, 10) != 0) throw InputError("not a rational number: '" + s + "'");
    if (sgn(q.get_den()) == 0) throw InputError("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

// ---- filtered complexes ----

void FilteredComplex::validate() const {
    const int n = size();
    if (boundary.rows() != n || boundary.cols() != n)
        throw InputError("boundary must be " + std::to_string(n) + "x" + std::to_string(n));
    std::set<std::string> ids;
    for (const auto& g : generators)
        if (!ids.insert(g.id).second) throw InputError("duplicate generator id '" + g.id + "'");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (sgn(boundary(i, j)) == 0) continue;
            const auto& gi = generators[i];
            const auto& gj = generators[j];
            if (gi.degree != gj.degree - 1)
                throw InputError("boundary of '" + gj.id + "' has a term '" + gi.id + "' not one degree lower");
            if (gi.filtration > gj.filtration)
                throw InputError("filtration violation: boundary of '" + gj.id + "' hits '" + gi.id + "' at higher filtration");
        }
    if (!(boundary * boundary).is_zero()) throw InputError("boundary squared is not zero");
}

std::map<Bidegree, int> Page::dims() const {
    std::map<Bidegree, int> d;
    for (const auto& e : basis) ++d[{e.filtration, e.degree}];
    return d;
}

const Page& SpectralPages::page(int r) const {
    const int i = r - r0;
    if (i < 0 || i >= static_cast<int>(pages.size())) throw InputError("page " + std::to_string(r) + " not computed");
    return pages[i];
}

std::map<Bidegree, int> SpectralPages::infinity_dims() const { return pages.back().dims(); }

SpectralPages pages(const FilteredComplex& fc, int r0) {
    fc.validate();
    if (r0 < 0) throw InputError("r0 must be >= 0");
    const int n = fc.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return fc.generators[a].filtration < fc.generators[b].filtration;
    });

    // Column reduction in filtration order: R = boundary * V with V unitriangular.
    std::vector<std::vector<mpq_class>> R(n, std::vector<mpq_class>(n)), V(n, std::vector<mpq_class>(n));
    for (int j = 0; j < n; ++j) {
        V[j][j] = 1;
        for (int i = 0; i < n; ++i) R[j][i] = fc.boundary(order[i], order[j]);
    }
    auto low = [&](int j) {
        for (int i = n - 1; i >= 0; --i)
            if (sgn(R[j][i]) != 0) return i;
        return -1;
    };
    std::vector<int> owner(n, -1);  // owner[row] = column whose pivot is row
    std::vector<int> pivot(n, -1);
    for (int j = 0; j < n; ++j) {
        int l = low(j);
        while (l >= 0 && owner[l] >= 0) {
            const int o = owner[l];
            const mpq_class f = R[j][l] / R[o][l];
            for (int i = 0; i < n; ++i) {
                R[j][i] -= f * R[o][i];
                V[j][i] -= f * V[o][i];
            }
            l = low(j);
        }
        pivot[j] = l;
        if (l >= 0) owner[l] = j;
    }

    // Filtered basis in which the complex splits into singles and pairs y -> x.
    struct Elem {
        int pos;
        std::vector<mpq_class> chain;  // in permuted coordinates
        int partner = -1;              // index of paired element
        int length = -1;               // filtration drop of the pair, -1 if unpaired
        bool is_target = false;
    };
    std::vector<Elem> elems(n);
    for (int j = 0; j < n; ++j) elems[j].pos = j;
    for (int j = 0; j < n; ++j) {
        if (pivot[j] >= 0) {
            const int i = pivot[j];
            const int len = fc.generators[order[j]].filtration - fc.generators[order[i]].filtration;
            elems[j].chain = V[j];
            elems[j].partner = i;
            elems[j].length = len;
            elems[i].chain = R[j];
            elems[i].partner = j;
            elems[i].length = len;
            elems[i].is_target = true;
        }
    }
    for (int j = 0; j < n; ++j)
        if (elems[j].chain.empty()) elems[j].chain = V[j];

    int fmin = 0, fmax = 0;
    for (int i = 0; i < n; ++i) {
        const int f = fc.generators[i].filtration;
        if (i == 0 || f < fmin) fmin = f;
        if (i == 0 || f > fmax) fmax = f;
    }
    SpectralPages sp;
    sp.r0 = r0;
    sp.width = fmax - fmin;
    const int last = std::max(r0, sp.width + 1);
    auto alive = [&](int j, int r) { return elems[j].length < 0 || elems[j].length >= r; };
    int stab = 0;
    for (int j = 0; j < n; ++j)
        if (elems[j].length >= 0) stab = std::max(stab, elems[j].length + 1);
    sp.stabilized_at = std::max(stab, r0);

    for (int r = r0; r <= last; ++r) {
        Page pg;
        pg.r = r;
        std::vector<int> ids, where(n, -1);
        for (int j = 0; j < n; ++j)
            if (alive(j, r)) {
                where[j] = static_cast<int>(ids.size());
                ids.push_back(j);
            }
        for (int j : ids) {
            PageElement e;
            const auto& g = fc.generators[order[j]];
            e.filtration = g.filtration;
            e.degree = g.degree;
            e.chain.assign(n, 0);
            for (int i = 0; i < n; ++i) e.chain[order[i]] = elems[j].chain[i];
            pg.basis.push_back(std::move(e));
        }
        const int d = static_cast<int>(ids.size());
        pg.differential = RationalMatrix(d, d);
        for (int j : ids)
            if (elems[j].length == r && !elems[j].is_target) pg.differential(where[elems[j].partner], where[j]) = 1;
        std::vector<int> keep;
        for (int c = 0; c < d; ++c)
            if (alive(ids[c], r + 1)) keep.push_back(c);
        pg.next = RationalMatrix::identity(d).select_columns(keep);
        sp.pages.push_back(std::move(pg));
    }
    return sp;
}

std::map<Bidegree, int> page_dims_direct(const FilteredComplex& fc, int r) {
    fc.validate();
    const int n = fc.size();
    const auto& G = fc.generators;
    std::set<Bidegree> keys;
    for (const auto& g : G) keys.insert({g.filtration, g.degree});

    // Basis (columns) of Z^s_p in degree deg: chains in F_p whose boundary lies in F_{p-s}.
    auto Z = [&](int s, int p, int deg) {
        std::vector<int> cols, rows;
        for (int j = 0; j < n; ++j)
            if (G[j].degree == deg && G[j].filtration <= p) cols.push_back(j);
        for (int i = 0; i < n; ++i)
            if (G[i].degree == deg - 1 && G[i].filtration > p - s) rows.push_back(i);
        RationalMatrix sub = fc.boundary.select_rows(rows).select_columns(cols);
        RationalMatrix ker = rows.empty() ? RationalMatrix::identity(static_cast<int>(cols.size())) : sub.nullspace();
        RationalMatrix full(n, ker.cols());
        for (int c = 0; c < ker.cols(); ++c)
            for (size_t k = 0; k < cols.size(); ++k) full(cols[k], c) = ker(static_cast<int>(k), c);
        return full;
    };
    std::map<Bidegree, int> out;
    for (const auto& [p, deg] : keys) {
        const RationalMatrix z = Z(r, p, deg);
        const RationalMatrix lower = Z(r - 1, p - 1, deg);
        const RationalMatrix bnd = fc.boundary * Z(r - 1, p + r - 1, deg + 1);
        RationalMatrix both(n, lower.cols() + bnd.cols());
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < lower.cols(); ++c) both(i, c) = lower(i, c);
            for (int c = 0; c < bnd.cols(); ++c) both(i, lower.cols() + c) = bnd(i, c);
        }
        const int dim = z.cols() - both.rank();
        if (dim > 0) out[{p, deg}] = dim;
    }
    return out;
}

// ---- collapse ----

namespace {

// Orthogonal projector onto the column span of a full-rank basis B.
RationalMatrix projector(const RationalMatrix& B) {
    if (B.cols() == 0) return RationalMatrix(B.rows(), B.rows());
    const RationalMatrix Bt = B.transpose();
    return B * (Bt * B).inverse() * Bt;
}

void check_page(const Page& pg) {
    const int d = static_cast<int>(pg.basis.size());
    if (pg.differential.rows() != d || pg.differential.cols() != d)
        throw VerificationError("inconsistent pages: differential of page " + std::to_string(pg.r) + " has wrong shape");
    if (!(pg.differential * pg.differential).is_zero())
        throw VerificationError("inconsistent pages: d_" + std::to_string(pg.r) + " squared is not zero");
    for (int c = 0; c < d; ++c)
        for (int r = 0; r < d; ++r) {
            if (sgn(pg.differential(r, c)) == 0) continue;
            if (pg.basis[r].degree != pg.basis[c].degree - 1 ||
                pg.basis[r].filtration != pg.basis[c].filtration - pg.r)
                throw VerificationError("inconsistent pages: d_" + std::to_string(pg.r) + " has the wrong bidegree");
        }
}

}  // namespace

CollapsedComplex collapse(const SpectralPages& sp, int r0) {
    if (sp.pages.empty()) throw InputError("no pages");
    if (r0 < sp.r0) throw InputError("page r0=" + std::to_string(r0) + " precedes the first computed page");
    const int first = r0 - sp.r0;
    if (first >= static_cast<int>(sp.pages.size())) throw InputError("page r0 not computed");
    const auto& start = sp.pages[first];
    const int N = static_cast<int>(start.basis.size());

    CollapsedComplex cc;
    cc.r0 = r0;
    cc.basis = start.basis;
    cc.dbar = RationalMatrix(N, N);
    RationalMatrix P = RationalMatrix::identity(N);  // current page inside E^{r0}
    for (size_t i = first; i < sp.pages.size(); ++i) {
        const Page& pg = sp.pages[i];
        check_page(pg);
        if (P.cols() != static_cast<int>(pg.basis.size()))
            throw VerificationError("inconsistent pages: page " + std::to_string(pg.r) + " dimension does not match its predecessor");
        const RationalMatrix& A = pg.differential;
        const RationalMatrix Pt = P.transpose();
        const RationalMatrix Ginv = P.cols() ? (Pt * P).inverse() : RationalMatrix(0, 0);
        const RationalMatrix dr = P.cols() ? P * A * Ginv * Pt : RationalMatrix(N, N);
        cc.dbar = cc.dbar + dr;

        const RationalMatrix im = column_basis(P * A);
        const RationalMatrix K = A.nullspace();
        const RationalMatrix V = P * (K.transpose() * (Pt * P)).nullspace();
        cc.summands_im.push_back(im);
        cc.summands_v.push_back(V);

        if (i + 1 == sp.pages.size()) {
            if (!A.is_zero()) throw VerificationError("inconsistent pages: last page has a nonzero differential");
            cc.harmonic_basis = P;
            break;
        }
        const RationalMatrix& L = pg.next;
        if (L.rows() != A.cols() || !(A * L).is_zero())
            throw VerificationError("inconsistent pages: E^" + std::to_string(pg.r + 1) + " basis is not made of cycles");
        if (L.cols() != K.cols() - im.cols())
            throw VerificationError("inconsistent pages: E^" + std::to_string(pg.r + 1) + " has the wrong dimension");
        const RationalMatrix Z = P * L;
        RationalMatrix H = Z - projector(im) * Z;
        if (H.rank() != H.cols())
            throw VerificationError("inconsistent pages: E^" + std::to_string(pg.r + 1) + " basis is not independent of boundaries");
        P = H;
    }
    return cc;
}

GradedHomology homology(const RationalMatrix& mat, const std::vector<int>& degrees) {
    const int n = mat.rows();
    if (mat.cols() != n || static_cast<int>(degrees.size()) != n) throw InputError("homology: shape mismatch");
    if (!(mat * mat).is_zero()) throw InputError("homology: differential squared is not zero");
    GradedHomology h;
    std::map<int, std::vector<int>> by_deg;
    for (int i = 0; i < n; ++i) by_deg[degrees[i]].push_back(i);
    for (const auto& [deg, idx] : by_deg) {
        RationalMatrix out = mat.select_columns(idx);  // maps from this degree
        const int ker = static_cast<int>(idx.size()) - out.rank();
        int im = 0;
        if (auto it = by_deg.find(deg + 1); it != by_deg.end()) im = mat.select_columns(it->second).rank();
        h.dims[deg] = ker - im;
    }
    h.harmonic = mat.vstack(mat.transpose()).nullspace();
    // The harmonic space is graded; rebuild a homogeneous basis per degree.
    std::vector<std::vector<mpq_class>> cols;
    for (const auto& [deg, idx] : by_deg) {
        const RationalMatrix stacked = mat.vstack(mat.transpose()).select_columns(idx);
        const RationalMatrix ns = stacked.nullspace();
        for (int c = 0; c < ns.cols(); ++c) {
            std::vector<mpq_class> v(n);
            for (size_t k = 0; k < idx.size(); ++k) v[idx[k]] = ns(static_cast<int>(k), c);
            cols.push_back(std::move(v));
            h.harmonic_degree.push_back(deg);
        }
    }
    if (static_cast<int>(cols.size()) == h.harmonic.cols()) h.harmonic = RationalMatrix::from_columns(n, cols);
    return h;
}

std::map<Bidegree, int> harmonic_dims(const CollapsedComplex& cc) {
    std::map<Bidegree, std::vector<int>> blocks;
    for (int i = 0; i < static_cast<int>(cc.basis.size()); ++i)
        blocks[{cc.basis[i].filtration, cc.basis[i].degree}].push_back(i);
    const RationalMatrix stacked = cc.dbar.vstack(cc.dbar.transpose());
    std::map<Bidegree, int> out;
    for (const auto& [bd, idx] : blocks) {
        const int d = stacked.select_columns(idx).nullspace().cols();
        if (d > 0) out[bd] = d;
    }
    return out;
}

}  // namespace symp
