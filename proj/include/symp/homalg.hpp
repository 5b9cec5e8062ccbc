#pragma once

#include <gmpxx.h>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace symp {

class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {}
    static RationalMatrix identity(int n);
    // Columns of the result are the given vectors.
    static RationalMatrix from_columns(int rows, const std::vector<std::vector<mpq_class>>& cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    mpq_class& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    const mpq_class& operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    RationalMatrix operator*(const RationalMatrix& o) const;
    RationalMatrix operator+(const RationalMatrix& o) const;
    RationalMatrix operator-(const RationalMatrix& o) const;
    RationalMatrix transpose() const;
    bool is_zero() const;
    bool operator==(const RationalMatrix& o) const;

    std::vector<mpq_class> column(int c) const;
    RationalMatrix select_columns(const std::vector<int>& idx) const;
    RationalMatrix select_rows(const std::vector<int>& idx) const;
    RationalMatrix vstack(const RationalMatrix& below) const;

    int rank() const;
    // Basis of the null space, one column per vector.
    RationalMatrix nullspace() const;
    // Solve A X = B exactly; throws when inconsistent.
    RationalMatrix solve(const RationalMatrix& B) const;
    RationalMatrix inverse() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<mpq_class> data_;
};

struct Generator {
    std::string id;
    int degree = 0;
    int filtration = 0;
};

struct FilteredComplex {
    std::vector<Generator> generators;
    RationalMatrix boundary;  // column j = boundary of generator j

    void validate() const;
    int size() const { return static_cast<int>(generators.size()); }
};

using Bidegree = std::pair<int, int>;  // (filtration p, total degree n)

struct PageElement {
    int filtration = 0;
    int degree = 0;
    std::vector<mpq_class> chain;  // representative in the generator basis
};

struct Page {
    int r = 0;
    std::vector<PageElement> basis;
    RationalMatrix differential;  // d_r in this page's basis
    RationalMatrix next;          // columns: E^{r+1} basis as d_r-cycles in this page's basis
    std::map<Bidegree, int> dims() const;
};

struct SpectralPages {
    int r0 = 0;
    std::vector<Page> pages;  // pages[i] is E^{r0+i}
    int stabilized_at = 0;    // d_s = 0 for every s >= stabilized_at
    int width = 0;            // max filtration - min filtration

    const Page& page(int r) const;
    std::map<Bidegree, int> infinity_dims() const;
};

struct CollapsedComplex {
    int r0 = 0;
    std::vector<PageElement> basis;   // E^{r0} basis
    RationalMatrix dbar;              // sum of transported d_r
    RationalMatrix harmonic_basis;    // columns span the copy of E^infinity
    std::vector<RationalMatrix> summands_v;   // V_r per page, column bases
    std::vector<RationalMatrix> summands_im;  // im d_r per page
};

struct GradedHomology {
    std::map<int, int> dims;       // degree -> dim
    RationalMatrix harmonic;       // ker(mat) and ker(mat^T), column basis
    std::vector<int> harmonic_degree;
};

SpectralPages pages(const FilteredComplex& fc, int r0 = 0);
CollapsedComplex collapse(const SpectralPages& sp, int r0);
GradedHomology homology(const RationalMatrix& mat, const std::vector<int>& degrees);

// Dimension of E^r_{p,n} straight from subspaces Z^r and B^r of the chain space.
std::map<Bidegree, int> page_dims_direct(const FilteredComplex& fc, int r);

// Harmonic dimension of the collapsed complex per bidegree.
std::map<Bidegree, int> harmonic_dims(const CollapsedComplex& cc);

mpq_class parse_rational(const std::string& s);

}  // namespace symp
