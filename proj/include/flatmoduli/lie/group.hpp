#ifndef FLATMODULI_LIE_GROUP_HPP
#define FLATMODULI_LIE_GROUP_HPP

#include <memory>
#include <string>
#include <vector>

#include "flatmoduli/common.hpp"

namespace flatmoduli::lie {

enum class Family { Triangular, BorelSp, BorelSO };

inline std::string family_name(Family f) {
    switch (f) {
        case Family::Triangular: return "Triangular";
        case Family::BorelSp: return "BorelSp";
        case Family::BorelSO: return "BorelSO";
    }
    return "?";
}

/// A solvable matrix group G = N⋊S realized inside GL_n(C) as an
/// upper-triangular intersection.  The torus basis spans the abelian
/// subalgebra s (diagonal matrices), the nilpotent basis spans the ideal n
/// (strictly upper triangular), and every basis matrix has exact integer
/// entries so that structural identities can be checked without tolerance.
struct GroupSpec {
    Family family = Family::Triangular;
    int rank = 0;  // family parameter: n for Triangular(n), 2n for BorelSp(2n), m for BorelSO(m)
    int n = 0;     // ambient matrix dimension

    std::vector<Matrix> torus_basis;  // spans s
    std::vector<Matrix> nil_basis;    // spans n
    std::vector<int> nil_level;       // lower-central-series depth per nil basis element
    int max_level = 0;

    Eigen::MatrixXi pattern;  // 1 where g may have a nonzero entry
    Matrix bilinear_form;     // J (Sp) or S (SO); empty for Triangular

    // Derived linear-algebra helpers, filled by finalize().
    Eigen::MatrixXcd basis_flat;   // n^2 x dim_g, torus columns first
    Eigen::MatrixXcd basis_pinv;   // dim_g x n^2, left inverse of basis_flat
    Eigen::MatrixXcd basis_gram;   // dim_g x dim_g, tr(b_a b_b^H)

    int dim_s() const { return static_cast<int>(torus_basis.size()); }
    int dim_n() const { return static_cast<int>(nil_basis.size()); }
    int dim_g() const { return dim_s() + dim_n(); }

    const Matrix& basis(int k) const {
        return k < dim_s() ? torus_basis[static_cast<size_t>(k)]
                           : nil_basis[static_cast<size_t>(k - dim_s())];
    }
    bool is_nil_index(int k) const { return k >= dim_s(); }
    int level_of(int k) const { return is_nil_index(k) ? nil_level[static_cast<size_t>(k - dim_s())] : 0; }

    // Coordinates of a g-valued matrix in the chosen basis.
    Vector to_coords(const Matrix& m) const {
        Vector flat = Eigen::Map<const Vector>(m.data(), m.size());
        return basis_pinv * flat;
    }
    Matrix from_coords(const Vector& c) const {
        Vector flat = basis_flat * c;
        return Eigen::Map<const Matrix>(flat.data(), n, n);
    }
    // Residual of the orthogonal projection onto g; zero for members.
    double membership_residual(const Matrix& m) const {
        return (from_coords(to_coords(m)) - m).cwiseAbs().maxCoeff();
    }

    void finalize();
};

namespace detail {

inline Matrix unit(int n, int i, int j) {
    Matrix e = Matrix::Zero(n, n);
    e(i, j) = 1.0;
    return e;
}

// Lower-central-series depth of each nil basis element: level(b) is the
// largest k with b in span n^k, n^1 = n, n^{k+1} = [n, n^k].
inline std::vector<int> filtration_levels(const std::vector<Matrix>& nil) {
    const size_t d = nil.size();
    std::vector<int> level(d, 1);
    if (d == 0) return level;
    const int n = static_cast<int>(nil[0].rows());
    auto flatten = [n](const std::vector<Matrix>& ms) {
        Eigen::MatrixXcd a(n * n, ms.size());
        for (size_t k = 0; k < ms.size(); ++k)
            a.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Vector>(ms[k].data(), n * n);
        return a;
    };
    std::vector<Matrix> term = nil;
    for (int k = 2; k <= static_cast<int>(d) + 1 && !term.empty(); ++k) {
        std::vector<Matrix> next;
        for (const auto& x : nil)
            for (const auto& y : term) {
                Matrix b = x * y - y * x;
                if (b.cwiseAbs().maxCoeff() > 0.0) next.push_back(b);
            }
        if (next.empty()) break;
        Eigen::MatrixXcd a = flatten(next);
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(a);
        for (size_t i = 0; i < d; ++i) {
            Vector v = Eigen::Map<const Vector>(nil[i].data(), n * n);
            double res = (a * cod.solve(v) - v).norm();
            if (res < tol::membership * (1.0 + v.norm())) level[i] = k;
        }
        term = std::move(next);
    }
    return level;
}

}  // namespace detail

inline void GroupSpec::finalize() {
    nil_level = detail::filtration_levels(nil_basis);
    max_level = 0;
    for (int l : nil_level) max_level = std::max(max_level, l);
    basis_flat.resize(n * n, dim_g());
    for (int k = 0; k < dim_g(); ++k)
        basis_flat.col(k) = Eigen::Map<const Vector>(basis(k).data(), n * n);
    // Basis matrices are linearly independent with integer entries, so the
    // normal-equation inverse is well conditioned.
    basis_gram = basis_flat.adjoint() * basis_flat;
    basis_pinv = basis_gram.ldlt().solve(basis_flat.adjoint());
    if (pattern.size() == 0) {
        pattern = Eigen::MatrixXi::Zero(n, n);
        for (int k = 0; k < dim_g(); ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (std::abs(basis(k)(i, j)) > 0.0) pattern(i, j) = 1;
    }
}

using SpecPtr = std::shared_ptr<const GroupSpec>;

/// Builds one of the supported families. Triangular(n): all upper-triangular
/// invertible matrices. BorelSp(2n) and BorelSO(m): Borel subgroups of
/// Sp_2n(C) / SO_m(C) realized with antidiagonal bilinear forms so that both
/// equal their upper-triangular intersections.
inline SpecPtr build_group(Family family, int rank) {
    auto spec = std::make_shared<GroupSpec>();
    spec->family = family;
    spec->rank = rank;
    using detail::unit;

    switch (family) {
        case Family::Triangular: {
            if (rank < 1 || rank > 6) throw Error("Triangular rank must be in 1..6");
            const int n = rank;
            spec->n = n;
            for (int i = 0; i < n; ++i) spec->torus_basis.push_back(unit(n, i, i));
            for (int d = 1; d < n; ++d)
                for (int i = 0; i + d < n; ++i) spec->nil_basis.push_back(unit(n, i, i + d));
            break;
        }
        case Family::BorelSp: {
            if (rank < 2 || rank > 6 || rank % 2 != 0) throw Error("BorelSp rank must be even, in 2..6");
            const int m = rank, half = m / 2;
            spec->n = m;
            Matrix j = Matrix::Zero(m, m);
            for (int i = 0; i < m; ++i) j(i, m - 1 - i) = (i < half) ? 1.0 : -1.0;
            spec->bilinear_form = j;
            for (int i = 0; i < half; ++i)
                spec->torus_basis.push_back(unit(m, i, i) - unit(m, m - 1 - i, m - 1 - i));
            // gl_half positive roots, embedded as X - (antitransposed X)
            for (int i = 0; i < half; ++i)
                for (int jj = i + 1; jj < half; ++jj)
                    spec->nil_basis.push_back(unit(m, i, jj) - unit(m, m - 1 - jj, m - 1 - i));
            // abelian Siegel block: symmetric matrices in the top-right corner
            for (int i = 0; i < half; ++i)
                for (int jj = i; jj < half; ++jj)
                    spec->nil_basis.push_back(i == jj ? unit(m, i, m - 1 - i)
                                                      : unit(m, i, m - 1 - jj) + unit(m, jj, m - 1 - i));
            break;
        }
        case Family::BorelSO: {
            if (rank < 3 || rank > 6) throw Error("BorelSO rank must be in 3..6");
            const int m = rank, half = m / 2;
            spec->n = m;
            Matrix s = Matrix::Zero(m, m);
            for (int i = 0; i < m; ++i) s(i, m - 1 - i) = 1.0;
            spec->bilinear_form = s;
            for (int i = 0; i < half; ++i)
                spec->torus_basis.push_back(unit(m, i, i) - unit(m, m - 1 - i, m - 1 - i));
            for (int i = 0; i < m; ++i)
                for (int jj = i + 1; jj < m - 1 - i; ++jj)
                    spec->nil_basis.push_back(unit(m, i, jj) - unit(m, m - 1 - jj, m - 1 - i));
            break;
        }
    }
    spec->finalize();
    return spec;
}

}  // namespace flatmoduli::lie

#endif
