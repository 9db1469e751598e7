#ifndef FLATMODULI_LIE_ELEMENT_HPP
#define FLATMODULI_LIE_ELEMENT_HPP

#include <utility>

#include "flatmoduli/lie/group.hpp"

namespace flatmoduli::lie {

/// Element of the Lie algebra g, stored as its ambient matrix.
struct AlgebraElement {
    Matrix m;
    SpecPtr spec;

    AlgebraElement(Matrix mat, SpecPtr s) : m(std::move(mat)), spec(std::move(s)) {
        if (spec->membership_residual(m) > tol::membership * (1.0 + m.norm()))
            throw Error("matrix does not lie in the Lie algebra of the group spec");
    }
    static AlgebraElement zero(const SpecPtr& s) { return AlgebraElement(Matrix::Zero(s->n, s->n), s); }
    double norm() const { return m.norm(); }
};

/// Element of G itself: exact zero pattern, nonzero diagonal.
struct GroupElement {
    Matrix m;
    SpecPtr spec;

    GroupElement(Matrix mat, SpecPtr s) : m(std::move(mat)), spec(std::move(s)) {
        for (int i = 0; i < spec->n; ++i) {
            if (std::abs(m(i, i)) == 0.0) throw Error("group element has zero diagonal entry");
            for (int j = 0; j < i; ++j)
                if (std::abs(m(i, j)) != 0.0) throw Error("group element violates the triangular zero pattern");
        }
        if (spec->bilinear_form.size() > 0) {
            const Matrix& b = spec->bilinear_form;
            double res = (m.transpose() * b * m - b).norm();
            if (res > 1e-9 * (1.0 + m.squaredNorm())) throw Error("group element does not preserve the bilinear form");
        }
    }
    static GroupElement identity(const SpecPtr& s) { return GroupElement(Matrix::Identity(s->n, s->n), s); }
    bool is_unipotent() const {
        for (int i = 0; i < spec->n; ++i)
            if (std::abs(m(i, i) - 1.0) != 0.0) return false;
        return true;
    }
};

inline void require_same_spec(const SpecPtr& a, const SpecPtr& b) {
    if (a.get() != b.get()) throw SpecMismatch("operands built over different group specs");
}

inline AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
    require_same_spec(x.spec, y.spec);
    return AlgebraElement(x.m * y.m - y.m * x.m, x.spec);
}

/// X = X_s + X_n with X_n strictly upper triangular; unique and idempotent.
inline std::pair<AlgebraElement, AlgebraElement> semidirect_split(const AlgebraElement& x) {
    Matrix diag = Matrix::Zero(x.spec->n, x.spec->n);
    diag.diagonal() = x.m.diagonal();
    return {AlgebraElement(x.m - diag, x.spec), AlgebraElement(diag, x.spec)};
}

namespace detail {

// Terminating polynomial series; exact (to rounding) for strictly
// triangular x, where x^n = 0.
inline Matrix exp_nilpotent(const Matrix& x) {
    const int n = static_cast<int>(x.rows());
    Matrix acc = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    for (int k = 1; k < n; ++k) {
        term = term * x / static_cast<double>(k);
        acc += term;
    }
    return acc;
}

// exp for triangular X via diagonal Schur-Parlett recurrence: exact on the
// diagonal, and solves the Sylvester relations entry by entry along the
// superdiagonals.  Falls back to squaring only for confluent diagonals.
inline Matrix exp_triangular(const Matrix& x) {
    const int n = static_cast<int>(x.rows());
    Matrix f = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) f(i, i) = std::exp(x(i, i));
    for (int d = 1; d < n; ++d) {
        for (int i = 0; i + d < n; ++i) {
            int j = i + d;
            // F X - X F = 0 gives a recurrence for f(i,j) when x(i,i) != x(j,j).
            Complex num = x(i, j) * (f(j, j) - f(i, i));
            for (int k = i + 1; k < j; ++k) num += x(i, k) * f(k, j) - f(i, k) * x(k, j);
            Complex den = x(j, j) - x(i, i);
            if (std::abs(den) > 1e-8) {
                f(i, j) = num / den;
            } else {
                // confluent eigenvalues: scaled squaring on the whole matrix
                int s = 0;
                double nrm = x.cwiseAbs().maxCoeff();
                while (nrm > 0.25) { nrm *= 0.5; ++s; }
                Matrix y = x / std::pow(2.0, s);
                Matrix acc = Matrix::Identity(n, n), term = Matrix::Identity(n, n);
                for (int k = 1; k <= 24; ++k) {
                    term = term * y / static_cast<double>(k);
                    acc += term;
                    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
                }
                for (int t = 0; t < s; ++t) acc = acc * acc;
                return acc;
            }
        }
    }
    return f;
}

}  // namespace detail

/// Matrix exponential g -> G; exact (to rounding) terminating series when X
/// is nilpotent.
inline GroupElement exp_element(const AlgebraElement& x) {
    const int n = x.spec->n;
    bool nilpotent = true;
    for (int i = 0; i < n; ++i)
        if (std::abs(x.m(i, i)) != 0.0) nilpotent = false;
    Matrix e = nilpotent ? detail::exp_nilpotent(x.m) : detail::exp_triangular(x.m);
    // structural zeros below the diagonal are exact by construction
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) e(i, j) = 0.0;
    return GroupElement(e, x.spec);
}

/// Terminating Mercator series; requires a unipotent argument.
inline AlgebraElement log_unipotent(const GroupElement& g) {
    if (!g.is_unipotent()) throw Error("log_unipotent requires a unipotent element");
    const int n = g.spec->n;
    Matrix nil = g.m - Matrix::Identity(n, n);
    Matrix acc = Matrix::Zero(n, n);
    Matrix pw = Matrix::Identity(n, n);
    for (int k = 1; k < n; ++k) {
        pw = pw * nil;
        acc += (k % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(k) * pw;
    }
    return AlgebraElement(acc, g.spec);
}

/// Ad g(X) = g X g^{-1}.
inline AlgebraElement adjoint(const GroupElement& g, const AlgebraElement& x) {
    require_same_spec(g.spec, x.spec);
    Matrix inv = g.m.triangularView<Eigen::Upper>().solve(Matrix::Identity(g.spec->n, g.spec->n));
    return AlgebraElement(g.m * x.m * inv, g.spec);
}

inline GroupElement group_inverse(const GroupElement& g) {
    Matrix inv = g.m.triangularView<Eigen::Upper>().solve(Matrix::Identity(g.spec->n, g.spec->n));
    return GroupElement(inv, g.spec);
}

inline GroupElement group_mul(const GroupElement& a, const GroupElement& b) {
    require_same_spec(a.spec, b.spec);
    return GroupElement(a.m * b.m, a.spec);
}

}  // namespace flatmoduli::lie

#endif
