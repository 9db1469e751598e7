#ifndef FLATMODULI_TORUS_FORM_HPP
#define FLATMODULI_TORUS_FORM_HPP

#include <memory>
#include <vector>

#include "flatmoduli/lie/element.hpp"
#include "flatmoduli/torus/geometry.hpp"

namespace flatmoduli::torus {

/// Per-entry frequency shifts induced by a holonomy character z: K-valued on
/// the lattice.  Entry (i,j) of an equivariant section picks up the factor
/// conj(z_{l,i}) z_{l,j} across generator l, i.e. lives on the shifted
/// frequencies m + s(i,j).  Diagonal shifts vanish and shifts add along
/// matrix products, so each basis element of g carries one well-defined
/// shift vector.
struct FrequencyShift {
    lie::SpecPtr spec;
    int g = 0;
    Eigen::MatrixXd basis_shift;              // dim_g x 2g, balanced in [-1/2,1/2), exact zeros when trivial
    std::vector<Eigen::MatrixXd> entry_shift; // per generator l: n x n of components
    bool all_trivial = true;
};

using ShiftPtr = std::shared_ptr<const FrequencyShift>;

inline bool same_twist(const ShiftPtr& a, const ShiftPtr& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b) return false;
    return (a->basis_shift - b->basis_shift).cwiseAbs().maxCoeff() == 0.0;
}

/// Band-limited g-valued differential form on a flat torus, stored per frame
/// as a (dim g) x (mode count) coefficient matrix.  Values are immutable by
/// convention: operations return new forms.
struct LieForm {
    GeomPtr geom;
    lie::SpecPtr spec;
    int degree = 0;
    ShiftPtr twist;  // null for untwisted forms
    std::vector<Eigen::MatrixXcd> comp;

    static LieForm zero(const GeomPtr& geom, const lie::SpecPtr& spec, int degree,
                        ShiftPtr twist = nullptr) {
        LieForm f;
        f.geom = geom;
        f.spec = spec;
        f.degree = degree;
        f.twist = std::move(twist);
        const int nf = geom->frames(degree).count();
        f.comp.assign(static_cast<size_t>(nf),
                      Eigen::MatrixXcd::Zero(spec->dim_g(), geom->mode_count));
        return f;
    }

    int frame_count() const { return static_cast<int>(comp.size()); }

    Complex coeff(int frame, int basis, const Eigen::VectorXi& mode) const {
        return comp[static_cast<size_t>(frame)](basis, geom->mode_index(mode));
    }
    void set_coeff(int frame, int basis, const Eigen::VectorXi& mode, Complex v) {
        comp[static_cast<size_t>(frame)](basis, geom->mode_index(mode)) = v;
    }

    // m + s_b as a real frequency vector
    Eigen::VectorXd shifted_mode(int basis, long mode_idx) const {
        Eigen::VectorXd m = geom->mode_at(mode_idx).cast<double>();
        if (twist) m += twist->basis_shift.row(basis).transpose();
        return m;
    }
    bool basis_untwisted(int basis) const {
        return !twist || twist->basis_shift.row(basis).cwiseAbs().maxCoeff() == 0.0;
    }

    LieForm& operator+=(const LieForm& o) {
        check_compatible(o);
        for (size_t f = 0; f < comp.size(); ++f) comp[f] += o.comp[f];
        return *this;
    }
    LieForm& operator-=(const LieForm& o) {
        check_compatible(o);
        for (size_t f = 0; f < comp.size(); ++f) comp[f] -= o.comp[f];
        return *this;
    }
    LieForm& operator*=(Complex s) {
        for (auto& c : comp) c *= s;
        return *this;
    }

    friend LieForm operator+(LieForm a, const LieForm& b) { return a += b; }
    friend LieForm operator-(LieForm a, const LieForm& b) { return a -= b; }
    friend LieForm operator*(Complex s, LieForm a) { return a *= s; }

    // L2 norm via Parseval; exact for band-limited data
    double norm_sq() const {
        const auto& gram = spec->basis_gram;
        double acc = 0.0;
        for (const auto& c : comp)
            acc += (c.adjoint() * gram * c).diagonal().real().sum();
        return frame_gram(degree) * acc;
    }
    double norm() const { return std::sqrt(norm_sq()); }

    friend Complex inner(const LieForm& a, const LieForm& b) {
        a.check_compatible(b);
        Complex acc = 0.0;
        for (size_t f = 0; f < a.comp.size(); ++f)
            acc += (b.comp[f].adjoint() * a.spec->basis_gram * a.comp[f]).diagonal().sum();
        return frame_gram(a.degree) * acc;
    }

    // largest |m|_inf carrying a coefficient above the structural floor
    int support_bound() const {
        int bound = 0;
        for (const auto& c : comp)
            for (long m = 0; m < geom->mode_count; ++m) {
                if (c.col(m).cwiseAbs().maxCoeff() <= 1e-14) continue;
                bound = std::max(bound, geom->mode_at(m).cwiseAbs().maxCoeff());
            }
        return bound;
    }

    /// Restriction to the zero shifted-frequency modes; on a flat torus this
    /// is exactly the harmonic part.
    LieForm harmonic_part() const {
        LieForm h = zero(geom, spec, degree, twist);
        Eigen::VectorXi origin = Eigen::VectorXi::Zero(2 * geom->g);
        long oidx = geom->mode_index(origin);
        for (size_t f = 0; f < comp.size(); ++f)
            for (int b = 0; b < spec->dim_g(); ++b)
                if (basis_untwisted(b)) h.comp[f](b, oidx) = comp[f](b, oidx);
        return h;
    }
    bool is_harmonic(double tolerance = 0.0) const {
        LieForm rest = *this;
        rest -= harmonic_part();
        return rest.norm() <= tolerance * (1.0 + norm());
    }

    /// Value of the frame-f component at lattice coordinates u (an n x n
    /// matrix), including character phases of twisted entries.
    Matrix value(int frame, const Eigen::VectorXd& u) const {
        Matrix out = Matrix::Zero(spec->n, spec->n);
        const auto& c = comp[static_cast<size_t>(frame)];
        for (int b = 0; b < spec->dim_g(); ++b) {
            Complex amp = 0.0;
            for (long m = 0; m < geom->mode_count; ++m) {
                Complex a = c(b, m);
                if (a == Complex(0.0, 0.0)) continue;
                double phase = 2.0 * kPi * shifted_mode(b, m).dot(u);
                amp += a * Complex(std::cos(phase), std::sin(phase));
            }
            if (amp != Complex(0.0, 0.0)) out += amp * spec->basis(b);
        }
        return out;
    }

    /// Complex conjugate form: conjugated coefficients on negated modes with
    /// conjugated frames.  Restricted to untwisted forms.
    LieForm conjugated() const {
        if (twist && !twist->all_trivial) throw Error("conjugation of twisted forms is not defined here");
        LieForm out = zero(geom, spec, degree, twist);
        const auto& table = geom->frames(degree);
        for (int f = 0; f < frame_count(); ++f) {
            auto [sign, cf] = conjugate_frame(geom->g, table.frames[static_cast<size_t>(f)]);
            int cfi = table.index_of(cf);
            for (long m = 0; m < geom->mode_count; ++m) {
                Eigen::VectorXi neg = -geom->mode_at(m);
                long nm = geom->mode_index(neg);
                // conjugating a g-valued form entrywise keeps the triangular
                // pattern, so coordinates conjugate componentwise
                out.comp[static_cast<size_t>(cfi)].col(nm) +=
                    double(sign) * comp[static_cast<size_t>(f)].col(m).conjugate();
            }
        }
        return out;
    }

    void check_compatible(const LieForm& o) const {
        if (geom.get() != o.geom.get() || spec.get() != o.spec.get())
            throw SpecMismatch("forms live over different geometry or group specs");
        if (degree != o.degree) throw Error("form degrees differ");
        if (!same_twist(twist, o.twist)) throw Error("forms carry different twists");
    }
};

/// Value of a 1-form on a tangent vector given in lattice coordinates
/// (v = sum_l v_l lambda_l), evaluated at the point u.
inline Matrix pair_with_tangent(const LieForm& a, const Eigen::VectorXd& v_lattice,
                                const Eigen::VectorXd& u) {
    if (a.degree != 1) throw Error("pair_with_tangent expects a 1-form");
    const auto& geom = *a.geom;
    Eigen::VectorXcd dz = geom.periods * v_lattice.cast<Complex>();  // dz_a(v)
    Matrix out = Matrix::Zero(a.spec->n, a.spec->n);
    for (int f = 0; f < a.frame_count(); ++f) {
        int c = geom.frames(1).frames[static_cast<size_t>(f)][0];
        Complex pairing = c < geom.g ? dz(c) : std::conj(dz(c - geom.g));
        if (pairing == Complex(0.0, 0.0)) continue;
        out += pairing * a.value(f, u);
    }
    return out;
}

/// Constant form: a single algebra value on one frame's zero mode.
inline LieForm constant_form(const GeomPtr& geom, const lie::SpecPtr& spec, int degree, int frame,
                             const Matrix& val, ShiftPtr twist = nullptr) {
    LieForm f = LieForm::zero(geom, spec, degree, std::move(twist));
    Eigen::VectorXi origin = Eigen::VectorXi::Zero(2 * geom->g);
    Vector coords = spec->to_coords(val);
    for (int b = 0; b < spec->dim_g(); ++b) f.set_coeff(frame, b, origin, coords(b));
    return f;
}

}  // namespace flatmoduli::torus

#endif
