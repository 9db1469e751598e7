#ifndef FLATMODULI_TORUS_CALCULUS_HPP
#define FLATMODULI_TORUS_CALCULUS_HPP

#include "flatmoduli/torus/form.hpp"

namespace flatmoduli::torus {

enum class Deriv { d, del, delbar };

namespace detail {

// wedge-by-nu matrix from degree-p frames to degree-(p+1) frames, with the
// covector restricted to the flavor's components
inline Eigen::MatrixXcd wedge_symbol(const TorusGeom& geom, const Eigen::VectorXcd& nu, int p,
                                     Deriv flavor) {
    const auto& from = geom.frames(p);
    const auto& to = geom.frames(p + 1);
    Eigen::MatrixXcd sym = Eigen::MatrixXcd::Zero(to.count(), from.count());
    for (int c = 0; c < 2 * geom.g; ++c) {
        if (flavor == Deriv::del && c >= geom.g) continue;
        if (flavor == Deriv::delbar && c < geom.g) continue;
        if (nu(c) == Complex(0.0, 0.0)) continue;
        for (int f = 0; f < from.count(); ++f) {
            auto w = wedge_front(c, from.frames[static_cast<size_t>(f)]);
            if (!w) continue;
            sym(to.index_of(w->second), f) += double(w->first) * nu(c);
        }
    }
    return sym;
}

// gather the frame-coefficient vector of basis row b at mode m
inline Eigen::VectorXcd gather(const LieForm& a, int b, long m) {
    Eigen::VectorXcd v(a.frame_count());
    for (int f = 0; f < a.frame_count(); ++f) v(f) = a.comp[static_cast<size_t>(f)](b, m);
    return v;
}
inline void scatter(LieForm& a, int b, long m, const Eigen::VectorXcd& v) {
    for (int f = 0; f < a.frame_count(); ++f) a.comp[static_cast<size_t>(f)](b, m) = v(f);
}

}  // namespace detail

/// Frequency-diagonal application of d, del or delbar; twisted entries
/// differentiate with their shifted frequencies (equivariant model).
inline LieForm differential(const LieForm& a, Deriv flavor = Deriv::d) {
    const auto& geom = *a.geom;
    if (a.degree >= geom.top_degree()) return LieForm::zero(a.geom, a.spec, a.degree, a.twist);
    LieForm out = LieForm::zero(a.geom, a.spec, a.degree + 1, a.twist);
    for (int b = 0; b < a.spec->dim_g(); ++b) {
        for (long m = 0; m < geom.mode_count; ++m) {
            Eigen::VectorXcd nu = geom.covector(a.shifted_mode(b, m));
            Eigen::MatrixXcd sym = detail::wedge_symbol(geom, nu, a.degree, flavor);
            detail::scatter(out, b, m, sym * detail::gather(a, b, m));
        }
    }
    return out;
}

/// Formal adjoint of the flavor's differential for the flat Kahler metric.
inline LieForm codifferential(const LieForm& a, Deriv flavor = Deriv::d) {
    if (a.degree == 0) return LieForm::zero(a.geom, a.spec, 0, a.twist);
    const auto& geom = *a.geom;
    LieForm out = LieForm::zero(a.geom, a.spec, a.degree - 1, a.twist);
    for (int b = 0; b < a.spec->dim_g(); ++b) {
        for (long m = 0; m < geom.mode_count; ++m) {
            Eigen::VectorXcd nu = geom.covector(a.shifted_mode(b, m));
            Eigen::MatrixXcd sym = detail::wedge_symbol(geom, nu, a.degree - 1, flavor);
            // uniform frame Gram 2^p makes the metric adjoint 2 * sym^H
            detail::scatter(out, b, m, 2.0 * sym.adjoint() * detail::gather(a, b, m));
        }
    }
    return out;
}

enum class Lap { d, del, delbar };

/// Hodge Laplacian (or its del / delbar variants) as a per-mode symbol.
inline LieForm laplacian(const LieForm& a, Lap which = Lap::d) {
    Deriv flavor = which == Lap::d ? Deriv::d : which == Lap::del ? Deriv::del : Deriv::delbar;
    LieForm up = a.degree < a.geom->top_degree()
                     ? codifferential(differential(a, flavor), flavor)
                     : LieForm::zero(a.geom, a.spec, a.degree, a.twist);
    LieForm down = a.degree > 0 ? differential(codifferential(a, flavor), flavor)
                                : LieForm::zero(a.geom, a.spec, 0, a.twist);
    return up + down;
}

struct HodgeSplit {
    LieForm harmonic;
    LieForm exact_potential;    // one degree lower
    LieForm coexact_potential;  // one degree higher
    double residual = 0.0;      // reconstruction error, relative
};

/// alpha = harmonic + d(exact_potential) + d*(coexact_potential), by exact
/// per-mode inversion of the Laplacian symbol.
inline HodgeSplit hodge_decompose(const LieForm& a) {
    const auto& geom = *a.geom;
    const int p = a.degree;
    HodgeSplit out{a.harmonic_part(),
                   LieForm::zero(a.geom, a.spec, p > 0 ? p - 1 : 0, a.twist),
                   LieForm::zero(a.geom, a.spec, p < geom.top_degree() ? p + 1 : p, a.twist), 0.0};

    for (int b = 0; b < a.spec->dim_g(); ++b) {
        for (long m = 0; m < geom.mode_count; ++m) {
            Eigen::VectorXd sm = a.shifted_mode(b, m);
            if (sm.cwiseAbs().maxCoeff() == 0.0) continue;  // harmonic mode
            Eigen::VectorXcd av = detail::gather(a, b, m);
            if (av.cwiseAbs().maxCoeff() == 0.0) continue;
            Eigen::VectorXcd nu = geom.covector(sm);
            Eigen::MatrixXcd up = p < geom.top_degree()
                                      ? detail::wedge_symbol(geom, nu, p, Deriv::d)
                                      : Eigen::MatrixXcd::Zero(0, a.frame_count());
            Eigen::MatrixXcd down = p > 0 ? detail::wedge_symbol(geom, nu, p - 1, Deriv::d)
                                          : Eigen::MatrixXcd::Zero(a.frame_count(), 0);
            Eigen::MatrixXcd lap = 2.0 * (up.adjoint() * up) + 2.0 * (down * down.adjoint());
            Eigen::VectorXcd green = lap.ldlt().solve(av);
            if (p > 0) detail::scatter(out.exact_potential, b, m, 2.0 * down.adjoint() * green);
            if (p < geom.top_degree()) detail::scatter(out.coexact_potential, b, m, up * green);
        }
    }
    LieForm recon = out.harmonic;
    if (p > 0) recon += differential(out.exact_potential, Deriv::d);
    if (p < geom.top_degree()) recon += codifferential(out.coexact_potential, Deriv::d);
    LieForm diff = a;
    diff -= recon;
    out.residual = diff.norm() / (1.0 + a.norm());
    return out;
}

// ---------------------------------------------------------------------------
// grid products

namespace detail {

inline Eigen::VectorXcd shift_phase(const TorusGeom& geom, const Eigen::VectorXd& s) {
    Eigen::VectorXcd phase(geom.grid_count);
    const int n = geom.grid;
    Eigen::VectorXi p = Eigen::VectorXi::Zero(2 * geom.g);
    for (long idx = 0; idx < geom.grid_count; ++idx) {
        double arg = 0.0;
        for (int l = 0; l < 2 * geom.g; ++l) arg += s(l) * p(l);
        arg *= 2.0 * kPi / n;
        phase(idx) = Complex(std::cos(arg), std::sin(arg));
        for (int l = 2 * geom.g - 1; l >= 0; --l) {
            if (++p(l) < n) break;
            p(l) = 0;
        }
    }
    return phase;
}

// entry-space grid values of one frame component, character phases included
struct EntryGrid {
    std::vector<Eigen::MatrixXcd> vals;  // per frame: n^2 x grid_count
};

inline Eigen::MatrixXd entry_shift_table(const LieForm& a) {
    // n x n per generator folded into an (n^2 x 2g) matrix
    const int n = a.spec->n, g2 = 2 * a.geom->g;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n * n, g2);
    if (a.twist)
        for (int l = 0; l < g2; ++l)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) s(i + n * j, l) = a.twist->entry_shift[static_cast<size_t>(l)](i, j);
    return s;
}

inline EntryGrid synthesize(const LieForm& a) {
    const auto& geom = *a.geom;
    const int n = a.spec->n;
    EntryGrid out;
    out.vals.assign(a.comp.size(), Eigen::MatrixXcd::Zero(n * n, geom.grid_count));
    Eigen::MatrixXd stab = entry_shift_table(a);
    std::vector<Complex> buf(static_cast<size_t>(geom.grid_count));

    for (size_t f = 0; f < a.comp.size(); ++f) {
        Eigen::MatrixXcd entry_modes = a.spec->basis_flat * a.comp[f];  // n^2 x modes
        for (int e = 0; e < n * n; ++e) {
            if (entry_modes.row(e).cwiseAbs().maxCoeff() == 0.0) continue;
            std::fill(buf.begin(), buf.end(), Complex(0.0, 0.0));
            for (long m = 0; m < geom.mode_count; ++m) {
                Complex c = entry_modes(e, m);
                if (c == Complex(0.0, 0.0)) continue;
                // fold the mode into the grid index
                Eigen::VectorXi mm = geom.mode_at(m);
                long gidx = 0;
                for (int l = 0; l < 2 * geom.g; ++l) {
                    int q = mm(l) % geom.grid;
                    if (q < 0) q += geom.grid;
                    gidx = gidx * geom.grid + q;
                }
                buf[static_cast<size_t>(gidx)] += c;
            }
            Fft::backward(geom.grid_dims, buf.data());
            Eigen::Map<Eigen::VectorXcd> v(buf.data(), geom.grid_count);
            if (stab.row(e).cwiseAbs().maxCoeff() != 0.0)
                out.vals[f].row(e) = v.cwiseProduct(shift_phase(geom, stab.row(e).transpose())).transpose();
            else
                out.vals[f].row(e) = v.transpose();
        }
    }
    return out;
}

// inverse of synthesize for a prescribed output twist; reports how far the
// grid data was from the projected band-limited g-valued result
inline LieForm analyze(const GeomPtr& geomp, const lie::SpecPtr& spec, int degree, ShiftPtr twist,
                       const EntryGrid& grid, double* projection_residual = nullptr) {
    const auto& geom = *geomp;
    const int n = spec->n;
    LieForm out = LieForm::zero(geomp, spec, degree, std::move(twist));
    Eigen::MatrixXd stab = entry_shift_table(out);
    std::vector<Complex> buf(static_cast<size_t>(geom.grid_count));
    double res = 0.0, scale = 0.0;

    for (size_t f = 0; f < out.comp.size(); ++f) {
        Eigen::MatrixXcd entry_modes = Eigen::MatrixXcd::Zero(n * n, geom.mode_count);
        for (int e = 0; e < n * n; ++e) {
            if (grid.vals[f].row(e).cwiseAbs().maxCoeff() == 0.0) continue;
            Eigen::Map<Eigen::VectorXcd> v(buf.data(), geom.grid_count);
            v = grid.vals[f].row(e).transpose();
            if (stab.row(e).cwiseAbs().maxCoeff() != 0.0)
                v = v.cwiseProduct(shift_phase(geom, stab.row(e).transpose()).conjugate()).eval();
            Fft::forward(geom.grid_dims, buf.data());
            const double norml = 1.0 / static_cast<double>(geom.grid_count);
            for (long m = 0; m < geom.mode_count; ++m) {
                Eigen::VectorXi mm = geom.mode_at(m);
                long gidx = 0;
                for (int l = 0; l < 2 * geom.g; ++l) {
                    int q = mm(l) % geom.grid;
                    if (q < 0) q += geom.grid;
                    gidx = gidx * geom.grid + q;
                }
                entry_modes(e, m) = buf[static_cast<size_t>(gidx)] * norml;
            }
        }
        out.comp[f] = spec->basis_pinv * entry_modes;
        if (projection_residual) {
            res += (spec->basis_flat * out.comp[f] - entry_modes).squaredNorm();
            scale += entry_modes.squaredNorm();
        }
    }
    if (projection_residual) *projection_residual = std::sqrt(res) / (1.0 + std::sqrt(scale));
    return out;
}

inline void require_product_budget(const LieForm& a, const LieForm& b) {
    int sa = a.support_bound(), sb = b.support_bound();
    int safe = a.geom->grid - a.geom->cutoff - 1;
    if (sa + sb > safe)
        throw BandLimitOverflow("product support " + std::to_string(sa + sb) +
                                " exceeds the dealiasing budget " + std::to_string(safe));
}

inline ShiftPtr combine_twist(const LieForm& a, const LieForm& b) {
    if (a.twist && b.twist) {
        if (!same_twist(a.twist, b.twist)) throw Error("product of forms over different twists");
        return a.twist;
    }
    return a.twist ? a.twist : b.twist;
}

// alpha ^ beta with matrix multiplication of values, dealiased on the grid
inline EntryGrid wedge_entry_product(const LieForm& a, const LieForm& b, const EntryGrid& ga,
                                     const EntryGrid& gb, int out_degree) {
    const auto& geom = *a.geom;
    const int n = a.spec->n;
    const auto& fa = geom.frames(a.degree);
    const auto& fb = geom.frames(b.degree);
    const auto& fo = geom.frames(out_degree);
    EntryGrid out;
    out.vals.assign(static_cast<size_t>(fo.count()), Eigen::MatrixXcd::Zero(n * n, geom.grid_count));

    for (int f1 = 0; f1 < fa.count(); ++f1) {
        if (ga.vals[static_cast<size_t>(f1)].cwiseAbs().maxCoeff() == 0.0) continue;
        for (int f2 = 0; f2 < fb.count(); ++f2) {
            if (gb.vals[static_cast<size_t>(f2)].cwiseAbs().maxCoeff() == 0.0) continue;
            auto w = wedge_frames(fa.frames[static_cast<size_t>(f1)], fb.frames[static_cast<size_t>(f2)]);
            if (!w) continue;
            double sign = w->first;
            auto& acc = out.vals[static_cast<size_t>(fo.index_of(w->second))];
            const auto& va = ga.vals[static_cast<size_t>(f1)];
            const auto& vb = gb.vals[static_cast<size_t>(f2)];
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        acc.row(i + n * j) +=
                            sign * va.row(i + n * k).cwiseProduct(vb.row(k + n * j));
        }
    }
    return out;
}

}  // namespace detail

/// Graded bracket [alpha, beta] = alpha ^ beta - (-1)^{pq} beta ^ alpha with
/// pointwise matrix products, dealiased by the 3/2-style padded grid.
inline LieForm wedge_bracket(const LieForm& a, const LieForm& b, double* projection_residual = nullptr) {
    if (a.geom.get() != b.geom.get() || a.spec.get() != b.spec.get())
        throw SpecMismatch("bracket operands over different geometry or spec");
    detail::require_product_budget(a, b);
    int out_degree = a.degree + b.degree;
    if (out_degree > a.geom->top_degree()) return LieForm::zero(a.geom, a.spec, a.geom->top_degree(), detail::combine_twist(a, b));

    auto ga = detail::synthesize(a);
    auto gb = detail::synthesize(b);
    auto ab = detail::wedge_entry_product(a, b, ga, gb, out_degree);
    auto ba = detail::wedge_entry_product(b, a, gb, ga, out_degree);
    double sgn = (a.degree * b.degree) % 2 == 0 ? -1.0 : 1.0;
    for (size_t f = 0; f < ab.vals.size(); ++f) ab.vals[f] += sgn * ba.vals[f];
    return detail::analyze(a.geom, a.spec, out_degree, detail::combine_twist(a, b), ab,
                           projection_residual);
}

/// alpha ^ alpha (= [alpha,alpha]/2 for odd degree), entering the curvature.
inline LieForm wedge_square(const LieForm& a) {
    detail::require_product_budget(a, a);
    int out_degree = 2 * a.degree;
    if (out_degree > a.geom->top_degree()) return LieForm::zero(a.geom, a.spec, a.geom->top_degree(), a.twist);
    auto ga = detail::synthesize(a);
    auto sq = detail::wedge_entry_product(a, a, ga, ga, out_degree);
    return detail::analyze(a.geom, a.spec, out_degree, a.twist, sq);
}

struct DdbarSolution {
    LieForm psi;
    double residual = 0.0;  // || del delbar psi - phi || / ||phi||
};

/// The del-delbar lemma as a per-mode least-squares inversion: given phi of
/// bidegree (p,q), p,q >= 1, d-closed with vanishing harmonic part, produce
/// psi of bidegree (p-1,q-1) with del delbar psi = phi and zero harmonic
/// part (the pinned representative).
inline DdbarSolution solve_ddbar(const LieForm& phi, double harmonic_tol = 1e-10,
                                 double closed_tol = 1e-8) {
    const auto& geom = *phi.geom;
    const int deg = phi.degree;
    if (deg < 2) throw Error("solve_ddbar needs a form of bidegree (p,q) with p,q >= 1");
    double phin = phi.norm();

    double hnorm = phi.harmonic_part().norm();
    if (hnorm > harmonic_tol * (1.0 + phin))
        throw Error("solve_ddbar: harmonic obstruction of norm " + std::to_string(hnorm));
    if (deg < geom.top_degree()) {
        double closed = differential(phi, Deriv::d).norm();
        if (closed > closed_tol * (1.0 + phin)) throw Error("solve_ddbar: input is not d-closed");
    }

    LieForm psi = LieForm::zero(phi.geom, phi.spec, deg - 2, phi.twist);
    double res_sq = 0.0;
    for (int b = 0; b < phi.spec->dim_g(); ++b) {
        for (long m = 0; m < geom.mode_count; ++m) {
            Eigen::VectorXd sm = phi.shifted_mode(b, m);
            Eigen::VectorXcd pv = detail::gather(phi, b, m);
            if (sm.cwiseAbs().maxCoeff() == 0.0) continue;  // harmonic mode: skip (checked above)
            if (pv.cwiseAbs().maxCoeff() == 0.0) continue;
            Eigen::VectorXcd nu = geom.covector(sm);
            Eigen::MatrixXcd up_bar = detail::wedge_symbol(geom, nu, deg - 2, Deriv::delbar);
            Eigen::MatrixXcd up_del = detail::wedge_symbol(geom, nu, deg - 1, Deriv::del);
            Eigen::MatrixXcd op = up_del * up_bar;
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(op);
            Eigen::VectorXcd sol = cod.solve(pv);
            res_sq += (op * sol - pv).squaredNorm() * frame_gram(deg);
            detail::scatter(psi, b, m, sol);
        }
    }
    return {psi, std::sqrt(res_sq) / (phin > 0 ? phin : 1.0)};
}

/// Basis of harmonic twisted forms of bidegree (p,q): one constant frame per
/// basis element whose character is trivial; entries with nontrivial shifts
/// contribute nothing.
inline std::vector<LieForm> twisted_harmonic_basis(const GeomPtr& geom, const lie::SpecPtr& spec,
                                                   const ShiftPtr& shift, int p, int q) {
    std::vector<LieForm> basis;
    const auto& table = geom->frames(p + q);
    Eigen::VectorXi origin = Eigen::VectorXi::Zero(2 * geom->g);
    for (int b = 0; b < spec->dim_g(); ++b) {
        if (shift && shift->basis_shift.row(b).cwiseAbs().maxCoeff() != 0.0) continue;
        for (int f = 0; f < table.count(); ++f) {
            if (table.bidegree(f) != std::make_pair(p, q)) continue;
            LieForm unit = LieForm::zero(geom, spec, p + q, shift);
            unit.set_coeff(f, b, origin, 1.0);
            basis.push_back(std::move(unit));
        }
    }
    return basis;
}

/// Natural projection onto bidegree (p,q) (frame filter; exact bookkeeping).
inline LieForm type_project(const LieForm& a, int p, int q) {
    if (p + q != a.degree) throw Error("type_project bidegree must sum to the form degree");
    LieForm out = LieForm::zero(a.geom, a.spec, a.degree, a.twist);
    const auto& table = a.geom->frames(a.degree);
    for (int f = 0; f < a.frame_count(); ++f)
        if (table.bidegree(f) == std::make_pair(p, q)) out.comp[static_cast<size_t>(f)] = a.comp[static_cast<size_t>(f)];
    return out;
}

}  // namespace flatmoduli::torus

#endif
