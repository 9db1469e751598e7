#include <catch2/catch_amalgamated.hpp>

#include "flatmoduli/torus/calculus.hpp"
#include "helpers.hpp"

using namespace flatmoduli;
using namespace flatmoduli::torus;
using flatmoduli::lie::Family;
using flatmoduli::lie::build_group;
using testutil::fd_partial;
using testutil::fd_second;
using testutil::product_torus;
using testutil::rand_c;
using testutil::random_form;
using testutil::skew_torus;
using testutil::square_torus;

namespace {

// synthetic character shifts from diagonal phases theta (2g x n):
// entry (i,j) lives on frequencies shifted by theta_col(j) - theta_col(i)
ShiftPtr shift_from_phases(const lie::SpecPtr& spec, const GeomPtr& geom,
                           const Eigen::MatrixXd& theta) {
    auto s = std::make_shared<FrequencyShift>();
    s->spec = spec;
    s->g = geom->g;
    const int n = spec->n, g2 = 2 * geom->g;
    s->entry_shift.assign(static_cast<size_t>(g2), Eigen::MatrixXd::Zero(n, n));
    for (int l = 0; l < g2; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double v = theta(l, j) - theta(l, i);
                v -= std::round(v);
                if (std::abs(v) > 1e-12) s->all_trivial = false;
                s->entry_shift[static_cast<size_t>(l)](i, j) = v;
            }
    s->basis_shift = Eigen::MatrixXd::Zero(spec->dim_g(), g2);
    for (int b = 0; b < spec->dim_g(); ++b) {
        const Matrix& bm = spec->basis(b);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (std::abs(bm(i, j)) > 0)
                    for (int l = 0; l < g2; ++l)
                        s->basis_shift(b, l) = s->entry_shift[static_cast<size_t>(l)](i, j);
    }
    return s;
}

}  // namespace

TEST_CASE("make_torus: validity, degenerate lattices, harmonic counts") {
    auto sq = square_torus(8);
    REQUIRE(sq->grid == 25);
    REQUIRE(sq->mode_count == 17 * 17);
    REQUIRE(sq->volume == Catch::Approx(1.0));

    Eigen::MatrixXcd bad(1, 2);
    bad << Complex(1, 0), Complex(0.5, -1.0);  // Im tau < 0
    REQUIRE_THROWS_AS(make_torus(1, bad, 8), Error);
    bad << Complex(1, 0), Complex(2.0, 0.0);  // R-dependent
    REQUIRE_THROWS_AS(make_torus(1, bad, 8), Error);

    // g = 2 product of square elliptic curves: 4 harmonic 1-forms (scalar coefficients)
    auto t1 = build_group(Family::Triangular, 1);
    auto p2 = product_torus(4);
    auto h10 = twisted_harmonic_basis(p2, t1, nullptr, 1, 0);
    auto h01 = twisted_harmonic_basis(p2, t1, nullptr, 0, 1);
    REQUIRE(h10.size() + h01.size() == 4);
}

TEST_CASE("differential: constants, finite-difference oracle, d^2 = 0") {
    auto geom = skew_torus(8);
    auto t2 = build_group(Family::Triangular, 2);
    std::mt19937_64 rng(21);

    // d of a constant 1-form vanishes
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = Complex(1.0, 2.0);
    a(0, 1) = Complex(0.5, -1.0);
    auto c1 = constant_form(geom, t2, 1, 0, a);
    REQUIRE(differential(c1).norm() == 0.0);

    // delbar of a single-mode function against dense finite differences
    auto f = LieForm::zero(geom, t2, 0);
    Eigen::VectorXi m(2);
    m << 2, -1;
    f.set_coeff(0, 0, m, Complex(0.8, 0.3));   // on E11
    f.set_coeff(0, 2, m, Complex(-0.2, 0.6));  // on E12
    auto df = differential(f, Deriv::delbar);

    Eigen::VectorXd u0(2);
    u0 << 0.37, 0.81;
    auto scalar_at = [&](const Eigen::VectorXd& u) { return f.value(0, u)(0, 0); };
    // FD gradient in lattice coordinates, then transported to the dz/dzbar coframe
    Eigen::VectorXcd grad_u(2);
    for (int l = 0; l < 2; ++l) grad_u(l) = fd_partial(scalar_at, u0, l);
    Eigen::VectorXcd grad_frames = geom->frame_from_du.inverse().transpose() * grad_u;
    // frames of degree 1: index 0 = dz, 1 = dzbar
    Complex want_dzbar = grad_frames(1);
    Complex got = df.value(1, u0)(0, 0);
    REQUIRE(std::abs(got - want_dzbar) <= 1e-8 * (1.0 + std::abs(want_dzbar)));
    REQUIRE(std::abs(df.value(0, u0)(0, 0)) == 0.0);  // no dz part from delbar

    // single-mode output support
    int modes_used = 0;
    for (long mm = 0; mm < geom->mode_count; ++mm)
        if (df.comp[1].col(mm).cwiseAbs().maxCoeff() > 0) ++modes_used;
    REQUIRE(modes_used == 1);

    // d(d alpha) = 0 for random alpha, machine precision
    for (int trial = 0; trial < 5; ++trial) {
        auto alpha = random_form(geom, t2, 0, rng, 6);
        REQUIRE(differential(differential(alpha)).norm() <= 1e-12 * (1.0 + alpha.norm()));
        auto beta = random_form(geom, t2, 1, rng, 6);
        REQUIRE(differential(differential(beta)).norm() <= 1e-12 * (1.0 + beta.norm()));
    }
}

TEST_CASE("complex: del^2 = delbar^2 = del delbar + delbar del = 0") {
    auto geom = skew_torus(6);
    auto t2 = build_group(Family::Triangular, 2);
    std::mt19937_64 rng(22);
    for (int deg = 0; deg <= 1; ++deg) {
        auto alpha = random_form(geom, t2, deg, rng, 4);
        double scale = 1.0 + alpha.norm();
        REQUIRE(differential(differential(alpha, Deriv::del), Deriv::del).norm() <= 1e-12 * scale);
        REQUIRE(differential(differential(alpha, Deriv::delbar), Deriv::delbar).norm() <= 1e-12 * scale);
        auto anti = differential(differential(alpha, Deriv::delbar), Deriv::del) +
                    differential(differential(alpha, Deriv::del), Deriv::delbar);
        REQUIRE(anti.norm() <= 1e-12 * scale);
    }
}

TEST_CASE("wedge_bracket: constants, graded antisymmetry, Leibniz") {
    auto geom = square_torus(8);
    auto t2 = build_group(Family::Triangular, 2);
    std::mt19937_64 rng(23);

    // [A dz + B dz, A dz + B dzbar] expansion on constants
    Matrix am = Matrix::Zero(2, 2), bm = Matrix::Zero(2, 2);
    am(0, 0) = Complex(0.4, 0.1);
    am(0, 1) = Complex(-1.0, 0.7);
    am(1, 1) = Complex(0.2, 0.0);
    bm(0, 1) = Complex(0.9, -0.4);
    auto alpha = constant_form(geom, t2, 1, 0, am);  // A dz
    {
        LieForm bpart = constant_form(geom, t2, 1, 1, bm);  // B dzbar
        alpha += bpart;
    }
    auto self = wedge_bracket(alpha, alpha);
    // expected: 2 [A,B] dz ^ dzbar
    Matrix commutator = am * bm - bm * am;
    Eigen::VectorXd origin2 = Eigen::VectorXd::Zero(2);
    Matrix got = self.value(0, origin2);
    REQUIRE((got - 2.0 * commutator).norm() <= 1e-12 * (1.0 + commutator.norm()));

    // [alpha, alpha] = 0 for alpha = A dz constant
    auto adz = constant_form(geom, t2, 1, 0, am);
    REQUIRE(wedge_bracket(adz, adz).norm() <= 1e-14);

    // graded antisymmetry on random forms
    for (auto [p, q] : {std::pair{0, 1}, std::pair{1, 1}, std::pair{0, 0}}) {
        auto x = random_form(geom, t2, p, rng, 3);
        auto y = random_form(geom, t2, q, rng, 3);
        auto lhs = wedge_bracket(x, y);
        auto rhs = wedge_bracket(y, x);
        // [x,y] = -(-1)^{pq} [y,x]
        double factor = (p * q) % 2 == 0 ? -1.0 : 1.0;
        LieForm d = lhs;
        d -= Complex(factor, 0.0) * rhs;
        REQUIRE(d.norm() <= 1e-11 * (1.0 + lhs.norm()));
    }

    // Leibniz d[f,a] = [df,a] + [f,da] for a 0-form and a 1-form
    auto f0 = random_form(geom, t2, 0, rng, 2);
    auto a1 = random_form(geom, t2, 1, rng, 2);
    auto lhs = differential(wedge_bracket(f0, a1));
    auto rhs = wedge_bracket(differential(f0), a1) + wedge_bracket(f0, differential(a1));
    LieForm dd = lhs;
    dd -= rhs;
    REQUIRE(dd.norm() <= 1e-9 * (1.0 + lhs.norm()));

    // overflow beyond dealiasing capacity: a minimal 3K grid cannot protect
    // the kept band of a full-bandwidth product
    Eigen::MatrixXcd periods(1, 2);
    periods << Complex(1, 0), Complex(0, 1);
    auto tight = make_torus(1, periods, 8, 24);
    auto wide1 = random_form(tight, t2, 0, rng, 8);
    auto wide2 = random_form(tight, t2, 1, rng, 8);
    REQUIRE(wide1.support_bound() + wide2.support_bound() == 16);
    REQUIRE_THROWS_AS(wedge_bracket(wide1, wide2), BandLimitOverflow);
}

TEST_CASE("laplacian: constants, Kahler identity, finite-difference eigenvalue") {
    auto t2 = build_group(Family::Triangular, 2);
    std::mt19937_64 rng(24);

    auto sq = square_torus(6);
    Matrix c = Matrix::Zero(2, 2);
    c(0, 1) = Complex(1.0, -0.5);
    REQUIRE(laplacian(constant_form(sq, t2, 1, 0, c)).norm() == 0.0);

    // Kahler: Delta = 2 Delta_del = 2 Delta_delbar, all degrees, both lattices
    for (auto geom : {square_torus(6), skew_torus(6)}) {
        for (int deg = 0; deg <= 2; ++deg) {
            auto alpha = random_form(geom, t2, deg, rng, 4);
            auto full = laplacian(alpha, Lap::d);
            for (auto which : {Lap::del, Lap::delbar}) {
                LieForm diff = full;
                diff -= 2.0 * Complex(1.0, 0.0) * laplacian(alpha, which);
                REQUIRE(diff.norm() <= 1e-10 * (1.0 + alpha.norm()));
            }
        }
    }

    // eigenvalue on a single mode vs finite differences of the flat Laplacian
    auto geom = square_torus(6);
    auto f = LieForm::zero(geom, t2, 0);
    Eigen::VectorXi m(2);
    m << 2, 1;
    f.set_coeff(0, 0, m, Complex(1.0, 0.0));
    auto lap = laplacian(f);
    Complex ratio = lap.coeff(0, 0, m);
    // for the square torus the metric in lattice coordinates is euclidean
    Eigen::VectorXd u0(2);
    u0 << 0.21, 0.68;
    auto scalar_at = [&](const Eigen::VectorXd& u) { return f.value(0, u)(0, 0); };
    Complex fd = -(fd_second(scalar_at, u0, 0) + fd_second(scalar_at, u0, 1));
    Complex val = scalar_at(u0);
    REQUIRE(std::abs(ratio - fd / val) <= 1e-6 * std::abs(ratio));
    REQUIRE(ratio.real() > 0.0);
    REQUIRE(std::abs(ratio.imag()) <= 1e-12 * ratio.real());
}

TEST_CASE("hodge_decompose: constants, df recovery, orthogonality, twisted") {
    auto geom = skew_torus(8);
    auto t2 = build_group(Family::Triangular, 2);
    std::mt19937_64 rng(25);

    Matrix c = Matrix::Zero(2, 2);
    c(0, 0) = Complex(2.0, 1.0);
    auto cf = constant_form(geom, t2, 1, 1, c);
    auto sp = hodge_decompose(cf);
    LieForm hdiff = sp.harmonic;
    hdiff -= cf;
    REQUIRE(hdiff.norm() == 0.0);
    REQUIRE(sp.exact_potential.norm() == 0.0);
    REQUIRE(sp.coexact_potential.norm() == 0.0);

    // recover the potential of an exact form
    auto f = random_form(geom, t2, 0, rng, 5);
    f -= f.harmonic_part();  // pin the constant
    auto df = differential(f);
    auto split = hodge_decompose(df);
    REQUIRE(split.harmonic.norm() <= 1e-12 * (1.0 + df.norm()));
    LieForm rec = split.exact_potential;
    rec -= f;
    REQUIRE(rec.norm() <= 1e-10 * (1.0 + f.norm()));
    REQUIRE(split.residual <= 1e-9);

    // three-way orthogonality on a random 1-form
    auto alpha = random_form(geom, t2, 1, rng, 5);
    auto s2 = hodge_decompose(alpha);
    auto de = differential(s2.exact_potential);
    auto dc = codifferential(s2.coexact_potential);
    double scale = alpha.norm_sq() + 1.0;
    REQUIRE(std::abs(inner(s2.harmonic, de)) <= 1e-10 * scale);
    REQUIRE(std::abs(inner(s2.harmonic, dc)) <= 1e-10 * scale);
    REQUIRE(std::abs(inner(de, dc)) <= 1e-10 * scale);
    REQUIRE(s2.residual <= 1e-9);

    // nontrivially twisted entry has no harmonic part
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(2, 2);
    theta(0, 1) = 0.3;  // generator 1 phase on the second diagonal entry
    auto shift = shift_from_phases(t2, geom, theta);
    auto tw = random_form(geom, t2, 1, rng, 4, shift);
    REQUIRE(tw.harmonic_part().comp[0].row(2).cwiseAbs().maxCoeff() == 0.0);  // E12 row empty
    auto ts = hodge_decompose(tw);
    LieForm trec = ts.harmonic;
    trec += differential(ts.exact_potential);
    trec += codifferential(ts.coexact_potential);
    trec -= tw;
    REQUIRE(trec.norm() <= 1e-9 * (1.0 + tw.norm()));
}

TEST_CASE("harmonic forms are closed for all flavors (Corollary-1 shape)") {
    auto geom = square_torus(6);
    auto t2 = build_group(Family::Triangular, 2);
    auto h10 = twisted_harmonic_basis(geom, t2, nullptr, 1, 0);
    for (const auto& a : h10) {
        REQUIRE(differential(a, Deriv::delbar).norm() <= 1e-12);
        REQUIRE(differential(a, Deriv::del).norm() <= 1e-12);
    }
    auto h01 = twisted_harmonic_basis(geom, t2, nullptr, 0, 1);
    for (const auto& a : h01) REQUIRE(differential(a, Deriv::del).norm() <= 1e-12);
}

TEST_CASE("solve_ddbar: round trip, harmonic obstruction, zero") {
    auto geom = skew_torus(8);
    auto t2 = build_group(Family::Triangular, 2);
    std::mt19937_64 rng(26);

    auto f = random_form(geom, t2, 0, rng, 4);
    f -= f.harmonic_part();
    auto phi = differential(differential(f, Deriv::delbar), Deriv::del);
    auto sol = solve_ddbar(phi);
    REQUIRE(sol.residual <= 1e-8);
    auto back = differential(differential(sol.psi, Deriv::delbar), Deriv::del);
    LieForm diff = back;
    diff -= phi;
    REQUIRE(diff.norm() <= 1e-8 * (1.0 + phi.norm()));
    LieForm fdiff = sol.psi;
    fdiff -= f;
    REQUIRE(fdiff.norm() <= 1e-8 * (1.0 + f.norm()));

    Matrix c = Matrix::Zero(2, 2);
    c(0, 0) = 1.0;
    auto obstructed = constant_form(geom, t2, 2, 0, c);
    REQUIRE_THROWS_AS(solve_ddbar(obstructed), Error);

    auto zero = LieForm::zero(geom, t2, 2);
    REQUIRE(solve_ddbar(zero).psi.norm() == 0.0);
}

TEST_CASE("twisted_harmonic_basis dimensions") {
    auto geom = square_torus(6);
    auto t2 = build_group(Family::Triangular, 2);

    auto basis = twisted_harmonic_basis(geom, t2, nullptr, 0, 1);
    REQUIRE(basis.size() == 3);  // three algebra entries x one dzbar frame

    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(2, 2);
    theta(1, 1) = 0.25;
    auto shift = shift_from_phases(t2, geom, theta);
    auto tb = twisted_harmonic_basis(geom, t2, shift, 0, 1);
    REQUIRE(tb.size() == 2);  // E12 drops out, diagonal entries always contribute
}

TEST_CASE("norms: Parseval matches grid quadrature") {
    auto geom = skew_torus(6);
    auto t2 = build_group(Family::Triangular, 2);
    std::mt19937_64 rng(27);
    auto f = random_form(geom, t2, 0, rng, 4);
    // mean of |f|_F^2 over the grid equals the Parseval sum for 0-forms
    double quad = 0.0;
    const int n = geom->grid;
    Eigen::VectorXd u(2);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            u << double(a) / n, double(b) / n;
            quad += f.value(0, u).squaredNorm();
        }
    quad /= double(n) * double(n);
    REQUIRE(quad == Catch::Approx(f.norm_sq()).epsilon(1e-10));
}
