#ifndef FLATMODULI_TESTS_HELPERS_HPP
#define FLATMODULI_TESTS_HELPERS_HPP

#include <random>

#include "flatmoduli/lie/element.hpp"

namespace testutil {

using flatmoduli::Complex;
using flatmoduli::Matrix;

inline Complex rand_c(std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, scale);
    return {d(rng), d(rng)};
}

inline flatmoduli::lie::AlgebraElement random_algebra(const flatmoduli::lie::SpecPtr& spec,
                                                      std::mt19937_64& rng, double scale = 1.0,
                                                      bool nil_only = false) {
    Matrix m = Matrix::Zero(spec->n, spec->n);
    for (int k = nil_only ? spec->dim_s() : 0; k < spec->dim_g(); ++k)
        m += rand_c(rng, scale) * spec->basis(k);
    return {m, spec};
}

inline flatmoduli::lie::GroupElement random_group(const flatmoduli::lie::SpecPtr& spec,
                                                  std::mt19937_64& rng, double scale = 0.4) {
    return flatmoduli::lie::exp_element(random_algebra(spec, rng, scale));
}

}  // namespace testutil

#include "flatmoduli/torus/calculus.hpp"

namespace testutil {

inline flatmoduli::torus::GeomPtr square_torus(int cutoff = 8) {
    Eigen::MatrixXcd periods(1, 2);
    periods << Complex(1, 0), Complex(0, 1);
    return flatmoduli::torus::make_torus(1, periods, cutoff);
}

inline flatmoduli::torus::GeomPtr skew_torus(int cutoff = 8) {
    Eigen::MatrixXcd periods(1, 2);
    periods << Complex(1, 0), Complex(0.5, 1.0);
    return flatmoduli::torus::make_torus(1, periods, cutoff);
}

inline flatmoduli::torus::GeomPtr product_torus(int cutoff = 4) {
    Eigen::MatrixXcd periods(2, 4);
    periods << Complex(1, 0), Complex(0, 1), Complex(0, 0), Complex(0, 0),
               Complex(0, 0), Complex(0, 0), Complex(1, 0), Complex(0, 1);
    return flatmoduli::torus::make_torus(2, periods, cutoff);
}

inline flatmoduli::torus::LieForm random_form(const flatmoduli::torus::GeomPtr& geom,
                                              const flatmoduli::lie::SpecPtr& spec, int degree,
                                              std::mt19937_64& rng, int bandwidth,
                                              flatmoduli::torus::ShiftPtr twist = nullptr,
                                              double scale = 1.0) {
    auto f = flatmoduli::torus::LieForm::zero(geom, spec, degree, std::move(twist));
    for (int fr = 0; fr < f.frame_count(); ++fr)
        for (int b = 0; b < spec->dim_g(); ++b)
            for (long m = 0; m < geom->mode_count; ++m) {
                if (geom->mode_at(m).cwiseAbs().maxCoeff() > bandwidth) continue;
                f.comp[static_cast<size_t>(fr)](b, m) = rand_c(rng, scale);
            }
    return f;
}

// central finite differences of spectral accuracy-independent order 8
inline Complex fd_partial(const std::function<Complex(const Eigen::VectorXd&)>& func,
                          Eigen::VectorXd u, int l, double h = 1.0 / 512.0) {
    static const double w[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
    Complex acc = 0.0;
    for (int k = 1; k <= 4; ++k) {
        Eigen::VectorXd up = u, um = u;
        up(l) += k * h;
        um(l) -= k * h;
        acc += w[k - 1] * (func(up) - func(um));
    }
    return acc / h;
}

inline Complex fd_second(const std::function<Complex(const Eigen::VectorXd&)>& func,
                         Eigen::VectorXd u, int l, double h = 1.0 / 128.0) {
    static const double w0 = -205.0 / 72.0;
    static const double w[4] = {8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
    Complex acc = w0 * func(u);
    for (int k = 1; k <= 4; ++k) {
        Eigen::VectorXd up = u, um = u;
        up(l) += k * h;
        um(l) -= k * h;
        acc += w[k - 1] * (func(up) + func(um));
    }
    return acc / (h * h);
}

}  // namespace testutil

#endif
