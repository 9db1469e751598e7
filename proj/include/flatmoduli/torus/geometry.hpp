#ifndef FLATMODULI_TORUS_GEOMETRY_HPP
#define FLATMODULI_TORUS_GEOMETRY_HPP

#include <memory>
#include <vector>

#include "flatmoduli/torus/fft.hpp"
#include "flatmoduli/torus/frames.hpp"

namespace flatmoduli::torus {

/// Flat complex torus C^g / Lambda with the standard Kahler metric, a fixed
/// band limit, and the precomputed per-mode symbols shared by all operators.
///
/// Functions are stored in lattice coordinates u in [0,1)^{2g}; the column l
/// of `periods` is the generator lambda_l, and a Fourier mode m in Z^{2g}
/// (possibly shifted by a character) differentiates through the covector
/// nu(m) = 2 pi i (F^{-T}) m written in the dz/dzbar coframe.
struct TorusGeom {
    int g = 0;
    Eigen::MatrixXcd periods;  // g x 2g, column l = lattice generator
    int cutoff = 0;            // K: retained modes have |m_l| <= K
    int grid = 0;              // N per real dimension, N >= 3K+1 for dealiasing

    Eigen::MatrixXcd frame_from_du;  // F: (dz;dzbar) = F du
    Eigen::MatrixXcd covector_map;   // 2 pi i F^{-T}
    double volume = 0.0;

    std::vector<FrameTable> frame_tables;  // by degree 0..2g
    Eigen::MatrixXi mode_table;            // 2g x mode_count, column = mode vector
    long mode_count = 0;
    long grid_count = 0;
    std::vector<int> grid_dims;

    int top_degree() const { return 2 * g; }
    int side() const { return 2 * cutoff + 1; }

    long mode_index(const Eigen::VectorXi& m) const {
        long idx = 0;
        for (int l = 0; l < 2 * g; ++l) idx = idx * side() + (m(l) + cutoff);
        return idx;
    }
    Eigen::VectorXi mode_at(long idx) const { return mode_table.col(idx); }

    long grid_index(const Eigen::VectorXi& p) const {
        long idx = 0;
        for (int l = 0; l < 2 * g; ++l) idx = idx * grid + p(l);
        return idx;
    }

    // covector of a (shifted) frequency, as 2g complex components in the
    // dz/dzbar coframe; identically zero exactly when m + shift = 0
    Eigen::VectorXcd covector(const Eigen::VectorXd& shifted_mode) const {
        return covector_map * shifted_mode.cast<Complex>();
    }

    const FrameTable& frames(int degree) const { return frame_tables[static_cast<size_t>(degree)]; }
};

using GeomPtr = std::shared_ptr<const TorusGeom>;

inline GeomPtr make_torus(int g, const Eigen::MatrixXcd& periods, int cutoff, int grid = 0) {
    if (g < 1) throw Error("torus dimension must be positive");
    if (periods.rows() != g || periods.cols() != 2 * g)
        throw Error("period matrix must be g x 2g (one column per lattice generator)");
    if (cutoff < 1) throw Error("cutoff must be at least 1");

    auto geom = std::make_shared<TorusGeom>();
    geom->g = g;
    geom->periods = periods;
    geom->cutoff = cutoff;
    geom->grid = grid > 0 ? grid : 3 * cutoff + 1;
    if (geom->grid < 3 * cutoff) throw Error("grid must satisfy the dealiasing rule grid >= 3*cutoff");

    // real 2g x 2g matrix [Re periods; Im periods]: generators must be
    // R-independent and positively oriented
    Eigen::MatrixXd real_periods(2 * g, 2 * g);
    for (int a = 0; a < g; ++a) {
        real_periods.row(2 * a) = periods.row(a).real();
        real_periods.row(2 * a + 1) = periods.row(a).imag();
    }
    double det = real_periods.determinant();
    if (!(det > 1e-12)) throw Error("degenerate or negatively oriented lattice (need det[Re;Im] > 0)");
    geom->volume = det;

    Eigen::MatrixXcd f(2 * g, 2 * g);
    f.topRows(g) = periods;
    f.bottomRows(g) = periods.conjugate();
    geom->frame_from_du = f;
    geom->covector_map = 2.0 * kPi * kI * f.inverse().transpose();

    for (int d = 0; d <= 2 * g; ++d) geom->frame_tables.emplace_back(g, d);

    const int side = geom->side();
    geom->mode_count = 1;
    for (int l = 0; l < 2 * g; ++l) geom->mode_count *= side;
    geom->mode_table.resize(2 * g, geom->mode_count);
    for (long idx = 0; idx < geom->mode_count; ++idx) {
        long rest = idx;
        for (int l = 2 * g - 1; l >= 0; --l) {
            geom->mode_table(l, idx) = static_cast<int>(rest % side) - cutoff;
            rest /= side;
        }
    }
    geom->grid_dims.assign(static_cast<size_t>(2 * g), geom->grid);
    geom->grid_count = Fft::count(geom->grid_dims);
    return geom;
}

}  // namespace flatmoduli::torus

#endif
