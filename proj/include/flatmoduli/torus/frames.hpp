#ifndef FLATMODULI_TORUS_FRAMES_HPP
#define FLATMODULI_TORUS_FRAMES_HPP

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "flatmoduli/common.hpp"

namespace flatmoduli::torus {

// Covector indices 0..g-1 are dz_1..dz_g, indices g..2g-1 are dzbar_1..dzbar_g.
// A frame is a strictly increasing index list; the constant frames of the
// flat coframe diagonalize every operator symbol.
struct FrameTable {
    int g = 0;
    int degree = 0;
    std::vector<std::vector<int>> frames;

    FrameTable() = default;
    FrameTable(int g_, int degree_) : g(g_), degree(degree_) {
        std::vector<int> idx(static_cast<size_t>(degree_));
        build(0, idx, 0);
    }

    int count() const { return static_cast<int>(frames.size()); }

    int index_of(const std::vector<int>& f) const {
        for (int k = 0; k < count(); ++k)
            if (frames[static_cast<size_t>(k)] == f) return k;
        return -1;
    }

    // (holomorphic degree p, antiholomorphic degree q) of frame k
    std::pair<int, int> bidegree(int k) const {
        int p = 0, q = 0;
        for (int c : frames[static_cast<size_t>(k)]) (c < g ? p : q)++;
        return {p, q};
    }

   private:
    void build(int start, std::vector<int>& idx, int pos) {
        if (pos == degree) {
            frames.push_back(idx);
            return;
        }
        for (int c = start; c < 2 * g; ++c) {
            idx[static_cast<size_t>(pos)] = c;
            build(c + 1, idx, pos + 1);
        }
    }
};

// covector c wedged in front of frame f: sign and resulting sorted frame
inline std::optional<std::pair<int, std::vector<int>>> wedge_front(int c, const std::vector<int>& f) {
    std::vector<int> out;
    out.reserve(f.size() + 1);
    int sign = 1;
    bool placed = false;
    for (int e : f) {
        if (e == c) return std::nullopt;
        if (!placed && e > c) {
            out.push_back(c);
            placed = true;
        }
        if (!placed) sign = -sign;
        out.push_back(e);
    }
    if (!placed) out.push_back(c);
    return std::make_pair(sign, out);
}

// frame wedge with inversion-count sign; nullopt on repeated covector
inline std::optional<std::pair<int, std::vector<int>>> wedge_frames(const std::vector<int>& a,
                                                                    const std::vector<int>& b) {
    int sign = 1;
    std::vector<int> out = b;
    for (auto it = a.rbegin(); it != a.rend(); ++it) {
        auto w = wedge_front(*it, out);
        if (!w) return std::nullopt;
        sign *= w->first;
        out = std::move(w->second);
    }
    return std::make_pair(sign, out);
}

// complex conjugation swaps dz_a and dzbar_a; returns (sign, frame)
inline std::pair<int, std::vector<int>> conjugate_frame(int g, const std::vector<int>& f) {
    std::vector<int> m;
    m.reserve(f.size());
    for (int c : f) m.push_back(c < g ? c + g : c - g);
    int inversions = 0;
    for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = i + 1; j < m.size(); ++j)
            if (m[i] > m[j]) ++inversions;
    std::sort(m.begin(), m.end());
    return {inversions % 2 == 0 ? 1 : -1, m};
}

inline double frame_gram(int degree) { return std::pow(2.0, degree); }

}  // namespace flatmoduli::torus

#endif
