#ifndef FLATMODULI_LIE_CERTIFICATE_HPP
#define FLATMODULI_LIE_CERTIFICATE_HPP

#include <string>
#include <vector>

#include "flatmoduli/lie/element.hpp"

namespace flatmoduli::lie {

/// One peeling step: B is an abelian unipotent ideal of the current ambient
/// algebra and A the complementary subalgebra the recursion continues with.
struct CertStep {
    std::vector<Matrix> abelian_ideal;  // B
    std::vector<Matrix> complement;     // A
    std::string note;
};

enum class CertStatus { Certified, Unknown };

struct HodgeCertificate {
    CertStatus status = CertStatus::Unknown;
    SpecPtr spec;
    std::vector<CertStep> chain;
    std::string terminal;                    // "torus" when the chain bottoms out in an algebraic torus
    std::vector<std::string> modifications;  // subtorus restriction / central quotient moves, if any
};

struct CertCheck {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct CertReport {
    std::vector<CertCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

namespace detail {

inline Eigen::MatrixXcd span_matrix(const std::vector<Matrix>& ms) {
    if (ms.empty()) return Eigen::MatrixXcd();
    const int n = static_cast<int>(ms[0].rows());
    Eigen::MatrixXcd a(n * n, ms.size());
    for (size_t k = 0; k < ms.size(); ++k)
        a.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Vector>(ms[k].data(), n * n);
    return a;
}

inline double span_residual(const Eigen::MatrixXcd& span, const Matrix& m) {
    Vector v = Eigen::Map<const Vector>(m.data(), m.size());
    if (span.size() == 0) return v.norm();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(span);
    return (span * cod.solve(v) - v).norm();
}

}  // namespace detail

/// Certificate chain for the built families.  Triangular(n) peels the last
/// column (B = C^{n-1}) leaving T_{n-1} x C^x; BorelSp(2n) peels the Siegel
/// block and continues with the triangular chain of the GL_n factor;
/// BorelSO(m) peels the first-row block and recurses on BorelSO(m-2) x C^x.
inline HodgeCertificate hodge_certificate(const SpecPtr& spec) {
    using detail::unit;
    HodgeCertificate cert;
    cert.spec = spec;
    cert.status = CertStatus::Certified;
    cert.terminal = "torus";
    const int n = spec->n;

    auto diag_all = [&](std::vector<Matrix>& out) {
        for (const auto& t : spec->torus_basis) out.push_back(t);
    };

    switch (spec->family) {
        case Family::Triangular: {
            // current complement after peeling columns n-1, ..., c+1
            for (int c = n - 1; c >= 1; --c) {
                CertStep step;
                for (int i = 0; i < c; ++i) step.abelian_ideal.push_back(unit(n, i, c));
                for (int i = 0; i <= c - 1; ++i)
                    for (int j = i; j <= c - 1; ++j) step.complement.push_back(unit(n, i, j));
                for (int k = c; k < n; ++k) step.complement.push_back(unit(n, k, k));
                step.note = "peel column " + std::to_string(c + 1);
                cert.chain.push_back(std::move(step));
            }
            break;
        }
        case Family::BorelSp: {
            const int half = n / 2;
            CertStep siegel;
            for (int i = 0; i < half; ++i)
                for (int j = i; j < half; ++j)
                    siegel.abelian_ideal.push_back(i == j ? unit(n, i, n - 1 - i)
                                                          : unit(n, i, n - 1 - j) + unit(n, j, n - 1 - i));
            diag_all(siegel.complement);
            for (int i = 0; i < half; ++i)
                for (int j = i + 1; j < half; ++j)
                    siegel.complement.push_back(unit(n, i, j) - unit(n, n - 1 - j, n - 1 - i));
            siegel.note = "peel Siegel block";
            cert.chain.push_back(siegel);
            // triangular chain inside the GL_half factor, in the embedded realization
            for (int c = half - 1; c >= 1; --c) {
                CertStep step;
                for (int i = 0; i < c; ++i)
                    step.abelian_ideal.push_back(unit(n, i, c) - unit(n, n - 1 - c, n - 1 - i));
                diag_all(step.complement);
                for (int i = 0; i < c; ++i)
                    for (int j = i + 1; j < c; ++j)
                        step.complement.push_back(unit(n, i, j) - unit(n, n - 1 - j, n - 1 - i));
                step.note = "peel GL-factor column " + std::to_string(c + 1);
                cert.chain.push_back(std::move(step));
            }
            break;
        }
        case Family::BorelSO: {
            for (int top = 0; n - 2 * top >= 3; ++top) {
                const int mm = n - 2 * top;  // current SO size, rows top..n-1-top
                CertStep step;
                for (int j = top + 1; j < n - 1 - top; ++j)
                    step.abelian_ideal.push_back(unit(n, top, j) - unit(n, n - 1 - j, n - 1 - top));
                diag_all(step.complement);
                for (int i = top + 1; i < n; ++i)
                    for (int j = i + 1; j < n - 1 - i; ++j)
                        step.complement.push_back(unit(n, i, j) - unit(n, n - 1 - j, n - 1 - i));
                step.note = "peel SO(" + std::to_string(mm) + ") first row";
                cert.chain.push_back(std::move(step));
            }
            break;
        }
    }
    return cert;
}

/// Exact bracket checks for a certificate: every B abelian and an ideal of
/// its step ambient, every complement closed under bracket, chain nested,
/// terminal abelian.  Failures are reported, never thrown.
inline CertReport verify_certificate(const HodgeCertificate& cert) {
    CertReport report;
    auto add = [&](const std::string& name, double res, double tolv) {
        report.checks.push_back({name, res, tolv, res <= tolv});
    };
    if (cert.status == CertStatus::Unknown) {
        add("status certified", 1.0, 0.0);
        return report;
    }

    // ambient of step k: full algebra for k = 0, previous complement after
    std::vector<Matrix> ambient;
    for (int k = 0; k < cert.spec->dim_g(); ++k) ambient.push_back(cert.spec->basis(k));

    for (size_t s = 0; s < cert.chain.size(); ++s) {
        const auto& step = cert.chain[s];
        const std::string tag = "step " + std::to_string(s + 1) + ": ";
        double res;

        // B abelian
        res = 0.0;
        for (const auto& x : step.abelian_ideal)
            for (const auto& y : step.abelian_ideal)
                res = std::max(res, (x * y - y * x).cwiseAbs().maxCoeff());
        add(tag + "B abelian", res, 0.0);

        // B unipotent (strictly triangular)
        res = 0.0;
        for (const auto& x : step.abelian_ideal) res = std::max(res, x.diagonal().cwiseAbs().maxCoeff());
        add(tag + "B unipotent", res, 0.0);

        // B and A inside the ambient algebra, and B an ideal of it
        auto amb_span = detail::span_matrix(ambient);
        auto b_span = detail::span_matrix(step.abelian_ideal);
        res = 0.0;
        for (const auto& x : step.abelian_ideal) res = std::max(res, detail::span_residual(amb_span, x));
        for (const auto& x : step.complement) res = std::max(res, detail::span_residual(amb_span, x));
        add(tag + "step contained in ambient", res, tol::membership);

        res = 0.0;
        for (const auto& x : ambient)
            for (const auto& y : step.abelian_ideal)
                res = std::max(res, detail::span_residual(b_span, x * y - y * x));
        add(tag + "B ideal of ambient", res, tol::membership);

        // complement closes under bracket
        auto a_span = detail::span_matrix(step.complement);
        res = 0.0;
        for (const auto& x : step.complement)
            for (const auto& y : step.complement)
                res = std::max(res, detail::span_residual(a_span, x * y - y * x));
        add(tag + "A closed under bracket", res, tol::membership);

        // B + A spans the ambient (direct sum by rank)
        Eigen::MatrixXcd joint(amb_span.rows(), b_span.cols() + a_span.cols());
        if (b_span.cols() > 0) joint.leftCols(b_span.cols()) = b_span;
        joint.rightCols(a_span.cols()) = a_span;
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(joint);
        bool dims_ok = cod.rank() == static_cast<Eigen::Index>(ambient.size()) &&
                       joint.cols() == static_cast<Eigen::Index>(ambient.size());
        add(tag + "B + A = ambient (direct sum)", dims_ok ? 0.0 : 1.0, 0.0);

        ambient = step.complement;
    }

    if (cert.terminal == "torus") {
        double res = 0.0;
        for (const auto& x : ambient)
            for (const auto& y : ambient)
                res = std::max(res, (x * y - y * x).cwiseAbs().maxCoeff());
        add("terminal algebra abelian", res, 0.0);
    } else {
        add("terminal recognized", 1.0, 0.0);
    }
    return report;
}

}  // namespace flatmoduli::lie

#endif
