#include "ssv/upper_bound.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "ssv/detail/eigen_support.hpp"
#include "ssv/linalg.hpp"

namespace ssv {

namespace {

using detail::EigenMat;

void check_repeated_dims(const ComplexMatrix& m, std::size_t v, std::size_t m1, const char* who) {
    if (m.empty() || v < 1 || m1 < 1 || m.cols() != v * m1 || m.rows() % v != 0) {
        throw std::invalid_argument(std::string(who) +
                                    ": need cols(M) = v*m1 and rows(M) divisible by v");
    }
}

EigenMat hermitize(const EigenMat& x) { return 0.5 * (x + x.adjoint()); }

/// (R (x) I_g) * X without forming the Kronecker product.
EigenMat kron_left_mul(const EigenMat& r, std::size_t g, const EigenMat& x) {
    const std::size_t v = static_cast<std::size_t>(r.rows());
    EigenMat y = EigenMat::Zero(x.rows(), x.cols());
    for (std::size_t i = 0; i < v; ++i) {
        for (std::size_t j = 0; j < v; ++j) {
            if (r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == Complex(0, 0))
                continue;
            y.middleRows(static_cast<Eigen::Index>(i * g), static_cast<Eigen::Index>(g)) +=
                r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                x.middleRows(static_cast<Eigen::Index>(j * g), static_cast<Eigen::Index>(g));
        }
    }
    return y;
}

/// X * (R (x) I_g) without forming the Kronecker product.
EigenMat kron_right_mul(const EigenMat& x, const EigenMat& r, std::size_t g) {
    const std::size_t v = static_cast<std::size_t>(r.rows());
    EigenMat y = EigenMat::Zero(x.rows(), x.cols());
    for (std::size_t j = 0; j < v; ++j) {
        for (std::size_t i = 0; i < v; ++i) {
            if (r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == Complex(0, 0))
                continue;
            y.middleCols(static_cast<Eigen::Index>(j * g), static_cast<Eigen::Index>(g)) +=
                r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                x.middleCols(static_cast<Eigen::Index>(i * g), static_cast<Eigen::Index>(g));
        }
    }
    return y;
}

EigenMat block_trace_eigen(const EigenMat& h, std::size_t v, std::size_t g) {
    EigenMat out(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v));
    for (std::size_t i = 0; i < v; ++i)
        for (std::size_t j = 0; j < v; ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                h.block(static_cast<Eigen::Index>(i * g), static_cast<Eigen::Index>(j * g),
                        static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(g))
                    .trace();
    return out;
}

struct Constraints {
    EigenMat l1, l2, l3;
};

Constraints build_constraints(const EigenMat& m, const EigenMat& r, double lambda, double gamma,
                              std::size_t m1, std::size_t n1) {
    const std::size_t v = static_cast<std::size_t>(r.rows());
    const EigenMat rm = kron_left_mul(r, n1, m);  // (R (x) I_n1) M
    Constraints c;
    c.l1 = lambda * lambda * kron_left_mul(r, m1, EigenMat::Identity(m.cols(), m.cols())) -
           m.adjoint() * rm;
    c.l2 = gamma * EigenMat::Identity(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v)) -
           r;
    c.l3 = r - (1.0 / gamma) *
                   EigenMat::Identity(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v));
    return c;
}

std::optional<double> llt_logdet(const EigenMat& x) {
    Eigen::LLT<EigenMat> llt(x);
    if (llt.info() != Eigen::Success) return std::nullopt;
    double ld = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        const double d = l(i, i).real();
        if (!(d > 0.0)) return std::nullopt;
        ld += std::log(d);
    }
    return 2.0 * ld;
}

std::optional<double> try_barrier(const Constraints& c) {
    const auto d1 = llt_logdet(c.l1);
    if (!d1) return std::nullopt;
    const auto d2 = llt_logdet(c.l2);
    if (!d2) return std::nullopt;
    const auto d3 = llt_logdet(c.l3);
    if (!d3) return std::nullopt;
    return -(*d1) - (*d2) - (*d3);
}

EigenMat llt_inverse_or_throw(const EigenMat& x, const char* name) {
    Eigen::LLT<EigenMat> llt(hermitize(x));
    if (llt.info() != Eigen::Success) {
        throw std::domain_error(std::string("barrier: constraint ") + name +
                                " is not positive definite");
    }
    return llt.solve(EigenMat::Identity(x.rows(), x.cols()));
}

/// Hermitian square root of a positive definite small matrix.
EigenMat hermitian_sqrt(const EigenMat& r) {
    Eigen::SelfAdjointEigenSolver<EigenMat> es(r);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
        throw std::domain_error("hermitian_sqrt: matrix is not positive definite");
    }
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
           es.eigenvectors().adjoint();
}

/// alpha(R) = sqrt(lambda_max(D^-H M^H (R (x) I_n1) M D^-1)), D = (R (x) I_m1)^{1/2},
/// evaluated with a Hermitian eigensolver.
double alpha_of(const EigenMat& m, const EigenMat& r, std::size_t m1, std::size_t n1) {
    const EigenMat rsqrt = hermitian_sqrt(r);
    Eigen::PartialPivLU<EigenMat> lu(rsqrt);
    const EigenMat rsqrt_inv = lu.inverse();
    const EigenMat md = kron_right_mul(m, rsqrt_inv, m1);        // M D^-1
    const EigenMat h = md.adjoint() * kron_left_mul(r, n1, md);  // D^-H M^H (R(x)I) M D^-1
    Eigen::SelfAdjointEigenSolver<EigenMat> es(hermitize(h), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("method_of_centers: eigenvalue computation failed");
    }
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

struct OsborneCore {
    std::vector<double> d;           // accumulated scalings, one per block
    EigenMat balanced;               // D M D^-1
    std::vector<double> fro_history; // squared Frobenius norm after each sweep
    std::vector<std::size_t> clamped;
    bool converged = false;
    std::size_t sweeps = 0;
};

OsborneCore osborne_core(const EigenMat& m, std::span<const std::size_t> block_dims,
                         std::size_t max_sweeps, double tol) {
    const std::size_t v = block_dims.size();
    std::vector<std::size_t> offsets(v, 0);
    for (std::size_t i = 1; i < v; ++i) offsets[i] = offsets[i - 1] + block_dims[i - 1];

    OsborneCore out;
    out.d.assign(v, 1.0);
    out.balanced = m;
    double prev = out.balanced.squaredNorm();
    out.fro_history.push_back(prev);

    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        out.sweeps = sweep + 1;
        for (std::size_t i = 0; i < v; ++i) {
            const Eigen::Index off = static_cast<Eigen::Index>(offsets[i]);
            const Eigen::Index len = static_cast<Eigen::Index>(block_dims[i]);
            // column-block norm excluding the diagonal block, then row-block
            const double col2 = out.balanced.middleCols(off, len).squaredNorm() -
                                out.balanced.block(off, off, len, len).squaredNorm();
            const double row2 = out.balanced.middleRows(off, len).squaredNorm() -
                                out.balanced.block(off, off, len, len).squaredNorm();
            double di;
            if (col2 <= 0.0 || row2 <= 0.0) {
                di = 1.0;
                if ((col2 <= 0.0) != (row2 <= 0.0)) out.clamped.push_back(i);
            } else {
                di = std::pow(col2 / row2, 0.25);
            }
            if (di != 1.0) {
                out.balanced.middleRows(off, len) *= di;
                out.balanced.middleCols(off, len) /= di;
                out.d[i] *= di;
            }
        }
        const double cur = out.balanced.squaredNorm();
        out.fro_history.push_back(cur);
        const bool done = std::abs(prev - cur) <= tol * std::max(prev, 1e-300);
        prev = cur;
        if (done) {
            out.converged = true;
            break;
        }
    }
    std::sort(out.clamped.begin(), out.clamped.end());
    out.clamped.erase(std::unique(out.clamped.begin(), out.clamped.end()), out.clamped.end());
    return out;
}

EigenMat expand_diag_scaling(const std::vector<double>& d,
                             std::span<const std::size_t> block_dims) {
    std::size_t n = 0;
    for (std::size_t s : block_dims) n += s;
    EigenMat full = EigenMat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::size_t off = 0;
    for (std::size_t i = 0; i < block_dims.size(); ++i) {
        for (std::size_t k = 0; k < block_dims[i]; ++k)
            full(static_cast<Eigen::Index>(off + k), static_cast<Eigen::Index>(off + k)) = d[i];
        off += block_dims[i];
    }
    return full;
}

}  // namespace

void MocConfig::validate() const {
    if (!(ratio_threshold > 1.0)) throw std::invalid_argument("MocConfig: p must be > 1");
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("MocConfig: theta in (0,1)");
    if (!(gamma > 1.0)) throw std::invalid_argument("MocConfig: gamma must be > 1");
    if (!(epsilon > 0.0)) throw std::invalid_argument("MocConfig: epsilon must be > 0");
    if (inner_steps < 1) throw std::invalid_argument("MocConfig: inner_steps must be >= 1");
    if (!(linesearch_shrink > 0.0 && linesearch_shrink < 1.0)) {
        throw std::invalid_argument("MocConfig: line-search shrink factor in (0,1)");
    }
    if (!(linesearch_delta0 > 0.0)) throw std::invalid_argument("MocConfig: delta0 must be > 0");
}

UpperBoundResult osborne_balance(const ComplexMatrix& m, std::span<const std::size_t> block_dims,
                                 std::size_t max_sweeps, double tol) {
    if (m.empty() || !m.is_square()) {
        throw std::invalid_argument("osborne_balance: square nonempty matrix required");
    }
    std::size_t total = 0;
    for (std::size_t s : block_dims) {
        if (s < 1) throw std::invalid_argument("osborne_balance: block sizes must be >= 1");
        total += s;
    }
    if (total != m.rows()) {
        throw std::invalid_argument("osborne_balance: block sizes must sum to dim(M)");
    }

    const EigenMat mm = detail::to_eigen(m);
    OsborneCore core = osborne_core(mm, block_dims, max_sweeps, tol);

    const EigenMat d_full = expand_diag_scaling(core.d, block_dims);
    // alpha from the accumulated scaling applied to the original matrix, so
    // the certificate pair (alpha, D) is self-consistent.
    EigenMat scaled = mm;
    std::size_t off = 0;
    for (std::size_t i = 0; i < block_dims.size(); ++i) {
        const Eigen::Index o = static_cast<Eigen::Index>(off);
        const Eigen::Index len = static_cast<Eigen::Index>(block_dims[i]);
        scaled.middleRows(o, len) *= core.d[i];
        scaled.middleCols(o, len) /= core.d[i];
        off += block_dims[i];
    }

    UpperBoundResult res;
    res.alpha = sigma_max(detail::from_eigen(scaled));
    res.scaling = detail::from_eigen(d_full);
    res.converged_by_ratio = core.converged;
    res.iterations_used = core.sweeps;
    res.alpha_history = {res.alpha};
    res.fro_history = std::move(core.fro_history);
    res.clamped_indices = std::move(core.clamped);
    return res;
}

double barrier_value(const ComplexMatrix& m, const ComplexMatrix& r, double lambda, double gamma,
                     std::size_t v, std::size_t m1) {
    check_repeated_dims(m, v, m1, "barrier_value");
    const std::size_t n1 = m.rows() / v;
    const Constraints c =
        build_constraints(detail::view(m), detail::view(r), lambda, gamma, m1, n1);
    const auto d1 = llt_logdet(c.l1);
    if (!d1) throw std::domain_error("barrier: constraint L1 is not positive definite");
    const auto d2 = llt_logdet(c.l2);
    if (!d2) throw std::domain_error("barrier: constraint L2 is not positive definite");
    const auto d3 = llt_logdet(c.l3);
    if (!d3) throw std::domain_error("barrier: constraint L3 is not positive definite");
    return -(*d1) - (*d2) - (*d3);
}

ComplexMatrix barrier_gradient(const ComplexMatrix& m, const ComplexMatrix& r, double lambda,
                               double gamma, std::size_t v, std::size_t m1) {
    check_repeated_dims(m, v, m1, "barrier_gradient");
    if (!r.is_square() || r.rows() != v) {
        throw std::invalid_argument("barrier_gradient: R must be v x v");
    }
    const std::size_t n1 = m.rows() / v;
    const EigenMat mm = detail::view(m);
    const Constraints c = build_constraints(mm, detail::view(r), lambda, gamma, m1, n1);

    const EigenMat l1_inv = llt_inverse_or_throw(c.l1, "L1");
    const EigenMat l2_inv = llt_inverse_or_throw(c.l2, "L2");
    const EigenMat l3_inv = llt_inverse_or_throw(c.l3, "L3");

    const EigenMat ml1m = mm * l1_inv * mm.adjoint();
    EigenMat phi = block_trace_eigen(ml1m, v, n1) -
                   lambda * lambda * block_trace_eigen(l1_inv, v, m1) + l2_inv - l3_inv;
    return detail::from_eigen(hermitize(phi));
}

double line_search(const ComplexMatrix& r, const ComplexMatrix& phi, double lambda, double gamma,
                   const ComplexMatrix& m, std::size_t v, std::size_t m1,
                   const LineSearchParams& params) {
    check_repeated_dims(m, v, m1, "line_search");
    const std::size_t n1 = m.rows() / v;
    const EigenMat mm = detail::view(m);
    const EigenMat rr = detail::view(r);
    const EigenMat ph = detail::view(phi);

    const auto j0 = try_barrier(build_constraints(mm, rr, lambda, gamma, m1, n1));
    if (!j0) {
        throw std::domain_error("line_search: starting point is infeasible");
    }

    double delta = params.delta0;
    for (std::size_t k = 0; k <= params.max_backtracks; ++k) {
        const EigenMat trial = hermitize(rr - delta * ph);
        const auto j = try_barrier(build_constraints(mm, trial, lambda, gamma, m1, n1));
        if (j && *j < *j0) return delta;
        delta *= params.shrink;
    }
    return 0.0;
}

UpperBoundResult method_of_centers(const ComplexMatrix& m, std::size_t v, std::size_t m1,
                                   double beta, const MocConfig& cfg,
                                   const ComplexMatrix& r_init) {
    cfg.validate();
    check_repeated_dims(m, v, m1, "method_of_centers");
    const std::size_t n1 = m.rows() / v;
    const EigenMat mm = detail::to_eigen(m);

    EigenMat r;
    if (!r_init.empty()) {
        if (!r_init.is_square() || r_init.rows() != v) {
            throw std::invalid_argument("method_of_centers: r_init must be v x v");
        }
        r = detail::view(r_init);
        if ((r - r.adjoint()).norm() > 1e-10 * std::max(1.0, r.norm())) {
            throw std::invalid_argument("method_of_centers: r_init must be Hermitian");
        }
        const EigenMat eye =
            EigenMat::Identity(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v));
        if (!llt_logdet(cfg.gamma * eye - r)) {
            throw std::domain_error("method_of_centers: r_init violates R < gamma I (L2)");
        }
        if (!llt_logdet(r - (1.0 / cfg.gamma) * eye)) {
            throw std::domain_error("method_of_centers: r_init violates R > gamma^-1 I (L3)");
        }
    } else if (m1 == n1 && m.rows() == m.cols()) {
        // Squared Osborne scalings, clamped into the open condition band.
        const std::vector<std::size_t> dims(v, m1);
        OsborneCore core = osborne_core(mm, dims, 200, 1e-12);
        const double lo = (1.0 + 1e-6) / cfg.gamma;
        const double hi = cfg.gamma * (1.0 - 1e-6);
        r = EigenMat::Zero(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v));
        for (std::size_t i = 0; i < v; ++i) {
            const double di2 = std::clamp(core.d[i] * core.d[i], lo, hi);
            r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = di2;
        }
    } else {
        r = EigenMat::Identity(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v));
    }

    double alpha = alpha_of(mm, r, m1, n1);
    double lambda = alpha + cfg.epsilon;

    if (!r_init.empty()) {
        // L1 at the initial level; positive definite by construction unless
        // the caller's R is already on the boundary.
        const Constraints c = build_constraints(mm, r, lambda, cfg.gamma, m1, n1);
        if (!llt_logdet(c.l1)) {
            throw std::domain_error("method_of_centers: r_init violates L1 > 0 at the initial level");
        }
    }

    UpperBoundResult res;
    res.alpha = alpha;
    res.alpha_history.push_back(alpha);
    EigenMat best_r = r;

    const LineSearchParams ls{cfg.linesearch_delta0, cfg.linesearch_shrink,
                              cfg.linesearch_max_backtracks};

    std::size_t k = 0;
    bool ratio_met = beta > 0.0 && alpha / beta < cfg.ratio_threshold;
    while (!ratio_met && k < cfg.max_outer) {
        lambda = (1.0 - cfg.theta) * alpha + cfg.theta * lambda;
        // When alpha stops improving, the level collapses onto it
        // geometrically and L1 approaches singularity; stop once the gap is
        // below what the Cholesky factorizations can resolve.
        if (lambda - alpha <= 1e-12 * std::max(alpha, 1.0)) break;

        bool stalled = false;
        for (std::size_t l = 0; l < cfg.inner_steps; ++l) {
            const ComplexMatrix r_cm = detail::from_eigen(r);
            try {
                const ComplexMatrix phi = barrier_gradient(m, r_cm, lambda, cfg.gamma, v, m1);
                const double delta = line_search(r_cm, phi, lambda, cfg.gamma, m, v, m1, ls);
                if (delta > 0.0) {
                    r = hermitize(r - delta * detail::view(phi));
                }
            } catch (const std::domain_error&) {
                stalled = true;  // level numerically on the boundary
                break;
            }
        }

        ++k;
        alpha = alpha_of(mm, r, m1, n1);
        res.alpha_history.push_back(alpha);
        if (alpha < res.alpha) {
            res.alpha = alpha;
            best_r = r;
        }
        ratio_met = beta > 0.0 && alpha / beta < cfg.ratio_threshold;
        if (stalled) break;
    }

    res.iterations_used = k;
    res.converged_by_ratio = ratio_met;
    res.r_matrix = detail::from_eigen(best_r);
    res.scaling = kron_identity(detail::from_eigen(hermitian_sqrt(best_r)), m1);
    return res;
}

double OffdiagCoeffs::evaluate(const Complex& s) const {
    const double s2 = std::norm(s);
    return c0 + 2.0 * (c1 * s).real() + c2 * s2 + 2.0 * (c3 * s * s).real() +
           2.0 * (c4 * s * s2).real() + c5 * s2 * s2;
}

OffdiagCoeffs offdiag_coeffs(const ComplexMatrix& m_k, std::size_t i, std::size_t j, std::size_t v,
                             std::size_t m1) {
    check_repeated_dims(m_k, v, m1, "offdiag_coeffs");
    if (m_k.rows() != m_k.cols()) {
        throw std::invalid_argument("offdiag_coeffs: square matrix required");
    }
    if (i >= v || j >= v || i == j) {
        throw std::out_of_range("offdiag_coeffs: need i != j, both < v");
    }
    const EigenMat mm = detail::view(m_k);
    const Eigen::Index g = static_cast<Eigen::Index>(m1);
    const auto blk = [&](std::size_t p, std::size_t q) {
        return mm.block(static_cast<Eigen::Index>(p) * g, static_cast<Eigen::Index>(q) * g, g, g);
    };

    OffdiagCoeffs c;
    c.c0 = mm.squaredNorm();

    const EigenMat y = blk(j, j) - blk(i, i);
    const EigenMat z = blk(j, i);

    Complex c1(0, 0);
    double c2 = 0.0;
    for (std::size_t q = 0; q < v; ++q) {
        if (q == j) continue;
        c1 += (blk(i, q).adjoint() * blk(j, q)).trace();
        c2 += blk(j, q).squaredNorm();
    }
    for (std::size_t p = 0; p < v; ++p) {
        if (p == i) continue;
        c1 -= (blk(p, j).adjoint() * blk(p, i)).trace();
        c2 += blk(p, i).squaredNorm();
    }
    c1 += (blk(i, j).adjoint() * y).trace();
    c2 += y.squaredNorm();

    c.c1 = c1;
    c.c2 = c2;
    c.c3 = -(blk(i, j).adjoint() * z).trace();
    c.c4 = -(y.adjoint() * z).trace();
    c.c5 = z.squaredNorm();
    return c;
}

Complex damped_newton_quartic(const OffdiagCoeffs& coeffs) {
    const double a_quad = coeffs.c2 + 2.0 * coeffs.c3.real();
    const double b_quad = coeffs.c2 - 2.0 * coeffs.c3.real();
    const double c_cross = -4.0 * coeffs.c3.imag();
    const double p_cub = 2.0 * coeffs.c4.real();
    const double q_cub = -2.0 * coeffs.c4.imag();
    const double c5 = coeffs.c5;
    const double g1u = 2.0 * coeffs.c1.real();
    const double g1t = -2.0 * coeffs.c1.imag();

    const auto f = [&](double u, double t) {
        const double r2 = u * u + t * t;
        return coeffs.c0 + g1u * u + g1t * t + a_quad * u * u + b_quad * t * t + c_cross * u * t +
               p_cub * u * r2 + q_cub * t * r2 + c5 * r2 * r2;
    };
    const auto grad = [&](double u, double t, double& gu, double& gt) {
        const double r2 = u * u + t * t;
        gu = g1u + 2.0 * a_quad * u + c_cross * t + p_cub * (r2 + 2.0 * u * u) +
             2.0 * q_cub * t * u + 4.0 * c5 * r2 * u;
        gt = g1t + 2.0 * b_quad * t + c_cross * u + 2.0 * p_cub * u * t +
             q_cub * (r2 + 2.0 * t * t) + 4.0 * c5 * r2 * t;
    };
    const auto hess = [&](double u, double t, double& huu, double& hut, double& htt) {
        huu = 2.0 * a_quad + 6.0 * p_cub * u + 2.0 * q_cub * t +
              4.0 * c5 * (3.0 * u * u + t * t);
        hut = c_cross + 2.0 * p_cub * t + 2.0 * q_cub * u + 8.0 * c5 * u * t;
        htt = 2.0 * b_quad + 2.0 * p_cub * u + 6.0 * q_cub * t +
              4.0 * c5 * (u * u + 3.0 * t * t);
    };

    double u = 0.0, t = 0.0;
    double fx = f(u, t);
    const double f0 = fx;

    for (int iter = 0; iter < 50; ++iter) {
        double gu, gt;
        grad(u, t, gu, gt);
        const double gnorm = std::hypot(gu, gt);
        if (gnorm <= 1e-10 * (1.0 + std::abs(fx))) break;

        double huu, hut, htt;
        hess(u, t, huu, hut, htt);
        double tau = 0.0;
        while (!(huu + tau > 0.0 && (huu + tau) * (htt + tau) - hut * hut > 0.0)) {
            tau = tau == 0.0 ? 1e-12 : tau * 10.0;
            if (tau > 1e12) break;
        }
        const double det = (huu + tau) * (htt + tau) - hut * hut;
        if (!(det > 0.0)) break;
        const double pu = -((htt + tau) * gu - hut * gt) / det;
        const double pt = -((huu + tau) * gt - hut * gu) / det;

        const double slope = gu * pu + gt * pt;  // < 0 for a descent direction
        if (!(slope < 0.0)) break;

        double step = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            const double fu = f(u + step * pu, t + step * pt);
            if (fu <= fx + 1e-4 * step * slope) {
                u += step * pu;
                t += step * pt;
                fx = fu;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }

    if (fx <= f0) return Complex(u, t);
    return Complex(0.0, 0.0);
}

UpperBoundResult gen_osborne(const ComplexMatrix& m, std::size_t v, std::size_t m1,
                             std::size_t passes) {
    check_repeated_dims(m, v, m1, "gen_osborne");
    if (!m.is_square()) throw std::invalid_argument("gen_osborne: square matrix required");
    if (passes < 1) throw std::invalid_argument("gen_osborne: passes must be >= 1");

    const EigenMat mm = detail::to_eigen(m);
    const std::vector<std::size_t> dims(v, m1);
    OsborneCore core = osborne_core(mm, dims, 200, 1e-12);

    EigenMat w = core.balanced;  // M^[1]
    EigenMat s_total = EigenMat::Zero(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v));
    for (std::size_t i = 0; i < v; ++i)
        s_total(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = core.d[i];

    UpperBoundResult res;
    res.fro_history.push_back(w.squaredNorm());
    res.clamped_indices = std::move(core.clamped);

    const Eigen::Index g = static_cast<Eigen::Index>(m1);
    std::size_t updates = 0;
    for (std::size_t pass = 0; pass < passes; ++pass) {
        for (std::size_t i = 0; i < v; ++i) {
            for (std::size_t j = 0; j < v; ++j) {
                if (i == j) continue;
                const OffdiagCoeffs coeffs = offdiag_coeffs(detail::from_eigen(w), i, j, v, m1);
                const Complex s = damped_newton_quartic(coeffs);
                if (s != Complex(0.0, 0.0)) {
                    const Eigen::Index bi = static_cast<Eigen::Index>(i) * g;
                    const Eigen::Index bj = static_cast<Eigen::Index>(j) * g;
                    w.middleRows(bi, g) += s * w.middleRows(bj, g);
                    w.middleCols(bj, g) -= s * w.middleCols(bi, g);
                    s_total.row(static_cast<Eigen::Index>(i)) +=
                        s * s_total.row(static_cast<Eigen::Index>(j));
                }
                res.fro_history.push_back(w.squaredNorm());
                ++updates;
            }
        }
    }

    // alpha from the accumulated scaling on the original matrix.
    Eigen::PartialPivLU<EigenMat> lu(s_total);
    const EigenMat s_inv = lu.inverse();
    const EigenMat scaled = kron_right_mul(kron_left_mul(s_total, m1, mm), s_inv, m1);

    res.alpha = sigma_max(detail::from_eigen(scaled));
    res.scaling = kron_identity(detail::from_eigen(s_total), m1);
    res.r_matrix = detail::from_eigen((s_total.adjoint() * s_total).eval());
    res.converged_by_ratio = core.converged;
    res.iterations_used = updates;
    res.alpha_history = {res.alpha};
    return res;
}

}  // namespace ssv
