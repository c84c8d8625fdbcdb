#include "ssv/lower_bound.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "ssv/detail/eigen_support.hpp"
#include "ssv/linalg.hpp"

namespace ssv {

namespace {

using detail::EigenMat;
using detail::EigenVec;

struct BlockSpan {
    bool repeated_scalar = false;
    std::size_t offset = 0;
    std::size_t size = 0;
};

std::vector<BlockSpan> standard_block_spans(const BlockStructure& structure) {
    std::vector<BlockSpan> spans;
    std::size_t offset = 0;
    for (const Block& b : structure.blocks()) {
        if (std::holds_alternative<RepeatedScalar>(b)) {
            const std::size_t v = std::get<RepeatedScalar>(b).v;
            spans.push_back({true, offset, v});
            offset += v;
        } else if (std::holds_alternative<FullBlock>(b)) {
            const std::size_t d = std::get<FullBlock>(b).dim;
            spans.push_back({false, offset, d});
            offset += d;
        } else {
            throw std::invalid_argument(
                "power_iteration_standard: structure must contain only repeated scalars and "
                "full blocks");
        }
    }
    return spans;
}

Complex unit_phase(const Complex& x) {
    const double mag = std::abs(x);
    // Any unit-modulus factor is admissible for a vanishing inner product;
    // 1 keeps the iteration deterministic.
    return mag == 0.0 ? Complex(1.0, 0.0) : x / mag;
}

ComplexMatrix normalized_outer(const EigenVec& x, const EigenVec& y) {
    const EigenMat outer = (x / x.norm()) * (y / y.norm()).adjoint();
    return detail::from_eigen(outer);
}

/// Alignment blocks mapping a to b in the standard iteration (the analogue
/// of Q(L(w) L(a)^H) per block): phase(a_i^H w_i) on repeated-scalar
/// blocks, the normalized outer product of (w_i, a_i) on full blocks.
/// Degenerate blocks fall back to unit factors so the assembled matrix
/// keeps spectral norm one.
std::vector<ComplexMatrix> standard_alignment_blocks(const EigenVec& a, const EigenVec& w,
                                                     const std::vector<BlockSpan>& spans) {
    std::vector<ComplexMatrix> blocks;
    blocks.reserve(spans.size());
    for (const BlockSpan& s : spans) {
        const auto ai = a.segment(static_cast<Eigen::Index>(s.offset),
                                  static_cast<Eigen::Index>(s.size));
        const auto wi = w.segment(static_cast<Eigen::Index>(s.offset),
                                  static_cast<Eigen::Index>(s.size));
        if (s.repeated_scalar) {
            blocks.push_back(ComplexMatrix(1, 1, {unit_phase(ai.dot(wi))}));
        } else if (ai.norm() == 0.0 || wi.norm() == 0.0) {
            blocks.push_back(ComplexMatrix::identity(s.size));
        } else {
            blocks.push_back(normalized_outer(wi, ai));
        }
    }
    return blocks;
}

/// Exact bound certified by a unit-norm alignment Delta-hat: the dominant
/// eigenvalue lambda of Delta-hat * M gives mu >= |lambda| with certificate
/// conj(lambda)/|lambda|^2 * Delta-hat (the phase rotation puts an
/// eigenvalue of M * Delta at exactly 1). Unit-modulus scalings keep every
/// admissible block admissible. Returns beta = 0 when the spectrum is zero.
std::pair<double, Perturbation> rho_certified(const ComplexMatrix& m,
                                              const Perturbation& alignment) {
    const EigenMat prod = detail::view(alignment.assembled()) * detail::view(m);
    Eigen::ComplexEigenSolver<EigenMat> eig(prod, false);
    if (eig.info() != Eigen::Success) return {0.0, Perturbation()};
    Eigen::Index at = 0;
    const double rho = eig.eigenvalues().cwiseAbs().maxCoeff(&at);
    if (!(rho > 0.0)) return {0.0, Perturbation()};
    const Complex lambda = eig.eigenvalues()(at);
    return {rho, alignment.scaled(std::conj(lambda) / (rho * rho))};
}

/// Bounded pool of per-cycle candidates: the largest iterate betas seen plus
/// the most recent cycles. The residual and exactness checks run once at the
/// end on this short list instead of every cycle. Early cycles often carry
/// the largest betas but fail the certificate tests; the recent cycles sit
/// near the orbit the iteration settled on and provide the accepted ones.
class CandidatePool {
public:
    void push(double beta, std::vector<ComplexMatrix> blocks) {
        if (recent_.size() == kRecent) recent_.erase(recent_.begin());
        recent_.emplace_back(beta, blocks);

        if (top_.size() == kTop) {
            auto worst = std::min_element(
                top_.begin(), top_.end(),
                [](const auto& x, const auto& y) { return x.first < y.first; });
            if (worst->first >= beta) return;
            top_.erase(worst);
        }
        top_.emplace_back(beta, std::move(blocks));
    }

    /// Pooled candidates sorted by decreasing beta (duplicates possible and
    /// harmless).
    std::vector<std::pair<double, std::vector<ComplexMatrix>>> sorted() && {
        for (auto& item : recent_) top_.push_back(std::move(item));
        std::sort(top_.begin(), top_.end(),
                  [](const auto& x, const auto& y) { return x.first > y.first; });
        return std::move(top_);
    }

    bool empty() const noexcept { return top_.empty(); }

private:
    static constexpr std::size_t kTop = 16;
    static constexpr std::size_t kRecent = 16;
    std::vector<std::pair<double, std::vector<ComplexMatrix>>> top_;
    std::vector<std::pair<double, std::vector<ComplexMatrix>>> recent_;
};

/// Shared tail of both iterations: walk the candidate pool in decreasing
/// beta order and return the first candidate whose scaled certificate
/// passes the residual test and whose beta does not exceed the exact value
/// its own alignment certifies. The exact certification only ever rejects a
/// candidate; it never raises the reported bound. When no candidate
/// survives, the spectral-radius fallback from the final alignment (exact
/// by construction) is used.
LowerBoundResult finish(const ComplexMatrix& m, const BlockStructure& structure,
                        CandidatePool pool,
                        std::optional<std::pair<double, Perturbation>> fallback,
                        LowerBoundResult result, bool vectors_converged, double residual_tol) {
    bool found = false;
    for (auto& [beta, blocks] : std::move(pool).sorted()) {
        result.candidate_betas.push_back(beta);
        if (found) continue;
        const Perturbation alignment(structure, std::move(blocks));
        const Perturbation scaled = alignment.scaled(Complex(1.0 / beta, 0.0));
        const double residual = singularity_residual(m, scaled);
        if (residual > residual_tol) continue;
        const double exact = spectral_radius(
            detail::from_eigen(detail::view(alignment.assembled()) * detail::view(m)));
        if (beta > exact * (1.0 + 1e-10)) continue;  // residual passed with slack
        result.beta = beta;
        result.perturbation = scaled;
        result.residual = residual;
        result.converged = vectors_converged;
        found = true;
    }

    if (!found && fallback.has_value() && fallback->first > 0.0) {
        result.beta = fallback->first;
        result.perturbation = std::move(fallback->second);
        result.residual = singularity_residual(m, result.perturbation);
        result.converged = false;
        result.used_fallback = true;
    } else if (!found) {
        result.beta = 0.0;
        result.perturbation = Perturbation();
        result.residual = 1.0;
        result.converged = false;
    }
    return result;
}

double resolve_residual_tol(const PowerIterConfig& cfg, const ComplexMatrix& m) {
    return cfg.residual_tol >= 0.0 ? cfg.residual_tol : 1e-6 * sigma_max(m);
}

void check_initial_vectors(std::span<const Complex> b0, std::span<const Complex> w0,
                           std::size_t expected) {
    if (b0.size() != expected || w0.size() != expected) {
        throw std::invalid_argument("power iteration: initial vectors have wrong length");
    }
    const auto unit = [](std::span<const Complex> x) {
        double s = 0.0;
        for (const Complex& c : x) s += std::norm(c);
        return std::abs(std::sqrt(s) - 1.0) < 1e-8;
    };
    if (!unit(b0) || !unit(w0)) {
        throw std::invalid_argument("power iteration: initial vectors must have unit 2-norm");
    }
}

/// Update step between consecutive (b, w) pairs, measured per vector modulo
/// a unit phase. The iteration settles onto closed orbits where b and w
/// each rotate by a constant phase per cycle (for a complex dominant
/// eigenvalue the rotation never stops); every snapshot of such an orbit
/// solves the alignment equations, so rays are the right notion of
/// convergence while the raw vector difference never shrinks.
double phase_aligned_step(const EigenVec& b_old, const EigenVec& w_old, const EigenVec& b_new,
                          const EigenVec& w_new) {
    const Complex cb = unit_phase(b_old.dot(b_new));
    const Complex cw = unit_phase(w_old.dot(w_new));
    return std::max((b_new - cb * b_old).norm(), (w_new - cw * w_old).norm());
}

void record_state(LowerBoundResult& result, const PowerIterConfig& cfg, const EigenVec& a,
                  const EigenVec& z, const EigenVec& b, const EigenVec& w, double beta,
                  std::size_t cycle) {
    if (!cfg.record_trajectory) return;
    PowerIterState st;
    st.a = detail::from_eigen_vector(a);
    st.z = detail::from_eigen_vector(z);
    st.b = detail::from_eigen_vector(b);
    st.w = detail::from_eigen_vector(w);
    st.beta = beta;
    st.iteration = cycle;
    result.trajectory.push_back(std::move(st));
}

}  // namespace

std::pair<std::vector<Complex>, std::vector<Complex>> init_vectors(const ComplexMatrix& m,
                                                                   const ComplexMatrix& d_star) {
    if (m.empty()) throw std::invalid_argument("init_vectors: empty matrix");
    ComplexMatrix target = m;
    if (!d_star.empty()) {
        if (!d_star.is_square() || d_star.rows() != m.rows() || m.rows() != m.cols()) {
            throw std::invalid_argument("init_vectors: d_star must be square and conform with M");
        }
        Eigen::FullPivLU<EigenMat> lu(detail::view(d_star));
        if (!lu.isInvertible()) {
            throw std::invalid_argument("init_vectors: d_star is singular");
        }
        // D M D^-1 as a right solve: X D = D M, via the factored transpose.
        const EigenMat dm = detail::view(d_star) * detail::view(m);
        Eigen::FullPivLU<EigenMat> lu_t(detail::view(d_star).transpose().eval());
        const EigenMat balanced = lu_t.solve(dm.transpose()).transpose();
        target = detail::from_eigen(balanced);
    }
    std::vector<Complex> v = right_singular_vector(target);
    return {v, v};
}

LowerBoundResult power_iteration_standard(const ComplexMatrix& m, const BlockStructure& structure,
                                          std::span<const Complex> b0, std::span<const Complex> w0,
                                          const PowerIterConfig& cfg) {
    if (!m.is_square() || m.empty()) {
        throw std::invalid_argument("power_iteration_standard: square nonempty matrix required");
    }
    if (structure.row_dim() != m.rows()) {
        throw std::invalid_argument("power_iteration_standard: structure dimension mismatch");
    }
    const std::vector<BlockSpan> spans = standard_block_spans(structure);
    check_initial_vectors(b0, w0, m.rows());

    const double residual_tol = resolve_residual_tol(cfg, m);
    const EigenMat mm = detail::to_eigen(m);
    EigenVec b = detail::to_eigen_vector(b0);
    EigenVec w = detail::to_eigen_vector(w0);
    EigenVec a = EigenVec::Zero(b.size());
    EigenVec z = EigenVec::Zero(b.size());

    LowerBoundResult result;
    result.residual = 1.0;
    CandidatePool pool;
    bool vectors_converged = false;

    for (std::size_t cycle = 0; cycle < cfg.max_cycles; ++cycle) {
        result.iterations_used = cycle + 1;

        EigenVec mb = mm * b;
        double beta = mb.norm();
        if (beta == 0.0) return result;  // mu may be 0; nothing to certify
        a = mb / beta;

        for (const BlockSpan& s : spans) {
            const auto ai = a.segment(static_cast<Eigen::Index>(s.offset),
                                      static_cast<Eigen::Index>(s.size));
            const auto wi = w.segment(static_cast<Eigen::Index>(s.offset),
                                      static_cast<Eigen::Index>(s.size));
            auto zi = z.segment(static_cast<Eigen::Index>(s.offset),
                                static_cast<Eigen::Index>(s.size));
            if (s.repeated_scalar) {
                zi = unit_phase(wi.dot(ai)) * wi;
            } else {
                const double na = ai.norm();
                zi = na == 0.0 ? EigenVec(wi) : EigenVec((wi.norm() / na) * ai);
            }
        }

        EigenVec mhz = mm.adjoint() * z;
        beta = mhz.norm();
        if (beta == 0.0) return result;
        const EigenVec w_new = mhz / beta;

        EigenVec b_new(b.size());
        for (const BlockSpan& s : spans) {
            const auto ai = a.segment(static_cast<Eigen::Index>(s.offset),
                                      static_cast<Eigen::Index>(s.size));
            const auto wi = w_new.segment(static_cast<Eigen::Index>(s.offset),
                                          static_cast<Eigen::Index>(s.size));
            auto bi = b_new.segment(static_cast<Eigen::Index>(s.offset),
                                    static_cast<Eigen::Index>(s.size));
            if (s.repeated_scalar) {
                bi = unit_phase(ai.dot(wi)) * ai;
            } else {
                const double nw = wi.norm();
                bi = nw == 0.0 ? EigenVec(ai) : EigenVec((ai.norm() / nw) * wi);
            }
        }
        if (b_new.norm() > 0.0) b_new /= b_new.norm();

        result.beta_history.push_back(beta);
        pool.push(beta, standard_alignment_blocks(a, w_new, spans));

        const double step = phase_aligned_step(b, w, b_new, w_new);
        b = b_new;
        w = w_new;
        record_state(result, cfg, a, z, b, w, beta, cycle + 1);
        if (cfg.step_tol > 0.0 && step < cfg.step_tol) {
            vectors_converged = true;
            break;
        }
    }

    std::optional<std::pair<double, Perturbation>> fallback;
    if (a.norm() > 0.0) {
        // Both final alignment directions, exactly certified.
        std::vector<ComplexMatrix> blocks_b = standard_alignment_blocks(a, w, spans);
        std::vector<ComplexMatrix> blocks_a_h;
        blocks_a_h.reserve(blocks_b.size());
        for (std::size_t k = 0; k < spans.size(); ++k) {
            const auto ai = a.segment(static_cast<Eigen::Index>(spans[k].offset),
                                      static_cast<Eigen::Index>(spans[k].size));
            const auto wi = w.segment(static_cast<Eigen::Index>(spans[k].offset),
                                      static_cast<Eigen::Index>(spans[k].size));
            if (spans[k].repeated_scalar) {
                blocks_a_h.push_back(ComplexMatrix(1, 1, {std::conj(unit_phase(wi.dot(ai)))}));
            } else if (ai.norm() == 0.0 || wi.norm() == 0.0) {
                blocks_a_h.push_back(ComplexMatrix::identity(spans[k].size));
            } else {
                blocks_a_h.push_back(normalized_outer(wi, ai));
            }
        }
        auto cert_a = rho_certified(m, Perturbation(structure, std::move(blocks_a_h)));
        auto cert_b = rho_certified(m, Perturbation(structure, std::move(blocks_b)));
        if (std::max(cert_a.first, cert_b.first) > 0.0) {
            fallback = cert_a.first >= cert_b.first ? std::move(cert_a) : std::move(cert_b);
        }
    }

    return finish(m, structure, std::move(pool), std::move(fallback), std::move(result),
                  vectors_converged, residual_tol);
}

LowerBoundResult power_iteration_repeated_full(const ComplexMatrix& m, std::size_t v,
                                               std::size_t m1, std::span<const Complex> b0,
                                               std::span<const Complex> w0,
                                               const PowerIterConfig& cfg) {
    if (m.empty() || v < 1 || m1 < 1 || m.cols() != v * m1 || m.rows() % v != 0) {
        throw std::invalid_argument(
            "power_iteration_repeated_full: need cols(M) = v*m1 and rows(M) divisible by v");
    }
    const std::size_t n1 = m.rows() / v;
    check_initial_vectors(b0, w0, m.cols());

    const double residual_tol = resolve_residual_tol(cfg, m);
    const EigenMat mm = detail::to_eigen(m);
    const BlockStructure structure = m1 == n1 ? BlockStructure::repeated_full(v, m1)
                                              : BlockStructure::repeated_full_rect(v, m1, n1);

    EigenVec b = detail::to_eigen_vector(b0);
    EigenVec w = detail::to_eigen_vector(w0);
    EigenVec a = EigenVec::Zero(static_cast<Eigen::Index>(m.rows()));
    EigenVec z = EigenVec::Zero(static_cast<Eigen::Index>(m.rows()));

    LowerBoundResult result;
    result.residual = 1.0;
    CandidatePool pool;
    bool vectors_converged = false;

    const auto stack_vec = [](const EigenVec& y, std::size_t rows) {
        return stack(std::span<const Complex>(y.data(), static_cast<std::size_t>(y.size())), rows);
    };

    for (std::size_t cycle = 0; cycle < cfg.max_cycles; ++cycle) {
        result.iterations_used = cycle + 1;

        EigenVec mb = mm * b;
        double beta = mb.norm();
        if (beta == 0.0) return result;
        a = mb / beta;

        const ComplexMatrix la = stack_vec(a, n1);
        const ComplexMatrix lw = stack_vec(w, m1);
        const EigenMat gz = detail::view(la) * detail::view(lw).adjoint();
        if (gz.norm() == 0.0) break;  // no alignment direction; use the fallback
        const ComplexMatrix qz = q_factor(detail::from_eigen(gz));
        const EigenMat zl = detail::view(qz) * detail::view(lw);
        z = detail::to_eigen_vector(unstack(detail::from_eigen(zl)));

        EigenVec mhz = mm.adjoint() * z;
        beta = mhz.norm();
        if (beta == 0.0) return result;
        const EigenVec w_new = mhz / beta;

        const ComplexMatrix lw_new = stack_vec(w_new, m1);
        const EigenMat gb = detail::view(lw_new) * detail::view(la).adjoint();
        if (gb.norm() == 0.0) break;
        const ComplexMatrix qb = q_factor(detail::from_eigen(gb));
        EigenVec b_new = detail::to_eigen_vector(
            unstack(detail::from_eigen(detail::view(qb) * detail::view(la))));
        if (b_new.norm() > 0.0) b_new /= b_new.norm();

        result.beta_history.push_back(beta);
        pool.push(beta, {qb});

        const double step = phase_aligned_step(b, w, b_new, w_new);
        b = b_new;
        w = w_new;
        record_state(result, cfg, a, z, b, w, beta, cycle + 1);
        if (cfg.step_tol > 0.0 && step < cfg.step_tol) {
            vectors_converged = true;
            break;
        }
    }

    std::optional<std::pair<double, Perturbation>> fallback;
    if (a.norm() > 0.0 && w.norm() > 0.0) {
        auto fb = fallback_lower_bound(
            std::span<const Complex>(a.data(), static_cast<std::size_t>(a.size())),
            std::span<const Complex>(w.data(), static_cast<std::size_t>(w.size())), m, v, m1);
        if (fb.first > 0.0) fallback = std::move(fb);
    }

    return finish(m, structure, std::move(pool), std::move(fallback), std::move(result),
                  vectors_converged, residual_tol);
}

std::pair<double, Perturbation> fallback_lower_bound(std::span<const Complex> a,
                                                     std::span<const Complex> w,
                                                     const ComplexMatrix& m, std::size_t v,
                                                     std::size_t m1) {
    if (a.empty() || w.empty() || v < 1 || m1 < 1 || w.size() != v * m1 || a.size() % v != 0) {
        throw std::invalid_argument("fallback_lower_bound: inconsistent dimensions");
    }
    const std::size_t n1 = a.size() / v;
    const BlockStructure structure = m1 == n1 ? BlockStructure::repeated_full(v, m1)
                                              : BlockStructure::repeated_full_rect(v, m1, n1);
    const ComplexMatrix la = stack(a, n1);
    const ComplexMatrix lw = stack(w, m1);
    const EigenMat gz = detail::view(la) * detail::view(lw).adjoint();
    const EigenMat gb = detail::view(lw) * detail::view(la).adjoint();
    if (gz.norm() == 0.0 || gb.norm() == 0.0) return {0.0, Perturbation()};

    // Delta_a = I_v (x) Q(L(a) L(w)^H): its adjoint is the admissible shape.
    const ComplexMatrix qa = q_factor(detail::from_eigen(gz));
    const ComplexMatrix qb = q_factor(detail::from_eigen(gb));
    auto cert_a = rho_certified(m, Perturbation(structure, {qa.adjoint()}));
    auto cert_b = rho_certified(m, Perturbation(structure, {qb}));

    if (std::max(cert_a.first, cert_b.first) <= 0.0) return {0.0, Perturbation()};
    return cert_a.first >= cert_b.first ? cert_a : cert_b;
}

}  // namespace ssv
