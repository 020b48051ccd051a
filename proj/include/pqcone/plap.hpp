#pragma once

#include "pqcone/errors.hpp"
#include "pqcone/grid.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace pqcone {

struct SolverConfig {
    double r = 2.0;
    /// Residual tolerance on max_i |dJ/du_i| / m_i, scaled by max(1, |v|).
    double tol = 1e-10;
    int max_iters = 200;
    /// Relative gradient-regularization start; the absolute start is this times the
    /// largest gradient of the warm start.
    double eps0 = 1.0;
    double eps_min = 1e-10;
    int steps_per_level = 4;
    double eig_tol = 1e-10;
    int eig_max_iters = 500;

    void validate(int dim) const {
        const double rmin = 2.0 * dim / (dim + 1.0);
        if (!(r > rmin) || !std::isfinite(r))
            throw SpecError("exponent " + std::to_string(r) + " must exceed " +
                            std::to_string(rmin) + " in dimension " + std::to_string(dim));
        if (!(tol > 0.0)) throw SpecError("solver tolerance must be positive");
        if (max_iters < 1) throw SpecError("max_iters must be at least 1");
        if (!(eps_min >= 0.0) || !(eps0 > 0.0)) throw SpecError("invalid regularization schedule");
        if (!(eig_tol > 0.0) || eig_max_iters < 1) throw SpecError("invalid eigenvalue settings");
    }
};

struct SolveResult {
    GridFunction u;
    double residual = 0.0;
    int iterations = 0;
    /// Regularized energy after each accepted Newton step, across all continuation levels.
    std::vector<double> energy_history;
};

struct EigenResult {
    double lambda = 0.0;
    GridFunction eigenfunction;
    /// Relative change of the Rayleigh quotient in the last iteration.
    double residual = 0.0;
    int iterations = 0;
};

namespace detail {

/// Piecewise-linear element: 2 nodes on an interval edge, 3 on a triangle.
struct Element {
    std::array<std::size_t, 3> node{};
    std::array<double, 3> gx{};
    std::array<double, 3> gy{};
    int count = 0;
    double area = 0.0;
};

/// Energy discretization over interior unknowns. Rectangles are split along the
/// (i,j)-(i+1,j+1) diagonal; at r = 2 this reproduces the 5-point Laplacian.
class Discretization {
public:
    explicit Discretization(const GridDomain& dom) : dom_(dom) {
        unknown_.assign(dom.size(), -1);
        for (std::size_t k = 0; k < dom.size(); ++k)
            if (!dom.is_boundary(k)) {
                unknown_[k] = static_cast<int>(nodes_.size());
                nodes_.push_back(k);
            }
        if (dom.dim() == 1) {
            const double h = dom.hx();
            for (std::size_t i = 0; i + 1 < dom.nx(); ++i) {
                Element e;
                e.count = 2;
                e.node = {i, i + 1, 0};
                e.gx = {-1.0 / h, 1.0 / h, 0.0};
                e.area = h;
                elems_.push_back(e);
            }
        } else {
            const double hx = dom.hx(), hy = dom.hy();
            for (std::size_t j = 0; j + 1 < dom.ny(); ++j)
                for (std::size_t i = 0; i + 1 < dom.nx(); ++i) {
                    Element lo;
                    lo.count = 3;
                    lo.node = {dom.index(i, j), dom.index(i + 1, j), dom.index(i, j + 1)};
                    lo.gx = {-1.0 / hx, 1.0 / hx, 0.0};
                    lo.gy = {-1.0 / hy, 0.0, 1.0 / hy};
                    lo.area = 0.5 * hx * hy;
                    elems_.push_back(lo);
                    Element up;
                    up.count = 3;
                    up.node = {dom.index(i + 1, j + 1), dom.index(i, j + 1), dom.index(i + 1, j)};
                    up.gx = {1.0 / hx, -1.0 / hx, 0.0};
                    up.gy = {1.0 / hy, 0.0, -1.0 / hy};
                    up.area = 0.5 * hx * hy;
                    elems_.push_back(up);
                }
        }
        mass_ = dom.node_mass();
    }

    std::size_t unknowns() const { return nodes_.size(); }
    double mass() const { return mass_; }
    const std::vector<std::size_t>& nodes() const { return nodes_; }

    Eigen::VectorXd restrict(std::span<const double> full) const {
        Eigen::VectorXd x(static_cast<Eigen::Index>(nodes_.size()));
        for (std::size_t a = 0; a < nodes_.size(); ++a) x[static_cast<Eigen::Index>(a)] = full[nodes_[a]];
        return x;
    }

    std::vector<double> extend(const Eigen::VectorXd& x) const {
        std::vector<double> full(dom_.size(), 0.0);
        for (std::size_t a = 0; a < nodes_.size(); ++a) full[nodes_[a]] = x[static_cast<Eigen::Index>(a)];
        return full;
    }

    double value_at(const Eigen::VectorXd& x, std::size_t node) const {
        const int a = unknown_[node];
        return a < 0 ? 0.0 : x[a];
    }

    std::array<double, 2> gradient(const Element& e, const Eigen::VectorXd& x) const {
        double gx = 0.0, gy = 0.0;
        for (int a = 0; a < e.count; ++a) {
            const double ua = value_at(x, e.node[a]);
            gx += e.gx[a] * ua;
            gy += e.gy[a] * ua;
        }
        return {gx, gy};
    }

    /// J_eps(x) = sum_T |T| (|g|^2+eps^2)^{r/2} / r - sum_i m v_i x_i.
    double energy(const Eigen::VectorXd& x, const Eigen::VectorXd& v, double r, double eps) const {
        double J = 0.0;
        for (const Element& e : elems_) {
            const auto g = gradient(e, x);
            const double s = g[0] * g[0] + g[1] * g[1] + eps * eps;
            J += e.area * std::pow(s, 0.5 * r) / r;
        }
        return J - mass_ * v.dot(x);
    }

    /// Sum_T |T| |g|^r, the numerator of the Rayleigh quotient.
    double gradient_power(const Eigen::VectorXd& x, double r) const {
        double S = 0.0;
        for (const Element& e : elems_) {
            const auto g = gradient(e, x);
            S += e.area * std::pow(g[0] * g[0] + g[1] * g[1], 0.5 * r);
        }
        return S;
    }

    Eigen::VectorXd energy_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& v, double r,
                                    double eps) const {
        Eigen::VectorXd grad = -mass_ * v;
        for (const Element& e : elems_) {
            const auto g = gradient(e, x);
            const double w = weight(g, r, eps);
            for (int a = 0; a < e.count; ++a) {
                const int ia = unknown_[e.node[a]];
                if (ia >= 0) grad[ia] += e.area * w * (e.gx[a] * g[0] + e.gy[a] * g[1]);
            }
        }
        return grad;
    }

    Eigen::SparseMatrix<double> hessian(const Eigen::VectorXd& x, double r, double eps) const {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(elems_.size() * 9);
        for (const Element& e : elems_) {
            const auto g = gradient(e, x);
            const double s = g[0] * g[0] + g[1] * g[1] + eps * eps;
            const double w = r == 2.0 ? 1.0 : std::pow(s, 0.5 * (r - 2.0));
            const double wp = r == 2.0 ? 0.0 : (r - 2.0) * std::pow(s, 0.5 * (r - 4.0));
            for (int a = 0; a < e.count; ++a) {
                const int ia = unknown_[e.node[a]];
                if (ia < 0) continue;
                const double pa = e.gx[a] * g[0] + e.gy[a] * g[1];
                for (int b = 0; b < e.count; ++b) {
                    const int ib = unknown_[e.node[b]];
                    if (ib < 0) continue;
                    const double pb = e.gx[b] * g[0] + e.gy[b] * g[1];
                    const double val =
                        e.area * (w * (e.gx[a] * e.gx[b] + e.gy[a] * e.gy[b]) + wp * pa * pb);
                    trip.emplace_back(ia, ib, val);
                }
            }
        }
        const auto n = static_cast<Eigen::Index>(nodes_.size());
        Eigen::SparseMatrix<double> H(n, n);
        H.setFromTriplets(trip.begin(), trip.end());
        return H;
    }

    /// Largest edge/element gradient magnitude.
    double max_gradient(const Eigen::VectorXd& x) const {
        double m = 0.0;
        for (const Element& e : elems_) {
            const auto g = gradient(e, x);
            m = std::max(m, std::hypot(g[0], g[1]));
        }
        return m;
    }

private:
    static double weight(const std::array<double, 2>& g, double r, double eps) {
        if (r == 2.0) return 1.0;
        return std::pow(g[0] * g[0] + g[1] * g[1] + eps * eps, 0.5 * (r - 2.0));
    }

    const GridDomain& dom_;
    std::vector<int> unknown_;
    std::vector<std::size_t> nodes_;
    std::vector<Element> elems_;
    double mass_ = 0.0;
};

struct NewtonOutcome {
    bool converged = false;
    double residual = 0.0;
    int iterations = 0;
};

/// Damped Newton on J_eps from x. Stops when the scaled residual reaches target, when the
/// step has shrunk to roundoff, or after max_steps.
inline NewtonOutcome newton(const Discretization& disc, Eigen::VectorXd& x, const Eigen::VectorXd& v,
                            double r, double eps, double target, int max_steps,
                            std::vector<double>& history) {
    NewtonOutcome out;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    bool analyzed = false;
    double J = disc.energy(x, v, r, eps);
    for (int it = 0;; ++it) {
        const Eigen::VectorXd grad = disc.energy_gradient(x, v, r, eps);
        out.residual = grad.cwiseAbs().maxCoeff() / disc.mass();
        if (out.residual <= target) {
            out.converged = true;
            return out;
        }
        if (it >= max_steps) return out;
        const Eigen::SparseMatrix<double> H = disc.hessian(x, r, eps);
        if (!analyzed) {
            ldlt.analyzePattern(H);
            analyzed = true;
        }
        ldlt.factorize(H);
        if (ldlt.info() != Eigen::Success) return out;
        const Eigen::VectorXd dx = ldlt.solve(-grad);
        const double slope = grad.dot(dx);
        if (!(slope < 0.0)) return out;

        // Armijo backtracking; the additive slack absorbs roundoff in J near the minimum.
        const double slack = 1e-14 * (std::abs(J) + disc.mass() * std::abs(v.dot(x)));
        double t = 1.0;
        bool accepted = false;
        Eigen::VectorXd trial;
        double Jt = J;
        for (int k = 0; k < 40; ++k, t *= 0.5) {
            trial = x + t * dx;
            Jt = disc.energy(trial, v, r, eps);
            if (Jt <= J + 1e-4 * t * slope + slack) {
                accepted = true;
                break;
            }
        }
        if (!accepted) return out;
        const double step = t * dx.cwiseAbs().maxCoeff();
        x = std::move(trial);
        J = std::min(Jt, J);
        history.push_back(J);
        ++out.iterations;
        if (step <= 1e-13 * std::max(x.cwiseAbs().maxCoeff(), 1e-300)) {
            const Eigen::VectorXd g2 = disc.energy_gradient(x, v, r, eps);
            out.residual = g2.cwiseAbs().maxCoeff() / disc.mass();
            out.converged = out.residual <= 1e3 * target;
            return out;
        }
    }
}

inline Eigen::VectorXd linear_solve(const Discretization& disc, const Eigen::VectorXd& v) {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(v.size());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(disc.hessian(zero, 2.0, 0.0));
    if (ldlt.info() != Eigen::Success) throw SolverError("factorization of the Laplacian failed", 0.0);
    return ldlt.solve(disc.mass() * v);
}

} // namespace detail

/**
 * Discrete solution operator S_r: returns u with u = 0 on the boundary that minimizes the
 * regularized energy for the data v.
 *
 * An optional initial guess skips the regularization continuation and runs Newton at
 * eps_min directly; if that fails, the full continuation is used.
 */
inline SolveResult solve_detailed(const GridFunction& v, const SolverConfig& cfg,
                                  const GridFunction* guess = nullptr) {
    const GridDomain& dom = v.domain();
    cfg.validate(dom.dim());
    detail::Discretization disc(dom);
    const Eigen::VectorXd vi = disc.restrict(v.values());
    const double vscale = std::max(1.0, vi.size() ? vi.cwiseAbs().maxCoeff() : 0.0);
    const double target = cfg.tol * vscale;
    const bool nonneg = v.is_nonnegative();

    auto finish = [&](Eigen::VectorXd x, double res, int iters, std::vector<double> hist) {
        if (nonneg) x = x.cwiseMax(0.0);
        return SolveResult{GridFunction(v.domain_ptr(), disc.extend(x)), res, iters, std::move(hist)};
    };

    if (vi.size() == 0 || vi.cwiseAbs().maxCoeff() == 0.0)
        return finish(Eigen::VectorXd::Zero(vi.size()), 0.0, 0, {});

    std::vector<double> history;
    if (cfg.r == 2.0) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(vi.size());
        history.push_back(disc.energy(x, vi, 2.0, 0.0));
        auto out = detail::newton(disc, x, vi, 2.0, 0.0, target, cfg.max_iters, history);
        if (!out.converged) throw SolverError("linear solve did not reach tolerance", out.residual);
        return finish(std::move(x), out.residual, out.iterations, std::move(history));
    }

    const double r = cfg.r;
    if (guess) {
        Eigen::VectorXd x = disc.restrict(guess->values());
        std::vector<double> h{disc.energy(x, vi, r, cfg.eps_min)};
        auto out = detail::newton(disc, x, vi, r, cfg.eps_min, target, cfg.max_iters, h);
        if (out.converged) return finish(std::move(x), out.residual, out.iterations, std::move(h));
    }

    // Warm start: the r = 2 solution, rescaled to minimize the r-energy along its ray.
    Eigen::VectorXd x = detail::linear_solve(disc, vi);
    {
        const double E = disc.gradient_power(x, r) / r;
        const double F = disc.mass() * vi.dot(x);
        if (E > 0.0 && F > 0.0) x *= std::pow(F / (r * E), 1.0 / (r - 1.0));
    }
    const double gscale = std::max(disc.max_gradient(x), 1e-300);
    double eps = cfg.eps0 * gscale;
    int total = 0;
    detail::NewtonOutcome out;
    history.push_back(disc.energy(x, vi, r, eps));
    while (eps > cfg.eps_min) {
        out = detail::newton(disc, x, vi, r, eps, std::max(target, 1e-3 * vscale),
                             cfg.steps_per_level, history);
        total += out.iterations;
        eps *= 0.5;
        if (!history.empty()) history.push_back(disc.energy(x, vi, r, std::max(eps, cfg.eps_min)));
    }
    out = detail::newton(disc, x, vi, r, cfg.eps_min, target, cfg.max_iters, history);
    total += out.iterations;
    if (!out.converged)
        throw SolverError("p-Laplacian solve (r = " + std::to_string(r) + ") did not converge",
                          out.residual);
    return finish(std::move(x), out.residual, total, std::move(history));
}

inline GridFunction solve(const GridFunction& v, const SolverConfig& cfg) {
    return solve_detailed(v, cfg).u;
}

/// Discrete energy (1/r) sum |grad u|^r - sum m v u, unregularized.
inline double energy(const GridFunction& u, const GridFunction& v, double r) {
    detail::Discretization disc(u.domain());
    return disc.energy(disc.restrict(u.values()), disc.restrict(v.values()), r, 0.0);
}

/// Rayleigh quotient sum |grad u|^r / sum m |u|^r.
inline double rayleigh_quotient(const GridFunction& u, double r) {
    detail::Discretization disc(u.domain());
    const Eigen::VectorXd x = disc.restrict(u.values());
    double denom = 0.0;
    for (Eigen::Index a = 0; a < x.size(); ++a) denom += std::pow(std::abs(x[a]), r);
    denom *= disc.mass();
    if (denom == 0.0) throw SolverError("Rayleigh quotient of the zero function", 0.0);
    return disc.gradient_power(x, r) / denom;
}

/// First eigenvalue of -Delta_r by inverse power iteration u <- normalize(S_r(u^{r-1})).
inline EigenResult first_eigenvalue(double r, const DomainPtr& domain, SolverConfig cfg) {
    cfg.r = r;
    cfg.validate(domain->dim());
    std::vector<double> init(domain->size(), 0.0);
    for (std::size_t k = 0; k < init.size(); ++k) {
        if (domain->is_boundary(k)) continue;
        const auto c = domain->coord(k);
        init[k] = std::sin(std::numbers::pi * c[0] / domain->length(0));
        if (domain->dim() == 2) init[k] *= std::sin(std::numbers::pi * c[1] / domain->length(1));
    }
    GridFunction u(domain, std::move(init));
    u = (1.0 / sup_norm(u)) * u;
    double lambda = rayleigh_quotient(u, r);
    std::optional<GridFunction> guess;
    for (int it = 1; it <= cfg.eig_max_iters; ++it) {
        const GridFunction rhs = u.map([r](double t) { return std::pow(std::max(t, 0.0), r - 1.0); });
        SolveResult s = solve_detailed(rhs, cfg, guess ? &*guess : nullptr);
        const double nrm = sup_norm(s.u);
        if (!(nrm > 0.0)) throw SolverError("inverse iteration collapsed to zero", 0.0);
        u = (1.0 / nrm) * s.u;
        const double next = rayleigh_quotient(u, r);
        const double change = std::abs(next - lambda) / next;
        lambda = next;
        // S_r(u^{r-1}) is close to lambda^{-1/(r-1)} u once u is near the eigenfunction.
        guess = std::pow(lambda, -1.0 / (r - 1.0)) * u;
        if (change <= cfg.eig_tol)
            return EigenResult{lambda, u, change, it};
    }
    throw SolverError("eigenvalue iteration did not converge", 0.0);
}

} // namespace pqcone
