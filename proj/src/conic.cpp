#include "ucac/conic.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ucac {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

struct Blocks {
    // offsets of SOC blocks into the cone vector; nonneg part is [0, nonneg)
    int nonneg;
    std::vector<int> off;
    std::vector<int> len;
    explicit Blocks(const ConeDims& d) : nonneg(d.nonneg) {
        int o = d.nonneg;
        for (int q : d.soc) {
            off.push_back(o);
            len.push_back(q);
            o += q;
        }
    }
};

/// Nesterov-Todd scaling state for the composite cone.
struct Scaling {
    Eigen::VectorXd d;             // nonneg part: W = diag(d)
    std::vector<Eigen::VectorXd> v;  // per SOC block: sqrt of scaling point
    std::vector<double> eta;         // per SOC block: det of scaling point
    Eigen::VectorXd lambda;          // scaled variable, full cone dim
};

double jdot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double s = a[0] * b[0];
    for (int i = 1; i < a.size(); ++i) s -= a[i] * b[i];
    return s;
}

/// lambda_min of a SOC element: u0 - ||u1||.
double soc_margin(const double* u, int q) {
    double nrm = 0.0;
    for (int i = 1; i < q; ++i) nrm += u[i] * u[i];
    return u[0] - std::sqrt(nrm);
}

bool compute_scaling(const Blocks& blk, const Eigen::VectorXd& s,
                     const Eigen::VectorXd& z, Scaling& W) {
    W.d.resize(blk.nonneg);
    for (int i = 0; i < blk.nonneg; ++i) {
        if (s[i] <= 0 || z[i] <= 0) return false;
        W.d[i] = std::sqrt(s[i] / z[i]);
    }
    W.v.assign(blk.off.size(), {});
    W.eta.assign(blk.off.size(), 0.0);
    W.lambda.resize(s.size());
    for (int i = 0; i < blk.nonneg; ++i) W.lambda[i] = std::sqrt(s[i] * z[i]);

    for (size_t k = 0; k < blk.off.size(); ++k) {
        const int o = blk.off[k], q = blk.len[k];
        Eigen::VectorXd sb = s.segment(o, q), zb = z.segment(o, q);
        const double sres = jdot(sb, sb), zres = jdot(zb, zb);
        if (sres <= 0 || zres <= 0 || sb[0] <= 0 || zb[0] <= 0) return false;
        const double snorm = std::sqrt(sres), znorm = std::sqrt(zres);
        Eigen::VectorXd sbar = sb / snorm, zbar = zb / znorm;
        const double gamma = std::sqrt((1.0 + sbar.dot(zbar)) / 2.0);
        Eigen::VectorXd wbar(q);
        wbar[0] = (sbar[0] + zbar[0]) / (2 * gamma);
        for (int i = 1; i < q; ++i) wbar[i] = (sbar[i] - zbar[i]) / (2 * gamma);
        const double eta = std::sqrt(snorm / znorm);  // det of scaling point w
        Eigen::VectorXd w = eta * wbar;
        Eigen::VectorXd v(q);
        v[0] = std::sqrt((w[0] + eta) / 2.0);
        for (int i = 1; i < q; ++i) v[i] = w[i] / (2 * v[0]);
        W.v[k] = std::move(v);
        W.eta[k] = eta;
        // lambda = W z for this block
        const Eigen::VectorXd& vv = W.v[k];
        const double vz = vv.dot(zb);
        Eigen::VectorXd lam = 2.0 * vz * vv;
        lam[0] -= eta * zb[0];
        for (int i = 1; i < q; ++i) lam[i] += eta * zb[i];
        W.lambda.segment(o, q) = lam;
    }
    return true;
}

/// u <- W * u (apply NT scaling).
void apply_W(const Blocks& blk, const Scaling& W, Eigen::VectorXd& u) {
    for (int i = 0; i < blk.nonneg; ++i) u[i] *= W.d[i];
    for (size_t k = 0; k < blk.off.size(); ++k) {
        const int o = blk.off[k], q = blk.len[k];
        const Eigen::VectorXd& v = W.v[k];
        const double eta = W.eta[k];
        Eigen::VectorXd ub = u.segment(o, q);
        const double vu = v.dot(ub);
        Eigen::VectorXd r = 2.0 * vu * v;
        r[0] -= eta * ub[0];
        for (int i = 1; i < q; ++i) r[i] += eta * ub[i];
        u.segment(o, q) = r;
    }
}

/// u <- W^{-1} * u.
void apply_Winv(const Blocks& blk, const Scaling& W, Eigen::VectorXd& u) {
    for (int i = 0; i < blk.nonneg; ++i) u[i] /= W.d[i];
    for (size_t k = 0; k < blk.off.size(); ++k) {
        const int o = blk.off[k], q = blk.len[k];
        const Eigen::VectorXd& v = W.v[k];
        const double eta = W.eta[k];
        Eigen::VectorXd ub = u.segment(o, q);
        // W^{-1} = (2/eta^2) (Jv)(Jv)' - (1/eta) J
        Eigen::VectorXd jv = v;
        for (int i = 1; i < q; ++i) jv[i] = -jv[i];
        const double t = jv.dot(ub);
        Eigen::VectorXd r = (2.0 / (eta * eta)) * t * jv;
        r[0] -= ub[0] / eta;
        for (int i = 1; i < q; ++i) r[i] += ub[i] / eta;
        u.segment(o, q) = r;
    }
}

/// a o b (Jordan product).
Eigen::VectorXd jprod(const Blocks& blk, const Eigen::VectorXd& a,
                      const Eigen::VectorXd& b) {
    Eigen::VectorXd r(a.size());
    for (int i = 0; i < blk.nonneg; ++i) r[i] = a[i] * b[i];
    for (size_t k = 0; k < blk.off.size(); ++k) {
        const int o = blk.off[k], q = blk.len[k];
        r[o] = a.segment(o, q).dot(b.segment(o, q));
        for (int i = 1; i < q; ++i) r[o + i] = a[o] * b[o + i] + b[o] * a[o + i];
    }
    return r;
}

/// Solve lambda o u = d for u.
Eigen::VectorXd jdiv(const Blocks& blk, const Eigen::VectorXd& lam,
                     const Eigen::VectorXd& d) {
    Eigen::VectorXd u(d.size());
    for (int i = 0; i < blk.nonneg; ++i) u[i] = d[i] / lam[i];
    for (size_t k = 0; k < blk.off.size(); ++k) {
        const int o = blk.off[k], q = blk.len[k];
        double l1d1 = 0.0, l1sq = 0.0;
        for (int i = 1; i < q; ++i) {
            l1d1 += lam[o + i] * d[o + i];
            l1sq += lam[o + i] * lam[o + i];
        }
        const double det = lam[o] * lam[o] - l1sq;
        const double u0 = (lam[o] * d[o] - l1d1) / det;
        u[o] = u0;
        for (int i = 1; i < q; ++i) u[o + i] = (d[o + i] - u0 * lam[o + i]) / lam[o];
    }
    return u;
}

Eigen::VectorXd cone_identity(const Blocks& blk, int m) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < blk.nonneg; ++i) e[i] = 1.0;
    for (size_t k = 0; k < blk.off.size(); ++k) e[blk.off[k]] = 1.0;
    return e;
}

/// Largest step with u + alpha*du staying in the cone (u strictly inside).
double max_cone_step(const Blocks& blk, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& du) {
    double amax = inf;
    for (int i = 0; i < blk.nonneg; ++i)
        if (du[i] < 0) amax = std::min(amax, -u[i] / du[i]);
    for (size_t k = 0; k < blk.off.size(); ++k) {
        const int o = blk.off[k], q = blk.len[k];
        double dd = 0, ud = 0, uu = 0;
        for (int i = 1; i < q; ++i) {
            dd += du[o + i] * du[o + i];
            ud += u[o + i] * du[o + i];
            uu += u[o + i] * u[o + i];
        }
        const double A = du[o] * du[o] - dd;
        const double B = 2 * (u[o] * du[o] - ud);
        const double C = u[o] * u[o] - uu;  // > 0 strictly inside
        double cand = inf;
        auto consider = [&](double a) {
            if (a > 0 && u[o] + a * du[o] >= -1e-13 * (std::abs(u[o]) + 1))
                cand = std::min(cand, a);
        };
        if (std::abs(A) < 1e-14 * (dd + du[o] * du[o] + 1e-300)) {
            if (B < 0) consider(-C / B);
        } else {
            const double disc = B * B - 4 * A * C;
            if (disc >= 0) {
                const double sq = std::sqrt(disc);
                // numerically stable root pair
                const double q1 = -0.5 * (B + (B >= 0 ? sq : -sq));
                consider(q1 / A);
                if (q1 != 0.0) consider(C / q1);
            }
        }
        amax = std::min(amax, cand);
    }
    return amax;
}

struct KktSolver {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    Eigen::SparseMatrix<double> K;      // regularized
    Eigen::SparseMatrix<double> K0;     // unregularized, for refinement
    bool analyzed = false;

    bool factor(const StandardConic& p, const Blocks& blk, const Scaling& W,
                double reg) {
        const int n = p.n, np = static_cast<int>(p.A.rows()), m = static_cast<int>(p.G.rows());
        const int N = n + np + m;
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(p.A.nonZeros() + p.G.nonZeros() + N + 16 * (blk.off.size() + 1));
        for (int i = 0; i < n; ++i) trips.emplace_back(i, i, reg);
        for (int k = 0; k < p.A.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(p.A, k); it; ++it) {
                trips.emplace_back(n + it.row(), it.col(), it.value());
                trips.emplace_back(it.col(), n + it.row(), it.value());
            }
        for (int k = 0; k < p.G.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(p.G, k); it; ++it) {
                trips.emplace_back(n + np + it.row(), it.col(), it.value());
                trips.emplace_back(it.col(), n + np + it.row(), it.value());
            }
        for (int i = 0; i < np; ++i) trips.emplace_back(n + i, n + i, -reg);
        // -W'W block
        for (int i = 0; i < blk.nonneg; ++i) {
            const double w2 = W.d[i] * W.d[i];
            trips.emplace_back(n + np + i, n + np + i, -w2 - reg);
        }
        for (size_t k = 0; k < blk.off.size(); ++k) {
            const int o = blk.off[k], q = blk.len[k];
            const Eigen::VectorXd& v = W.v[k];
            const double eta = W.eta[k];
            // W^2 = P(w) = 2 w w' - eta^2 J, w = (2 v(v'.) - eta J) v applied... use
            // w = v o v: w0 = v'v, wi = 2 v0 vi.
            Eigen::VectorXd w(q);
            w[0] = v.squaredNorm();
            for (int i = 1; i < q; ++i) w[i] = 2 * v[0] * v[i];
            // emit the full dense block so the factor pattern stays fixed
            for (int i = 0; i < q; ++i)
                for (int j = 0; j < q; ++j) {
                    double val = 2 * w[i] * w[j];
                    if (i == j) val -= (i == 0 ? 1.0 : -1.0) * eta * eta;
                    trips.emplace_back(n + np + o + i, n + np + o + j,
                                       -val - (i == j ? reg : 0.0));
                }
        }
        K.resize(N, N);
        K.setFromTriplets(trips.begin(), trips.end());
        // unregularized copy for iterative refinement
        K0 = K;
        for (int i = 0; i < n; ++i) K0.coeffRef(i, i) -= reg;
        for (int i = n; i < N; ++i) K0.coeffRef(i, i) += reg;
        if (!analyzed) {
            ldlt.analyzePattern(K);
            analyzed = true;
        }
        ldlt.factorize(K);
        return ldlt.info() == Eigen::Success;
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
        Eigen::VectorXd x = ldlt.solve(rhs);
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::VectorXd r = rhs - K0 * x;
            x += ldlt.solve(r);
        }
        return x;
    }
};

}  // namespace

ConicSolution solve_standard_conic(const StandardConic& prob, const ConicSettings& st) {
    ConicSolution sol;
    const int n = prob.n;
    const int np = static_cast<int>(prob.A.rows());
    const int m = static_cast<int>(prob.G.rows());
    const Blocks blk(prob.dims);
    if (prob.dims.total() != m) {
        sol.message = "cone dims mismatch";
        return sol;
    }

    if (m == 0) {
        // Pure equality problem: one KKT solve.
        StandardConic p2 = prob;
        p2.G.resize(1, n);
        p2.G.insert(0, 0) = 0.0;  // placeholder never used
        sol.message = "no cone rows";
        // fall through to error; callers always provide bounds
        return sol;
    }

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(np);
    Eigen::VectorXd s = cone_identity(blk, m);
    Eigen::VectorXd z = s;
    double tau = 1.0, kappa = 1.0;
    const double deg = prob.dims.degree();

    const double normb = 1.0 + prob.b.norm();
    const double normh = 1.0 + prob.h.norm();
    const double normc = 1.0 + prob.c.norm();

    KktSolver kkt;
    Scaling W;
    double reg = 1e-10;

    auto cbh_dot = [&](const Eigen::VectorXd& ux, const Eigen::VectorXd& uy,
                       const Eigen::VectorXd& uz) {
        return prob.c.dot(ux) + prob.b.dot(uy) + prob.h.dot(uz);
    };

    double best_metric = inf;
    for (int it = 0; it < st.max_iters; ++it) {
        // residuals of the homogeneous model
        Eigen::VectorXd rx = prob.A.transpose() * y + prob.G.transpose() * z + prob.c * tau;
        Eigen::VectorXd ry = prob.A * x - prob.b * tau;
        Eigen::VectorXd rz = prob.G * x + s - prob.h * tau;
        const double rtau = kappa + prob.c.dot(x) + prob.b.dot(y) + prob.h.dot(z);
        const double mu = (s.dot(z) + tau * kappa) / (deg + 1);

        // convergence metrics on the de-homogenized point
        const double pcost = prob.c.dot(x) / tau;
        const double dcost = -(prob.b.dot(y) + prob.h.dot(z)) / tau;
        const double gap = s.dot(z) / (tau * tau);
        const double relgap = gap / std::max(1.0, std::abs(pcost));
        const double pres = std::max(ry.norm() / normb, rz.norm() / normh) / tau;
        const double dres = rx.norm() / normc / tau;

        sol.iterations = it;
        sol.pres = pres;
        sol.dres = dres;
        sol.relgap = relgap;
        if (st.verbose)
            std::printf("it %2d  pcost % .6e  dcost % .6e  gap %.2e  pres %.2e  dres %.2e  "
                        "tau %.2e  kappa %.2e\n",
                        it, pcost, dcost, gap, pres, dres, tau, kappa);

        if (pres <= st.feastol && dres <= st.feastol &&
            (gap <= st.abstol || relgap <= st.reltol)) {
            sol.status = ConicStatus::optimal;
            sol.x = x / tau;
            sol.y = y / tau;
            sol.z = z / tau;
            sol.s = s / tau;
            sol.pobj = pcost;
            sol.dobj = dcost;
            return sol;
        }
        // infeasibility certificates
        const double by_hz = prob.b.dot(y) + prob.h.dot(z);
        if (by_hz < 0) {
            const double nu = -by_hz;
            const double cert = (prob.A.transpose() * y + prob.G.transpose() * z).norm() / nu;
            if (cert <= st.feastol * normc && tau <= 1e-8 * std::max(1.0, kappa)) {
                sol.status = ConicStatus::primal_infeasible;
                sol.y = y / nu;
                sol.z = z / nu;
                sol.message = "primal infeasibility certificate";
                return sol;
            }
        }
        if (prob.c.dot(x) < 0) {
            const double nu = -prob.c.dot(x);
            const double cert = std::max((prob.A * x).norm(), (prob.G * x + s).norm()) / nu;
            if (cert <= st.feastol * std::max(normb, normh) &&
                tau <= 1e-8 * std::max(1.0, kappa)) {
                sol.status = ConicStatus::dual_infeasible;
                sol.x = x / nu;
                sol.message = "dual infeasibility certificate (primal unbounded)";
                return sol;
            }
        }

        if (!compute_scaling(blk, s, z, W)) {
            sol.status = ConicStatus::numerical_error;
            sol.message = "iterate left the cone interior";
            return sol;
        }
        bool ok = kkt.factor(prob, blk, W, reg);
        for (int tries = 0; !ok && tries < 4; ++tries) {
            reg *= 100;
            ok = kkt.factor(prob, blk, W, reg);
        }
        if (!ok) {
            sol.status = ConicStatus::numerical_error;
            sol.message = "KKT factorization failed";
            return sol;
        }

        const int N = n + np + m;
        Eigen::VectorXd rhs1(N);
        rhs1 << -prob.c, prob.b, prob.h;
        const Eigen::VectorXd u1 = kkt.solve(rhs1);
        const Eigen::VectorXd u1x = u1.head(n), u1y = u1.segment(n, np), u1z = u1.tail(m);
        const double denom = cbh_dot(u1x, u1y, u1z) - kappa / tau;

        auto direction = [&](double sigma, const Eigen::VectorXd& ds_rhs, double dk_rhs,
                             Eigen::VectorXd& dx, Eigen::VectorXd& dy, Eigen::VectorXd& dz,
                             Eigen::VectorXd& ds, double& dtau, double& dkappa) {
            const double oms = 1.0 - sigma;
            Eigen::VectorXd wld = jdiv(blk, W.lambda, ds_rhs);
            apply_W(blk, W, wld);  // W (lambda \ ds)
            Eigen::VectorXd bz = -oms * rz - wld;
            Eigen::VectorXd rhs2(N);
            rhs2 << -oms * rx, -oms * ry, bz;
            const Eigen::VectorXd u2 = kkt.solve(rhs2);
            const Eigen::VectorXd u2x = u2.head(n), u2y = u2.segment(n, np),
                                  u2z = u2.tail(m);
            dtau = (-oms * rtau - dk_rhs / tau - cbh_dot(u2x, u2y, u2z)) / denom;
            dx = u2x + dtau * u1x;
            dy = u2y + dtau * u1y;
            dz = u2z + dtau * u1z;
            // ds = W(lambda \ ds_rhs) - W^2 dz
            Eigen::VectorXd w2dz = dz;
            apply_W(blk, W, w2dz);
            apply_W(blk, W, w2dz);
            ds = wld - w2dz;
            dkappa = (dk_rhs - kappa * dtau) / tau;
        };

        // affine direction
        Eigen::VectorXd dxa, dya, dza, dsa;
        double dtaua, dkappaa;
        Eigen::VectorXd ds_aff = -jprod(blk, W.lambda, W.lambda);
        direction(0.0, ds_aff, -tau * kappa, dxa, dya, dza, dsa, dtaua, dkappaa);

        double alpha_aff = std::min(1.0, max_cone_step(blk, s, dsa));
        alpha_aff = std::min(alpha_aff, max_cone_step(blk, z, dza));
        if (dtaua < 0) alpha_aff = std::min(alpha_aff, -tau / dtaua);
        if (dkappaa < 0) alpha_aff = std::min(alpha_aff, -kappa / dkappaa);

        const double mu_aff = ((s + alpha_aff * dsa).dot(z + alpha_aff * dza) +
                               (tau + alpha_aff * dtaua) * (kappa + alpha_aff * dkappaa)) /
                              (deg + 1);
        double sigma = std::pow(std::max(0.0, std::min(1.0, mu_aff / mu)), 3.0);

        // combined direction with Mehrotra correction
        Eigen::VectorXd winv_dsa = dsa;
        apply_Winv(blk, W, winv_dsa);
        Eigen::VectorXd w_dza = dza;
        apply_W(blk, W, w_dza);
        Eigen::VectorXd ds_comb = ds_aff - jprod(blk, winv_dsa, w_dza) +
                                  sigma * mu * cone_identity(blk, m);
        const double dk_comb = -tau * kappa - dtaua * dkappaa + sigma * mu;

        Eigen::VectorXd dx, dy, dz, ds;
        double dtau, dkappa;
        direction(sigma, ds_comb, dk_comb, dx, dy, dz, ds, dtau, dkappa);

        double alpha = std::min(1.0, st.step_frac * max_cone_step(blk, s, ds));
        alpha = std::min(alpha, st.step_frac * max_cone_step(blk, z, dz));
        if (dtau < 0) alpha = std::min(alpha, -st.step_frac * tau / dtau);
        if (dkappa < 0) alpha = std::min(alpha, -st.step_frac * kappa / dkappa);

        if (!std::isfinite(alpha) || alpha <= 1e-14) {
            sol.status = ConicStatus::numerical_error;
            sol.message = "step length collapsed";
            break;
        }
        x += alpha * dx;
        y += alpha * dy;
        z += alpha * dz;
        s += alpha * ds;
        tau += alpha * dtau;
        kappa += alpha * dkappa;
        best_metric = std::min(best_metric, pres + dres + relgap);
    }

    if (sol.status == ConicStatus::numerical_error && sol.message.empty())
        sol.message = "no progress";
    if (sol.status != ConicStatus::numerical_error || sol.message == "no progress")
        sol.status = sol.iterations >= st.max_iters - 1 ? ConicStatus::max_iterations
                                                        : sol.status;
    // report the de-homogenized iterate anyway
    if (tau > 1e-12) {
        sol.x = x / tau;
        sol.y = y / tau;
        sol.z = z / tau;
        sol.s = s / tau;
        sol.pobj = prob.c.dot(x) / tau;
        sol.dobj = -(prob.b.dot(y) + prob.h.dot(z)) / tau;
    }
    return sol;
}

}  // namespace ucac
