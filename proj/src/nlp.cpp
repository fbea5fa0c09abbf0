#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "ucac/backends.hpp"

namespace ucac {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using clock_t_ = std::chrono::steady_clock;

struct NlpRow {
    std::vector<QuadTerm> quad;  // on original x variables
    std::vector<LinTerm> lin;
    double rhs = 0.0;   // c(X) = value - rhs (- slack) = 0
    int slack = -1;     // index into X, or -1 for equality rows
};

/// Slack-form smooth problem: min f(X) s.t. c(X)=0, XL <= X <= XU.
struct NlpProblem {
    int nx = 0, n = 0;
    std::vector<NlpRow> rows;
    Vec XL, XU;
    Objective obj;

    double f(const Vec& X) const {
        double v = obj.constant;
        for (const auto& t : obj.lin) v += t.coef * X[t.var];
        for (const auto& t : obj.quad) v += t.coef * X[t.v1] * X[t.v2];
        return v;
    }
    Vec grad_f(const Vec& X) const {
        Vec g = Vec::Zero(n);
        for (const auto& t : obj.lin) g[t.var] += t.coef;
        for (const auto& t : obj.quad) {
            if (t.v1 == t.v2) {
                g[t.v1] += 2 * t.coef * X[t.v1];
            } else {
                g[t.v1] += t.coef * X[t.v2];
                g[t.v2] += t.coef * X[t.v1];
            }
        }
        return g;
    }
    double row_value(const NlpRow& r, const Vec& X) const {
        double v = -r.rhs;
        for (const auto& t : r.lin) v += t.coef * X[t.var];
        for (const auto& t : r.quad) v += t.coef * X[t.v1] * X[t.v2];
        if (r.slack >= 0) v -= X[r.slack];
        return v;
    }
    Vec constraints(const Vec& X) const {
        Vec c(rows.size());
        for (size_t i = 0; i < rows.size(); ++i) c[i] = row_value(rows[i], X);
        return c;
    }
};

NlpProblem build_nlp(const ModelInstance& m) {
    NlpProblem p;
    p.nx = m.num_vars();
    std::vector<double> xl, xu;
    for (const auto& v : m.vars) {
        xl.push_back(v.lo);
        xu.push_back(v.hi);
    }
    auto add_row = [&](const std::vector<QuadTerm>& q, const std::vector<LinTerm>& l,
                       double lo, double hi) {
        NlpRow r;
        r.quad = q;
        r.lin = l;
        if (lo == hi) {
            r.rhs = lo;
        } else {
            r.rhs = 0.0;
            r.slack = static_cast<int>(xl.size());
            xl.push_back(lo);
            xu.push_back(hi);
        }
        p.rows.push_back(std::move(r));
    };
    for (const auto& r : m.linear) add_row({}, r.lin, r.lo, r.hi);
    for (const auto& r : m.quads) add_row(r.quad, r.lin, r.lo, r.hi);
    for (const auto& cn : m.cones) {
        // smooth form of the rotated cone: sum x_m^2 - xu*xv <= 0
        std::vector<QuadTerm> q;
        for (int mem : cn.members) q.push_back({mem, mem, 1.0});
        q.push_back({cn.u, cn.v, -1.0});
        add_row(q, {}, -kInf, 0.0);
    }
    p.n = static_cast<int>(xl.size());
    p.XL = Eigen::Map<Vec>(xl.data(), p.n);
    p.XU = Eigen::Map<Vec>(xu.data(), p.n);
    p.obj = m.obj;
    return p;
}

struct FilterEntry {
    double theta, phi;
};

class InteriorPoint {
public:
    InteriorPoint(const NlpProblem& p, double tol) : p_(p), tol_(tol) {}

    SolveStatus run(Vec& X, double time_limit_s, int max_iter, double& kkt_out,
                    int& iters_out) {
        const auto t0 = clock_t_::now();
        const int n = p_.n, m = static_cast<int>(p_.rows.size());
        push_interior(X);
        y_ = Vec::Zero(m);
        double mu = 0.01;
        zl_ = Vec::Zero(n);
        zu_ = Vec::Zero(n);
        for (int i = 0; i < n; ++i) {
            if (p_.XL[i] > -kInf) zl_[i] = mu / (X[i] - p_.XL[i]);
            if (p_.XU[i] < kInf) zu_[i] = mu / (p_.XU[i] - X[i]);
        }
        filter_.clear();
        double theta0 = theta(X);
        theta_max_ = 1e4 * std::max(1.0, theta0);
        theta_min_ = 1e-4 * std::max(1.0, theta0);
        int restorations = 0;

        for (int it = 0; it < max_iter; ++it) {
            iters_out = it;
            if (std::chrono::duration<double>(clock_t_::now() - t0).count() > time_limit_s)
                return SolveStatus::time_limit;

            const double e0 = kkt_error(X, 0.0);
            kkt_out = e0;
            if (e0 <= tol_) return SolveStatus::optimal;
            if (kkt_error(X, mu) <= 10.0 * mu && mu > 1e-11) {
                mu = std::max(tol_ / 100.0, std::min(0.2 * mu, std::pow(mu, 1.5)));
                filter_.clear();
                continue;
            }

            Vec dX, dy;
            if (!newton_direction(X, mu, dX, dy)) return SolveStatus::error;

            // fraction-to-boundary
            const double tau = std::max(0.99, 1.0 - mu);
            double amax = 1.0;
            for (int i = 0; i < n; ++i) {
                if (p_.XL[i] > -kInf && dX[i] < 0)
                    amax = std::min(amax, -tau * (X[i] - p_.XL[i]) / dX[i]);
                if (p_.XU[i] < kInf && dX[i] > 0)
                    amax = std::min(amax, tau * (p_.XU[i] - X[i]) / dX[i]);
            }

            // filter backtracking on (theta, phi)
            const double th = theta(X);
            const double ph = phi(X, mu);
            Vec gphi = grad_phi(X, mu);
            const double ddir = gphi.dot(dX);
            double alpha = amax;
            bool accepted = false;
            for (int ls = 0; ls < 40 && alpha > 1e-14; ++ls, alpha *= 0.5) {
                Vec Xc = X + alpha * dX;
                const double thc = theta(Xc);
                const double phc = phi(Xc, mu);
                if (!std::isfinite(thc) || !std::isfinite(phc)) continue;
                if (thc > theta_max_) continue;
                if (!filter_ok(thc, phc)) continue;
                const bool f_type = ddir < 0 &&
                                    alpha * std::pow(-ddir, 2.3) >
                                        std::pow(th, 1.1) * 1.0;
                if (f_type && th <= theta_min_) {
                    if (phc <= ph + 1e-4 * alpha * ddir) {
                        accepted = true;  // Armijo on the barrier objective
                    }
                } else if (thc <= (1 - 1e-5) * th || phc <= ph - 1e-5 * th) {
                    filter_.push_back({(1 - 1e-5) * th, ph - 1e-5 * th});
                    accepted = true;
                }
                if (accepted) {
                    dual_step(X, Xc, dX, alpha, mu, tau);
                    X = Xc;
                    break;
                }
            }
            if (!accepted) {
                if (th <= tol_ && ddir >= -tol_) return SolveStatus::optimal;
                if (++restorations > 3) {
                    // cannot restore feasibility: report local infeasibility
                    return theta(X) > std::sqrt(tol_) ? SolveStatus::infeasible
                                                      : SolveStatus::error;
                }
                if (!restore(X, mu)) return SolveStatus::infeasible;
                filter_.clear();
            }
        }
        kkt_out = kkt_error(X, 0.0);
        return SolveStatus::error;
    }

    const Vec& multipliers() const { return y_; }

private:
    const NlpProblem& p_;
    double tol_;
    Vec y_, zl_, zu_;
    std::vector<FilterEntry> filter_;
    double theta_max_ = 1e8, theta_min_ = 1e-4;
    Eigen::SimplicialLDLT<SpMat> ldlt_;
    bool analyzed_ = false;

    void push_interior(Vec& X) const {
        for (int i = 0; i < p_.n; ++i) {
            const double l = p_.XL[i], u = p_.XU[i];
            if (l > -kInf && u < kInf) {
                const double pad = std::min(1e-2 * std::max(1.0, std::abs(l)), 0.25 * (u - l));
                X[i] = std::min(std::max(X[i], l + pad), u - pad);
            } else if (l > -kInf) {
                X[i] = std::max(X[i], l + 1e-2 * std::max(1.0, std::abs(l)));
            } else if (u < kInf) {
                X[i] = std::min(X[i], u - 1e-2 * std::max(1.0, std::abs(u)));
            }
        }
    }

    double theta(const Vec& X) const { return p_.constraints(X).lpNorm<1>(); }

    double phi(const Vec& X, double mu) const {
        double v = p_.f(X);
        for (int i = 0; i < p_.n; ++i) {
            if (p_.XL[i] > -kInf) {
                const double d = X[i] - p_.XL[i];
                if (d <= 0) return kInf;
                v -= mu * std::log(d);
            }
            if (p_.XU[i] < kInf) {
                const double d = p_.XU[i] - X[i];
                if (d <= 0) return kInf;
                v -= mu * std::log(d);
            }
        }
        return v;
    }

    Vec grad_phi(const Vec& X, double mu) const {
        Vec g = p_.grad_f(X);
        for (int i = 0; i < p_.n; ++i) {
            if (p_.XL[i] > -kInf) g[i] -= mu / (X[i] - p_.XL[i]);
            if (p_.XU[i] < kInf) g[i] += mu / (p_.XU[i] - X[i]);
        }
        return g;
    }

    bool filter_ok(double th, double ph) const {
        for (const auto& e : filter_)
            if (th >= e.theta && ph >= e.phi) return false;
        return true;
    }

    SpMat jacobian(const Vec& X) const {
        std::vector<Eigen::Triplet<double>> t;
        for (size_t i = 0; i < p_.rows.size(); ++i) {
            const auto& r = p_.rows[i];
            for (const auto& lt : r.lin) t.emplace_back(i, lt.var, lt.coef);
            for (const auto& qt : r.quad) {
                if (qt.v1 == qt.v2) {
                    t.emplace_back(i, qt.v1, 2 * qt.coef * X[qt.v1]);
                } else {
                    t.emplace_back(i, qt.v1, qt.coef * X[qt.v2]);
                    t.emplace_back(i, qt.v2, qt.coef * X[qt.v1]);
                }
            }
            if (r.slack >= 0) t.emplace_back(i, r.slack, -1.0);
        }
        SpMat J(p_.rows.size(), p_.n);
        J.setFromTriplets(t.begin(), t.end());
        return J;
    }

    double kkt_error(const Vec& X, double mu) const {
        const SpMat J = jacobian(X);
        Vec stat = p_.grad_f(X) + J.transpose() * y_ - zl_ + zu_;
        const double sd =
            std::max(100.0, (y_.lpNorm<1>() + zl_.lpNorm<1>() + zu_.lpNorm<1>()) /
                                std::max<std::size_t>(1, p_.rows.size() + 2 * p_.n)) /
            100.0;
        double comp = 0.0;
        for (int i = 0; i < p_.n; ++i) {
            if (p_.XL[i] > -kInf)
                comp = std::max(comp, std::abs(zl_[i] * (X[i] - p_.XL[i]) - mu));
            if (p_.XU[i] < kInf)
                comp = std::max(comp, std::abs(zu_[i] * (p_.XU[i] - X[i]) - mu));
        }
        return std::max({stat.lpNorm<Eigen::Infinity>() / sd,
                         p_.constraints(X).lpNorm<Eigen::Infinity>(), comp / sd});
    }

    bool newton_direction(const Vec& X, double mu, Vec& dX, Vec& dy) {
        const int n = p_.n, m = static_cast<int>(p_.rows.size());
        const SpMat J = jacobian(X);
        Vec sigma = Vec::Zero(n);
        for (int i = 0; i < n; ++i) {
            if (p_.XL[i] > -kInf) sigma[i] += zl_[i] / (X[i] - p_.XL[i]);
            if (p_.XU[i] < kInf) sigma[i] += zu_[i] / (p_.XU[i] - X[i]);
        }
        Vec rhs(n + m);
        rhs.head(n) = -p_.grad_f(X) - J.transpose() * y_;
        for (int i = 0; i < n; ++i) {
            if (p_.XL[i] > -kInf) rhs[i] += mu / (X[i] - p_.XL[i]);
            if (p_.XU[i] < kInf) rhs[i] -= mu / (p_.XU[i] - X[i]);
        }
        rhs.tail(m) = -p_.constraints(X);

        double dw = 0.0;
        const double dc = 1e-11;
        for (int attempt = 0; attempt < 30; ++attempt) {
            std::vector<Eigen::Triplet<double>> t;
            // Lagrangian Hessian
            auto addH = [&](const std::vector<QuadTerm>& q, double w) {
                for (const auto& qt : q) {
                    if (qt.v1 == qt.v2)
                        t.emplace_back(qt.v1, qt.v1, 2 * w * qt.coef);
                    else {
                        t.emplace_back(qt.v1, qt.v2, w * qt.coef);
                        t.emplace_back(qt.v2, qt.v1, w * qt.coef);
                    }
                }
            };
            addH(p_.obj.quad, 1.0);
            for (int i = 0; i < m; ++i) addH(p_.rows[i].quad, y_[i]);
            for (int i = 0; i < n; ++i) t.emplace_back(i, i, sigma[i] + dw);
            for (int k = 0; k < J.outerSize(); ++k)
                for (SpMat::InnerIterator itr(J, k); itr; ++itr) {
                    t.emplace_back(n + itr.row(), itr.col(), itr.value());
                    t.emplace_back(itr.col(), n + itr.row(), itr.value());
                }
            for (int i = 0; i < m; ++i) t.emplace_back(n + i, n + i, -dc);
            SpMat K(n + m, n + m);
            K.setFromTriplets(t.begin(), t.end());
            if (!analyzed_) {
                ldlt_.analyzePattern(K);
                analyzed_ = true;
            }
            ldlt_.factorize(K);
            bool ok = ldlt_.info() == Eigen::Success;
            int neg = 0, zero = 0;
            if (ok) {
                const Vec D = ldlt_.vectorD();
                for (int i = 0; i < D.size(); ++i) {
                    if (!std::isfinite(D[i]) || std::abs(D[i]) < 1e-300)
                        ++zero;
                    else if (D[i] < 0)
                        ++neg;
                }
                ok = zero == 0 && neg == m;
            }
            if (ok) {
                Vec sol = ldlt_.solve(rhs);
                Vec resid = rhs - K * sol;
                sol += ldlt_.solve(resid);
                dX = sol.head(n);
                dy = sol.tail(m);
                y_ += dy;  // full dual step for equality multipliers
                return true;
            }
            dw = dw == 0.0 ? 1e-8 : dw * 100;
            if (dw > 1e24) break;
        }
        return false;
    }

    void dual_step(const Vec& X, const Vec& Xc, const Vec& dX, double alpha, double mu,
                   double tau) {
        const int n = p_.n;
        // z-direction from linearized complementarity, own step length
        double az = 1.0;
        Vec dzl = Vec::Zero(n), dzu = Vec::Zero(n);
        for (int i = 0; i < n; ++i) {
            if (p_.XL[i] > -kInf) {
                const double d = X[i] - p_.XL[i];
                dzl[i] = mu / d - zl_[i] - zl_[i] / d * dX[i];
                if (dzl[i] < 0) az = std::min(az, -tau * zl_[i] / dzl[i]);
            }
            if (p_.XU[i] < kInf) {
                const double d = p_.XU[i] - X[i];
                dzu[i] = mu / d - zu_[i] + zu_[i] / d * dX[i];
                if (dzu[i] < 0) az = std::min(az, -tau * zu_[i] / dzu[i]);
            }
        }
        zl_ += az * dzl;
        zu_ += az * dzu;
        // safeguard duals against drifting too far from mu/(x-l)
        const double ks = 1e10;
        for (int i = 0; i < n; ++i) {
            if (p_.XL[i] > -kInf) {
                const double d = Xc[i] - p_.XL[i];
                zl_[i] = std::min(std::max(zl_[i], mu / (ks * d)), ks * mu / d);
            }
            if (p_.XU[i] < kInf) {
                const double d = p_.XU[i] - Xc[i];
                zu_[i] = std::min(std::max(zu_[i], mu / (ks * d)), ks * mu / d);
            }
        }
        (void)alpha;
    }

    /// Feasibility-restoration lite: damped Gauss-Newton on 1/2||c||^2 with a
    /// log barrier keeping X interior. Returns true when theta dropped enough.
    bool restore(Vec& X, double mu) {
        const int n = p_.n;
        const double theta_enter = theta(X);
        for (int it = 0; it < 60; ++it) {
            const Vec c = p_.constraints(X);
            if (c.lpNorm<1>() < 0.1 * std::max(theta_enter, 1e-12)) return true;
            const SpMat J = jacobian(X);
            Vec g = J.transpose() * c;
            std::vector<Eigen::Triplet<double>> t;
            SpMat JtJ = SpMat(J.transpose()) * J;
            for (int k = 0; k < JtJ.outerSize(); ++k)
                for (SpMat::InnerIterator itr(JtJ, k); itr; ++itr)
                    t.emplace_back(itr.row(), itr.col(), itr.value());
            double lm = 1e-6 * std::max(1.0, JtJ.coeffs().maxCoeff());
            for (int i = 0; i < n; ++i) {
                double s = lm;
                if (p_.XL[i] > -kInf) s += mu / ((X[i] - p_.XL[i]) * (X[i] - p_.XL[i]));
                if (p_.XU[i] < kInf) s += mu / ((p_.XU[i] - X[i]) * (p_.XU[i] - X[i]));
                t.emplace_back(i, i, s);
            }
            SpMat H(n, n);
            H.setFromTriplets(t.begin(), t.end());
            Eigen::SimplicialLDLT<SpMat> fac(H);
            if (fac.info() != Eigen::Success) return false;
            Vec dX = fac.solve(-g);
            double amax = 1.0;
            for (int i = 0; i < n; ++i) {
                if (p_.XL[i] > -kInf && dX[i] < 0)
                    amax = std::min(amax, -0.99 * (X[i] - p_.XL[i]) / dX[i]);
                if (p_.XU[i] < kInf && dX[i] > 0)
                    amax = std::min(amax, 0.99 * (p_.XU[i] - X[i]) / dX[i]);
            }
            double alpha = amax;
            const double th0 = theta(X);
            bool moved = false;
            for (int ls = 0; ls < 30 && alpha > 1e-14; ++ls, alpha *= 0.5) {
                Vec Xc = X + alpha * dX;
                if (theta(Xc) < th0 * (1 - 1e-8 * alpha)) {
                    X = Xc;
                    moved = true;
                    break;
                }
            }
            if (!moved) return theta(X) < 0.5 * theta_enter;
        }
        return theta(X) < 0.5 * theta_enter;
    }
};

SolveResult builtin_solve_nlp(const SolveRequest& req) {
    const auto t0 = clock_t_::now();
    SolveResult out;
    const ModelInstance& mi = *req.model;
    for (const auto& v : mi.vars) {
        if (v.lo > v.hi + 1e-12) {
            out.status = SolveStatus::infeasible;
            out.message = "empty bound interval on " + v.name;
            return out;
        }
    }
    ReducedModel red = eliminate_fixed(mi);

    if (red.model.num_vars() == 0) {
        std::vector<double> x = red.inflate({});
        out.x = x;
        out.objective = mi.eval_objective(x);
        const double viol = mi.max_violation(x);
        out.status = viol <= req.feas_tol ? SolveStatus::optimal : SolveStatus::infeasible;
        out.kkt_residual = viol;
        out.wall_s = std::chrono::duration<double>(clock_t_::now() - t0).count();
        return out;
    }

    NlpProblem p = build_nlp(red.model);
    Vec X = Vec::Zero(p.n);
    if (req.warm_start && static_cast<int>(req.warm_start->size()) == mi.num_vars()) {
        for (int r = 0; r < red.model.num_vars(); ++r)
            X[r] = (*req.warm_start)[red.to_full[r]];
    } else {
        for (int r = 0; r < red.model.num_vars(); ++r) {
            const double l = p.XL[r], u = p.XU[r];
            if (l > -kInf && u < kInf)
                X[r] = 0.5 * (l + u);
            else if (l > -kInf)
                X[r] = l + 1.0;
            else if (u < kInf)
                X[r] = u - 1.0;
            else
                X[r] = 0.0;
        }
    }
    // initialize slacks at their row values
    for (const auto& r : p.rows)
        if (r.slack >= 0) {
            double v = 0.0;
            for (const auto& t : r.lin) v += t.coef * X[t.var];
            for (const auto& t : r.quad) v += t.coef * X[t.v1] * X[t.v2];
            X[r.slack] = v;
        }

    InteriorPoint ip(p, 1e-8);
    double kkt = kInf;
    int iters = 0;
    const SolveStatus st = ip.run(X, req.time_limit_s, 300, kkt, iters);
    out.status = st;
    out.kkt_residual = kkt;
    out.iterations = iters;
    if (st == SolveStatus::optimal || st == SolveStatus::time_limit ||
        st == SolveStatus::error) {
        std::vector<double> xr(red.model.num_vars());
        for (int r = 0; r < red.model.num_vars(); ++r) xr[r] = X[r];
        out.x = red.inflate(xr);
        out.objective = mi.eval_objective(out.x);
        if (st != SolveStatus::optimal && mi.max_violation(out.x) > req.feas_tol)
            out.x.clear();  // unusable point
    }
    if (st == SolveStatus::error && out.message.empty())
        out.message = "no convergence (iteration cap or stalled line search)";
    if (st == SolveStatus::infeasible) out.message = "locally infeasible";
    out.wall_s = std::chrono::duration<double>(clock_t_::now() - t0).count();
    return out;
}

}  // namespace

SolveResult solve_nlp_local(const SolveRequest& req) {
    const std::string cmd = backend_command(BackendClass::nlp);
    if (!cmd.empty()) return solve_via_adapter(cmd, req);
    return builtin_solve_nlp(req);
}

}  // namespace ucac
