#include "covsim/safety.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "covsim/errors.hpp"

namespace covsim {

double barrier_value(Point pi, Point pj, double d_min) {
    return squared_distance(pi, pj) - d_min * d_min;
}

std::vector<SafetyConstraint> assemble_constraints(std::span<const Point> positions,
                                                   const SafetyParams& params) {
    const int n = static_cast<int>(positions.size());
    std::vector<SafetyConstraint> rows;
    rows.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (squared_distance(positions[i], positions[j]) <= kGeomTol * kGeomTol) {
                throw CoincidentAgentsError(i, j);
            }
            const Point g = {2.0 * (positions[i].x - positions[j].x),
                             2.0 * (positions[i].y - positions[j].y)};
            const double h = barrier_value(positions[i], positions[j], params.d_min);
            rows.push_back({i, j, g, {-g.x, -g.y}, params.gamma * h});
        }
    }
    return rows;
}

namespace {

// Dense rows of the inequality system  a_k . u >= b_k.
struct RowSystem {
    int nvars = 0;
    std::vector<double> a;  // row-major, nrows x nvars
    std::vector<double> b;
    int nrows() const { return static_cast<int>(b.size()); }
    const double* row(int k) const { return a.data() + static_cast<std::size_t>(k) * nvars; }
};

double dot_n(const double* x, const double* y, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

RowSystem build_rows(std::span<const ControlInput> nominal,
                     std::span<const SafetyConstraint> constraints, double u_max) {
    const int agents = static_cast<int>(nominal.size());
    RowSystem sys;
    sys.nvars = 2 * agents;
    const int m_cbf = static_cast<int>(constraints.size());
    const int m_box = u_max > 0.0 ? 2 * sys.nvars : 0;
    sys.a.assign(static_cast<std::size_t>(m_cbf + m_box) * sys.nvars, 0.0);
    sys.b.assign(m_cbf + m_box, 0.0);
    for (int k = 0; k < m_cbf; ++k) {
        const SafetyConstraint& c = constraints[k];
        double* row = sys.a.data() + static_cast<std::size_t>(k) * sys.nvars;
        row[2 * c.i] = c.grad_i.x;
        row[2 * c.i + 1] = c.grad_i.y;
        row[2 * c.j] = c.grad_j.x;
        row[2 * c.j + 1] = c.grad_j.y;
        sys.b[k] = -c.offset;
    }
    if (u_max > 0.0) {
        for (int d = 0; d < sys.nvars; ++d) {
            double* lo = sys.a.data() + static_cast<std::size_t>(m_cbf + 2 * d) * sys.nvars;
            lo[d] = 1.0;  //  u_d >= -u_max
            sys.b[m_cbf + 2 * d] = -u_max;
            double* up = sys.a.data() + static_cast<std::size_t>(m_cbf + 2 * d + 1) * sys.nvars;
            up[d] = -1.0;  // -u_d >= -u_max
            sys.b[m_cbf + 2 * d + 1] = -u_max;
        }
    }
    return sys;
}

// Equality-constrained projection onto {u : a_k.u = b_k, k in W} of the
// nominal point, via modified Gram-Schmidt on the constraint gradients.
// Assumes (and reports) linear independence of the working set.
struct Projection {
    std::vector<double> x;       // projected point
    std::vector<double> lambda;  // multipliers, one per working-set entry
    bool independent = true;
    int dependent_pos = -1;
};

Projection project_onto_working_set(const RowSystem& sys, const std::vector<double>& g,
                                    const std::vector<int>& w) {
    const int n = sys.nvars;
    const int m = static_cast<int>(w.size());
    Projection out;
    out.x = g;
    out.lambda.assign(m, 0.0);
    if (m == 0) return out;

    std::vector<double> q(static_cast<std::size_t>(m) * n);  // orthonormal columns
    std::vector<double> r(static_cast<std::size_t>(m) * m, 0.0);
    for (int c = 0; c < m; ++c) {
        double* qc = q.data() + static_cast<std::size_t>(c) * n;
        const double* col = sys.row(w[c]);
        double col_norm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            qc[i] = col[i];
            col_norm2 += col[i] * col[i];
        }
        for (int p = 0; p < c; ++p) {
            const double* qp = q.data() + static_cast<std::size_t>(p) * n;
            const double rp = dot_n(qp, qc, n);
            r[static_cast<std::size_t>(p) * m + c] = rp;
            for (int i = 0; i < n; ++i) qc[i] -= rp * qp[i];
        }
        const double nrm = std::sqrt(dot_n(qc, qc, n));
        if (nrm <= 1e-10 * std::max(1.0, std::sqrt(col_norm2))) {
            out.independent = false;
            out.dependent_pos = c;
            return out;
        }
        r[static_cast<std::size_t>(c) * m + c] = nrm;
        for (int i = 0; i < n; ++i) qc[i] /= nrm;
    }

    // rhs_c = b_c - a_c.g ; solve R^T y = rhs forward, then R lambda = y backward.
    std::vector<double> y(m);
    for (int c = 0; c < m; ++c) {
        double rhs = sys.b[w[c]] - dot_n(sys.row(w[c]), g.data(), n);
        for (int p = 0; p < c; ++p) rhs -= r[static_cast<std::size_t>(p) * m + c] * y[p];
        y[c] = rhs / r[static_cast<std::size_t>(c) * m + c];
    }
    for (int c = m - 1; c >= 0; --c) {
        double v = y[c];
        for (int p = c + 1; p < m; ++p) v -= r[static_cast<std::size_t>(c) * m + p] * out.lambda[p];
        out.lambda[c] = v / r[static_cast<std::size_t>(c) * m + c];
    }
    for (int c = 0; c < m; ++c) {
        const double* qc = q.data() + static_cast<std::size_t>(c) * n;
        for (int i = 0; i < n; ++i) out.x[i] += y[c] * qc[i];
    }
    return out;
}

bool feasible_everywhere(const RowSystem& sys, const std::vector<double>& x, double tol) {
    for (int k = 0; k < sys.nrows(); ++k) {
        if (dot_n(sys.row(k), x.data(), sys.nvars) - sys.b[k] < -tol) return false;
    }
    return true;
}

}  // namespace

QpSolution solve_safety_qp(std::span<const ControlInput> nominal,
                           std::span<const SafetyConstraint> constraints,
                           const QpOptions& options) {
    const int agents = static_cast<int>(nominal.size());
    const int n = 2 * agents;
    const RowSystem sys = build_rows(nominal, constraints, options.u_max);
    const int m_all = sys.nrows();

    std::vector<double> g(n);
    for (int i = 0; i < agents; ++i) {
        g[2 * i] = nominal[i].ux;
        g[2 * i + 1] = nominal[i].uy;
    }

    QpSolution sol;
    sol.inputs.resize(agents);

    auto finalize = [&](const std::vector<double>& x, const std::vector<int>& w,
                        const std::vector<double>& lambda) {
        for (int i = 0; i < agents; ++i) sol.inputs[i] = {x[2 * i], x[2 * i + 1]};
        sol.active_set = w;
        std::sort(sol.active_set.begin(), sol.active_set.end());
        // KKT residual: stationarity, primal/dual feasibility, complementarity.
        std::vector<double> stat = x;
        for (int i = 0; i < n; ++i) stat[i] -= g[i];
        for (std::size_t c = 0; c < w.size(); ++c) {
            const double* row = sys.row(w[c]);
            for (int i = 0; i < n; ++i) stat[i] -= lambda[c] * row[i];
        }
        double resid = 0.0;
        for (int i = 0; i < n; ++i) resid = std::max(resid, std::abs(stat[i]));
        for (int k = 0; k < m_all; ++k) {
            const double slack = dot_n(sys.row(k), x.data(), n) - sys.b[k];
            resid = std::max(resid, -slack);
        }
        for (std::size_t c = 0; c < w.size(); ++c) {
            resid = std::max(resid, -lambda[c]);
            const double slack = dot_n(sys.row(w[c]), x.data(), n) - sys.b[w[c]];
            resid = std::max(resid, std::abs(lambda[c] * slack));
        }
        sol.kkt_residual = resid;
    };

    // Unconstrained optimum feasible: nothing to do.
    if (feasible_everywhere(sys, g, 0.0)) {
        finalize(g, {}, {});
        return sol;
    }

    // Starting point and working set.
    std::vector<double> x;
    std::vector<int> w;
    bool started = false;

    if (!options.warm_start.empty()) {
        std::vector<int> cand;
        for (int k : options.warm_start) {
            if (k >= 0 && k < m_all && std::find(cand.begin(), cand.end(), k) == cand.end()) {
                cand.push_back(k);
            }
        }
        while (!cand.empty()) {
            Projection proj = project_onto_working_set(sys, g, cand);
            if (!proj.independent) {
                cand.erase(cand.begin() + proj.dependent_pos);
                continue;
            }
            if (feasible_everywhere(sys, proj.x, 1e-12)) {
                x = std::move(proj.x);
                w = std::move(cand);
                started = true;
            }
            break;
        }
    }

    if (!started) {
        x.assign(n, 0.0);
        bool zero_ok = true;
        for (int k = 0; k < m_all; ++k) {
            if (sys.b[k] > 0.0) {
                zero_ok = false;
                break;
            }
        }
        if (!zero_ok) {
            // Some h_ij < 0: expand radially from the swarm mean, which gives
            // every barrier row a strictly positive direction derivative.
            std::vector<int> violated;
            for (int k = 0; k < m_all; ++k) {
                if (sys.b[k] > 0.0) violated.push_back(k);
            }
            if (options.retreat_hint.size() != static_cast<std::size_t>(agents)) {
                throw InfeasibleError(violated);
            }
            Point mean{0.0, 0.0};
            for (const Point& p : options.retreat_hint) mean = mean + p;
            mean = (1.0 / agents) * mean;
            std::vector<double> dir(n);
            double dir_max = 0.0;
            for (int i = 0; i < agents; ++i) {
                dir[2 * i] = options.retreat_hint[i].x - mean.x;
                dir[2 * i + 1] = options.retreat_hint[i].y - mean.y;
                dir_max = std::max({dir_max, std::abs(dir[2 * i]), std::abs(dir[2 * i + 1])});
            }
            double alpha = 0.0;
            for (int k : violated) {
                const double s = dot_n(sys.row(k), dir.data(), n);
                if (s <= 1e-14) throw InfeasibleError(violated);
                alpha = std::max(alpha, sys.b[k] / s);
            }
            if (options.u_max > 0.0 && alpha * dir_max > options.u_max) {
                throw InfeasibleError(violated);
            }
            for (int i = 0; i < n; ++i) x[i] = alpha * dir[i];
        }
    }

    // Primal active-set iteration.
    std::vector<double> lambda;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        Projection proj = project_onto_working_set(sys, g, w);
        if (!proj.independent) {
            // Only reachable through numerically degenerate additions.
            w.erase(w.begin() + proj.dependent_pos);
            continue;
        }

        double step_inf = 0.0;
        for (int i = 0; i < n; ++i) step_inf = std::max(step_inf, std::abs(proj.x[i] - x[i]));
        const double scale = std::max(1.0, std::sqrt(dot_n(proj.x.data(), proj.x.data(), n)));

        if (step_inf <= 1e-12 * scale) {
            int worst = -1;
            double worst_val = -1e-9;
            for (std::size_t c = 0; c < proj.lambda.size(); ++c) {
                if (proj.lambda[c] < worst_val) {
                    worst_val = proj.lambda[c];
                    worst = static_cast<int>(c);
                }
            }
            if (worst < 0) {
                finalize(proj.x, w, proj.lambda);
                return sol;
            }
            w.erase(w.begin() + worst);
            continue;
        }

        std::vector<double> d(n);
        for (int i = 0; i < n; ++i) d[i] = proj.x[i] - x[i];
        double alpha = 1.0;
        int blocking = -1;
        for (int k = 0; k < m_all; ++k) {
            if (std::find(w.begin(), w.end(), k) != w.end()) continue;
            const double s = dot_n(sys.row(k), d.data(), n);
            if (s >= -1e-14) continue;
            const double slack = dot_n(sys.row(k), x.data(), n) - sys.b[k];
            const double t = std::max(0.0, -slack / s);
            if (t < alpha) {
                alpha = t;
                blocking = k;
            }
        }
        if (blocking < 0) {
            x = std::move(proj.x);
        } else {
            for (int i = 0; i < n; ++i) x[i] += alpha * d[i];
            w.push_back(blocking);
        }
    }
    throw MaxIterationsError(options.max_iterations);
}

}  // namespace covsim
