#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace covsim::oracle {

double FineMoment::cost_about(Point ref) const {
    return second_trace - 2.0 * (ref.x * moment_x + ref.y * moment_y) +
           (ref.x * ref.x + ref.y * ref.y) * mass;
}

FineMoment fine_grid_moment(const ConvexPolygon& poly, const DensityField& field,
                            int resolution) {
    FineMoment out;
    if (poly.empty()) return out;
    Point lo, hi;
    poly.bounding_box(lo, hi);
    const double hx = (hi.x - lo.x) / resolution;
    const double hy = (hi.y - lo.y) / resolution;
    const std::size_t n = poly.size();

    double sm = 0.0, smx = 0.0, smy = 0.0, sm2 = 0.0;
    for (int iy = 0; iy < resolution; ++iy) {
        const double qy = lo.y + (iy + 0.5) * hy;
        // Exact in-polygon x-interval on this scanline.
        double xl = 0.0, xr = 0.0;
        int crossings = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const Point& v = poly[k];
            const Point& w = poly[(k + 1) % n];
            if ((v.y <= qy) == (w.y <= qy)) continue;
            const double t = (qy - v.y) / (w.y - v.y);
            const double x = v.x + t * (w.x - v.x);
            if (crossings == 0) {
                xl = xr = x;
            } else {
                xl = std::min(xl, x);
                xr = std::max(xr, x);
            }
            ++crossings;
        }
        if (crossings < 2) continue;
        int ix_lo = static_cast<int>(std::ceil((xl - lo.x) / hx - 0.5));
        int ix_hi = static_cast<int>(std::floor((xr - lo.x) / hx - 0.5));
        ix_lo = std::max(ix_lo, 0);
        ix_hi = std::min(ix_hi, resolution - 1);
        for (int ix = ix_lo; ix <= ix_hi; ++ix) {
            const double qx = lo.x + (ix + 0.5) * hx;
            const double phi = evaluate_density(field, {qx, qy});
            sm += phi;
            smx += phi * qx;
            smy += phi * qy;
            sm2 += phi * (qx * qx + qy * qy);
        }
    }
    const double w = hx * hy;
    out.mass = sm * w;
    out.moment_x = smx * w;
    out.moment_y = smy * w;
    out.second_trace = sm2 * w;
    if (out.mass > 0.0) out.centroid = {out.moment_x / out.mass, out.moment_y / out.mass};
    return out;
}

double stacked_objective(std::span<const ControlInput> inputs,
                         std::span<const ControlInput> nominal) {
    double s = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const double dx = inputs[i].ux - nominal[i].ux;
        const double dy = inputs[i].uy - nominal[i].uy;
        s += dx * dx + dy * dy;
    }
    return s;
}

namespace {

struct Rows {
    int nvars = 0;
    std::vector<std::vector<double>> a;
    std::vector<double> b;
};

Rows oracle_rows(std::span<const ControlInput> nominal,
                 std::span<const SafetyConstraint> constraints, double u_max) {
    Rows rows;
    rows.nvars = 2 * static_cast<int>(nominal.size());
    for (const SafetyConstraint& c : constraints) {
        std::vector<double> a(rows.nvars, 0.0);
        a[2 * c.i] = c.grad_i.x;
        a[2 * c.i + 1] = c.grad_i.y;
        a[2 * c.j] = c.grad_j.x;
        a[2 * c.j + 1] = c.grad_j.y;
        rows.a.push_back(std::move(a));
        rows.b.push_back(-c.offset);
    }
    if (u_max > 0.0) {
        for (int d = 0; d < rows.nvars; ++d) {
            std::vector<double> lo(rows.nvars, 0.0), up(rows.nvars, 0.0);
            lo[d] = 1.0;
            up[d] = -1.0;
            rows.a.push_back(std::move(lo));
            rows.b.push_back(-u_max);
            rows.a.push_back(std::move(up));
            rows.b.push_back(-u_max);
        }
    }
    return rows;
}

// Gaussian elimination with partial pivoting; false when near-singular.
bool solve_dense(std::vector<std::vector<double>> k, std::vector<double>& rhs) {
    const int s = static_cast<int>(rhs.size());
    for (int col = 0; col < s; ++col) {
        int piv = col;
        for (int r = col + 1; r < s; ++r) {
            if (std::abs(k[r][col]) > std::abs(k[piv][col])) piv = r;
        }
        if (std::abs(k[piv][col]) < 1e-10) return false;
        std::swap(k[piv], k[col]);
        std::swap(rhs[piv], rhs[col]);
        for (int r = col + 1; r < s; ++r) {
            const double f = k[r][col] / k[col][col];
            for (int c = col; c < s; ++c) k[r][c] -= f * k[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (int col = s - 1; col >= 0; --col) {
        for (int r = col + 1; r < s; ++r) rhs[col] -= k[col][r] * rhs[r];
        rhs[col] /= k[col][col];
    }
    return true;
}

}  // namespace

QpOracleResult enumerate_qp(std::span<const ControlInput> nominal,
                            std::span<const SafetyConstraint> constraints, double u_max) {
    const Rows rows = oracle_rows(nominal, constraints, u_max);
    const int m = static_cast<int>(rows.b.size());
    const int n = rows.nvars;
    if (m > 20) throw std::invalid_argument("enumeration oracle limited to 20 rows");

    std::vector<double> g(n);
    for (std::size_t i = 0; i < nominal.size(); ++i) {
        g[2 * i] = nominal[i].ux;
        g[2 * i + 1] = nominal[i].uy;
    }

    QpOracleResult best;
    const std::uint32_t masks = 1u << m;
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
        std::vector<int> sel;
        for (int k = 0; k < m; ++k) {
            if (mask & (1u << k)) sel.push_back(k);
        }
        const int s = static_cast<int>(sel.size());
        if (s > n) continue;

        std::vector<double> x = g;
        if (s > 0) {
            std::vector<std::vector<double>> gram(s, std::vector<double>(s, 0.0));
            std::vector<double> rhs(s, 0.0);
            for (int r = 0; r < s; ++r) {
                for (int c = 0; c < s; ++c) {
                    double dot = 0.0;
                    for (int i = 0; i < n; ++i) dot += rows.a[sel[r]][i] * rows.a[sel[c]][i];
                    gram[r][c] = dot;
                }
                double ag = 0.0;
                for (int i = 0; i < n; ++i) ag += rows.a[sel[r]][i] * g[i];
                rhs[r] = rows.b[sel[r]] - ag;
            }
            if (!solve_dense(std::move(gram), rhs)) continue;
            for (int r = 0; r < s; ++r) {
                for (int i = 0; i < n; ++i) x[i] += rhs[r] * rows.a[sel[r]][i];
            }
        }

        bool feasible = true;
        for (int k = 0; k < m && feasible; ++k) {
            double ax = 0.0;
            for (int i = 0; i < n; ++i) ax += rows.a[k][i] * x[i];
            if (ax - rows.b[k] < -1e-9) feasible = false;
        }
        if (!feasible) continue;

        double obj = 0.0;
        for (int i = 0; i < n; ++i) obj += (x[i] - g[i]) * (x[i] - g[i]);
        if (!best.solved || obj < best.objective) {
            best.solved = true;
            best.objective = obj;
            best.x = std::move(x);
        }
    }
    return best;
}

Point random_point(std::mt19937_64& rng, Point lo, Point hi) {
    std::uniform_real_distribution<double> ux(lo.x, hi.x);
    std::uniform_real_distribution<double> uy(lo.y, hi.y);
    const double x = ux(rng);
    const double y = uy(rng);
    return {x, y};
}

std::vector<Point> random_sites(std::mt19937_64& rng, const Workspace& ws, int count,
                                double min_separation) {
    std::vector<Point> sites;
    int attempts = 0;
    while (static_cast<int>(sites.size()) < count) {
        if (++attempts > 100000) throw std::runtime_error("site sampling did not converge");
        const Point p = random_point(rng, ws.min_corner, ws.max_corner);
        bool ok = true;
        for (const Point& q : sites) {
            if (distance(p, q) < min_separation) {
                ok = false;
                break;
            }
        }
        if (ok) sites.push_back(p);
    }
    return sites;
}

DensityField random_field(std::mt19937_64& rng, const Workspace& ws, int max_components,
                          double sigma_lo, double sigma_hi) {
    DensityField field;
    std::uniform_real_distribution<double> base(0.005, 0.05);
    field.baseline = base(rng);
    std::uniform_int_distribution<int> comps(0, max_components);
    const int k = comps(rng);
    std::uniform_real_distribution<double> weight(2.0, 20.0);
    std::uniform_real_distribution<double> sigma(sigma_lo, sigma_hi);
    for (int c = 0; c < k; ++c) {
        GaussianComponent gc;
        gc.weight = weight(rng);
        gc.sigma_x = sigma(rng);
        gc.sigma_y = sigma(rng);
        gc.mean = random_point(rng, ws.min_corner, ws.max_corner);
        field.components.push_back(gc);
    }
    return field;
}

}  // namespace covsim::oracle
