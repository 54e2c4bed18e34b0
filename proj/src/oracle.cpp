#include "qpat/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qpat/error.hpp"

namespace qpat
{
namespace
{
constexpr double pi = std::numbers::pi;

struct Moments
{
    double sum{0};
    double sum_sq{0};
    std::size_t n{0};
};

Moments sample_term(Spheroid const& spheroid, McTerm const& term, std::size_t n, std::mt19937_64& rng)
{
    Vec3 const& y = spheroid.focus_b;
    Vec3 w = term.region.center - y;
    double dist = norm(w);
    double rad = term.region.radius;
    bool inside = dist <= rad;
    Frame frame = dist > 0 ? frame_about(w) : Frame{{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
    double mu_lo = inside ? -1.0 : std::sqrt(1 - rad * rad / (dist * dist));
    double solid = 2 * pi * (1 - mu_lo);
    double r_lo = inside ? 0.0 : dist - rad;
    double r_hi = dist + rad;
    double scale = solid * (r_hi - r_lo);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Moments m;
    m.n = n;
    for (std::size_t i = 0; i < n; ++i)
    {
        double mu = mu_lo + (1 - mu_lo) * unit(rng);
        double phi = 2 * pi * unit(rng);
        double r = r_lo + (r_hi - r_lo) * unit(rng);
        double s = std::sqrt(std::max(0.0, 1 - mu * mu));
        Vec3 dir = mu * frame.e1 + s * (std::cos(phi) * frame.e2 + std::sin(phi) * frame.e3);
        Vec3 z = y + r * dir;
        double val = 0;
        if (term.region.contains(z) && spheroid.contains(z))
        {
            val = term.integrand(z) * scale * r * r;
        }
        m.sum += val;
        m.sum_sq += val * val;
    }
    return m;
}
}  // namespace

void OracleConfig::validate() const
{
    if (sample_count < 10000)
    {
        throw PreconditionError("oracle needs at least 1e4 samples");
    }
    if (grid_resolution < 4)
    {
        throw PreconditionError("oracle grid resolution must be at least 4");
    }
}

McEstimate mc_spheroid_integral(Spheroid const& spheroid, std::vector<McTerm> const& terms, OracleConfig const& cfg)
{
    cfg.validate();
    McEstimate est;
    if (spheroid.empty() || terms.empty())
    {
        return est;
    }
    std::mt19937_64 rng(cfg.rng_seed);
    std::size_t per_term = std::max<std::size_t>(2, cfg.sample_count / terms.size());
    double var = 0;
    for (auto const& term : terms)
    {
        auto m = sample_term(spheroid, term, per_term, rng);
        double mean = m.sum / m.n;
        double sample_var = std::max(0.0, (m.sum_sq - m.n * mean * mean) / (m.n - 1));
        est.estimate += mean;
        var += sample_var / m.n;
    }
    est.std_error = std::sqrt(var);
    return est;
}

McEstimate mc_spheroid_integral(std::function<double(Vec3 const&)> const& integrand,
                                Spheroid const& spheroid,
                                OracleConfig const& cfg)
{
    Vec3 mid = 0.5 * (spheroid.focus_a + spheroid.focus_b);
    return mc_spheroid_integral(spheroid, {McTerm{Ball{mid, 0.5 * spheroid.t}, integrand}}, cfg);
}

McEstimate mc_kernel_integrals(Scene const& scene, double t, Vec3 const& x, Vec3 const& y, OracleConfig const& cfg)
{
    double eps = scene.epsilon;
    std::vector<McTerm> terms;
    for (auto const& bump : scene.alpha1.bumps())
    {
        terms.push_back({bump.support(), [bump, x, y, eps](Vec3 const& z) {
                             return eps * bump.value(z)
                                    / (16 * pi * pi * distance(z, x) * distance(z, y));
                         }});
    }
    for (auto const& bump : scene.rho1.bumps())
    {
        terms.push_back({bump.support(), [bump, x, y, t, eps](Vec3 const& z) {
                             double r1 = distance(z, x);
                             double r2 = distance(z, y);
                             if (r2 == 0)
                             {
                                 return 0.0;
                             }
                             double g = eps * dot(bump.gradient(z), z - y) / r2;
                             double slack = t - r1 - r2;
                             return slack * g / (16 * pi * pi * r1 * r2)
                                    + slack * slack * g / (32 * pi * pi * r1 * r2 * r2);
                         }});
    }
    return mc_spheroid_integral(Spheroid{x, y, t}, terms, cfg);
}

McEstimate mc_kernel_alpha_term(Scene const& scene, double t, Vec3 const& x, Vec3 const& y, OracleConfig const& cfg)
{
    Scene only = scene;
    only.rho1 = AnalyticField{};
    return mc_kernel_integrals(only, t, x, y, cfg);
}

double f_direct(AnalyticField const& psi, Vec3 const& x, Vec3 const& y, double t, OracleConfig const& cfg)
{
    int n = cfg.grid_resolution;
    return spheroid_integral(psi, t, x, y, QuadSpec{n, n, n});
}

double adaptive_integrate(std::function<double(double)> const& f, double a, double b, double rel_tol)
{
    if (!(b > a))
    {
        return 0;
    }
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 31>::integrate(f, a, b, 20, rel_tol);
}

double adaptive_line_integral(AnalyticField const& field, Segment const& seg, double rel_tol)
{
    double len = seg.length();
    if (len == 0)
    {
        return 0;
    }
    Vec3 dir = (seg.b - seg.a) / len;
    double sum = 0;
    for (auto const& bump : field.bumps())
    {
        auto [lo, hi] = chord_interval(seg, bump.support());
        sum += adaptive_integrate([&](double s) { return bump.value(seg.a + s * dir); }, lo, hi, rel_tol);
    }
    return sum;
}

double grid_newton_potential(AnalyticField const& psi, Vec3 const& y, OracleConfig const& cfg)
{
    double total = 0;
    for (auto const& bump : psi.bumps())
    {
        double h = 2 * bump.radius / cfg.grid_resolution;
        std::array<long, 3> lo{};
        std::array<long, 3> hi{};
        for (int k = 0; k < 3; ++k)
        {
            lo[k] = static_cast<long>(std::floor((bump.center[k] - bump.radius - y[k]) / h)) - 1;
            hi[k] = static_cast<long>(std::ceil((bump.center[k] + bump.radius - y[k]) / h)) + 1;
        }
        double sum = 0;
        for (long i = lo[0]; i < hi[0]; ++i)
        {
            for (long j = lo[1]; j < hi[1]; ++j)
            {
                for (long k = lo[2]; k < hi[2]; ++k)
                {
                    Vec3 off{(i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h};
                    sum += bump.laplacian(y + off) / norm(off);
                }
            }
        }
        total += sum * h * h * h;
    }
    return total / (4 * pi);
}

double radial_dalembert(std::function<double(double)> const& phi, double r, double t)
{
    if (!(r > 0))
    {
        throw PreconditionError("radial solution needs r > 0");
    }
    return ((r + t) * phi(r + t) + (r - t) * phi(std::fabs(r - t))) / (2 * r);
}

double plane_free_kernel_integral(AnalyticField const& f, Plane const& plane, Vec3 const& x, double t, double rel_tol)
{
    double h0 = std::fabs(plane.signed_distance(x));
    if (!(t > h0))
    {
        return 0;
    }
    double rho_max = std::sqrt(t * t - h0 * h0);
    Vec3 foot = plane.foot_of(x);
    Frame frame = frame_about(plane.theta);
    auto inner = [&](double psi) {
        Vec3 dir = std::cos(psi) * frame.e2 + std::sin(psi) * frame.e3;
        return adaptive_integrate(
            [&](double rho) {
                double r = std::hypot(h0, rho);
                if (r == 0)
                {
                    return 0.0;
                }
                return (t - r) * (t - r) / (8 * pi * r) * f.value(foot + rho * dir) * rho;
            },
            0,
            rho_max,
            rel_tol);
    };
    return adaptive_integrate(inner, 0, 2 * pi, rel_tol);
}

double richardson(std::vector<double> const& h, std::vector<double> const& v, int first_order)
{
    if (h.size() != v.size() || h.empty())
    {
        throw PreconditionError("richardson: need matching, non-empty step and value lists");
    }
    std::vector<std::size_t> order(h.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return h[a] > h[b]; });
    std::vector<double> col;
    for (std::size_t i = 0; i < order.size(); ++i)
    {
        if (i > 0 && std::fabs(h[order[i - 1]] / h[order[i]] - 2) > 1e-9)
        {
            throw PreconditionError("richardson: steps must halve successively");
        }
        col.push_back(v[order[i]]);
    }
    for (int level = 1; col.size() > 1; ++level)
    {
        double factor = std::ldexp(1.0, first_order + level - 1);
        for (std::size_t j = 0; j + 1 < col.size(); ++j)
        {
            col[j] = (factor * col[j + 1] - col[j]) / (factor - 1);
        }
        col.pop_back();
    }
    return col.front();
}

double kernel_dt_richardson(Scene const& scene,
                            Vec3 const& x,
                            Vec3 const& y,
                            std::vector<double> const& deltas,
                            QuadSpec const& quad)
{
    double d = distance(x, y);
    std::vector<double> vals;
    for (double delta : deltas)
    {
        vals.push_back(kernel_eval(scene, d + delta, x, y, quad).total() / delta);
    }
    return richardson(deltas, vals, 1);
}

double kernel_dtt_richardson(Scene const& scene,
                             Vec3 const& x,
                             Vec3 const& y,
                             std::vector<double> const& deltas,
                             QuadSpec const& quad)
{
    double d = distance(x, y);
    std::vector<double> vals;
    for (double delta : deltas)
    {
        double k1 = kernel_eval(scene, d + delta, x, y, quad).total();
        double k2 = kernel_eval(scene, d + 2 * delta, x, y, quad).total();
        vals.push_back((k2 - 2 * k1) / (delta * delta));
    }
    return richardson(deltas, vals, 1);
}

}  // namespace qpat
