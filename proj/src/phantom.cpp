#include "qpat/phantom.hpp"

#include <sstream>

namespace qpat
{
AnalyticField::AnalyticField(std::vector<Bump> bumps) : bumps_{std::move(bumps)}
{
    for (auto const& b : bumps_)
    {
        if (!(b.radius > 0) || !std::isfinite(b.amplitude) || !is_finite(b.center))
        {
            throw PreconditionError("bump needs a positive radius and finite parameters");
        }
    }
}

std::vector<Ball> AnalyticField::supports() const
{
    std::vector<Ball> balls;
    balls.reserve(bumps_.size());
    for (auto const& b : bumps_)
    {
        balls.push_back(b.support());
    }
    return balls;
}

bool AnalyticField::in_support(Vec3 const& p) const
{
    for (auto const& b : bumps_)
    {
        if (distance(p, b.center) < b.radius)
        {
            return true;
        }
    }
    return false;
}

double AnalyticField::max_abs_bound() const
{
    double sum = 0;
    for (auto const& b : bumps_)
    {
        sum += std::fabs(b.amplitude);
    }
    return sum;
}

AnalyticField AnalyticField::scaled(double factor) const
{
    auto bumps = bumps_;
    for (auto& b : bumps)
    {
        b.amplitude *= factor;
    }
    return AnalyticField{std::move(bumps)};
}

void Scene::validate(double margin) const
{
    auto fail = [](std::string const& msg) { throw PreconditionError("scene: " + msg); };
    if (!(epsilon >= 0))
    {
        fail("epsilon must be non-negative");
    }
    if (!(omega_radius > 0) || !(sigma_radius > omega_radius))
    {
        fail("need 0 < omega_radius < sigma_radius");
    }
    if (f.empty())
    {
        fail("source f has no primitives");
    }
    for (auto const& b : f.bumps())
    {
        if (norm(b.center) + b.radius > omega_radius)
        {
            fail("supp f must lie inside the Omega ball");
        }
    }
    for (auto const& ball : perturbation_supports())
    {
        bool nested = false;
        for (auto const& fb : f.bumps())
        {
            if (distance(ball.center, fb.center) + ball.radius + margin <= fb.radius)
            {
                nested = true;
                break;
            }
        }
        if (!nested)
        {
            std::ostringstream os;
            os << "perturbation support ball at (" << ball.center.x << ", " << ball.center.y
               << ", " << ball.center.z << ") radius " << ball.radius
               << " is not strictly inside supp f with margin " << margin;
            fail(os.str());
        }
    }
    double a_max = alpha1.max_abs_bound();
    double r_max = rho1.max_abs_bound();
    if (!(1 - epsilon * a_max > 0) || !(1 - epsilon * (a_max + r_max) > 0))
    {
        fail("epsilon too large for the perturbation amplitudes");
    }
}

std::vector<Ball> Scene::perturbation_supports() const
{
    auto balls = alpha1.supports();
    auto more = rho1.supports();
    balls.insert(balls.end(), more.begin(), more.end());
    return balls;
}

Scene Scene::default_scene()
{
    Scene s;
    s.f = AnalyticField{{Bump{{0, 0, 0}, 1.0, 1.0}}};
    s.alpha1 = AnalyticField{{Bump{{0.3, 0, 0}, 0.35, 1.0}}};
    s.rho1 = AnalyticField{{Bump{{-0.3, 0, 0}, 0.35, 1.0}}};
    s.epsilon = 0.05;
    s.omega_radius = 1.2;
    s.sigma_radius = 3.0;
    return s;
}

double line_integral(AnalyticField const& field, Segment const& seg, int n_nodes)
{
    return line_integral_weighted(
        field, seg, n_nodes, FieldQuantity::value, [](double) { return 1.0; });
}

}  // namespace qpat
