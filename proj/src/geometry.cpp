#include "qpat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qpat
{
Vec3 normalized(Vec3 const& a)
{
    double n = norm(a);
    if (!(n > 0) || !std::isfinite(n))
    {
        throw DomainError("cannot normalize a zero or non-finite vector");
    }
    return a / n;
}

Frame frame_about(Vec3 const& axis)
{
    Vec3 e1 = normalized(axis);
    // Coordinate axis with the smallest |component| along e1
    int k = 0;
    for (int i = 1; i < 3; ++i)
    {
        if (std::fabs(e1[i]) < std::fabs(e1[k]))
        {
            k = i;
        }
    }
    Vec3 ek{k == 0 ? 1.0 : 0.0, k == 1 ? 1.0 : 0.0, k == 2 ? 1.0 : 0.0};
    Vec3 e2 = normalized(ek - dot(ek, e1) * e1);
    return {e1, e2, cross(e1, e2)};
}

Plane::Plane(double offset, Vec3 normal) : r{offset}, theta{normal}
{
    if (std::fabs(norm(normal) - 1.0) > 1e-12)
    {
        throw DomainError("plane normal must be a unit vector");
    }
}

Vec3 Segment::at(double s) const
{
    double len = length();
    if (len == 0)
    {
        return a;
    }
    return a + (s / len) * (b - a);
}

std::array<double, 2> chord_interval(Segment const& seg, Ball const& ball)
{
    double len = seg.length();
    if (len == 0)
    {
        return {0, 0};
    }
    Vec3 dir = (seg.b - seg.a) / len;
    Vec3 w = seg.a - ball.center;
    double bq = dot(w, dir);
    double disc = bq * bq - (norm_sq(w) - ball.radius * ball.radius);
    if (disc <= 0)
    {
        return {0, 0};
    }
    double root = std::sqrt(disc);
    double lo = std::max(0.0, -bq - root);
    double hi = std::min(len, -bq + root);
    return {lo, std::max(lo, hi)};
}

std::array<double, 2> line_sphere_parameters(Vec3 const& p, Vec3 const& v, double radius)
{
    double a = norm_sq(v);
    double b = dot(p, v);
    double c = norm_sq(p) - radius * radius;
    double disc = b * b - a * c;
    if (!(a > 0) || disc < 0)
    {
        throw DomainError("line does not intersect the sphere");
    }
    double root = std::sqrt(disc);
    return {(-b - root) / a, (-b + root) / a};
}

double Spheroid::volume() const
{
    double a = 0.5 * t;
    double c = 0.5 * focal_distance();
    if (a <= c)
    {
        return 0;
    }
    return 4.0 * std::numbers::pi / 3.0 * a * (a * a - c * c);
}

FocalChart::FocalChart(Vec3 const& x, Vec3 const& y)
    : x_{x}, y_{y}, mid_{0.5 * (x + y)}, dist_{distance(x, y)}
{
    if (!(dist_ > 0))
    {
        throw DomainError("focal chart requires distinct foci");
    }
    frame_ = frame_about(y - x);
}

Vec3 FocalChart::point(double r1, double r2, double phi) const
{
    double scale = dist_ + r1 + r2;
    double tol = 1e-12 * scale;
    if (r1 < -tol || r2 < -tol)
    {
        throw DomainError("focal radii must be non-negative");
    }
    if (r2 < std::fabs(dist_ - r1) - tol || r2 > dist_ + r1 + tol)
    {
        throw DomainError("focal radii violate the triangle inequality: r1="
                          + std::to_string(r1) + " r2=" + std::to_string(r2));
    }
    double xi = (r1 * r1 - r2 * r2) / (2 * dist_);
    double shifted = 0.5 * dist_ + xi;
    double eta_sq = r1 * r1 - shifted * shifted;
    if (eta_sq < -1e-10 * scale * scale)
    {
        throw DomainError("focal chart radicand is negative");
    }
    double eta = std::sqrt(std::max(eta_sq, 0.0));
    return mid_ + xi * frame_.e1
           + eta * (std::cos(phi) * frame_.e2 + std::sin(phi) * frame_.e3);
}

double FocalChart::jacobian(double r1, double r2) const
{
    return r1 * r2 / dist_;
}

FocalChart::Cylindrical FocalChart::cylindrical(Vec3 const& p) const
{
    Vec3 w = p - x_;
    double axial = dot(w, frame_.e1);
    double c2 = dot(w, frame_.e2);
    double c3 = dot(w, frame_.e3);
    return {axial, std::hypot(c2, c3), std::atan2(c3, c2)};
}

Vec3 chart_point(FocalChart const& chart, double r1, double r2, double phi)
{
    return chart.point(r1, r2, phi);
}

double chart_jacobian(FocalChart const& chart, double r1, double r2)
{
    return chart.jacobian(r1, r2);
}

}  // namespace qpat
