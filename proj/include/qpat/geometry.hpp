#pragma once

#include <array>
#include <cmath>

#include "qpat/error.hpp"

namespace qpat
{
//---------------------------------------------------------------------------//
/*!
 * Point or vector in normalized (unit sound speed) space.
 */
struct Vec3
{
    double x{0};
    double y{0};
    double z{0};

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3& operator+=(Vec3 const& o)
    {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr Vec3& operator-=(Vec3 const& o)
    {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    constexpr Vec3& operator*=(double s)
    {
        x *= s;
        y *= s;
        z *= s;
        return *this;
    }

    friend constexpr bool operator==(Vec3 const&, Vec3 const&) = default;
};

constexpr Vec3 operator+(Vec3 a, Vec3 const& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, Vec3 const& b) { return a -= b; }
constexpr Vec3 operator-(Vec3 const& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }

constexpr double dot(Vec3 const& a, Vec3 const& b)
{
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

constexpr Vec3 cross(Vec3 const& a, Vec3 const& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

constexpr double norm_sq(Vec3 const& a) { return dot(a, a); }
inline double norm(Vec3 const& a) { return std::sqrt(dot(a, a)); }
inline double distance(Vec3 const& a, Vec3 const& b) { return norm(a - b); }

//! Unit vector along `a`; throws DomainError for the zero vector.
Vec3 normalized(Vec3 const& a);

inline bool is_finite(Vec3 const& a)
{
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

//---------------------------------------------------------------------------//
//! Right-handed orthonormal frame {e1, e2, e3} with a prescribed e1.
struct Frame
{
    Vec3 e1;
    Vec3 e2;
    Vec3 e3;
};

/*!
 * Build a frame around a unit axis.
 *
 * e2 is the normalized part of the coordinate axis least aligned with `axis`
 * that is orthogonal to it; e3 = e1 x e2.
 */
Frame frame_about(Vec3 const& axis);

//---------------------------------------------------------------------------//
//! Plane {p : p . theta = r} with unit normal theta.
struct Plane
{
    double r{0};
    Vec3 theta{0, 0, 1};

    Plane() = default;
    //! Throws DomainError unless |theta| = 1 within 1e-12.
    Plane(double offset, Vec3 normal);

    double signed_distance(Vec3 const& p) const { return dot(p, theta) - r; }
    Vec3 foot_of(Vec3 const& p) const { return p - signed_distance(p) * theta; }
};

//! Straight segment from `a` to `b`.
struct Segment
{
    Vec3 a;
    Vec3 b;

    double length() const { return distance(a, b); }
    Vec3 at(double s) const;  //!< point at arc length s from a
};

//! Closed ball.
struct Ball
{
    Vec3 center;
    double radius{0};

    bool contains(Vec3 const& p) const { return distance(p, center) <= radius; }
};

/*!
 * Parameter interval [lo, hi] (arc length from the segment start) of the
 * chord of `ball` cut by the segment; empty when lo >= hi.
 */
std::array<double, 2> chord_interval(Segment const& seg, Ball const& ball);

//! Intersections of the full line {p + s v} with the sphere |z| = radius
//! (origin-centered), returned as the two parameters s (lo <= hi). Throws
//! DomainError if the line misses the sphere.
std::array<double, 2> line_sphere_parameters(Vec3 const& p, Vec3 const& v, double radius);

//---------------------------------------------------------------------------//
/*!
 * Prolate spheroid {z : |z - a| + |z - b| <= t} with foci a, b.
 */
struct Spheroid
{
    Vec3 focus_a;
    Vec3 focus_b;
    double t{0};

    double focal_distance() const { return distance(focus_a, focus_b); }
    bool empty() const { return t < focal_distance(); }
    bool contains(Vec3 const& z) const
    {
        return distance(z, focus_a) + distance(z, focus_b) <= t;
    }
    //! Closed-form ellipsoid volume (4 pi / 3) a b^2.
    double volume() const;
};

//---------------------------------------------------------------------------//
/*!
 * Focal coordinates (r1, r2, phi) about the foci x and y.
 *
 * A point with chart coordinates (r1, r2, phi) lies at distance r1 from x and
 * r2 from y; phi rotates about the axis e1 = (y - x)/|y - x|. The volume
 * element is r1 r2 / |y - x| dr1 dr2 dphi.
 */
class FocalChart
{
  public:
    //! Throws DomainError when x == y.
    FocalChart(Vec3 const& x, Vec3 const& y);

    Vec3 const& x() const { return x_; }
    Vec3 const& y() const { return y_; }
    Frame const& frame() const { return frame_; }
    double focal_distance() const { return dist_; }

    //! Point at distances (r1, r2) from (x, y) and angle phi.
    Vec3 point(double r1, double r2, double phi) const;

    //! |det d(point)/d(r1, r2, phi)| = r1 r2 / |y - x|.
    double jacobian(double r1, double r2) const;

    //! Cylindrical radius and angle of `p` about the focal axis, and its
    //! coordinate along e1 measured from x.
    struct Cylindrical
    {
        double axial;
        double radial;
        double angle;
    };
    Cylindrical cylindrical(Vec3 const& p) const;

  private:
    Vec3 x_;
    Vec3 y_;
    Vec3 mid_;
    double dist_;
    Frame frame_;
};

// Free-function forms of the chart operations.
Vec3 chart_point(FocalChart const& chart, double r1, double r2, double phi);
double chart_jacobian(FocalChart const& chart, double r1, double r2);

}  // namespace qpat
