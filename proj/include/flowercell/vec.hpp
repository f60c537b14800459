#pragma once

#include <cmath>
#include <numbers>

namespace flowercell {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
constexpr double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double polar_angle(Vec2 a) { return std::atan2(a.y, a.x); }

// Outer unit normal u_theta and its positive rotation v_theta.
inline Vec2 unit(double theta) { return {std::cos(theta), std::sin(theta)}; }
inline Vec2 unit_perp(double theta) { return {-std::sin(theta), std::cos(theta)}; }

// Reduces to [0, 2pi).
inline double reduce_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

// Direction on the unit circle, stored reduced to [0, 2pi).
class Angle {
 public:
  constexpr Angle() = default;
  explicit Angle(double radians) : value_(reduce_angle(radians)) {}

  double radians() const { return value_; }
  Vec2 u() const { return unit(value_); }
  Vec2 v() const { return unit_perp(value_); }

 private:
  double value_{0.0};
};

}  // namespace flowercell
