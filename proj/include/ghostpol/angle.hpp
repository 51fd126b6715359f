#pragma once

#include <cmath>
#include <numbers>

namespace ghostpol {

/// Polarizer orientation or optical rotation.
///
/// The value is kept in the degrees it was specified with, so that angles read
/// from files survive a write/read cycle bit-for-bit; all trigonometry goes
/// through `radians()`.
class Angle {
 public:
  constexpr Angle() = default;

  static constexpr Angle degrees(double deg) { return Angle(deg); }
  static constexpr Angle radians(double rad) { return Angle(rad * (180.0 / std::numbers::pi)); }

  constexpr double deg() const { return deg_; }
  constexpr double rad() const { return deg_ * (std::numbers::pi / 180.0); }

  friend constexpr Angle operator+(Angle a, Angle b) { return Angle(a.deg_ + b.deg_); }
  friend constexpr Angle operator-(Angle a, Angle b) { return Angle(a.deg_ - b.deg_); }
  friend constexpr Angle operator-(Angle a) { return Angle(-a.deg_); }
  friend constexpr Angle operator*(double s, Angle a) { return Angle(s * a.deg_); }
  friend constexpr bool operator==(Angle, Angle) = default;
  friend constexpr auto operator<=>(Angle, Angle) = default;

 private:
  constexpr explicit Angle(double deg) : deg_(deg) {}
  double deg_ = 0.0;
};

/// Reduce `deg` modulo 180 into (center - 90, center + 90].
inline double wrap_half_turn_deg(double deg, double center = 0.0) {
  double x = std::fmod(deg - center, 180.0);
  if (x <= -90.0) x += 180.0;
  if (x > 90.0) x -= 180.0;
  return x + center;
}

/// Reduce `deg` modulo 180 into [0, 180).
inline double wrap_orientation_deg(double deg) {
  double x = std::fmod(deg, 180.0);
  if (x < 0.0) x += 180.0;
  if (x >= 180.0) x -= 180.0;
  return x;
}

}  // namespace ghostpol
