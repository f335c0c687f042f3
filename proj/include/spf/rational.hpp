#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spf {

struct Overflow : std::runtime_error {
  Overflow() : std::runtime_error("rational overflow") {}
};

/// Exact rational on int64 with overflow detection. The solver's tableaux
/// are tiny and their entries stay small, so this is enough; any overflow
/// throws and the caller reports "unknown".
class Rational {
public:
  Rational() = default;
  Rational(int64_t n) : num_(n), den_(1) {}
  Rational(int64_t n, int64_t d);

  int64_t num() const { return num_; }
  int64_t den() const { return den_; }
  bool isInteger() const { return den_ == 1; }
  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  int64_t floor() const;
  int64_t ceil() const;

  Rational operator-() const;
  Rational operator+(const Rational &o) const;
  Rational operator-(const Rational &o) const;
  Rational operator*(const Rational &o) const;
  Rational operator/(const Rational &o) const;
  Rational &operator+=(const Rational &o) { return *this = *this + o; }
  Rational &operator-=(const Rational &o) { return *this = *this - o; }
  Rational &operator*=(const Rational &o) { return *this = *this * o; }

  bool operator==(const Rational &o) const {
    return num_ == o.num_ && den_ == o.den_;
  }
  bool operator!=(const Rational &o) const { return !(*this == o); }
  bool operator<(const Rational &o) const;
  bool operator<=(const Rational &o) const { return !(o < *this); }
  bool operator>(const Rational &o) const { return o < *this; }
  bool operator>=(const Rational &o) const { return !(*this < o); }

  std::string str() const;

private:
  static Rational make(__int128 n, __int128 d);
  int64_t num_ = 0;
  int64_t den_ = 1;
};

int64_t floorDiv(int64_t a, int64_t b);
int64_t ceilDiv(int64_t a, int64_t b);
int64_t gcd64(int64_t a, int64_t b);

} // namespace spf
