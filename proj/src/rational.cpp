#include "spf/rational.hpp"

#include <limits>

namespace spf {

namespace {
__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits(__int128 v) {
  return v >= std::numeric_limits<int64_t>::min() &&
         v <= std::numeric_limits<int64_t>::max();
}
} // namespace

int64_t gcd64(int64_t a, int64_t b) { return (int64_t)gcd128(a, b); }

int64_t floorDiv(int64_t a, int64_t b) {
  int64_t q = a / b, r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

int64_t ceilDiv(int64_t a, int64_t b) { return -floorDiv(-a, b); }

Rational::Rational(int64_t n, int64_t d) { *this = make(n, d); }

Rational Rational::make(__int128 n, __int128 d) {
  if (d == 0) throw std::domain_error("rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  if (!fits(n) || !fits(d)) throw Overflow();
  Rational r;
  r.num_ = (int64_t)n;
  r.den_ = (int64_t)d;
  return r;
}

int64_t Rational::floor() const { return floorDiv(num_, den_); }
int64_t Rational::ceil() const { return ceilDiv(num_, den_); }

Rational Rational::operator-() const { return make(-(__int128)num_, den_); }

Rational Rational::operator+(const Rational &o) const {
  if (den_ == o.den_) return make((__int128)num_ + o.num_, den_);
  return make((__int128)num_ * o.den_ + (__int128)o.num_ * den_,
              (__int128)den_ * o.den_);
}

Rational Rational::operator-(const Rational &o) const { return *this + (-o); }

Rational Rational::operator*(const Rational &o) const {
  return make((__int128)num_ * o.num_, (__int128)den_ * o.den_);
}

Rational Rational::operator/(const Rational &o) const {
  return make((__int128)num_ * o.den_, (__int128)den_ * o.num_);
}

bool Rational::operator<(const Rational &o) const {
  return (__int128)num_ * o.den_ < (__int128)o.num_ * den_;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

} // namespace spf
