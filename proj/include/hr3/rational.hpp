#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hr3 {

using int128 = __int128;

/// Exact rational on 128-bit integers. All quasirandomness deviations are
/// ratios of edge counts, so numerators stay well inside the range at desk
/// scale; overflow throws rather than wrapping.
class Rat {
 public:
  Rat() : num_(0), den_(1) {}
  Rat(long long n) : num_(n), den_(1) {}
  Rat(int128 n, int128 d) : num_(n), den_(d) {
    if (den_ == 0) throw std::domain_error("Rat: zero denominator");
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    reduce();
  }

  static Rat of(long long n, long long d) { return Rat(int128(n), int128(d)); }

  int128 num() const { return num_; }
  int128 den() const { return den_; }

  Rat operator+(const Rat& o) const { return Rat(checked_add(checked_mul(num_, o.den_), checked_mul(o.num_, den_)), checked_mul(den_, o.den_)); }
  Rat operator-(const Rat& o) const { return Rat(checked_sub(checked_mul(num_, o.den_), checked_mul(o.num_, den_)), checked_mul(den_, o.den_)); }
  Rat operator*(const Rat& o) const { return Rat(checked_mul(num_, o.num_), checked_mul(den_, o.den_)); }
  Rat operator/(const Rat& o) const {
    if (o.num_ == 0) throw std::domain_error("Rat: divide by zero");
    return Rat(checked_mul(num_, o.den_), checked_mul(den_, o.num_));
  }
  Rat operator-() const { Rat r; r.num_ = -num_; r.den_ = den_; return r; }

  bool operator==(const Rat& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rat& o) const { return !(*this == o); }
  bool operator<(const Rat& o) const { return checked_mul(num_, o.den_) < checked_mul(o.num_, den_); }
  bool operator<=(const Rat& o) const { return checked_mul(num_, o.den_) <= checked_mul(o.num_, den_); }
  bool operator>(const Rat& o) const { return o < *this; }
  bool operator>=(const Rat& o) const { return o <= *this; }

  Rat abs() const { return num_ < 0 ? -*this : *this; }

  double to_double() const { return double(num_) / double(den_); }

  std::string str() const { return i128_str(num_) + "/" + i128_str(den_); }

  static std::string i128_str(int128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    unsigned __int128 u = neg ? (unsigned __int128)(-(v + 1)) + 1 : (unsigned __int128)v;
    std::string s;
    while (u) { s.insert(s.begin(), char('0' + int(u % 10))); u /= 10; }
    return neg ? "-" + s : s;
  }

 private:
  void reduce() {
    int128 a = num_ < 0 ? -num_ : num_, b = den_;
    while (b) { int128 t = a % b; a = b; b = t; }
    if (a > 1) { num_ /= a; den_ /= a; }
  }

  static int128 checked_mul(int128 a, int128 b) {
    if (a == 0 || b == 0) return 0;
    int128 r = a * b;
    if (r / b != a) throw std::overflow_error("Rat: multiply overflow");
    return r;
  }
  static int128 checked_add(int128 a, int128 b) {
    int128 r = a + b;
    if ((b > 0 && r < a) || (b < 0 && r > a)) throw std::overflow_error("Rat: add overflow");
    return r;
  }
  static int128 checked_sub(int128 a, int128 b) { return checked_add(a, -b); }

  int128 num_, den_;
};

}  // namespace hr3
