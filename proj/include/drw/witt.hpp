#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <vector>

#include "drw/poly.hpp"
#include "drw/ring.hpp"

namespace drw {

using BigInt = boost::multiprecision::cpp_int;

template <>
struct CoefOps<BigInt> {
  static bool is_zero(const BigInt& c) { return c == 0; }
};

using ZPoly = MPoly<BigInt>;

// Universal Witt sum/product/negation polynomials for one (p, n), solved once
// over Z from the ghost equations and cached.  sum/prod live in variables
// x_0..x_{n-1}, y_0..y_{n-1} (2n vars); neg in x_0..x_{n-1}.
struct UnivWitt {
  int p = 0;
  int n = 0;
  std::vector<ZPoly> sum, prod, neg;

  static const UnivWitt& get(int p, int n);
};

// Ghost components w_i = sum_{j<=i} p^j X_j^{p^{i-j}} of a vector over a
// torsion-free lift ring; test oracle per the continuity lemma's ghost maps.
std::vector<ZPoly> ghost_components(int p, const std::vector<ZPoly>& coords);

// ---------------------------------------------------------------------------
// W_n(F_q)

class WittScalar {
 public:
  WittScalar() : fld_(nullptr) {}
  WittScalar(const FqField* F, int n) : fld_(F), coords_(n, 0) {}

  static WittScalar teich(FqElem c, int n);
  static WittScalar from_int(const FqField& F, int n, long long v);
  static WittScalar zero(const FqField& F, int n) { return WittScalar(&F, n); }
  static WittScalar one(const FqField& F, int n) { return teich(F.one(), n); }

  const FqField* field() const { return fld_; }
  int level() const { return (int)coords_.size(); }
  bool is_zero() const;
  int ord_V() const;  // index of first nonzero coordinate; = level() if zero
  FqElem coord(int i) const { return FqElem(fld_, coords_[i]); }
  void set_coord(int i, FqElem c) { coords_[i] = c.code(); }

  WittScalar operator+(const WittScalar& o) const;
  WittScalar operator-() const;
  WittScalar operator-(const WittScalar& o) const { return *this + (-o); }
  WittScalar operator*(const WittScalar& o) const;
  bool operator==(const WittScalar& o) const { return coords_ == o.coords_; }
  bool operator!=(const WittScalar& o) const { return !(*this == o); }

  // coordinatewise field Frobenius sigma (and inverse); level preserved
  WittScalar sigma(int k = 1) const;
  // strict Frobenius W_n -> W_{n-1}
  WittScalar frobenius() const;
  // V: W_n -> W_{n+1}
  WittScalar verschiebung() const;
  // truncation W_n -> W_m, m <= n
  WittScalar restrict_to(int m) const;
  // V^j as a same-level map is restrict(verschiebung^j); helper:
  WittScalar shift(int j) const;  // V^j then truncate back to original level

  WittScalar mul_int(long long v) const;
  WittScalar inverse() const;  // requires ord_V == 0
  WittScalar pow_int(long long e) const;

  // W_n(F_p) <-> Z/p^n (only when a == 1)
  long long to_zpn() const;
  static WittScalar from_zpn(const FqField& F, int n, long long v);

  std::string str() const;

 private:
  const FqField* fld_;
  std::vector<uint16_t> coords_;
};

// ---------------------------------------------------------------------------
// W_n(A) for A = F_q[x_1..x_d] (Laurent flags allowed)

class WittPolyVector {
 public:
  WittPolyVector() : n_(0) {}
  WittPolyVector(RingPtr ring, int n)
      : ring_(std::move(ring)), n_(n), coords_(n, FqPoly(ring_->nvars())) {}

  static WittPolyVector teich(RingPtr ring, int n, const FqPoly& f);
  static WittPolyVector from_scalar(RingPtr ring, const WittScalar& s);

  const RingPtr& ring() const { return ring_; }
  int level() const { return n_; }
  const FqPoly& coord(int i) const { return coords_[i]; }
  void set_coord(int i, FqPoly f) { coords_[i] = std::move(f); }
  bool is_zero() const;
  int ord_V() const;

  WittPolyVector operator+(const WittPolyVector& o) const;
  WittPolyVector operator-() const;
  WittPolyVector operator-(const WittPolyVector& o) const { return *this + (-o); }
  WittPolyVector operator*(const WittPolyVector& o) const;
  bool operator==(const WittPolyVector& o) const;
  bool operator!=(const WittPolyVector& o) const { return !(*this == o); }

  // strict Frobenius W_{n} -> W_{n-1}: coordinatewise ring Frobenius, drop last
  WittPolyVector frobenius() const;
  WittPolyVector verschiebung() const;     // W_n -> W_{n+1}
  WittPolyVector restrict_to(int m) const;  // m <= n

  WittPolyVector mul_int(long long v) const;

 private:
  void check_compat(const WittPolyVector& o) const;
  RingPtr ring_;
  int n_;
  std::vector<FqPoly> coords_;
};

// Witt vector over the Z-lift Z[x...]; ghost-map oracle lives here (tests).
class WittIntVector {
 public:
  WittIntVector(int p, int nvars, int n) : p_(p), n_(n), coords_(n, ZPoly(nvars)) {}

  static WittIntVector teich(int p, int nvars, int n, const ZPoly& f);

  int level() const { return n_; }
  const ZPoly& coord(int i) const { return coords_[i]; }
  void set_coord(int i, ZPoly f) { coords_[i] = std::move(f); }

  WittIntVector operator+(const WittIntVector& o) const;
  WittIntVector operator*(const WittIntVector& o) const;
  WittIntVector operator-() const;

  std::vector<ZPoly> ghost() const { return ghost_components(p_, coords_); }

  // reduce coordinates mod p into an F_q-polynomial Witt vector
  WittPolyVector reduce_mod_p(RingPtr ring) const;

 private:
  int p_, n_;
  std::vector<ZPoly> coords_;
};

}  // namespace drw
