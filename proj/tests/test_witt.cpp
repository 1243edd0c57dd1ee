// Witt vector arithmetic against the ghost-coordinate oracle over Z-lifts.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drw/witt.hpp"

using namespace drw;

namespace {

// random Laurent polynomial over the lift ring Z[x..]
ZPoly rand_zpoly(std::mt19937& rng, int nvars, bool laurent) {
  std::uniform_int_distribution<int> nterms(1, 3), expd(laurent ? -2 : 0, 2), coefd(-4, 4);
  ZPoly f(nvars);
  int k = nterms(rng);
  for (int i = 0; i < k; ++i) {
    Mono m(nvars);
    for (int j = 0; j < nvars; ++j) m[j] = expd(rng);
    f.add_term(m, coefd(rng));
  }
  return f;
}

WittIntVector rand_wiv(std::mt19937& rng, int p, int nvars, int n, bool laurent) {
  WittIntVector v(p, nvars, n);
  for (int i = 0; i < n; ++i) v.set_coord(i, rand_zpoly(rng, nvars, laurent));
  return v;
}

}  // namespace

TEST_CASE("ghost components definition") {
  // ghost((a,0)) = (a, a^p); ghost((0,1)) over Z, p=2 -> (0,2)
  ZPoly a = ZPoly::monomial(1, {1}, 1);
  auto w = ghost_components(2, {a, ZPoly(1)});
  CHECK(w[0] == a);
  CHECK(w[1] == a.pow(2));
  auto w2 = ghost_components(2, {ZPoly(1), ZPoly::constant(1, 1)});
  CHECK(w2[0] == ZPoly(1));
  CHECK(w2[1] == ZPoly::constant(1, 2));
}

TEST_CASE("ghost map is a ring homomorphism on the lift (oracle contract)") {
  std::mt19937 rng(7);
  for (int p : {2, 3, 5}) {
    for (int n : {1, 2, 3}) {
      for (int rep = 0; rep < 10; ++rep) {
        auto x = rand_wiv(rng, p, 2, n, true);
        auto y = rand_wiv(rng, p, 2, n, true);
        auto gs = (x + y).ghost();
        auto gp = (x * y).ghost();
        auto gx = x.ghost(), gy = y.ghost();
        for (int i = 0; i < n; ++i) {
          CHECK(gs[i] == gx[i] + gy[i]);
          CHECK(gp[i] == gx[i] * gy[i]);
        }
      }
    }
  }
}

TEST_CASE("frozen example: (1,0)+(1,0) in W2(F2)") {
  const FqField& F = FqField::get(2, 1);
  auto one = WittScalar::teich(F.one(), 2);
  auto s = one + one;
  CHECK(s.coord(0) == F.zero());
  CHECK(s.coord(1) == F.one());
}

TEST_CASE("frozen example: (1,0)+(2,0) in W2(F3)") {
  // Oracle-computed before freezing: (2,0) is the Teichmueller lift of -1,
  // so the sum is zero.  (Ghost over Z: (1,1)+(2,8) = (3,9), Witt coords of
  // which reduce to (0,0) mod 3.)
  const FqField& F = FqField::get(3, 1);
  auto a = WittScalar::teich(F.one(), 2);
  auto b = WittScalar::teich(F.from_int(2), 2);
  auto s = a + b;
  CHECK(s.is_zero());
  // and the integer 3 = V(1) has coordinates (0,1)
  auto three = WittScalar::from_int(F, 2, 3);
  CHECK(three.coord(0) == F.zero());
  CHECK(three.coord(1) == F.one());
}

TEST_CASE("frozen example: V(1)*V(1) in W3(F2)") {
  const FqField& F = FqField::get(2, 1);
  auto v1 = WittScalar::one(F, 2).verschiebung();
  auto prod = v1 * v1;  // p*V(V(1)) = V^2(1)... oracle: 2*2 = 4 = (0,0,1)
  CHECK(prod.coord(0) == F.zero());
  CHECK(prod.coord(1) == F.zero());
  CHECK(prod.coord(2) == F.one());
}

TEST_CASE("ring axioms randomized, exact") {
  std::mt19937 rng(11);
  for (int p : {2, 3, 5}) {
    for (int a = 1; a <= (p == 2 ? 3 : (p == 3 ? 2 : 1)); ++a) {
      const FqField& F = FqField::get(p, a);
      for (int n : {1, 2, 3}) {
        std::uniform_int_distribution<int> cd(0, F.q() - 1);
        auto rnd = [&]() {
          WittScalar w(&F, n);
          for (int i = 0; i < n; ++i) w.set_coord(i, F.elem((uint16_t)cd(rng)));
          return w;
        };
        for (int rep = 0; rep < 40; ++rep) {
          auto x = rnd(), y = rnd(), z = rnd();
          CHECK((x + y) + z == x + (y + z));
          CHECK(x + y == y + x);
          CHECK((x * y) * z == x * (y * z));
          CHECK(x * y == y * x);
          CHECK(x * (y + z) == x * y + x * z);
          CHECK(x + (-x) == WittScalar::zero(F, n));
          CHECK(x * WittScalar::one(F, n) == x);
          CHECK(x + WittScalar::zero(F, n) == x);
        }
      }
    }
  }
}

TEST_CASE("F, V and Teichmueller identities") {
  std::mt19937 rng(13);
  for (int p : {2, 3, 5}) {
    const FqField& F = FqField::get(p, p == 5 ? 1 : 2);
    int n = 3;
    std::uniform_int_distribution<int> cd(0, F.q() - 1);
    auto rnd = [&]() {
      WittScalar w(&F, n);
      for (int i = 0; i < n; ++i) w.set_coord(i, F.elem((uint16_t)cd(rng)));
      return w;
    };
    for (int rep = 0; rep < 25; ++rep) {
      auto x = rnd(), y = rnd();
      // F(V(x)) = p*x
      CHECK(x.verschiebung().frobenius() == x.mul_int(p));
      // shift(1) = truncated Verschiebung
      CHECK(x.shift(1) == x.verschiebung().restrict_to(n));
      // V(x)*y = V(x*F(y))
      auto lhs = (x.restrict_to(n - 1).verschiebung() * y);
      auto rhs = (x.restrict_to(n - 1) * y.frobenius()).verschiebung();
      CHECK(lhs == rhs);
      // Teichmueller multiplicativity
      auto c = F.elem((uint16_t)cd(rng)), d2 = F.elem((uint16_t)cd(rng));
      CHECK(WittScalar::teich(c, n) * WittScalar::teich(d2, n) == WittScalar::teich(c * d2, n));
      // F([a]) = [a^p]
      CHECK(WittScalar::teich(c, n).frobenius() == WittScalar::teich(c.frob(), n - 1));
      // ord_V(V(x)) = ord_V(x) + 1
      CHECK(x.verschiebung().ord_V() == (x.is_zero() ? n + 1 : x.ord_V() + 1));
      // restriction commutes with +, *
      CHECK((x + y).restrict_to(2) == x.restrict_to(2) + y.restrict_to(2));
      CHECK((x * y).restrict_to(2) == x.restrict_to(2) * y.restrict_to(2));
      // unit inverse
      if (x.ord_V() == 0) CHECK(x * x.inverse() == WittScalar::one(F, n));
    }
  }
}

TEST_CASE("W_n(F_p) <-> Z/p^n fast path") {
  for (int p : {2, 3, 5}) {
    const FqField& F = FqField::get(p, 1);
    int n = 3;
    long long pn = p * p * p;
    for (long long v = 0; v < pn; ++v) {
      auto w = WittScalar::from_zpn(F, n, v);
      CHECK(w.to_zpn() == v);
    }
    // ring structure matches
    std::mt19937 rng(3);
    std::uniform_int_distribution<long long> vd(0, pn - 1);
    for (int rep = 0; rep < 30; ++rep) {
      long long x = vd(rng), y = vd(rng);
      CHECK(WittScalar::from_zpn(F, n, x) + WittScalar::from_zpn(F, n, y) ==
            WittScalar::from_zpn(F, n, (x + y) % pn));
      CHECK(WittScalar::from_zpn(F, n, x) * WittScalar::from_zpn(F, n, y) ==
            WittScalar::from_zpn(F, n, (x * y) % pn));
    }
    // ord_V = p-adic valuation
    CHECK(WittScalar::from_zpn(F, n, p).ord_V() == 1);
    CHECK(WittScalar::from_zpn(F, n, p * p).ord_V() == 2);
  }
}

TEST_CASE("poly Witt vectors: reduction of the lift computation matches F_q computation") {
  std::mt19937 rng(17);
  for (int p : {2, 3}) {
    auto ring = make_laurent_ring(p, 1, {"x", "y"});
    const FqField& F = ring->field();
    for (int n : {2, 3}) {
      for (int rep = 0; rep < 8; ++rep) {
        auto zx = rand_wiv(rng, p, 2, n, true);
        auto zy = rand_wiv(rng, p, 2, n, true);
        auto rx = zx.reduce_mod_p(ring), ry = zy.reduce_mod_p(ring);
        CHECK((zx + zy).reduce_mod_p(ring) == rx + ry);
        CHECK((zx * zy).reduce_mod_p(ring) == rx * ry);
        CHECK((-zx).reduce_mod_p(ring) == -rx);
        // F V = p
        CHECK(rx.verschiebung().frobenius() == rx.mul_int(p));
        // V(x)y = V(x F(y))  (x at level n-1)
        auto x1 = rx.restrict_to(n - 1);
        CHECK(x1.verschiebung() * ry == (x1 * ry.frobenius()).verschiebung());
        // restriction commutes
        CHECK((rx * ry).restrict_to(n - 1) == rx.restrict_to(n - 1) * ry.restrict_to(n - 1));
      }
    }
  }
  // Teichmueller of 0 is the zero vector; Teichmueller multiplicative
  auto ring = make_poly_ring(3, 1, {"x"});
  const FqField& F = ring->field();
  auto z = WittPolyVector::teich(ring, 3, FqPoly(1));
  CHECK(z.is_zero());
  auto xm = FqPoly::monomial(1, {2}, F.one());
  auto ym = FqPoly::monomial(1, {1}, F.from_int(2));
  CHECK(WittPolyVector::teich(ring, 3, xm) * WittPolyVector::teich(ring, 3, ym) ==
        WittPolyVector::teich(ring, 3, xm * ym));
}
