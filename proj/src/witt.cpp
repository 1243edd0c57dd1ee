#include "drw/witt.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace drw {

namespace {

BigInt big_pow_int(int64_t b, int e) {
  BigInt r = 1, bb = b;
  while (e) {
    if (e & 1) r *= bb;
    bb *= bb;
    e >>= 1;
  }
  return r;
}

ZPoly zp_pow(const ZPoly& f, int64_t e) {
  if (e == 0) return ZPoly::constant(f.nvars(), 1);
  return f.pow(e);
}

ZPoly exact_div(const ZPoly& f, const BigInt& d) {
  ZPoly r(f.nvars());
  for (auto& [m, c] : f.terms()) {
    if (c % d != 0) throw std::logic_error("UnivWitt: ghost equation not divisible");
    r.add_term(m, c / d);
  }
  return r;
}

std::vector<ZPoly> solve_from_ghost(int p, int n, const std::vector<ZPoly>& target) {
  // p^i s_i = target_i - sum_{j<i} p^j s_j^{p^(i-j)}
  std::vector<ZPoly> s;
  for (int i = 0; i < n; ++i) {
    ZPoly acc = target[i];
    for (int j = 0; j < i; ++j) {
      ZPoly t = zp_pow(s[j], big_pow_int(p, i - j).convert_to<int64_t>());
      for (auto& [m, c] : t.terms()) acc.add_term(m, -c * big_pow_int(p, j));
    }
    s.push_back(exact_div(acc, big_pow_int(p, i)));
  }
  return s;
}

}  // namespace

std::vector<ZPoly> ghost_components(int p, const std::vector<ZPoly>& coords) {
  int n = (int)coords.size();
  std::vector<ZPoly> w;
  for (int i = 0; i < n; ++i) {
    ZPoly acc(coords.empty() ? 0 : coords[0].nvars());
    for (int j = 0; j <= i; ++j) {
      ZPoly t = zp_pow(coords[j], big_pow_int(p, i - j).convert_to<int64_t>());
      for (auto& [m, c] : t.terms()) acc.add_term(m, c * big_pow_int(p, j));
    }
    w.push_back(acc);
  }
  return w;
}

const UnivWitt& UnivWitt::get(int p, int n) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<UnivWitt>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(p, n);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  auto uw = std::make_unique<UnivWitt>();
  uw->p = p;
  uw->n = n;
  // variables: x_i at index i, y_i at index n+i
  std::vector<ZPoly> xs, ys;
  for (int i = 0; i < n; ++i) {
    Mono m(2 * n, 0);
    m[i] = 1;
    xs.push_back(ZPoly::monomial(2 * n, m, 1));
    Mono my(2 * n, 0);
    my[n + i] = 1;
    ys.push_back(ZPoly::monomial(2 * n, my, 1));
  }
  auto wx = ghost_components(p, xs), wy = ghost_components(p, ys);
  std::vector<ZPoly> tsum, tprod;
  for (int i = 0; i < n; ++i) {
    tsum.push_back(wx[i] + wy[i]);
    tprod.push_back(wx[i] * wy[i]);
  }
  uw->sum = solve_from_ghost(p, n, tsum);
  uw->prod = solve_from_ghost(p, n, tprod);

  std::vector<ZPoly> xs1;
  for (int i = 0; i < n; ++i) {
    Mono m(n, 0);
    m[i] = 1;
    xs1.push_back(ZPoly::monomial(n, m, 1));
  }
  auto wx1 = ghost_components(p, xs1);
  std::vector<ZPoly> tneg;
  for (int i = 0; i < n; ++i) tneg.push_back(-wx1[i]);
  uw->neg = solve_from_ghost(p, n, tneg);

  it = cache.emplace(key, std::move(uw)).first;
  return *it->second;
}

// --- generic evaluation of a universal polynomial in a char-p ring ----------

namespace {

template <class R, class Ctx>
R eval_univ(const ZPoly& f, const std::vector<R>& args, const Ctx& ctx) {
  R acc = ctx.zero();
  for (auto& [m, c] : f.terms()) {
    BigInt cr = c % ctx.p();
    if (cr < 0) cr += ctx.p();
    if (cr == 0) continue;
    R t = ctx.from_small((long long)cr.convert_to<long long>());
    for (size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      t = ctx.mul(t, ctx.pow(args[i], m[i]));
    }
    acc = ctx.add(acc, t);
  }
  return acc;
}

struct FqCtx {
  const FqField* F;
  int p() const { return F->p(); }
  FqElem zero() const { return F->zero(); }
  FqElem from_small(long long v) const { return F->from_int(v); }
  FqElem add(FqElem a, FqElem b) const { return a + b; }
  FqElem mul(FqElem a, FqElem b) const { return a * b; }
  FqElem pow(FqElem a, int64_t e) const { return a.pow(e); }
};

struct FqPolyCtx {
  const FqField* F;
  int nv;
  int p() const { return F->p(); }
  FqPoly zero() const { return FqPoly(nv); }
  FqPoly from_small(long long v) const { return FqPoly::constant(nv, F->from_int(v)); }
  FqPoly add(const FqPoly& a, const FqPoly& b) const { return a + b; }
  FqPoly mul(const FqPoly& a, const FqPoly& b) const { return a * b; }
  FqPoly pow(const FqPoly& a, int64_t e) const { return e == 0 ? from_small(1) : a.pow(e); }
};

}  // namespace

// --- WittScalar --------------------------------------------------------------

WittScalar WittScalar::teich(FqElem c, int n) {
  WittScalar r(c.field(), n);
  if (n > 0) r.coords_[0] = c.code();
  return r;
}

WittScalar WittScalar::from_int(const FqField& F, int n, long long v) {
  bool neg = v < 0;
  unsigned long long a = neg ? (unsigned long long)(-v) : (unsigned long long)v;
  WittScalar acc = zero(F, n);
  WittScalar base = one(F, n);
  while (a) {
    if (a & 1ull) acc = acc + base;
    base = base + base;
    a >>= 1;
  }
  return neg ? -acc : acc;
}

bool WittScalar::is_zero() const {
  for (auto c : coords_)
    if (c) return false;
  return true;
}

int WittScalar::ord_V() const {
  for (int i = 0; i < (int)coords_.size(); ++i)
    if (coords_[i]) return i;
  return (int)coords_.size();
}

WittScalar WittScalar::operator+(const WittScalar& o) const {
  if (fld_ != o.fld_ || level() != o.level()) throw std::invalid_argument("WittScalar: level/field mismatch");
  int n = level();
  const UnivWitt& U = UnivWitt::get(fld_->p(), n);
  std::vector<FqElem> args;
  for (int i = 0; i < n; ++i) args.push_back(coord(i));
  for (int i = 0; i < n; ++i) args.push_back(o.coord(i));
  WittScalar r(fld_, n);
  FqCtx ctx{fld_};
  for (int i = 0; i < n; ++i) r.coords_[i] = eval_univ(U.sum[i], args, ctx).code();
  return r;
}

WittScalar WittScalar::operator-() const {
  int n = level();
  const UnivWitt& U = UnivWitt::get(fld_->p(), n);
  std::vector<FqElem> args;
  for (int i = 0; i < n; ++i) args.push_back(coord(i));
  WittScalar r(fld_, n);
  FqCtx ctx{fld_};
  for (int i = 0; i < n; ++i) r.coords_[i] = eval_univ(U.neg[i], args, ctx).code();
  return r;
}

WittScalar WittScalar::operator*(const WittScalar& o) const {
  if (fld_ != o.fld_ || level() != o.level()) throw std::invalid_argument("WittScalar: level/field mismatch");
  int n = level();
  const UnivWitt& U = UnivWitt::get(fld_->p(), n);
  std::vector<FqElem> args;
  for (int i = 0; i < n; ++i) args.push_back(coord(i));
  for (int i = 0; i < n; ++i) args.push_back(o.coord(i));
  WittScalar r(fld_, n);
  FqCtx ctx{fld_};
  for (int i = 0; i < n; ++i) r.coords_[i] = eval_univ(U.prod[i], args, ctx).code();
  return r;
}

WittScalar WittScalar::sigma(int k) const {
  WittScalar r = *this;
  for (auto& c : r.coords_) {
    if (k >= 0)
      for (int i = 0; i < k; ++i) c = fld_->frob(c);
    else
      for (int i = 0; i < -k; ++i) c = fld_->frob_inv(c);
  }
  return r;
}

WittScalar WittScalar::frobenius() const {
  if (level() < 1) throw std::invalid_argument("WittScalar::frobenius at level 0");
  return sigma(1).restrict_to(level() - 1);
}

WittScalar WittScalar::verschiebung() const {
  WittScalar r(fld_, level() + 1);
  for (int i = 0; i < level(); ++i) r.coords_[i + 1] = coords_[i];
  return r;
}

WittScalar WittScalar::restrict_to(int m) const {
  if (m > level() || m < 0) throw std::invalid_argument("WittScalar::restrict_to: bad level");
  WittScalar r(fld_, m);
  for (int i = 0; i < m; ++i) r.coords_[i] = coords_[i];
  return r;
}

WittScalar WittScalar::shift(int j) const {
  WittScalar r(fld_, level());
  for (int i = 0; i + j < level(); ++i) r.coords_[i + j] = coords_[i];
  return r;
}

WittScalar WittScalar::mul_int(long long v) const { return *this * from_int(*fld_, level(), v); }

WittScalar WittScalar::inverse() const {
  if (ord_V() != 0) throw std::domain_error("WittScalar::inverse: not a unit");
  int n = level();
  WittScalar x = teich(coord(0).inv(), n);
  WittScalar two = from_int(*fld_, n, 2);
  for (int it = 0; it < 6; ++it) {  // quadratic convergence; n <= 32 is plenty
    x = x * (two - *this * x);
    if ((*this * x) == one(*fld_, n)) break;
  }
  if ((*this * x) != one(*fld_, n)) throw std::logic_error("WittScalar::inverse failed");
  return x;
}

WittScalar WittScalar::pow_int(long long e) const {
  WittScalar b = *this;
  if (e < 0) {
    b = b.inverse();
    e = -e;
  }
  WittScalar acc = one(*fld_, level());
  while (e) {
    if (e & 1) acc = acc * b;
    b = b * b;
    e >>= 1;
  }
  return acc;
}

long long WittScalar::to_zpn() const {
  if (fld_->a() != 1) throw std::domain_error("WittScalar::to_zpn: base field not F_p");
  int p = fld_->p(), n = level();
  long long pn = 1;
  for (int i = 0; i < n; ++i) pn *= p;
  // value = sum p^i * omega(x_i), omega(c) = c^(p^(n-1)) mod p^n
  long long val = 0, pi = 1;
  for (int i = 0; i < n; ++i) {
    long long c = coords_[i];
    long long om = c % p;
    for (int k = 0; k < n - 1; ++k) {
      long long t = 1, b = om;
      for (int j = 0; j < p; ++j) t = (t * b) % pn;
      om = t;
    }
    val = (val + pi * om) % pn;
    pi *= p;
  }
  return val;
}

WittScalar WittScalar::from_zpn(const FqField& F, int n, long long v) {
  if (F.a() != 1) throw std::domain_error("WittScalar::from_zpn: base field not F_p");
  int p = F.p();
  long long pn = 1;
  for (int i = 0; i < n; ++i) pn *= p;
  long long x = ((v % pn) + pn) % pn;
  WittScalar r(&F, n);
  for (int i = 0; i < n; ++i) {
    long long c = x % p;
    r.coords_[i] = (uint16_t)c;
    // subtract omega(c), divide by p
    long long om = c;
    long long mod = pn;
    for (int k = 0; k < n - 1 - i; ++k) {
      long long t = 1;
      for (int j = 0; j < p; ++j) t = (t * om) % mod;
      om = t;
    }
    x = (x - om) % mod;
    if (x < 0) x += mod;
    if (x % p != 0) throw std::logic_error("from_zpn: digit peel failed");
    x /= p;
    pn /= p;
  }
  return r;
}

std::string WittScalar::str() const {
  std::string s = "(";
  for (int i = 0; i < level(); ++i) {
    if (i) s += ",";
    s += coord(i).str();
  }
  return s + ")";
}

// --- WittPolyVector ----------------------------------------------------------

void WittPolyVector::check_compat(const WittPolyVector& o) const {
  if (n_ != o.n_ || !ring_->same_as(*o.ring_)) throw std::invalid_argument("WittPolyVector: ring/level mismatch");
}

WittPolyVector WittPolyVector::teich(RingPtr ring, int n, const FqPoly& f) {
  WittPolyVector r(ring, n);
  if (n > 0) r.coords_[0] = f;
  return r;
}

WittPolyVector WittPolyVector::from_scalar(RingPtr ring, const WittScalar& s) {
  WittPolyVector r(ring, s.level());
  for (int i = 0; i < s.level(); ++i)
    r.coords_[i] = FqPoly::constant(ring->nvars(), s.coord(i));
  return r;
}

bool WittPolyVector::is_zero() const {
  for (auto& c : coords_)
    if (!c.is_zero()) return false;
  return true;
}

int WittPolyVector::ord_V() const {
  for (int i = 0; i < n_; ++i)
    if (!coords_[i].is_zero()) return i;
  return n_;
}

WittPolyVector WittPolyVector::operator+(const WittPolyVector& o) const {
  check_compat(o);
  const UnivWitt& U = UnivWitt::get(ring_->p(), n_);
  std::vector<FqPoly> args(coords_);
  for (auto& c : o.coords_) args.push_back(c);
  WittPolyVector r(ring_, n_);
  FqPolyCtx ctx{&ring_->field(), ring_->nvars()};
  for (int i = 0; i < n_; ++i) r.coords_[i] = eval_univ(U.sum[i], args, ctx);
  return r;
}

WittPolyVector WittPolyVector::operator-() const {
  const UnivWitt& U = UnivWitt::get(ring_->p(), n_);
  WittPolyVector r(ring_, n_);
  FqPolyCtx ctx{&ring_->field(), ring_->nvars()};
  for (int i = 0; i < n_; ++i) r.coords_[i] = eval_univ(U.neg[i], coords_, ctx);
  return r;
}

WittPolyVector WittPolyVector::operator*(const WittPolyVector& o) const {
  check_compat(o);
  const UnivWitt& U = UnivWitt::get(ring_->p(), n_);
  std::vector<FqPoly> args(coords_);
  for (auto& c : o.coords_) args.push_back(c);
  WittPolyVector r(ring_, n_);
  FqPolyCtx ctx{&ring_->field(), ring_->nvars()};
  for (int i = 0; i < n_; ++i) r.coords_[i] = eval_univ(U.prod[i], args, ctx);
  return r;
}

bool WittPolyVector::operator==(const WittPolyVector& o) const {
  return n_ == o.n_ && coords_ == o.coords_;
}

WittPolyVector WittPolyVector::frobenius() const {
  if (n_ < 1) throw std::invalid_argument("WittPolyVector::frobenius at level 0");
  WittPolyVector r(ring_, n_ - 1);
  for (int i = 0; i < n_ - 1; ++i) r.coords_[i] = fq_poly_frob(coords_[i]);
  return r;
}

WittPolyVector WittPolyVector::verschiebung() const {
  WittPolyVector r(ring_, n_ + 1);
  for (int i = 0; i < n_; ++i) r.coords_[i + 1] = coords_[i];
  return r;
}

WittPolyVector WittPolyVector::restrict_to(int m) const {
  if (m > n_ || m < 0) throw std::invalid_argument("WittPolyVector::restrict_to: bad level");
  WittPolyVector r(ring_, m);
  for (int i = 0; i < m; ++i) r.coords_[i] = coords_[i];
  return r;
}

WittPolyVector WittPolyVector::mul_int(long long v) const {
  return *this * from_scalar(ring_, WittScalar::from_int(ring_->field(), n_, v));
}

// --- WittIntVector -----------------------------------------------------------

WittIntVector WittIntVector::teich(int p, int nvars, int n, const ZPoly& f) {
  WittIntVector r(p, nvars, n);
  if (n > 0) r.coords_[0] = f;
  return r;
}

WittIntVector WittIntVector::operator+(const WittIntVector& o) const {
  const UnivWitt& U = UnivWitt::get(p_, n_);
  std::vector<ZPoly> args(coords_);
  for (auto& c : o.coords_) args.push_back(c);
  WittIntVector r(p_, coords_[0].nvars(), n_);
  for (int i = 0; i < n_; ++i) {
    ZPoly acc(coords_[0].nvars());
    for (auto& [m, c] : U.sum[i].terms()) {
      ZPoly t = ZPoly::constant(coords_[0].nvars(), c);
      for (size_t j = 0; j < m.size(); ++j)
        if (m[j]) t = t * args[j].pow(m[j]);
      acc = acc + t;
    }
    r.coords_[i] = acc;
  }
  return r;
}

WittIntVector WittIntVector::operator*(const WittIntVector& o) const {
  const UnivWitt& U = UnivWitt::get(p_, n_);
  std::vector<ZPoly> args(coords_);
  for (auto& c : o.coords_) args.push_back(c);
  WittIntVector r(p_, coords_[0].nvars(), n_);
  for (int i = 0; i < n_; ++i) {
    ZPoly acc(coords_[0].nvars());
    for (auto& [m, c] : U.prod[i].terms()) {
      ZPoly t = ZPoly::constant(coords_[0].nvars(), c);
      for (size_t j = 0; j < m.size(); ++j)
        if (m[j]) t = t * args[j].pow(m[j]);
      acc = acc + t;
    }
    r.coords_[i] = acc;
  }
  return r;
}

WittIntVector WittIntVector::operator-() const {
  const UnivWitt& U = UnivWitt::get(p_, n_);
  WittIntVector r(p_, coords_[0].nvars(), n_);
  for (int i = 0; i < n_; ++i) {
    ZPoly acc(coords_[0].nvars());
    for (auto& [m, c] : U.neg[i].terms()) {
      ZPoly t = ZPoly::constant(coords_[0].nvars(), c);
      for (size_t j = 0; j < m.size(); ++j)
        if (m[j]) t = t * coords_[j].pow(m[j]);
      acc = acc + t;
    }
    r.coords_[i] = acc;
  }
  return r;
}

WittPolyVector WittIntVector::reduce_mod_p(RingPtr ring) const {
  WittPolyVector r(ring, n_);
  const FqField& F = ring->field();
  for (int i = 0; i < n_; ++i) {
    FqPoly f(ring->nvars());
    for (auto& [m, c] : coords_[i].terms()) {
      BigInt cr = c % p_;
      if (cr < 0) cr += p_;
      f.add_term(m, F.from_int(cr.convert_to<long long>()));
    }
    r.set_coord(i, f);
  }
  return r;
}

}  // namespace drw
