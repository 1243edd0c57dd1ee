#include "drw/fq.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace drw {

namespace {

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// polynomial arithmetic over F_p on coefficient vectors, for table building
using PVec = std::vector<int>;

PVec pmul_mod(const PVec& f, const PVec& g, const PVec& mod, int p) {
  PVec r(f.size() + g.size(), 0);
  for (size_t i = 0; i < f.size(); ++i)
    for (size_t j = 0; j < g.size(); ++j) r[i + j] = (r[i + j] + f[i] * g[j]) % p;
  // reduce by monic mod of degree a
  int a = (int)mod.size() - 1;
  for (int d = (int)r.size() - 1; d >= a; --d) {
    int c = r[d];
    if (c == 0) continue;
    for (int i = 0; i <= a; ++i) r[d - a + i] = ((r[d - a + i] - c * mod[i]) % p + p * p) % p;
  }
  r.resize(a);
  return r;
}

uint16_t encode(const PVec& f, int p) {
  uint16_t c = 0;
  for (int i = (int)f.size() - 1; i >= 0; --i) c = (uint16_t)(c * p + f[i]);
  return c;
}

PVec decode(uint16_t code, int p, int a) {
  PVec f(a, 0);
  for (int i = 0; i < a; ++i) {
    f[i] = code % p;
    code = (uint16_t)(code / p);
  }
  return f;
}

bool irreducible(const PVec& mod, int p) {
  // trial: f of degree a is irreducible over F_p iff it has no monic factor
  // of degree <= a/2; degrees here are <= 5, so brute force is fine
  int a = (int)mod.size() - 1;
  for (int d = 1; 2 * d <= a; ++d) {
    long long count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (long long code = 0; code < count; ++code) {
      PVec g(d + 1, 0);
      long long c = code;
      for (int i = 0; i < d; ++i) {
        g[i] = (int)(c % p);
        c /= p;
      }
      g[d] = 1;
      // remainder of mod by g
      PVec r = mod;
      for (int k = (int)r.size() - 1; k >= d; --k) {
        int lead = r[k];
        if (lead == 0) continue;
        for (int i = 0; i <= d; ++i) r[k - d + i] = ((r[k - d + i] - lead * g[i]) % p + p * p) % p;
      }
      bool zero = true;
      for (int i = 0; i < d; ++i)
        if (r[i] != 0) zero = false;
      if (zero) return false;
    }
  }
  return true;
}

}  // namespace

PrimePower::PrimePower(int p_, int a_) : p(p_), a(a_) {
  if (!is_prime(p)) throw std::invalid_argument("PrimePower: p not prime");
  if (a < 1) throw std::invalid_argument("PrimePower: a < 1");
  long long qq = 1;
  for (int i = 0; i < a; ++i) qq *= p;
  if (qq > kMaxQ) throw std::invalid_argument("PrimePower: q exceeds configured limit");
  q = (int)qq;
}

FqField::FqField(const PrimePower& pq) : pq_(pq) {
  int p = pq_.p, a = pq_.a;
  // lexicographically least irreducible: scan constant-first coefficient
  // tuples (c_0,...,c_{a-1}) in ascending base-p order
  defpoly_.assign(a + 1, 0);
  defpoly_[a] = 1;
  if (a > 1) {
    long long count = 1;
    for (int i = 0; i < a; ++i) count *= p;
    bool found = false;
    for (long long code = 0; code < count && !found; ++code) {
      PVec f(a + 1, 0);
      long long c = code;
      for (int i = 0; i < a; ++i) {
        f[i] = (int)(c % p);
        c /= p;
      }
      f[a] = 1;
      if (irreducible(f, p)) {
        defpoly_ = f;
        found = true;
      }
    }
    if (!found) throw std::logic_error("FqField: no irreducible polynomial found");
  }
  build_tables();
}

void FqField::build_tables() {
  int p = pq_.p, a = pq_.a, q = pq_.q;
  addtab_.assign(q * q, 0);
  multab_.assign(q * q, 0);
  negtab_.assign(q, 0);
  invtab_.assign(q, 0);
  frobtab_.assign(q, 0);
  ifrobtab_.assign(q, 0);
  dlogtab_.assign(q, -1);
  for (int x = 0; x < q; ++x) {
    PVec fx = decode((uint16_t)x, p, a);
    PVec nx(a);
    for (int i = 0; i < a; ++i) nx[i] = (p - fx[i]) % p;
    negtab_[x] = encode(nx, p);
    for (int y = 0; y < q; ++y) {
      PVec fy = decode((uint16_t)y, p, a);
      PVec s(a);
      for (int i = 0; i < a; ++i) s[i] = (fx[i] + fy[i]) % p;
      addtab_[x * q + y] = encode(s, p);
      multab_[x * q + y] = encode(pmul_mod(fx, fy, defpoly_, p), p);
    }
  }
  for (int x = 1; x < q; ++x) {
    uint16_t acc = (uint16_t)x;
    for (int i = 1; i < p; ++i) acc = multab_[acc * q + x];
    frobtab_[x] = acc;  // x^p
  }
  for (int x = 0; x < q; ++x) ifrobtab_[frobtab_[x]] = (uint16_t)x;
  for (int x = 1; x < q; ++x) {
    for (int y = 1; y < q; ++y)
      if (multab_[x * q + y] == 1) invtab_[x] = (uint16_t)y;
  }
  // smallest multiplicative generator
  for (int g = 1; g < q; ++g) {
    uint16_t acc = 1;
    int ord = 0;
    do {
      acc = multab_[acc * q + g];
      ++ord;
    } while (acc != 1);
    if (ord == q - 1) {
      multgen_ = (uint16_t)g;
      break;
    }
  }
  uint16_t acc = 1;
  dlogtab_[1] = 0;
  for (int i = 1; i < q - 1; ++i) {
    acc = multab_[acc * q + multgen_];
    dlogtab_[acc] = i;
  }
}

uint16_t FqField::inv(uint16_t x) const {
  if (x == 0) throw std::domain_error("FqField::inv of zero");
  return invtab_[x];
}

int FqField::dlog(FqElem x) const {
  if (x.is_zero()) throw std::domain_error("FqField::dlog of zero");
  return dlogtab_[x.code()];
}

FqElem FqField::from_int(long long v) const {
  long long r = v % pq_.p;
  if (r < 0) r += pq_.p;
  return FqElem(this, (uint16_t)r);
}

FqElem FqElem::pow(long long e) const {
  const FqField& F = *fld_;
  if (code_ == 0) {
    if (e < 0) throw std::domain_error("FqElem::pow: 0^negative");
    return e == 0 ? F.one() : F.zero();
  }
  long long m = F.q() - 1;
  long long r = e % m;
  if (r < 0) r += m;
  FqElem acc = F.one(), b = *this;
  while (r) {
    if (r & 1) acc = acc * b;
    b = b * b;
    r >>= 1;
  }
  return acc;
}

std::string FqElem::str() const {
  const FqField& F = *fld_;
  if (F.a() == 1) return std::to_string(code_);
  // digits as polynomial in g
  std::string s;
  uint16_t c = code_;
  int p = F.p();
  bool first = true;
  if (c == 0) return "0";
  for (int i = 0; c != 0; ++i, c = (uint16_t)(c / p)) {
    int d = c % p;
    if (d == 0) continue;
    if (!first) s += "+";
    first = false;
    if (i == 0)
      s += std::to_string(d);
    else {
      if (d != 1) s += std::to_string(d) + "*";
      s += "g";
      if (i > 1) s += "^" + std::to_string(i);
    }
  }
  return s;
}

const FqField& FqField::get(int p, int a) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<FqField>> registry;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(p, a);
  auto it = registry.find(key);
  if (it == registry.end()) {
    PrimePower pq(p, a);
    it = registry.emplace(key, std::unique_ptr<FqField>(new FqField(pq))).first;
  }
  return *it->second;
}

}  // namespace drw
