#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "drw/fq.hpp"

namespace drw {

// Exponent vector; negative entries are Laurent exponents.
using Mono = std::vector<int64_t>;

inline Mono mono_mul(const Mono& a, const Mono& b) {
  Mono r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Mono mono_pow(const Mono& a, int64_t e) {
  Mono r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * e;
  return r;
}

template <class C>
struct CoefOps;  // zero test / unit per coefficient kind

template <>
struct CoefOps<FqElem> {
  static bool is_zero(const FqElem& c) { return c.is_zero(); }
};

// Sparse multivariate (Laurent) polynomial with coefficients C.
template <class C>
class MPoly {
 public:
  MPoly() : nvars_(0) {}
  explicit MPoly(int nvars) : nvars_(nvars) {}

  static MPoly monomial(int nvars, const Mono& m, const C& c) {
    MPoly r(nvars);
    if (!CoefOps<C>::is_zero(c)) r.terms_[m] = c;
    return r;
  }
  static MPoly constant(int nvars, const C& c) { return monomial(nvars, Mono(nvars, 0), c); }

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<Mono, C>& terms() const { return terms_; }

  void add_term(const Mono& m, const C& c) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      if (!CoefOps<C>::is_zero(c)) terms_[m] = c;
    } else {
      it->second = it->second + c;
      if (CoefOps<C>::is_zero(it->second)) terms_.erase(it);
    }
  }

  MPoly operator+(const MPoly& o) const {
    MPoly r = *this;
    for (auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
  }
  MPoly operator-() const {
    MPoly r(nvars_);
    for (auto& [m, c] : terms_) r.terms_[m] = -c;
    return r;
  }
  MPoly operator-(const MPoly& o) const { return *this + (-o); }
  MPoly operator*(const MPoly& o) const {
    MPoly r(nvars_);
    for (auto& [m1, c1] : terms_)
      for (auto& [m2, c2] : o.terms_) r.add_term(mono_mul(m1, m2), c1 * c2);
    return r;
  }
  MPoly pow(int64_t e) const {
    if (e < 0) throw std::domain_error("MPoly::pow: negative exponent");
    MPoly r = *this;
    MPoly acc(nvars_);
    bool have = false;
    while (e) {
      if (e & 1) {
        acc = have ? acc * r : r;
        have = true;
      }
      e >>= 1;
      if (e) r = r * r;
    }
    if (!have) throw std::domain_error("MPoly::pow: use explicit one for e=0");
    return acc;
  }

  bool operator==(const MPoly& o) const { return terms_ == o.terms_; }
  bool operator!=(const MPoly& o) const { return !(*this == o); }

 private:
  int nvars_;
  std::map<Mono, C> terms_;
};

using FqPoly = MPoly<FqElem>;

inline FqPoly fq_poly_one(const FqField& F, int nvars) { return FqPoly::constant(nvars, F.one()); }

// x_i -> x_i^p on every monomial coefficient-wise Frobenius (F_q perfect).
inline FqPoly fq_poly_frob(const FqPoly& f) {
  FqPoly r(f.nvars());
  for (auto& [m, c] : f.terms()) {
    Mono pm(m.size());
    // p from the coefficient field
    int p = c.field()->p();
    for (size_t i = 0; i < m.size(); ++i) pm[i] = m[i] * p;
    r.add_term(pm, c.frob());
  }
  return r;
}

}  // namespace drw
