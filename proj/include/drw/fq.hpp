#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace drw {

// q = p^a.  Desk scale: q is capped (default 32) so field tables stay tiny.
struct PrimePower {
  int p = 2;
  int a = 1;
  int q = 2;

  static constexpr int kMaxQ = 32;

  PrimePower() = default;
  PrimePower(int p_, int a_);

  bool operator==(const PrimePower& o) const { return p == o.p && a == o.a; }
};

class FqField;

// Element of F_q, encoded as the base-p digit string of its residue
// polynomial c_0 + c_1 x + ... + c_{a-1} x^{a-1}  (code = sum c_i p^i).
class FqElem {
 public:
  FqElem() : fld_(nullptr), code_(0) {}
  FqElem(const FqField* f, uint16_t c) : fld_(f), code_(c) {}

  uint16_t code() const { return code_; }
  const FqField* field() const { return fld_; }
  bool is_zero() const { return code_ == 0; }

  FqElem operator+(FqElem o) const;
  FqElem operator-(FqElem o) const;
  FqElem operator*(FqElem o) const;
  FqElem operator-() const;
  bool operator==(FqElem o) const { return code_ == o.code_; }
  bool operator!=(FqElem o) const { return code_ != o.code_; }
  bool operator<(FqElem o) const { return code_ < o.code_; }

  FqElem inv() const;
  FqElem pow(long long e) const;
  // x -> x^p (field Frobenius) and its inverse (p-th root; F_q is perfect).
  FqElem frob() const;
  FqElem frob_inv() const;

  std::string str() const;

 private:
  const FqField* fld_;
  uint16_t code_;
};

// Arithmetic tables for one F_q.  Instances are interned via FqField::get and
// never destroyed, so FqElem can hold a bare pointer.
class FqField {
 public:
  static const FqField& get(int p, int a);
  static const FqField& get(const PrimePower& pq) { return get(pq.p, pq.a); }

  int p() const { return pq_.p; }
  int a() const { return pq_.a; }
  int q() const { return pq_.q; }
  const PrimePower& prime_power() const { return pq_; }

  FqElem zero() const { return FqElem(this, 0); }
  FqElem one() const { return FqElem(this, 1); }
  // residue class of x (a generator of F_q as an F_p-algebra; = 1 when a = 1)
  FqElem gen() const { return FqElem(this, a() > 1 ? p() : 1); }
  FqElem elem(uint16_t code) const { return FqElem(this, code); }
  FqElem from_int(long long v) const;

  // a multiplicative generator of F_q^* and discrete log with respect to it
  FqElem mult_gen() const { return FqElem(this, multgen_); }
  int dlog(FqElem x) const;  // defined for x != 0

  // defining polynomial coefficients c_0..c_a (monic, c_a = 1)
  const std::vector<int>& defining_poly() const { return defpoly_; }

  uint16_t add(uint16_t x, uint16_t y) const { return addtab_[x * pq_.q + y]; }
  uint16_t mul(uint16_t x, uint16_t y) const { return multab_[x * pq_.q + y]; }
  uint16_t neg(uint16_t x) const { return negtab_[x]; }
  uint16_t inv(uint16_t x) const;
  uint16_t frob(uint16_t x) const { return frobtab_[x]; }
  uint16_t frob_inv(uint16_t x) const { return ifrobtab_[x]; }

 private:
  explicit FqField(const PrimePower& pq);
  void build_tables();

  PrimePower pq_;
  std::vector<int> defpoly_;
  std::vector<uint16_t> addtab_, multab_, negtab_, invtab_, frobtab_, ifrobtab_;
  std::vector<int> dlogtab_;
  uint16_t multgen_ = 1;
};

inline FqElem FqElem::operator+(FqElem o) const { return FqElem(fld_, fld_->add(code_, o.code_)); }
inline FqElem FqElem::operator-(FqElem o) const { return FqElem(fld_, fld_->add(code_, fld_->neg(o.code_))); }
inline FqElem FqElem::operator*(FqElem o) const { return FqElem(fld_, fld_->mul(code_, o.code_)); }
inline FqElem FqElem::operator-() const { return FqElem(fld_, fld_->neg(code_)); }
inline FqElem FqElem::inv() const { return FqElem(fld_, fld_->inv(code_)); }
inline FqElem FqElem::frob() const { return FqElem(fld_, fld_->frob(code_)); }
inline FqElem FqElem::frob_inv() const { return FqElem(fld_, fld_->frob_inv(code_)); }

}  // namespace drw
