#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drw/ring.hpp"
#include "drw/witt.hpp"

namespace drw {

using Rat = boost::rational<long long>;

// One variable's weight k = num / p^den_exp, canonical: p does not divide num
// unless num = 0 (then den_exp = 0).
struct WeightExp {
  int64_t num = 0;
  int den_exp = 0;
  bool operator==(const WeightExp&) const = default;
};

inline WeightExp make_weight(int p, int64_t raw, int depth) {
  // raw / p^depth reduced
  if (raw == 0) return {0, 0};
  int v = 0;
  int64_t m = raw;
  while (m % p == 0 && v < depth) {
    m /= p;
    ++v;
  }
  return {m, depth - v};
}

// dV^u([X]^ex); a block with several variables ("fat") is only legal as the
// leading block of a term without head.
struct DVBlock {
  int u = 1;
  std::map<int, int64_t> ex;  // var -> raw exponent (weight = ex/p^u)
  auto operator<=>(const DVBlock&) const = default;
  int var() const { return ex.begin()->first; }  // for singletons
};

// F^t d([x]^m), p coprime to m
struct FdBlock {
  int var = 0;
  int t = 0;
  int64_t m = 1;
  auto operator<=>(const FdBlock&) const = default;
};

// Canonical shape of a basic Witt differential.  The coefficient is stored
// separately at the term level.
struct TermShape {
  int u0 = 0;                      // head depth; 0 when head empty
  std::map<int, int64_t> head;     // var -> raw exponent (weight = e/p^u0)
  std::vector<DVBlock> dv;         // sorted: u desc, then var asc; dv[0] may be fat iff head empty
  std::vector<FdBlock> fd;         // sorted by var
  std::vector<int> dlogs;          // sorted; weight-0 logarithmic factors

  auto operator<=>(const TermShape&) const = default;

  int degree() const { return (int)(dv.size() + fd.size() + dlogs.size()); }
  bool deg0() const { return dv.empty() && fd.empty() && dlogs.empty(); }
  // V-depth of the coefficient carrier
  int carrier_depth() const {
    if (!head.empty()) return u0;
    if (!dv.empty()) return dv[0].u;
    return 0;
  }
  // weight function k (vars with k != 0)
  std::map<int, WeightExp> weight(int p) const;
  Rat weight_size(int p) const;  // |k| = sum of |k_i|
  bool weight_integral(int p) const;
  // where (if anywhere) a variable occurs: 0 none, 1 head, 2 dv index+, 3 fd, 4 dlog
  bool uses_var(int v) const;
};

// Paper's classification tags.
enum class TermType { P1, P2, P3, G1, G2a, G2b, G2c, G3, G4 };
std::string term_type_name(TermType t);

// Element of W_nOmega^q_A as a canonically ordered sum of basic Witt
// differentials; the map key set is the partition/weight data and values are
// the Witt scalar coefficients xi (ord_V(xi) >= carrier depth).
class DRWElement {
 public:
  DRWElement() : level_(0), degree_(0) {}
  DRWElement(RingPtr ring, int level, int degree)
      : ring_(std::move(ring)), level_(level), degree_(degree) {}

  const RingPtr& ring() const { return ring_; }
  int level() const { return level_; }
  int degree() const { return degree_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<TermShape, WittScalar>& terms() const { return terms_; }

  void add_term(const TermShape& s, const WittScalar& xi);

  DRWElement operator+(const DRWElement& o) const;
  DRWElement operator-() const;
  DRWElement operator-(const DRWElement& o) const { return *this + (-o); }
  bool operator==(const DRWElement& o) const {
    return level_ == o.level_ && degree_ == o.degree_ && terms_ == o.terms_;
  }
  bool operator!=(const DRWElement& o) const { return !(*this == o); }

  static DRWElement zero(RingPtr ring, int level, int degree) { return DRWElement(ring, level, degree); }

  std::string str() const;  // canonical text form (round-trips through the DSL)

 private:
  RingPtr ring_;
  int level_;
  int degree_;
  std::map<TermShape, WittScalar> terms_;
};

TermType classify_term(const TermShape& s, const RingDecl& ring);

// canonical-form validation (throws with a message on violation) -- used by
// tests and as a postcondition of normalization
void validate_canonical(const DRWElement& e);

// enumeration of canonical shapes for property tests: all shapes over the
// ring with given degree, |k| <= kmax (and raw exponents bounded), depths < level
std::vector<TermShape> enumerate_shapes(const RingDecl& ring, int level, int degree, int kmax_num);

std::string term_str(const RingDecl& ring, const TermShape& s, const WittScalar& xi);

}  // namespace drw
