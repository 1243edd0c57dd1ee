#pragma once

#include "drw/element.hpp"

namespace drw {

// --- constructors -------------------------------------------------------------

DRWElement el_zero(RingPtr ring, int level, int degree);
DRWElement el_scalar_elem(RingPtr ring, int level, const WittScalar& xi);  // degree 0
DRWElement el_one(RingPtr ring, int level);
DRWElement el_teich(RingPtr ring, int level, const FqPoly& f);  // [f]
DRWElement el_dlog_var(RingPtr ring, int level, int var);       // dlog[x]

// --- closed-form operator actions (drw_terms) ----------------------------------

DRWElement el_scalar_mul(const WittScalar& alpha, const DRWElement& e);
DRWElement el_int_mul(long long c, const DRWElement& e);
// strict Frobenius: level n -> n-1
DRWElement el_frobenius(const DRWElement& e);
// same-level Frobenius; only for W(F_p) coefficients (base field F_p)
DRWElement el_frobenius_same_level(const DRWElement& e);
// Verschiebung: level n -> n+1, and the truncated same-level variant
DRWElement el_verschiebung(const DRWElement& e);
DRWElement el_verschiebung_trunc(const DRWElement& e);
DRWElement el_d(const DRWElement& e);
DRWElement el_restrict(const DRWElement& e, int m);

// --- product ------------------------------------------------------------------

DRWElement el_mul(const DRWElement& a, const DRWElement& b);

// --- degree-0 bridge to Witt coordinates ----------------------------------------

WittPolyVector to_witt_vector(const DRWElement& deg0);
DRWElement from_witt_vector(const WittPolyVector& v);

// coefficient helpers: xi = p^depth * alpha
WittScalar term_alpha(const WittScalar& xi, int depth);
WittScalar xi_from_alpha(const WittScalar& alpha, int depth);

// diagnostics: set by the canonicalizer when its fuel is exhausted (signals a
// non-terminating rewrite; tests fail loudly on it)
struct NormalizationError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace drw
