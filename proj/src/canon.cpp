// Canonicalization engine for sums of basic Witt differentials.
//
// Terms are products  alpha * V^{u0}([X]^head) * prod dV^{u_j}(...) * prod
// F^{t}d([x]^m) * prod dlog[x]  with the coefficient tracked as alpha (the
// stored xi equals p^D alpha, D the carrier depth).  Every rewrite below is an
// identity of the de Rham-Witt complex:
//   V(x)y = V(x F y),  F dV = d,  FV = p,  V(w0 dw1...dwq) = Vw0 dVw1...dVwq,
//   F^c d[x]^m = m [x]^{p^c m - 1} d[x],  d[x]^w = w [x]^{w-1} d[x],
//   Leibniz, d*d = 0, dF = pFd, graded commutativity.
// Orientation: monomial content is pushed into the deepest factor (the
// carrier), multi-variable blocks behind the carrier are split to single
// variables, depth-sorted, ties resolved toward the smallest variable.
// Termination: each rule strictly shrinks (overlap count, fat sizes, depth
// violations, tie inversions); a fuel counter guards the recursion and raises
// NormalizationError instead of looping.

#include "drw/canon.hpp"

#include <algorithm>
#include <stdexcept>

namespace drw {

namespace {

int64_t ipow64(int b, int e) {
  int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

int vp64(int p, int64_t m) {
  if (m == 0) return -1;
  int v = 0;
  while (m % p == 0) {
    m /= p;
    ++v;
  }
  return v;
}

thread_local long long g_fuel = 0;

struct FuelScope {
  bool top;
  explicit FuelScope(long long budget) : top(g_fuel == 0) {
    if (top) g_fuel = budget;
  }
  ~FuelScope() {
    if (top) g_fuel = 0;
  }
};

void burn_fuel() {
  if (g_fuel > 0 && --g_fuel == 0) throw NormalizationError("normalization fuel exhausted (non-confluence?)");
}

struct WFac {
  int kind;  // 0 = dV^u, 1 = F^t d, 2 = dlog
  int ut;    // u (kind 0) or t (kind 1); 0 for dlog
  std::map<int, int64_t> ex;
  int var() const { return ex.begin()->first; }
  int64_t m() const { return ex.begin()->second; }
  bool fat() const { return kind == 0 && ex.size() > 1; }
};

struct WorkTerm {
  WittScalar alpha;  // sign folded in
  int u0 = 0;
  std::map<int, int64_t> head;
  std::vector<WFac> facs;  // in multiplication order
};

WFac dv_fac(int u, std::map<int, int64_t> ex) { return WFac{0, u, std::move(ex)}; }
WFac dv_fac1(int u, int var, int64_t m) { return WFac{0, u, {{var, m}}}; }
WFac fd_fac(int var, int t, int64_t m) { return WFac{1, t, {{var, m}}}; }
WFac dlog_fac(int var) { return WFac{2, 0, {{var, 0}}}; }

class Engine {
 public:
  Engine(RingPtr ring, int level) : ring_(std::move(ring)), n_(level), F_(&ring_->field()) {}

  DRWElement canon(WorkTerm t);
  DRWElement d(const DRWElement& e);
  DRWElement mul_fac(const DRWElement& e, const WFac& f);
  DRWElement mul_head(const DRWElement& e, int u, const std::map<int, int64_t>& ex);
  DRWElement mul(const DRWElement& a, const DRWElement& b);

  DRWElement zero(int degree) const { return DRWElement::zero(ring_, n_, degree); }

  // degree-0 bridge
  WittPolyVector deg0_to_wpv(const DRWElement& e) const;
  DRWElement wpv_to_deg0(const WittPolyVector& v) const;
  WittPolyVector base_wpv(int u, const std::map<int, int64_t>& ex) const;

 private:
  DRWElement emit(WorkTerm& t);
  WittScalar unit_frac(int64_t num, int64_t den) const;  // num/den, p coprime to den

  RingPtr ring_;
  int n_;
  const FqField* F_;
};

WittScalar Engine::unit_frac(int64_t num, int64_t den) const {
  WittScalar r = WittScalar::from_int(*F_, n_, num);
  if (den != 1) r = r * WittScalar::from_int(*F_, n_, den).inverse();
  return r;
}

WittPolyVector Engine::base_wpv(int u, const std::map<int, int64_t>& ex) const {
  WittPolyVector v(ring_, n_);
  if (u < n_) {
    Mono mo(ring_->nvars(), 0);
    for (auto& [var, e] : ex) mo[var] = e;
    v.set_coord(u, FqPoly::monomial(ring_->nvars(), mo, F_->one()));
  }
  return v;
}

WittPolyVector Engine::deg0_to_wpv(const DRWElement& e) const {
  WittPolyVector acc(ring_, n_);
  for (auto& [s, xi] : e.terms()) {
    WittPolyVector tv(ring_, n_);
    for (int i = 0; s.u0 + i < n_; ++i) {
      FqElem c = xi.coord(s.u0 + i);
      if (c.is_zero()) continue;
      Mono mo(ring_->nvars(), 0);
      int64_t sc = ipow64(ring_->p(), i);
      for (auto& [var, ee] : s.head) mo[var] = ee * sc;
      tv.set_coord(s.u0 + i, FqPoly::monomial(ring_->nvars(), mo, c));
    }
    acc = acc + tv;
  }
  return acc;
}

DRWElement Engine::wpv_to_deg0(const WittPolyVector& v) const {
  DRWElement out = zero(0);
  WittPolyVector cur = v;
  int p = ring_->p();
  for (int j = cur.ord_V(); j < n_; j = cur.ord_V()) {
    FqPoly f = cur.coord(j);
    WittPolyVector peel(ring_, n_);
    peel.set_coord(j, f);
    cur = cur - peel;
    for (auto& [mo, c] : f.terms()) {
      int vmin = j;
      bool constant = true;
      for (auto e : mo)
        if (e != 0) {
          constant = false;
          vmin = std::min(vmin, vp64(p, e));
        }
      TermShape s;
      if (!constant) {
        s.u0 = j - vmin;
        int64_t sc = ipow64(p, vmin);
        for (size_t var = 0; var < mo.size(); ++var)
          if (mo[var] != 0) s.head[(int)var] = mo[var] / sc;
      }
      WittScalar xi(F_, n_);
      xi.set_coord(j, c);
      out.add_term(s, xi);
    }
  }
  return out;
}

// --- emission: sort factors with Koszul parity, build the shape --------------

DRWElement Engine::emit(WorkTerm& t) {
  // sort key: dv first (u desc, fat before singleton, var asc), fd (var), dlog (var)
  auto key = [](const WFac& f) {
    long long g = f.kind;
    long long a = f.kind == 0 ? -f.ut : f.ut;
    long long b = f.fat() ? -1 : f.var();
    return std::tuple<long long, long long, long long>(g, a, b);
  };
  int sign = 1;
  // insertion sort counting swaps; all factors have degree 1
  for (size_t i = 1; i < t.facs.size(); ++i)
    for (size_t j = i; j > 0 && key(t.facs[j]) < key(t.facs[j - 1]); --j) {
      std::swap(t.facs[j], t.facs[j - 1]);
      sign = -sign;
    }
  int D = !t.head.empty() ? t.u0 : (!t.facs.empty() && t.facs[0].kind == 0 ? t.facs[0].ut : 0);
  WittScalar xi = t.alpha.mul_int(sign);
  if (D >= n_) return zero((int)t.facs.size());
  xi = xi.mul_int(ipow64(ring_->p(), D));
  DRWElement out = zero((int)t.facs.size());
  if (xi.is_zero()) return out;
  TermShape s;
  s.u0 = t.head.empty() ? 0 : t.u0;
  s.head = t.head;
  for (auto& f : t.facs) {
    if (f.kind == 0) {
      DVBlock b;
      b.u = f.ut;
      b.ex = f.ex;
      s.dv.push_back(b);
    } else if (f.kind == 1)
      s.fd.push_back({f.var(), f.ut, f.m()});
    else
      s.dlogs.push_back(f.var());
  }
  out.add_term(s, xi);
  return out;
}

// --- the rule loop ------------------------------------------------------------

DRWElement Engine::canon(WorkTerm t) {
  burn_fuel();
  int degree = (int)t.facs.size();
  if (t.alpha.is_zero()) return zero(degree);
  int p = ring_->p();

  // R1: cheap reparametrizations to a stable state
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = t.head.begin(); it != t.head.end();)
      it = it->second == 0 ? t.head.erase(it) : std::next(it);
    if (t.head.empty()) t.u0 = 0;
    if (!t.head.empty() && t.u0 > 0) {
      bool alldiv = true;
      for (auto& [v, e] : t.head) alldiv &= (e % p == 0);
      if (alldiv) {
        for (auto& [v, e] : t.head) e /= p;
        --t.u0;
        t.alpha = t.alpha.mul_int(p);
        changed = true;
      }
    }
    for (auto& f : t.facs) {
      for (auto it = f.ex.begin(); it != f.ex.end();)
        it = (f.kind != 2 && it->second == 0) ? f.ex.erase(it) : std::next(it);
      if (f.ex.empty()) throw NormalizationError("factor lost its variables");
      if (f.kind == 1 && f.m() % p == 0) {
        f.ex.begin()->second /= p;
        f.ut += 1;
        t.alpha = t.alpha.mul_int(p);
        changed = true;
      }
      if (f.kind == 0 && f.ut > 0) {
        bool alldiv = true;
        for (auto& [v, e] : f.ex) alldiv &= (e % p == 0);
        if (alldiv) {
          for (auto& [v, e] : f.ex) e /= p;
          f.ut -= 1;
          t.alpha = t.alpha.mul_int(p);
          changed = true;
        }
      }
      if (f.kind == 0 && f.ut == 0 && f.ex.size() == 1) {
        // dV^0([x]^m) = d([x]^m) with p coprime to m
        f.kind = 1;
        changed = true;
      }
    }
    if (t.alpha.is_zero()) return zero(degree);
  }

  // R2: two 1-form factors supported on the same single variable wedge to 0
  for (size_t i = 0; i < t.facs.size(); ++i)
    for (size_t j = i + 1; j < t.facs.size(); ++j)
      if (!t.facs[i].fat() && !t.facs[j].fat() && t.facs[i].var() == t.facs[j].var()) return zero(degree);

  auto extract_to_front = [&](size_t i) {
    WFac f = t.facs[i];
    t.facs.erase(t.facs.begin() + i);
    if (i % 2 == 1) t.alpha = -t.alpha;
    t.facs.insert(t.facs.begin(), f);
  };
  auto rest_after_front = [&](int k) {
    std::vector<WFac> rest(t.facs.begin() + k, t.facs.end());
    return rest;
  };
  auto attach_rest = [&](DRWElement e, const std::vector<WFac>& rest) {
    for (auto& f : rest) e = mul_fac(e, f);
    return e;
  };

  // R3: integral fat block dV^0(M), |M| >= 2: Leibniz split d(M) = sum
  for (size_t i = 0; i < t.facs.size(); ++i) {
    WFac& f = t.facs[i];
    if (f.kind == 0 && f.ut == 0 && f.ex.size() >= 2) {
      extract_to_front(i);
      WFac fat = t.facs[0];
      auto rest = rest_after_front(1);
      DRWElement acc = zero(degree);
      for (auto& [z, E] : fat.ex) {
        WorkTerm piece;
        piece.alpha = t.alpha * WittScalar::from_int(*F_, n_, E);
        piece.u0 = t.u0;
        piece.head = t.head;
        // monomial M/z joins the head at scale p^{u0}
        for (auto& [w, Ew] : fat.ex) {
          int64_t add = (w == z ? Ew - 1 : Ew) * ipow64(p, t.u0);
          if (add) piece.head[w] += add;
        }
        piece.facs.push_back(fd_fac(z, 0, 1));
        for (auto& rf : rest) piece.facs.push_back(rf);
        acc = acc + canon(std::move(piece));
      }
      return acc;
    }
  }

  // R4: head shallower than a dV factor: V^a(A)dV^b(B) = d(V^aA V^bB) - dV^a(A) V^b(B)
  if (!t.head.empty()) {
    size_t best = t.facs.size();
    int bu = t.u0;
    for (size_t i = 0; i < t.facs.size(); ++i)
      if (t.facs[i].kind == 0 && t.facs[i].ut > bu) {
        bu = t.facs[i].ut;
        best = i;
      }
    if (best < t.facs.size()) {
      extract_to_front(best);
      WFac f = t.facs[0];
      auto rest = rest_after_front(1);
      // deg0 element A with xi = p^{u0} alpha
      DRWElement A = zero(0);
      {
        TermShape hs;
        hs.u0 = t.u0;
        hs.head = t.head;
        WittScalar xi = t.alpha.mul_int(ipow64(p, t.u0));
        if (!xi.is_zero()) A.add_term(hs, xi);
      }
      DRWElement prod = wpv_to_deg0(deg0_to_wpv(A) * base_wpv(f.ut, f.ex));
      DRWElement piece1 = d(prod);
      DRWElement piece2 = mul_head(d(A), f.ut, f.ex);
      return attach_rest(piece1 - piece2, rest);
    }
  }

  // R5: fat blocks that are not the leading carrier, or fat with a head, or
  // fat sharing a variable with another factor -> d-trick / absorb-split
  for (size_t i = 0; i < t.facs.size(); ++i) {
    WFac& f = t.facs[i];
    if (!f.fat()) continue;
    bool shares = false;
    for (size_t j = 0; j < t.facs.size(); ++j)
      if (j != i)
        for (auto& [v, e] : t.facs[j].ex)
          if (f.ex.count(v)) shares = true;
    bool head_overlap = false;
    for (auto& [v, e] : t.head)
      if (f.ex.count(v)) head_overlap = true;
    int deepest = f.ut;
    for (auto& g : t.facs)
      if (g.kind == 0) deepest = std::max(deepest, g.ut);
    bool misplaced = (deepest > f.ut);

    if (!t.head.empty() && !head_overlap) {
      // absorb-split: V^{u0}(head) dV^u(M) = sum_i E_i V^{u0}(head*(M/z_i)^{p^{u0-u}}) dV^u([z_i])
      extract_to_front(i);
      WFac fat = t.facs[0];
      auto rest = rest_after_front(1);
      DRWElement acc = zero(degree);
      int64_t sc = ipow64(p, t.u0 - fat.ut);
      for (auto& [z, E] : fat.ex) {
        WorkTerm piece;
        piece.alpha = t.alpha * WittScalar::from_int(*F_, n_, E);
        piece.u0 = t.u0;
        piece.head = t.head;
        for (auto& [w, Ew] : fat.ex) {
          int64_t add = (w == z ? Ew - 1 : Ew) * sc;
          if (add) piece.head[w] += add;
        }
        piece.facs.push_back(dv_fac1(fat.ut, z, 1));
        for (auto& rf : rest) piece.facs.push_back(rf);
        acc = acc + canon(std::move(piece));
      }
      return acc;
    }
    if (!t.head.empty() || misplaced || shares) {
      // generic d-trick: pair the fat with the deepest dV factor (or the head)
      if (!t.head.empty()) {
        // head_overlap case: V^{u0}(head) dV^u(M) with shared z; u0 >= u by R4.
        extract_to_front(i);
        WFac fat = t.facs[0];
        auto rest = rest_after_front(1);
        WorkTerm inner;  // V^{u0}(head) * dV -> handled by absorb-split after
        // clearing overlap: merge shared variables by the pull rule below via
        // recursion: build element for head, multiply by the fat factor through
        // mul_head of its d... use: X = canon(head-only), then mul_fac(X, fat)
        WorkTerm h;
        h.alpha = t.alpha;
        h.u0 = t.u0;
        h.head = t.head;
        DRWElement X = canon(std::move(h));
        DRWElement Y = mul_fac(X, fat);
        return attach_rest(Y, rest);
      }
      // no head: pair with a deeper dV factor g
      size_t gi = t.facs.size();
      int gu = f.ut;
      for (size_t j = 0; j < t.facs.size(); ++j)
        if (j != i && t.facs[j].kind == 0 && t.facs[j].ut >= gu &&
            (misplaced ? t.facs[j].ut > f.ut : true)) {
          // prefer a deeper factor; for 'shares' any dv partner (or fd/dlog)
          gi = j;
          gu = t.facs[j].ut;
        }
      if (gi == t.facs.size() && shares) {
        // shared variable with a non-dv factor: pair with that factor
        for (size_t j = 0; j < t.facs.size() && gi == t.facs.size(); ++j)
          if (j != i)
            for (auto& [v, e] : t.facs[j].ex)
              if (f.ex.count(v)) gi = j;
      }
      if (gi < t.facs.size()) {
        // bring g to front, then fat right after: P = g * dV^u(M)
        extract_to_front(gi);
        // find fat again (it may have shifted)
        size_t fi2 = 0;
        for (size_t j = 1; j < t.facs.size(); ++j)
          if (t.facs[j].kind == 0 && t.facs[j].ex == f.ex && t.facs[j].ut == f.ut) {
            fi2 = j;
            break;
          }
        {
          WFac ff = t.facs[fi2];
          t.facs.erase(t.facs.begin() + fi2);
          if ((fi2 - 1) % 2 == 1) t.alpha = -t.alpha;  // move to slot 1
          t.facs.insert(t.facs.begin() + 1, ff);
        }
        WFac g = t.facs[0], fat = t.facs[1];
        auto rest = rest_after_front(2);
        // g (1-form) * fat(dV) = +- d( undone(g) * fat )  ... only dV g can be undone.
        if (g.kind == 0) {
          // dV^b(S) * dV^u(M) = d( V^b(S) * dV^u(M) )
          WorkTerm inner;
          inner.alpha = t.alpha;
          inner.u0 = g.ut;
          inner.head = g.ex;
          inner.facs.push_back(fat);
          DRWElement Q = canon(std::move(inner));
          return attach_rest(d(Q), rest);
        }
        // g is fd/dlog sharing a variable with the fat: use graded
        // commutativity to treat fat first: fat * g = - g * fat; compute
        // d(V^u(M) * g) = dV^u(M)*g (+ V^u(M)*dg = 0) and flip sign.
        WorkTerm inner;
        inner.alpha = -t.alpha;  // g * fat = - fat * g
        inner.u0 = fat.ut;
        inner.head = fat.ex;
        inner.facs.push_back(g);
        DRWElement Q = canon(std::move(inner));
        return attach_rest(d(Q), rest);
      }
      throw NormalizationError("fat block with no reduction partner");
    }
  }

  // R6: head-variable overlap with a (singleton) factor: pull into the block
  if (!t.head.empty()) {
    for (size_t i = 0; i < t.facs.size(); ++i) {
      WFac& f = t.facs[i];
      if (f.fat()) continue;
      int z = f.var();
      auto hit = t.head.find(z);
      if (hit == t.head.end()) continue;
      extract_to_front(i);
      WFac ff = t.facs[0];
      t.facs.erase(t.facs.begin());
      int64_t e = t.head[z];
      t.head.erase(z);
      int64_t w;
      int64_t scale;
      if (ff.kind == 0) {
        w = e + ipow64(p, t.u0 - ff.ut) * ff.m();
        scale = ff.m();
      } else if (ff.kind == 1) {
        w = e + ipow64(p, t.u0 + ff.ut) * ff.m();
        scale = ff.m();
      } else {
        w = e;
        scale = 1;
      }
      WFac nf = dlog_fac(z);
      if (w != 0) {
        int v = vp64(p, w);
        int64_t wp = w / ipow64(p, v);
        t.alpha = t.alpha * unit_frac(scale, wp);
        nf = (v < t.u0) ? dv_fac1(t.u0 - v, z, wp) : fd_fac(z, v - t.u0, wp);
      } else {
        t.alpha = t.alpha * WittScalar::from_int(*F_, n_, scale);
      }
      t.facs.insert(t.facs.begin(), nf);
      return canon(std::move(t));
    }
  }

  // R7: tie rule at the carrier depth
  {
    int D = !t.head.empty() ? t.u0 : 0;
    const std::map<int, int64_t>* carrier = nullptr;
    if (!t.head.empty() && t.u0 > 0) carrier = &t.head;
    if (t.head.empty()) {
      // carrier is the deepest dv factor; find it (sorted later, search now)
      size_t ci = t.facs.size();
      for (size_t i = 0; i < t.facs.size(); ++i)
        if (t.facs[i].kind == 0 && (ci == t.facs.size() || t.facs[i].ut > t.facs[ci].ut ||
                                    (t.facs[i].ut == t.facs[ci].ut &&
                                     (t.facs[i].fat() ||
                                      (!t.facs[ci].fat() && t.facs[i].var() < t.facs[ci].var())))))
          ci = i;
      if (ci < t.facs.size()) {
        D = t.facs[ci].ut;
        carrier = &t.facs[ci].ex;
      }
    }
    if (carrier) {
      int mp = -1;
      for (auto& [v, e] : *carrier)
        if (e % p != 0) {
          mp = v;
          break;
        }
      if (mp >= 0) {
        for (size_t i = 0; i < t.facs.size(); ++i) {
          WFac& f = t.facs[i];
          if (f.kind != 0 || f.fat() || f.ut != D || f.var() >= mp) continue;
          if (&f.ex == carrier) continue;
          int y = f.var();
          int64_t b = f.m();
          // merged monomial at depth D
          std::map<int, int64_t> M = *carrier;
          M[y] += b;
          extract_to_front(i);
          auto rest = rest_after_front(1);
          DRWElement acc = zero(degree);
          bool head_mode = !t.head.empty();
          for (auto& [zi, ei] : M) {
            if (zi == y) continue;
            int v = vp64(p, ei);
            int64_t eip = ei / ipow64(p, v);
            WorkTerm piece;
            piece.alpha = -t.alpha.mul_int(ipow64(p, v));
            std::map<int, int64_t> rem = M;
            rem.erase(zi);
            WFac blk = (v < D) ? dv_fac1(D - v, zi, eip) : fd_fac(zi, v - D, eip);
            if (head_mode) {
              piece.u0 = D;
              piece.head = rem;
              piece.facs.push_back(blk);
            } else {
              piece.u0 = 0;
              piece.facs.push_back(dv_fac(D, rem));
              piece.facs.push_back(blk);
            }
            for (auto& rf : rest) piece.facs.push_back(rf);
            acc = acc + canon(std::move(piece));
          }
          if (head_mode) {
            // + p^D * dV^D(M) * rest
            WorkTerm piece;
            piece.alpha = t.alpha.mul_int(ipow64(p, D));
            piece.u0 = 0;
            piece.facs.push_back(dv_fac(D, M));
            for (auto& rf : rest) piece.facs.push_back(rf);
            acc = acc + canon(std::move(piece));
          }
          return acc;
        }
      }
    }
  }

  return emit(t);
}

// --- derivative ----------------------------------------------------------------

DRWElement Engine::d(const DRWElement& e) {
  DRWElement out = zero(e.degree() + 1);
  int p = ring_->p();
  for (auto& [s, xi] : e.terms()) {
    if (s.head.empty()) continue;  // d of dV/Fd/dlog factors is zero; d(scalar)=0
    WorkTerm base;
    base.alpha = term_alpha(xi, s.carrier_depth());
    for (auto& b : s.dv) base.facs.push_back(dv_fac(b.u, b.ex));
    for (auto& b : s.fd) base.facs.push_back(fd_fac(b.var, b.t, b.m));
    for (int v2 : s.dlogs) base.facs.push_back(dlog_fac(v2));
    if (s.u0 >= 1) {
      WorkTerm tt = base;
      tt.u0 = 0;
      tt.facs.insert(tt.facs.begin(), dv_fac(s.u0, s.head));
      out = out + canon(std::move(tt));
    } else {
      // Leibniz over the integral head
      for (auto& [z, E] : s.head) {
        WorkTerm tt = base;
        tt.u0 = 0;
        tt.head = s.head;
        tt.head.erase(z);
        int v = vp64(p, E);
        int64_t Ep = E / ipow64(p, v);
        tt.alpha = tt.alpha * unit_frac(E, Ep);  // = p^v
        tt.head[z] += E - 1 - (E - 1);           // no residual: full pull below
        // [z]^{E-1} d[z] = (1/E') F^v d([z]^{E'}): residual exponent absorbed
        if (E - 1 != 0) {
          // put the residual z-exponent back in the head and let R6 merge:
          tt.head[z] = E - 1;
          tt.alpha = term_alpha(xi, s.carrier_depth()) * WittScalar::from_int(*F_, n_, E);
          tt.facs.insert(tt.facs.begin(), fd_fac(z, 0, 1));
        } else {
          tt.facs.insert(tt.facs.begin(), fd_fac(z, v, Ep));
          tt.alpha = term_alpha(xi, s.carrier_depth()) * unit_frac(E, Ep);
        }
        if (tt.head.count(z) && tt.head[z] == 0) tt.head.erase(z);
        out = out + canon(std::move(tt));
      }
    }
  }
  return out;
}

// --- products -------------------------------------------------------------------

DRWElement Engine::mul_head(const DRWElement& e, int u, const std::map<int, int64_t>& ex) {
  DRWElement out = zero(e.degree());
  WittPolyVector B = base_wpv(u, ex);
  for (auto& [s, xi] : e.terms()) {
    // split into deg-0 part and factors
    DRWElement A = zero(0);
    TermShape hs;
    hs.u0 = s.u0;
    hs.head = s.head;
    WittScalar xiA = s.head.empty() ? term_alpha(xi, s.carrier_depth()) : xi;
    if (!xiA.is_zero()) A.add_term(hs, xiA);
    DRWElement P = wpv_to_deg0(deg0_to_wpv(A) * B);
    for (auto& [ps, pxi] : P.terms()) {
      WorkTerm tt;
      tt.alpha = term_alpha(pxi, ps.u0);
      tt.u0 = ps.u0;
      tt.head = ps.head;
      for (auto& b : s.dv) tt.facs.push_back(dv_fac(b.u, b.ex));
      for (auto& b : s.fd) tt.facs.push_back(fd_fac(b.var, b.t, b.m));
      for (int v2 : s.dlogs) tt.facs.push_back(dlog_fac(v2));
      out = out + canon(std::move(tt));
    }
  }
  return out;
}

DRWElement Engine::mul_fac(const DRWElement& e, const WFac& f) {
  if (f.kind == 0) {
    // e * dV^u(M) = (-1)^{deg e} ( d(e * V^u(M)) - d(e) * V^u(M) )
    DRWElement X = mul_head(e, f.ut, f.ex);
    DRWElement Y = mul_head(d(e), f.ut, f.ex);
    DRWElement r = d(X) - Y;
    return (e.degree() % 2 == 1) ? -r : r;
  }
  DRWElement out = zero(e.degree() + 1);
  for (auto& [s, xi] : e.terms()) {
    WorkTerm tt;
    tt.alpha = term_alpha(xi, s.carrier_depth());
    tt.u0 = s.u0;
    tt.head = s.head;
    for (auto& b : s.dv) tt.facs.push_back(dv_fac(b.u, b.ex));
    for (auto& b : s.fd) tt.facs.push_back(fd_fac(b.var, b.t, b.m));
    for (int v2 : s.dlogs) tt.facs.push_back(dlog_fac(v2));
    tt.facs.push_back(f);
    out = out + canon(std::move(tt));
  }
  return out;
}

DRWElement Engine::mul(const DRWElement& a, const DRWElement& b) {
  if (a.degree() == 0 && b.degree() == 0) return wpv_to_deg0(deg0_to_wpv(a) * deg0_to_wpv(b));
  DRWElement out = zero(a.degree() + b.degree());
  for (auto& [sb, xib] : b.terms()) {
    DRWElement cur = el_scalar_mul(term_alpha(xib, sb.carrier_depth()), a);
    if (!sb.head.empty()) cur = mul_head(cur, sb.u0, sb.head);
    for (auto& blk : sb.dv) cur = mul_fac(cur, dv_fac(blk.u, blk.ex));
    for (auto& blk : sb.fd) cur = mul_fac(cur, fd_fac(blk.var, blk.t, blk.m));
    for (int v2 : sb.dlogs) cur = mul_fac(cur, dlog_fac(v2));
    out = out + cur;
  }
  return out;
}

}  // namespace

// --- public API -----------------------------------------------------------------

WittScalar term_alpha(const WittScalar& xi, int depth) {
  // alpha with p^depth * alpha = xi: strip V^depth, lift, untwist by sigma^-depth
  int n = xi.level();
  WittScalar a(xi.field(), n);
  for (int i = 0; i + depth < n; ++i) a.set_coord(i, xi.coord(i + depth));
  return a.sigma(-depth);
}

WittScalar xi_from_alpha(const WittScalar& alpha, int depth) {
  int64_t pd = 1;
  for (int i = 0; i < depth; ++i) pd *= alpha.field()->p();
  return alpha.mul_int(pd);
}

DRWElement el_zero(RingPtr ring, int level, int degree) { return DRWElement::zero(std::move(ring), level, degree); }

DRWElement el_scalar_elem(RingPtr ring, int level, const WittScalar& xi) {
  DRWElement e = DRWElement::zero(std::move(ring), level, 0);
  e.add_term(TermShape{}, xi);
  return e;
}

DRWElement el_one(RingPtr ring, int level) {
  const FqField& F = ring->field();
  return el_scalar_elem(std::move(ring), level, WittScalar::one(F, level));
}

DRWElement el_teich(RingPtr ring, int level, const FqPoly& f) {
  Engine eng(ring, level);
  FuelScope fuel(50'000'000);
  return eng.wpv_to_deg0(WittPolyVector::teich(ring, level, f));
}

DRWElement el_dlog_var(RingPtr ring, int level, int var) {
  if (!ring->laurent[var]) throw std::invalid_argument("dlog of a non-Laurent variable");
  DRWElement e = DRWElement::zero(ring, level, 1);
  TermShape s;
  s.dlogs.push_back(var);
  e.add_term(s, WittScalar::one(ring->field(), level));
  return e;
}

DRWElement el_scalar_mul(const WittScalar& alpha, const DRWElement& e) {
  DRWElement out = DRWElement::zero(e.ring(), e.level(), e.degree());
  for (auto& [s, xi] : e.terms()) out.add_term(s, alpha * xi);
  return out;
}

DRWElement el_int_mul(long long c, const DRWElement& e) {
  return el_scalar_mul(WittScalar::from_int(e.ring()->field(), e.level(), c), e);
}

DRWElement el_restrict(const DRWElement& e, int m) {
  DRWElement out = DRWElement::zero(e.ring(), m, e.degree());
  for (auto& [s, xi] : e.terms()) out.add_term(s, xi.restrict_to(m));
  return out;
}

namespace {

// shared shape transport for the two Frobenius flavours
DRWElement frobenius_impl(const DRWElement& e, bool same_level) {
  RingPtr ring = e.ring();
  int n = e.level();
  int outn = same_level ? n : n - 1;
  if (same_level && ring->field().a() != 1)
    throw std::invalid_argument("same-level Frobenius requires W(F_p) coefficients");
  if (!same_level && n < 2) throw std::invalid_argument("strict Frobenius needs level >= 2");
  Engine eng(ring, outn);
  FuelScope fuel(50'000'000);
  DRWElement out = DRWElement::zero(ring, outn, e.degree());
  int p = ring->p();
  for (auto& [s, xi] : e.terms()) {
    bool t2 = s.head.empty() && !s.dv.empty();
    WittScalar nxi = t2 ? [&] {
      WittScalar r(xi.field(), outn);
      for (int i = 0; i + 1 < n && i < outn; ++i) r.set_coord(i, xi.coord(i + 1));
      return r;
    }()
                        : [&] {
                            WittScalar r = xi.sigma(1);
                            return same_level ? r : r.restrict_to(outn);
                          }();
    if (nxi.is_zero()) continue;
    TermShape ns;
    ns.fd = s.fd;
    for (auto& b : ns.fd) b.t += 1;
    ns.dlogs = s.dlogs;
    if (!s.head.empty()) {
      if (s.u0 > 0) {
        ns.u0 = s.u0 - 1;
        ns.head = s.head;
      } else {
        ns.u0 = 0;
        for (auto& [v, ex] : s.head) ns.head[v] = ex * p;
      }
    }
    bool fat_split = false;
    std::vector<DVBlock> ndv;
    for (auto& b : s.dv) {
      if (b.u >= 2) {
        DVBlock nb = b;
        nb.u -= 1;
        ndv.push_back(nb);
      } else if (b.ex.size() == 1) {
        ns.fd.push_back({b.ex.begin()->first, 0, b.ex.begin()->second});
      } else {
        fat_split = true;  // leading fat block at depth 1 -> Leibniz split
      }
    }
    std::sort(ns.fd.begin(), ns.fd.end(), [](const FdBlock& a, const FdBlock& b) { return a.var < b.var; });
    if (!fat_split) {
      ns.dv = ndv;
      // sign: dv factors that became fd move across the remaining dv factors;
      // recompute via the worklist to stay uniform
      WorkTerm tt;
      tt.alpha = term_alpha(nxi, ns.head.empty() ? (ns.dv.empty() ? 0 : ns.dv[0].u) : ns.u0);
      // rebuild factor sequence in the ORIGINAL multiplication order to get signs right
      tt.u0 = ns.u0;
      tt.head = ns.head;
      tt.facs.clear();
      for (auto& b : s.dv) {
        if (b.u >= 2)
          tt.facs.push_back(dv_fac(b.u - 1, b.ex));
        else
          tt.facs.push_back(fd_fac(b.ex.begin()->first, 0, b.ex.begin()->second));
      }
      for (auto& b : s.fd) tt.facs.push_back(fd_fac(b.var, b.t + 1, b.m));
      for (int v2 : s.dlogs) tt.facs.push_back(dlog_fac(v2));
      // alpha from nxi at the carrier depth of the ORIGINAL transported term:
      int D = !tt.head.empty() ? tt.u0 : (!tt.facs.empty() && tt.facs[0].kind == 0 ? tt.facs[0].ut : 0);
      tt.alpha = term_alpha(nxi, D);
      out = out + eng.canon(std::move(tt));
    } else {
      // F(dV(eta*M)*rest) = d(eta*M) * F(rest)
      const DVBlock& fat = s.dv[0];
      DRWElement A = DRWElement::zero(ring, outn, 0);
      TermShape hs;
      hs.u0 = 0;
      hs.head = fat.ex;
      A.add_term(hs, nxi);
      DRWElement cur = eng.d(A);
      for (size_t j = 1; j < s.dv.size(); ++j) {
        const DVBlock& b = s.dv[j];
        cur = eng.mul_fac(cur, b.u >= 2 ? dv_fac(b.u - 1, b.ex)
                                        : fd_fac(b.ex.begin()->first, 0, b.ex.begin()->second));
      }
      for (auto& b : s.fd) cur = eng.mul_fac(cur, fd_fac(b.var, b.t + 1, b.m));
      for (int v2 : s.dlogs) cur = eng.mul_fac(cur, dlog_fac(v2));
      out = out + cur;
    }
  }
  return out;
}

}  // namespace

DRWElement el_frobenius(const DRWElement& e) { return frobenius_impl(e, false); }
DRWElement el_frobenius_same_level(const DRWElement& e) { return frobenius_impl(e, true); }

DRWElement el_verschiebung(const DRWElement& e) {
  RingPtr ring = e.ring();
  int n = e.level(), outn = n + 1;
  Engine eng(ring, outn);
  FuelScope fuel(50'000'000);
  DRWElement out = DRWElement::zero(ring, outn, e.degree());
  for (auto& [s, xi] : e.terms()) {
    bool dv_carrier = s.head.empty() && (!s.dv.empty() || std::any_of(s.fd.begin(), s.fd.end(),
                                                                      [](const FdBlock& b) { return b.t == 0; }));
    WittScalar nxi = xi.verschiebung();
    if (dv_carrier) nxi = nxi.mul_int(ring->p());
    if (nxi.is_zero()) continue;
    WorkTerm tt;
    tt.u0 = s.head.empty() ? 0 : s.u0 + 1;
    tt.head = s.head;
    for (auto& b : s.dv) tt.facs.push_back(dv_fac(b.u + 1, b.ex));
    for (auto& b : s.fd) {
      if (b.t >= 1)
        tt.facs.push_back(fd_fac(b.var, b.t - 1, b.m));
      else
        tt.facs.push_back(dv_fac1(1, b.var, b.m));
    }
    for (int v2 : s.dlogs) tt.facs.push_back(dlog_fac(v2));
    int D = !tt.head.empty() ? tt.u0 : 0;
    if (tt.head.empty())
      for (auto& f : tt.facs)
        if (f.kind == 0) D = std::max(D, f.ut);
    tt.alpha = term_alpha(nxi, D);
    out = out + eng.canon(std::move(tt));
  }
  return out;
}

DRWElement el_verschiebung_trunc(const DRWElement& e) { return el_restrict(el_verschiebung(e), e.level()); }

DRWElement el_d(const DRWElement& e) {
  Engine eng(e.ring(), e.level());
  FuelScope fuel(50'000'000);
  return eng.d(e);
}

DRWElement el_mul(const DRWElement& a, const DRWElement& b) {
  if (!a.ring()->same_as(*b.ring()) || a.level() != b.level())
    throw std::invalid_argument("el_mul: ring/level mismatch");
  Engine eng(a.ring(), a.level());
  FuelScope fuel(50'000'000);
  return eng.mul(a, b);
}

WittPolyVector to_witt_vector(const DRWElement& deg0) {
  if (deg0.degree() != 0) throw std::invalid_argument("to_witt_vector: degree != 0");
  Engine eng(deg0.ring(), deg0.level());
  return eng.deg0_to_wpv(deg0);
}

DRWElement from_witt_vector(const WittPolyVector& v) {
  Engine eng(v.ring(), v.level());
  FuelScope fuel(50'000'000);
  return eng.wpv_to_deg0(v);
}

}  // namespace drw
