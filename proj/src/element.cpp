#include "drw/element.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace drw {

namespace {
int64_t ipow64(int b, int e) {
  int64_t r = 1;
  while (e--) r *= b;
  return r;
}
int vp(int p, int64_t m) {
  if (m == 0) return -1;
  int v = 0;
  while (m % p == 0) {
    m /= p;
    ++v;
  }
  return v;
}
}  // namespace

std::map<int, WeightExp> TermShape::weight(int p) const {
  std::map<int, WeightExp> k;
  for (auto& [v, e] : head) k[v] = make_weight(p, e, u0);
  for (auto& b : dv)
    for (auto& [v, e] : b.ex) k[v] = make_weight(p, e, b.u);
  for (auto& b : fd) k[b.var] = {b.m * ipow64(p, b.t), 0};
  return k;
}

Rat TermShape::weight_size(int p) const {
  Rat s(0);
  for (auto& [v, w] : weight(p)) {
    (void)v;
    Rat a(w.num < 0 ? -w.num : w.num, ipow64(p, w.den_exp));
    s += a;
  }
  return s;
}

bool TermShape::weight_integral(int p) const {
  for (auto& [v, w] : weight(p)) {
    (void)v;
    if (w.den_exp > 0) return false;
  }
  return true;
}

bool TermShape::uses_var(int v) const {
  if (head.count(v)) return true;
  for (auto& b : dv)
    if (b.ex.count(v)) return true;
  for (auto& b : fd)
    if (b.var == v) return true;
  for (int d : dlogs)
    if (d == v) return true;
  return false;
}

std::string term_type_name(TermType t) {
  switch (t) {
    case TermType::P1: return "P1";
    case TermType::P2: return "P2";
    case TermType::P3: return "P3";
    case TermType::G1: return "G1";
    case TermType::G2a: return "G2a";
    case TermType::G2b: return "G2b";
    case TermType::G2c: return "G2c";
    case TermType::G3: return "G3";
    case TermType::G4: return "G4";
  }
  return "?";
}

TermType classify_term(const TermShape& s, const RingDecl& ring) {
  int p = ring.p();
  bool any_laurent = false;
  for (bool b : ring.laurent) any_laurent |= b;
  bool neg_head_frac = false, neg_head_int = false, neg_fd = false, neg_dv = false;
  for (auto& [v, e] : s.head) {
    (void)v;
    if (e < 0) (make_weight(p, e, s.u0).den_exp > 0 ? neg_head_frac : neg_head_int) = true;
  }
  for (auto& b : s.fd)
    if (b.m < 0) neg_fd = true;
  for (auto& b : s.dv)
    for (auto& [v, e] : b.ex) {
      (void)v;
      if (e < 0) neg_dv = true;
    }
  bool polynomial_shape = !neg_head_frac && !neg_head_int && !neg_fd && !neg_dv && s.dlogs.empty();
  if (!any_laurent || polynomial_shape) {
    // classical three types
    if (!s.head.empty()) return any_laurent ? TermType::G1 : TermType::P1;
    if (!s.dv.empty()) return any_laurent ? TermType::G1 : TermType::P2;
    return any_laurent ? TermType::G1 : TermType::P3;
  }
  if (!s.dlogs.empty()) return TermType::G2a;
  if (neg_head_frac || neg_dv) return s.head.empty() && !s.dv.empty() ? TermType::G4 : TermType::G3;
  if (neg_fd) return TermType::G2c;
  return TermType::G2b;
}

void DRWElement::add_term(const TermShape& s, const WittScalar& xi) {
  auto it = terms_.find(s);
  if (it == terms_.end()) {
    if (!xi.is_zero()) terms_.emplace(s, xi);
  } else {
    it->second = it->second + xi;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

DRWElement DRWElement::operator+(const DRWElement& o) const {
  if (level_ != o.level_ || degree_ != o.degree_ || (ring_ && o.ring_ && !ring_->same_as(*o.ring_)))
    throw std::invalid_argument("DRWElement: add mismatch (level/degree/ring)");
  DRWElement r = *this;
  for (auto& [s, xi] : o.terms_) r.add_term(s, xi);
  return r;
}

DRWElement DRWElement::operator-() const {
  DRWElement r(ring_, level_, degree_);
  for (auto& [s, xi] : terms_) r.terms_.emplace(s, -xi);
  return r;
}

// --- validation --------------------------------------------------------------

namespace {

int min_pfree_var(int p, const std::map<int, int64_t>& ex) {
  for (auto& [v, e] : ex)
    if (e % p != 0) return v;
  return -1;
}

void fail(const std::string& msg) { throw std::logic_error("canonical form violation: " + msg); }

void validate_shape(const RingDecl& ring, const TermShape& s, const WittScalar& xi, int level) {
  int p = ring.p();
  std::set<int> seen;
  auto touch = [&](int v) {
    if (v < 0 || v >= ring.nvars()) fail("variable index out of range");
    if (!seen.insert(v).second) fail("variable in two positions");
  };
  auto need_laurent = [&](int v, int64_t e) {
    if (e < 0 && !ring.laurent[v]) fail("negative exponent on non-Laurent variable");
  };
  if (s.head.empty() && s.u0 != 0) fail("empty head with u0 != 0");
  if (!s.head.empty()) {
    bool pfree = false;
    for (auto& [v, e] : s.head) {
      touch(v);
      need_laurent(v, e);
      if (e == 0) fail("zero exponent in head");
      if (e % p != 0) pfree = true;
    }
    if (s.u0 > 0 && !pfree) fail("head depth not minimal");
    if (s.u0 < 0) fail("negative head depth");
  }
  for (size_t j = 0; j < s.dv.size(); ++j) {
    const DVBlock& b = s.dv[j];
    if (b.u < 1) fail("dv depth < 1");
    if (b.ex.empty()) fail("empty dv block");
    if (b.ex.size() > 1 && (j > 0 || !s.head.empty())) fail("fat dv block not leading");
    bool pfree = false;
    for (auto& [v, e] : b.ex) {
      touch(v);
      need_laurent(v, e);
      if (e == 0) fail("zero exponent in dv block");
      if (e % p != 0) pfree = true;
    }
    if (!pfree) fail("dv depth not minimal");
    if (j > 0) {
      if (s.dv[j - 1].u < b.u) fail("dv blocks not sorted by depth");
      if (s.dv[j - 1].u == b.u && s.dv[j - 1].ex.rbegin()->first >= b.var())
        fail("equal-depth dv blocks not sorted by variable");
    }
    if (!s.head.empty() && s.u0 < b.u) fail("head shallower than dv block");
  }
  // tie rule at the carrier depth
  int D = s.carrier_depth();
  const std::map<int, int64_t>* carrier = nullptr;
  size_t first_noncarrier = 0;
  if (!s.head.empty() && s.u0 == D && D > 0) carrier = &s.head;
  if (s.head.empty() && !s.dv.empty()) {
    carrier = &s.dv[0].ex;
    first_noncarrier = 1;
  }
  if (carrier)
    for (size_t j = first_noncarrier; j < s.dv.size(); ++j)
      if (s.dv[j].u == D) {
        int mp = min_pfree_var(p, *carrier);
        if (mp >= 0 && s.dv[j].var() < mp) fail("tie rule: block variable below carrier");
      }
  for (size_t j = 0; j < s.fd.size(); ++j) {
    const FdBlock& b = s.fd[j];
    touch(b.var);
    need_laurent(b.var, b.m);
    if (b.m == 0 || b.m % p == 0) fail("fd exponent not p-free");
    if (b.t < 0) fail("negative fd twist");
    if (j > 0 && s.fd[j - 1].var >= b.var) fail("fd blocks not sorted");
  }
  for (size_t j = 0; j < s.dlogs.size(); ++j) {
    touch(s.dlogs[j]);
    if (!ring.laurent[s.dlogs[j]]) fail("dlog factor on non-Laurent variable");
    if (j > 0 && s.dlogs[j - 1] >= s.dlogs[j]) fail("dlog factors not sorted");
  }
  if (xi.is_zero()) fail("zero coefficient retained");
  if (xi.level() != level) fail("coefficient level mismatch");
  if (xi.ord_V() < D) fail("coefficient ord_V below carrier depth");
}

}  // namespace

void validate_canonical(const DRWElement& e) {
  for (auto& [s, xi] : e.terms()) {
    if (s.degree() != e.degree()) fail("term degree mismatch");
    validate_shape(*e.ring(), s, xi, e.level());
  }
}

// --- printing ----------------------------------------------------------------

namespace {

std::string mono_str(const RingDecl& ring, const std::map<int, int64_t>& ex) {
  std::string s;
  bool first = true;
  for (auto& [v, e] : ex) {
    if (!first) s += "*";
    first = false;
    s += ring.vars[v];
    if (e != 1) s += "^" + std::to_string(e);
  }
  return s.empty() ? "1" : s;
}

}  // namespace

std::string term_str(const RingDecl& ring, const TermShape& s, const WittScalar& xi) {
  // realization in the expression DSL; coefficient printed as Witt coordinates
  std::ostringstream os;
  os << "W" << xi.str();
  int D = s.carrier_depth();
  // print as W(coords)*BASE with the understanding xi = p^D * alpha; the
  // parser reconstructs alpha from xi and D.
  (void)D;
  if (!s.head.empty()) {
    os << "*";
    std::string inner = "[" + mono_str(ring, s.head) + "]";
    for (int i = 0; i < s.u0; ++i) inner = "V(" + inner + ")";
    os << inner;
  }
  for (auto& b : s.dv) {
    os << "*";
    std::string inner = "[" + mono_str(ring, b.ex) + "]";
    for (int i = 0; i < b.u; ++i) inner = "V(" + inner + ")";
    os << "d(" << inner << ")";
  }
  for (auto& b : s.fd) {
    std::string inner = "d([" + ring.vars[b.var] + (b.m != 1 ? "^" + std::to_string(b.m) : "") + "])";
    for (int i = 0; i < b.t; ++i) inner = "F(" + inner + ")";
    os << "*" << inner;
  }
  for (int v : s.dlogs) os << "*dlog(" << ring.vars[v] << ")";
  return os.str();
}

std::string DRWElement::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  bool first = true;
  for (auto& [sh, xi] : terms_) {
    if (!first) s += " + ";
    first = false;
    s += term_str(*ring_, sh, xi);
  }
  return s;
}

// --- enumeration -------------------------------------------------------------

namespace {

// all (raw, depth) pairs with |weight| <= kmax and depth < level
std::vector<std::pair<int64_t, int>> weight_choices(int p, int level, int kmax, bool laurent, bool frac_only,
                                                    bool int_only) {
  std::vector<std::pair<int64_t, int>> out;
  for (int u = 0; u < level; ++u) {
    if (frac_only && u == 0) continue;
    if (int_only && u > 0) break;
    int64_t pu = ipow64(p, u);
    for (int64_t m = 1; m <= kmax * pu; ++m) {
      if (u > 0 && m % p == 0) continue;  // canonical
      out.push_back({m, u});
      if (laurent) out.push_back({-m, u});
    }
  }
  return out;
}

}  // namespace

std::vector<TermShape> enumerate_shapes(const RingDecl& ring, int level, int degree, int kmax) {
  // Assign each variable a role: unused / head / dv-singleton / fd / dlog,
  // then a fat leading dv block over role-subsets when the head is empty.
  // Desk scale (<= 3 variables) keeps this tiny.
  int p = ring.p();
  int d = ring.nvars();
  std::vector<TermShape> out;
  // role: 0 unused, 1 head, 2 dv, 3 fd, 4 dlog
  std::vector<int> role(d, 0);
  auto emit = [&]() {
    // head exponents/depths and block data get enumerated per role pattern
    std::vector<int> headv, dvv, fdv, dlv;
    for (int i = 0; i < d; ++i) {
      if (role[i] == 1) headv.push_back(i);
      if (role[i] == 2) dvv.push_back(i);
      if (role[i] == 3) fdv.push_back(i);
      if (role[i] == 4) dlv.push_back(i);
    }
    for (int i : dlv)
      if (!ring.laurent[i]) return;
    if ((int)(dvv.size() + fdv.size() + dlv.size()) != degree) return;

    // enumerate exponents; to keep the count sane use per-variable choices
    std::vector<std::vector<std::pair<int64_t, int>>> hch, dch, fch;
    for (int i : headv) hch.push_back(weight_choices(p, level, kmax, ring.laurent[i], false, false));
    for (int i : dvv) dch.push_back(weight_choices(p, level, kmax, ring.laurent[i], true, false));
    for (int i : fdv) {
      std::vector<std::pair<int64_t, int>> ch;  // (m, t) with weight = m*p^t
      for (int t = 0; t < level + 1; ++t) {
        int64_t pt = ipow64(p, t);
        for (int64_t m = 1; m * pt <= kmax; ++m) {
          if (m % p == 0) continue;
          ch.push_back({m, t});
          if (ring.laurent[i]) ch.push_back({-m, t});
        }
      }
      fch.push_back(ch);
    }
    // cartesian product
    std::vector<size_t> idx(hch.size() + dch.size() + fch.size(), 0);
    auto dims = [&](size_t k) -> size_t {
      if (k < hch.size()) return hch[k].size();
      if (k < hch.size() + dch.size()) return dch[k - hch.size()].size();
      return fch[k - hch.size() - dch.size()].size();
    };
    for (size_t k = 0; k < idx.size(); ++k)
      if (dims(k) == 0) return;
    while (true) {
      TermShape s;
      // head: u0 = max depth among head vars
      int u0 = 0;
      for (size_t k = 0; k < hch.size(); ++k) u0 = std::max(u0, hch[k][idx[k]].second);
      bool ok = !headv.empty() || u0 == 0;
      if (!headv.empty()) {
        s.u0 = u0;
        bool pfree = false;
        for (size_t k = 0; k < hch.size(); ++k) {
          auto [m, u] = hch[k][idx[k]];
          int64_t raw = m * ipow64(p, u0 - u);
          s.head[headv[k]] = raw;
          if (raw % p != 0) pfree = true;
        }
        if (u0 > 0 && !pfree) ok = false;
      }
      if (ok) {
        for (size_t k = 0; k < dch.size(); ++k) {
          auto [m, u] = dch[k - 0][idx[hch.size() + k]];
          DVBlock b;
          b.u = u;
          b.ex[dvv[k]] = m;
          s.dv.push_back(b);
        }
        std::sort(s.dv.begin(), s.dv.end(), [](const DVBlock& a, const DVBlock& b) {
          if (a.u != b.u) return a.u > b.u;
          return a.ex.begin()->first < b.ex.begin()->first;
        });
        for (size_t k = 0; k < fch.size(); ++k) {
          auto [m, t] = fch[k][idx[hch.size() + dch.size() + k]];
          s.fd.push_back({fdv[k], t, m});
        }
        std::sort(s.fd.begin(), s.fd.end(), [](const FdBlock& a, const FdBlock& b) { return a.var < b.var; });
        s.dlogs = dlv;
        // structural constraints: depth order, tie rule, |k| bound
        bool good = true;
        if (!s.head.empty())
          for (auto& b : s.dv)
            if (b.u > s.u0) good = false;
        int D = s.carrier_depth();
        const std::map<int, int64_t>* carrier = nullptr;
        size_t fnc = 0;
        if (!s.head.empty() && s.u0 == D && D > 0) carrier = &s.head;
        if (s.head.empty() && !s.dv.empty()) {
          carrier = &s.dv[0].ex;
          fnc = 1;
        }
        if (carrier && good)
          for (size_t j = fnc; j < s.dv.size(); ++j)
            if (s.dv[j].u == D) {
              int mp = min_pfree_var(p, *carrier);
              if (mp >= 0 && s.dv[j].var() < mp) good = false;
            }
        if (good && s.weight_size(p) <= Rat(kmax)) out.push_back(s);
      }
      // advance
      size_t k = 0;
      for (; k < idx.size(); ++k) {
        if (++idx[k] < dims(k)) break;
        idx[k] = 0;
      }
      if (k == idx.size()) break;
      if (idx.empty()) break;
    }
    return;
  };
  // iterate over role assignments
  std::vector<int> stack;
  long long total = 1;
  for (int i = 0; i < d; ++i) total *= 5;
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    for (int i = 0; i < d; ++i) {
      role[i] = (int)(c % 5);
      c /= 5;
    }
    emit();
  }
  // fat leading blocks: head empty, one dv block holding >= 2 variables plus
  // singleton blocks/fd/dlog roles for the rest -- enumerate separately
  if (degree >= 1 && d >= 2) {
    // role: 5 = in fat block
    std::vector<int> role2(d, 0);
    long long tot2 = 1;
    for (int i = 0; i < d; ++i) tot2 *= 6;
    for (long long code = 0; code < tot2; ++code) {
      long long c = code;
      int fatcnt = 0;
      for (int i = 0; i < d; ++i) {
        role2[i] = (int)(c % 6);
        c /= 6;
        if (role2[i] == 5) ++fatcnt;
        if (role2[i] == 1) fatcnt = -1000;  // no head with fat block
      }
      if (fatcnt < 2) continue;
      std::vector<int> fatv, dvv, fdv, dlv;
      for (int i = 0; i < d; ++i) {
        if (role2[i] == 5) fatv.push_back(i);
        if (role2[i] == 2) dvv.push_back(i);
        if (role2[i] == 3) fdv.push_back(i);
        if (role2[i] == 4) dlv.push_back(i);
      }
      bool lau_ok = true;
      for (int i : dlv)
        if (!ring.laurent[i]) lau_ok = false;
      if (!lau_ok) continue;
      if ((int)(1 + dvv.size() + fdv.size() + dlv.size()) != degree) continue;
      for (int u = 1; u < level; ++u) {
        // fat exponents: nonzero, at least one p-free, |raw| <= kmax*p^u
        int64_t bound = std::min<int64_t>(kmax * ipow64(p, u), 6);
        std::vector<std::map<int, int64_t>> fatexp;
        std::vector<int64_t> cur(fatv.size(), 0);
        // simple odometer over [-bound, bound]^fat minus zeros
        std::vector<int64_t> vals;
        for (int64_t m = -bound; m <= bound; ++m)
          if (m != 0) vals.push_back(m);
        std::vector<size_t> ix(fatv.size(), 0);
        while (true) {
          std::map<int, int64_t> ex;
          bool pfree = false, lau = true;
          for (size_t k = 0; k < fatv.size(); ++k) {
            int64_t m = vals[ix[k]];
            if (m < 0 && !ring.laurent[fatv[k]]) lau = false;
            ex[fatv[k]] = m;
            if (m % p != 0) pfree = true;
          }
          if (pfree && lau) fatexp.push_back(ex);
          size_t k = 0;
          for (; k < ix.size(); ++k) {
            if (++ix[k] < vals.size()) break;
            ix[k] = 0;
          }
          if (k == ix.size()) break;
        }
        for (auto& fex : fatexp) {
          // remaining roles enumerated coarsely (depth-1 singleton choices)
          std::vector<std::vector<std::pair<int64_t, int>>> dch;
          for (int i : dvv) {
            auto ch = weight_choices(p, level, kmax, ring.laurent[i], true, false);
            std::vector<std::pair<int64_t, int>> keep;
            for (auto& [m, uu] : ch)
              if (uu <= u) keep.push_back({m, uu});
            dch.push_back(keep);
          }
          std::vector<std::vector<std::pair<int64_t, int>>> fch;
          for (int i : fdv) {
            std::vector<std::pair<int64_t, int>> ch;
            for (int t = 0; t < level; ++t) {
              int64_t pt = ipow64(p, t);
              for (int64_t m = 1; m * pt <= kmax; ++m) {
                if (m % p == 0) continue;
                ch.push_back({m, t});
                if (ring.laurent[i]) ch.push_back({-m, t});
              }
            }
            fch.push_back(ch);
          }
          bool empty = false;
          for (auto& c2 : dch)
            if (c2.empty()) empty = true;
          for (auto& c2 : fch)
            if (c2.empty()) empty = true;
          if (empty) continue;
          std::vector<size_t> ix2(dch.size() + fch.size(), 0);
          auto dims2 = [&](size_t k) { return k < dch.size() ? dch[k].size() : fch[k - dch.size()].size(); };
          while (true) {
            TermShape s;
            DVBlock fat;
            fat.u = u;
            fat.ex = fex;
            s.dv.push_back(fat);
            bool good = true;
            for (size_t k = 0; k < dch.size(); ++k) {
              auto [m, uu] = dch[k][ix2[k]];
              DVBlock b;
              b.u = uu;
              b.ex[dvv[k]] = m;
              s.dv.push_back(b);
            }
            std::sort(s.dv.begin() + 1, s.dv.end(), [](const DVBlock& a, const DVBlock& b) {
              if (a.u != b.u) return a.u > b.u;
              return a.ex.begin()->first < b.ex.begin()->first;
            });
            for (size_t j = 1; j < s.dv.size(); ++j)
              if (s.dv[j].u > u) good = false;
            int mp = min_pfree_var(p, fex);
            for (size_t j = 1; j < s.dv.size(); ++j)
              if (s.dv[j].u == u && s.dv[j].var() < mp) good = false;
            for (size_t k = 0; k < fch.size(); ++k) {
              auto [m, t] = fch[k][ix2[dch.size() + k]];
              s.fd.push_back({fdv[k], t, m});
            }
            std::sort(s.fd.begin(), s.fd.end(),
                      [](const FdBlock& a, const FdBlock& b) { return a.var < b.var; });
            s.dlogs = dlv;
            if (good && s.weight_size(p) <= Rat(kmax)) out.push_back(s);
            size_t k = 0;
            for (; k < ix2.size(); ++k) {
              if (++ix2[k] < dims2(k)) break;
              ix2[k] = 0;
            }
            if (k == ix2.size()) break;
            if (ix2.empty()) break;
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace drw
