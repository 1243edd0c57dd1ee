#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "drw/fq.hpp"

namespace drw {

// Ambient ring F_q[x_1..x_d] with per-variable Laurent flags.
struct RingDecl {
  PrimePower pq;
  std::vector<std::string> vars;
  std::vector<bool> laurent;

  RingDecl(PrimePower pq_, std::vector<std::string> vars_, std::vector<bool> laurent_)
      : pq(pq_), vars(std::move(vars_)), laurent(std::move(laurent_)) {
    if (laurent.size() != vars.size()) throw std::invalid_argument("RingDecl: flag count mismatch");
  }

  int nvars() const { return (int)vars.size(); }
  const FqField& field() const { return FqField::get(pq); }
  int p() const { return pq.p; }

  int var_index(const std::string& name) const {
    for (int i = 0; i < nvars(); ++i)
      if (vars[i] == name) return i;
    return -1;
  }

  bool same_as(const RingDecl& o) const { return pq == o.pq && vars == o.vars && laurent == o.laurent; }
};

using RingPtr = std::shared_ptr<const RingDecl>;

inline RingPtr make_ring(int p, int a, std::vector<std::string> vars, std::vector<bool> laurent) {
  return std::make_shared<const RingDecl>(PrimePower(p, a), std::move(vars), std::move(laurent));
}

inline RingPtr make_poly_ring(int p, int a, std::vector<std::string> vars) {
  std::vector<bool> fl(vars.size(), false);
  return make_ring(p, a, std::move(vars), std::move(fl));
}

inline RingPtr make_laurent_ring(int p, int a, std::vector<std::string> vars) {
  std::vector<bool> fl(vars.size(), true);
  return make_ring(p, a, std::move(vars), std::move(fl));
}

}  // namespace drw
