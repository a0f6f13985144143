#include "tdg/present.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace tdg {

std::string tip_dir_str(TipDir d) { return d == TipDir::In ? "in" : "out"; }

bool split_tip_name(const std::string& name, std::string& walk, TipDir& dir) {
  auto dot = name.rfind('.');
  if (dot == std::string::npos || dot == 0) return false;
  std::string suffix = name.substr(dot + 1);
  if (suffix == "in")
    dir = TipDir::In;
  else if (suffix == "out")
    dir = TipDir::Out;
  else
    return false;
  walk = name.substr(0, dot);
  return true;
}

std::optional<int> eval_index(const Index& ix, std::optional<int> period,
                              std::optional<int> family) {
  switch (ix.base) {
    case Index::Base::Lit:
      return ix.offset;
    case Index::Base::Period:
      if (!period) return std::nullopt;
      return *period + ix.offset;
    case Index::Base::Family:
      if (!family) return std::nullopt;
      return *family + ix.offset;
  }
  return std::nullopt;
}

namespace {

std::string index_str(const Index& ix, const std::string& period_var,
                      const std::string& family_var) {
  std::string base;
  switch (ix.base) {
    case Index::Base::Lit:
      return std::to_string(ix.offset);
    case Index::Base::Period:
      base = period_var;
      break;
    case Index::Base::Family:
      base = family_var;
      break;
  }
  if (ix.offset > 0) return base + "+" + std::to_string(ix.offset);
  if (ix.offset < 0) return base + std::to_string(ix.offset);
  return base;
}

}  // namespace

std::string Ref::str() const {
  std::string s;
  if (!instance.empty()) {
    s += instance;
    if (fam) s += "[" + index_str(*fam, "k", "r") + "]";
    s += "." + name;
  } else {
    s += name;
    if (fam) s += "[" + index_str(*fam, "k", "r") + "]";
  }
  if (cell) s += "@" + index_str(*cell, "k", "r");
  return s;
}

const TemplateArc* CellTemplate::find_arc(const std::string& arc_id) const {
  for (const auto& a : arcs)
    if (a.id == arc_id) return &a;
  return nullptr;
}

bool CellTemplate::has_node(const std::string& node_id) const {
  return std::find(nodes.begin(), nodes.end(), node_id) != nodes.end();
}

ResolvedElem eval_ref(const Bundle& d, const Ref& r, std::optional<int> period,
                      std::optional<int> family) {
  ResolvedElem out;
  if (!r.instance.empty()) {
    auto it = d.instances.find(r.instance);
    if (it == d.instances.end()) {
      out.error = "unknown instance " + r.instance;
      return out;
    }
    const Instance& inst = it->second;
    auto tt = d.templates.find(inst.template_id);
    if (tt == d.templates.end()) {
      out.error = "instance " + inst.id + " has unknown template";
      return out;
    }
    std::string id = inst.id;
    if (inst.is_family) {
      if (!r.fam) {
        out.error = "family instance " + inst.id + " needs an index";
        return out;
      }
      auto f = eval_index(*r.fam, period, family);
      if (!f || *f < 0) {
        out.error = "family index of " + r.str() + " out of range";
        return out;
      }
      id += "[" + std::to_string(*f) + "]";
    } else if (r.fam) {
      out.error = "instance " + inst.id + " is not a family";
      return out;
    }
    if (!r.cell) {
      out.error = "template reference " + r.str() + " needs a cell";
      return out;
    }
    auto c = eval_index(*r.cell, period, family);
    if (!c || *c < 0) {
      out.error = "cell of " + r.str() + " out of range";
      return out;
    }
    if (tt->second.has_node(r.name))
      out.kind = ElemKind::VertexElem;
    else if (tt->second.find_arc(r.name))
      out.kind = ElemKind::StepElem;
    else {
      out.error = "template " + tt->second.id + " has no element " + r.name;
      return out;
    }
    out.id = id + "." + r.name + "@" + std::to_string(*c);
    out.valid = true;
    return out;
  }
  if (r.cell) {
    out.error = "cell index on non-template reference " + r.str();
    return out;
  }
  if (r.fam) {
    auto f = eval_index(*r.fam, period, family);
    if (!f || *f < 0) {
      out.error = "index of " + r.str() + " out of range";
      return out;
    }
    if (d.vertex_families.count(r.name)) {
      out.kind = ElemKind::VertexElem;
    } else if (auto w = d.walks.find(r.name);
               w != d.walks.end() && w->second.is_family) {
      out.kind = ElemKind::StepElem;
    } else {
      out.error = "unknown family " + r.name;
      return out;
    }
    out.id = r.name + "[" + std::to_string(*f) + "]";
    out.valid = true;
    return out;
  }
  if (d.vertices.count(r.name)) {
    out.kind = ElemKind::VertexElem;
  } else if (d.arcs.count(r.name) || d.walks.count(r.name)) {
    out.kind = ElemKind::StepElem;
  } else {
    out.error = "unknown element " + r.name;
    return out;
  }
  out.id = r.name;
  out.valid = true;
  return out;
}

// ---------------------------------------------------------------------------
// Unfolding

ConcreteDigraph unfold_template(const CellTemplate& t, int depth) {
  Bundle b;
  b.templates[t.id] = t;
  b.instances[t.id] = Instance{t.id, t.id, false, ""};
  return unfold_base(b, depth);
}

ConcreteDigraph unfold_base(const Bundle& d, int depth) {
  ConcreteDigraph g;
  std::set<std::string> verts;
  for (const auto& [id, v] : d.vertices)
    if (v.rank == Rank::finite(0)) verts.insert(id);

  auto add_instance_copy = [&](const Instance& inst, std::optional<int> f) {
    const CellTemplate& t = d.templates.at(inst.template_id);
    std::string prefix = inst.id;
    if (f) prefix += "[" + std::to_string(*f) + "]";
    for (int c = 0; c < depth; ++c)
      for (const auto& n : t.nodes)
        verts.insert(prefix + "." + n + "@" + std::to_string(c));
    for (int k = 0; k < depth; ++k) {
      for (const auto& a : t.arcs) {
        int tc = k + a.tail_off, hc = k + a.head_off;
        if (tc < 0 || hc < 0 || tc >= depth || hc >= depth) continue;
        g.arcs.push_back({prefix + "." + a.id + "@" + std::to_string(k),
                          prefix + "." + a.tail_node + "@" + std::to_string(tc),
                          prefix + "." + a.head_node + "@" + std::to_string(hc)});
      }
    }
  };

  for (const auto& [id, inst] : d.instances) {
    if (!d.templates.count(inst.template_id)) continue;
    if (inst.is_family) {
      for (int f = 0; f < depth; ++f) add_instance_copy(inst, f);
    } else {
      add_instance_copy(inst, std::nullopt);
    }
  }

  for (const auto& [id, a] : d.arcs) {
    auto te = eval_ref(d, a.tail, std::nullopt, std::nullopt);
    auto he = eval_ref(d, a.head, std::nullopt, std::nullopt);
    if (!te.valid || !he.valid) continue;
    if (!verts.count(te.id) || !verts.count(he.id)) continue;
    g.arcs.push_back({id, te.id, he.id});
  }

  g.vertices.assign(verts.begin(), verts.end());
  std::sort(g.arcs.begin(), g.arcs.end(),
            [](const auto& x, const auto& y) { return x.id < y.id; });
  return g;
}

// ---------------------------------------------------------------------------
// Denoted sequences

namespace {

Ref instantiate(const Ref& r, int t) {
  Ref out = r;
  if (out.fam && out.fam->base == Index::Base::Period)
    *out.fam = Index{Index::Base::Lit, out.fam->offset + t};
  if (out.cell && out.cell->base == Index::Base::Period)
    *out.cell = Index{Index::Base::Lit, out.cell->offset + t};
  return out;
}

std::vector<Ref> instantiate_block(const std::vector<Ref>& block, int t) {
  std::vector<Ref> out;
  out.reserve(block.size());
  for (const auto& r : block) out.push_back(instantiate(r, t));
  return out;
}

// Tail-order pattern of a side: always v s v s ..., first element the
// vertex nearest the finite part.
std::vector<Ref> tail_pattern(const WalkPresentation& p, TipDir side) {
  if (side == TipDir::Out) return p.out_rep;
  std::vector<Ref> rev(p.in_rep.rbegin(), p.in_rep.rend());
  return rev;
}

int side_anchor(const WalkPresentation& p, TipDir side) {
  return side == TipDir::Out ? p.out_anchor : p.in_anchor;
}

bool side_available(const WalkPresentation& p, TipDir side) {
  if (p.mode == WalkMode::Endless) return true;
  if (p.mode == WalkMode::ExtendedOut) return side == TipDir::Out;
  if (p.mode == WalkMode::ExtendedIn) return side == TipDir::In;
  return false;
}

std::string resolve_or_placeholder(const Bundle& d, const Ref& r,
                                   std::optional<int> period,
                                   std::optional<int> family) {
  auto e = eval_ref(d, r, period, family);
  if (e.valid) return e.id;
  throw DomainError("UnfoldError", e.error);
}

}  // namespace

std::vector<std::string> unfold_walk(const Bundle& d, const WalkPresentation& p,
                                     int periods, std::optional<int> family) {
  std::vector<std::string> seq;
  auto emit = [&](const std::vector<Ref>& refs, std::optional<int> t) {
    for (const auto& r : refs) seq.push_back(resolve_or_placeholder(d, r, t, family));
  };
  if (p.mode == WalkMode::ExtendedIn || p.mode == WalkMode::Endless) {
    for (int t = p.in_anchor + periods - 1; t >= p.in_anchor; --t)
      emit(p.in_rep, t);
  }
  emit(p.mid, std::nullopt);
  if (p.mode == WalkMode::ExtendedOut || p.mode == WalkMode::Endless) {
    for (int t = p.out_anchor; t < p.out_anchor + periods; ++t)
      emit(p.out_rep, t);
  }
  return seq;
}

std::vector<std::string> unfold_tail(const Bundle& d, const WalkPresentation& p,
                                     TipDir side, int periods,
                                     std::optional<int> family) {
  std::vector<std::string> seq;
  auto pat = tail_pattern(p, side);
  int a = side_anchor(p, side);
  for (int t = a; t < a + periods; ++t)
    for (const auto& r : pat)
      seq.push_back(resolve_or_placeholder(d, r, t, family));
  return seq;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

bool is_vertex_pos(std::size_t i) { return i % 2 == 0; }

// Checks one adjacent triple (v, s, v2) of a rank-0 denoted sequence for
// direction conformity: s must be an arc from v to v2.
void check_rank0_triple(const Bundle& d, const WalkPresentation& p,
                        const Ref& v, const Ref& s, const Ref& v2,
                        ValidationReport& rep) {
  auto ve = eval_ref(d, v, 0, 0);
  auto se = eval_ref(d, s, 0, 0);
  auto v2e = eval_ref(d, v2, 0, 0);
  if (!ve.valid || !se.valid || !v2e.valid) return;  // reported elsewhere
  std::string tail_id, head_id;
  if (!s.instance.empty()) {
    const Instance& inst = d.instances.at(s.instance);
    const CellTemplate& t = d.templates.at(inst.template_id);
    const TemplateArc* a = t.find_arc(s.name);
    if (!a) return;
    Ref tr = s, hr = s;
    tr.name = a->tail_node;
    hr.name = a->head_node;
    if (tr.cell) tr.cell->offset += a->tail_off;
    if (hr.cell) hr.cell->offset += a->head_off;
    tail_id = tr.str();
    head_id = hr.str();
    if (tail_id != v.str())
      rep.add("NonConformingDirection", p.id,
              "step " + s.str() + " does not leave " + v.str());
    if (head_id != v2.str())
      rep.add("NonConformingDirection", p.id,
              "step " + s.str() + " does not enter " + v2.str());
    return;
  }
  auto it = d.arcs.find(s.name);
  if (it == d.arcs.end()) {
    rep.add("BadIncidence", p.id, "step " + s.str() + " is not an arc");
    return;
  }
  if (!(it->second.tail == v))
    rep.add("NonConformingDirection", p.id,
            "arc " + s.name + " does not leave " + v.str());
  if (!(it->second.head == v2))
    rep.add("NonConformingDirection", p.id,
            "arc " + s.name + " does not enter " + v2.str());
}

void check_alternation(const Bundle& d, const WalkPresentation& p,
                       const std::vector<Ref>& refs, bool first_is_vertex,
                       ValidationReport& rep) {
  for (std::size_t i = 0; i < refs.size(); ++i) {
    auto e = eval_ref(d, refs[i], 0, p.is_family ? std::optional<int>(0)
                                                 : std::nullopt);
    if (!e.valid) {
      rep.add("UnknownElement", p.id, e.error);
      continue;
    }
    bool want_vertex = (i % 2 == 0) == first_is_vertex;
    if (want_vertex && e.kind != ElemKind::VertexElem)
      rep.add("BadAlternation", p.id, refs[i].str() + " is not a vertex");
    if (!want_vertex && e.kind != ElemKind::StepElem)
      rep.add("BadAlternation", p.id, refs[i].str() + " is not a step");
  }
}

}  // namespace

ValidationReport validate_presentation(const Bundle& d, const WalkPresentation& p) {
  ValidationReport rep;
  auto even = [](const std::vector<Ref>& v) { return v.size() % 2 == 0; };

  switch (p.mode) {
    case WalkMode::Finite:
      if (p.mid.empty() || even(p.mid)) {
        rep.add("BadShape", p.id, "finite walk body must be v s ... v");
        return rep;
      }
      if (!p.out_rep.empty() || !p.in_rep.empty())
        rep.add("BadShape", p.id, "finite walk with repetend");
      check_alternation(d, p, p.mid, true, rep);
      break;
    case WalkMode::ExtendedOut:
      if (p.out_rep.empty() || !even(p.out_rep)) {
        rep.add("MalformedPresentation", p.id, "out repetend must be v s ... v s");
        return rep;
      }
      if (!even(p.mid))
        rep.add("BadShape", p.id, "out prefix must be v s ... v s");
      check_alternation(d, p, p.mid, true, rep);
      check_alternation(d, p, p.out_rep, true, rep);
      break;
    case WalkMode::ExtendedIn:
      if (p.in_rep.empty() || !even(p.in_rep)) {
        rep.add("MalformedPresentation", p.id, "in repetend must be s v ... s v");
        return rep;
      }
      if (!even(p.mid))
        rep.add("BadShape", p.id, "in suffix must be s v ... s v");
      check_alternation(d, p, p.in_rep, false, rep);
      check_alternation(d, p, p.mid, false, rep);
      break;
    case WalkMode::Endless:
      if (p.in_rep.empty() || p.out_rep.empty() || !even(p.in_rep) ||
          !even(p.out_rep)) {
        rep.add("MalformedPresentation", p.id, "endless walk needs both repetends");
        return rep;
      }
      if (p.mid.empty() || even(p.mid)) {
        rep.add("BadShape", p.id, "endless middle must be s (v s)*");
        return rep;
      }
      check_alternation(d, p, p.in_rep, false, rep);
      check_alternation(d, p, p.mid, false, rep);
      check_alternation(d, p, p.out_rep, true, rep);
      break;
  }
  if (!rep.ok()) return rep;

  if (p.rank == Rank::finite(0)) {
    // Sample the denoted sequence over three periods per side and check
    // every adjacent triple.
    int periods = 3;
    std::vector<Ref> seq;
    if (p.mode == WalkMode::ExtendedIn || p.mode == WalkMode::Endless)
      for (int t = p.in_anchor + periods - 1; t >= p.in_anchor; --t)
        for (auto& r : instantiate_block(p.in_rep, t)) seq.push_back(r);
    for (const auto& r : p.mid) seq.push_back(r);
    if (p.mode == WalkMode::ExtendedOut || p.mode == WalkMode::Endless)
      for (int t = p.out_anchor; t < p.out_anchor + periods; ++t)
        for (auto& r : instantiate_block(p.out_rep, t)) seq.push_back(r);
    if (p.mode == WalkMode::Finite) seq = p.mid;

    // Vertex positions are even when the sampled sequence opens with a
    // vertex (finite and out modes); in and endless samples open with the
    // far step of the in side.
    bool starts_with_vertex =
        (p.mode == WalkMode::Finite || p.mode == WalkMode::ExtendedOut);
    for (std::size_t i = starts_with_vertex ? 0 : 1; i + 2 < seq.size();
         i += 2)
      check_rank0_triple(d, p, seq[i], seq[i + 1], seq[i + 2], rep);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Canonicalization and eventual identity

namespace {

std::string atom_key(const Ref& r, int period_rebase, int family_rebase) {
  std::ostringstream os;
  os << r.name << '|' << r.instance << '|';
  auto slot = [&](const std::optional<Index>& ix) {
    if (!ix) {
      os << '-';
      return;
    }
    switch (ix->base) {
      case Index::Base::Lit:
        os << 'L' << ix->offset;
        break;
      case Index::Base::Period:
        os << 'P' << (ix->offset - period_rebase);
        break;
      case Index::Base::Family:
        os << 'F' << (ix->offset - family_rebase);
        break;
    }
  };
  slot(r.fam);
  os << '|';
  slot(r.cell);
  return os.str();
}

int min_family_offset(const std::vector<Ref>& refs) {
  int m = INT32_MAX;
  for (const auto& r : refs) {
    if (r.fam && r.fam->base == Index::Base::Family)
      m = std::min(m, r.fam->offset);
    if (r.cell && r.cell->base == Index::Base::Family)
      m = std::min(m, r.cell->offset);
  }
  return m == INT32_MAX ? 0 : m;
}

// Serializes one rotation of the cyclic tail pattern, canonical period
// rebase applied.
std::string serialize_rotation(const std::vector<Ref>& flat, std::size_t start_pair,
                               int family_rebase) {
  std::size_t npairs = flat.size() / 2;
  std::vector<Ref> rot;
  std::vector<int> bump;
  for (std::size_t i = 0; i < npairs; ++i) {
    std::size_t pi = (start_pair + i) % npairs;
    int b = (start_pair + i) >= npairs ? 1 : 0;
    rot.push_back(flat[2 * pi]);
    rot.push_back(flat[2 * pi + 1]);
    bump.push_back(b);
    bump.push_back(b);
  }
  // Apply bumps, find min period offset, rebase.
  int minp = INT32_MAX;
  for (std::size_t i = 0; i < rot.size(); ++i) {
    auto probe = [&](std::optional<Index>& ix) {
      if (ix && ix->base == Index::Base::Period) {
        ix->offset += bump[i];
        minp = std::min(minp, ix->offset);
      }
    };
    probe(rot[i].fam);
    probe(rot[i].cell);
  }
  if (minp == INT32_MAX) minp = 0;
  std::string s;
  for (const auto& r : rot) s += atom_key(r, minp, family_rebase) + ";";
  return s;
}

std::string canonical_cycle(const std::vector<Ref>& flat, int family_rebase,
                            std::size_t* best_rotation = nullptr) {
  std::size_t npairs = flat.size() / 2;
  std::string best;
  std::size_t besti = 0;
  for (std::size_t i = 0; i < npairs; ++i) {
    std::string s = serialize_rotation(flat, i, family_rebase);
    if (i == 0 || s < best) {
      best = s;
      besti = i;
    }
  }
  if (best_rotation) *best_rotation = besti;
  return best;
}

}  // namespace

std::pair<std::string, int> canonical_tail_key(const Bundle& d,
                                               const WalkPresentation& p,
                                               TipDir side) {
  (void)d;
  if (!side_available(p, side))
    throw DomainError("ModeMismatch",
                      p.id + " has no " + tip_dir_str(side) + " side");
  auto flat = tail_pattern(p, side);
  if (flat.empty())
    throw DomainError("MalformedPresentation", p.id + " has an empty repetend");
  int famre = p.is_family ? min_family_offset(flat) : 0;
  std::string key = tip_dir_str(side) + "/" + p.rank.str() + "/" +
                    canonical_cycle(flat, famre);
  return {key, famre};
}

bool is_extended(const Bundle& d, const WalkPresentation& p, TipDir side) {
  (void)d;
  if (!side_available(p, side)) return false;
  auto flat = tail_pattern(p, side);
  if (flat.empty()) return false;
  std::set<std::string> vseen, sseen;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const Ref& r = flat[i];
    bool has_period = (r.fam && r.fam->base == Index::Base::Period) ||
                      (r.cell && r.cell->base == Index::Base::Period);
    if (!has_period) return false;
    // Identity modulo the period offset: same name/instance/non-period
    // slots at two different period offsets collide across periods.
    Ref stripped = r;
    if (stripped.fam && stripped.fam->base == Index::Base::Period)
      stripped.fam->offset = 0;
    if (stripped.cell && stripped.cell->base == Index::Base::Period)
      stripped.cell->offset = 0;
    std::string k = atom_key(stripped, 0, 0);
    auto& seen = is_vertex_pos(i) ? vseen : sseen;
    if (!seen.insert(k).second) return false;
  }
  return true;
}

bool eventually_identical(const Bundle& d, const WalkPresentation& p,
                          const WalkPresentation& q, TipDir side) {
  if (p.rank != q.rank)
    throw DomainError("ModeMismatch", p.id + " and " + q.id + " differ in rank");
  if (!side_available(p, side) || !side_available(q, side))
    throw DomainError("ModeMismatch", "missing " + tip_dir_str(side) + " side");
  return canonical_tail_key(d, p, side).first ==
         canonical_tail_key(d, q, side).first;
}

bool eventually_identical_oracle(const Bundle& d, const WalkPresentation& p,
                                 const WalkPresentation& q, TipDir side,
                                 int bound) {
  if (p.rank != q.rank)
    throw DomainError("ModeMismatch", p.id + " and " + q.id + " differ in rank");
  if (!side_available(p, side) || !side_available(q, side))
    throw DomainError("ModeMismatch", "missing " + tip_dir_str(side) + " side");
  auto rp = tail_pattern(p, side), rq = tail_pattern(q, side);
  int ap = side_anchor(p, side), aq = side_anchor(q, side);
  if (bound <= 0) {
    int lcm = static_cast<int>(std::lcm(rp.size() / 2, rq.size() / 2));
    bound = static_cast<int>(p.mid.size() + q.mid.size()) + 2 * lcm * 2;
  }
  // Anchor differences shift the alignment by whole periods.
  bound += std::abs(ap - aq) *
           static_cast<int>(std::max(rp.size(), rq.size()));
  std::optional<int> fam;
  if (p.is_family || q.is_family) fam = 0;
  int periods_p = (2 * bound) / static_cast<int>(rp.size()) + 2;
  int periods_q = (2 * bound) / static_cast<int>(rq.size()) + 2;
  auto tp = unfold_tail(d, p, side, periods_p, p.is_family ? fam : std::nullopt);
  auto tq = unfold_tail(d, q, side, periods_q, q.is_family ? fam : std::nullopt);
  std::size_t len = std::min(tp.size(), tq.size());
  for (int shift = -bound; shift <= bound; ++shift) {
    bool match = true;
    bool any = false;
    for (std::size_t m = bound; m < len; ++m) {
      long mq = static_cast<long>(m) + shift;
      if (mq < 0 || mq >= static_cast<long>(tq.size())) continue;
      any = true;
      if (tp[m] != tq[static_cast<std::size_t>(mq)]) {
        match = false;
        break;
      }
    }
    if (match && any) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// normalize

namespace {

// Absorbs adjacent full repetend blocks from the finite part into the
// repetend, lowering the anchor.
void absorb(const Bundle& d, WalkPresentation& p, TipDir side) {
  (void)d;
  bool out = side == TipDir::Out;
  auto& rep = out ? p.out_rep : p.in_rep;
  int& anchor = out ? p.out_anchor : p.in_anchor;
  std::size_t len = rep.size();
  if (len == 0) return;
  for (;;) {
    if (p.mid.size() < len) return;
    auto block = instantiate_block(rep, anchor - 1);
    // Cells must stay in range.
    for (const auto& r : block) {
      if (r.cell && r.cell->base == Index::Base::Lit && r.cell->offset < 0)
        return;
      if (r.fam && r.fam->base == Index::Base::Lit && r.fam->offset < 0) return;
    }
    bool eq = true;
    if (out) {
      for (std::size_t i = 0; i < len; ++i)
        if (!(p.mid[p.mid.size() - len + i] == block[i])) {
          eq = false;
          break;
        }
      if (!eq) return;
      p.mid.resize(p.mid.size() - len);
    } else {
      for (std::size_t i = 0; i < len; ++i)
        if (!(p.mid[i] == block[i])) {
          eq = false;
          break;
        }
      if (!eq) return;
      p.mid.erase(p.mid.begin(), p.mid.begin() + static_cast<long>(len));
    }
    anchor -= 1;
  }
}

// Rewrites a side so its repetend starts at the canonical rotation while
// denoting the same walk; surplus elements move into the finite part.
void canonicalize_rotation(WalkPresentation& p, TipDir side) {
  bool out = side == TipDir::Out;
  auto& rep = out ? p.out_rep : p.in_rep;
  int& anchor = out ? p.out_anchor : p.in_anchor;
  if (rep.empty()) return;
  auto flat = tail_pattern(p, side);
  int famre = p.is_family ? min_family_offset(flat) : 0;
  std::size_t rot = 0;
  canonical_cycle(flat, famre, &rot);
  if (rot == 0) return;
  std::size_t npairs = flat.size() / 2;
  // New tail pattern: pairs rot..end at t, pairs 0..rot-1 at t+1.
  std::vector<Ref> nf;
  for (std::size_t i = 0; i < npairs; ++i) {
    std::size_t pi = (rot + i) % npairs;
    Ref a = flat[2 * pi], b = flat[2 * pi + 1];
    if (rot + i >= npairs) {
      auto bump = [](std::optional<Index>& ix) {
        if (ix && ix->base == Index::Base::Period) ix->offset += 1;
      };
      bump(a.fam);
      bump(a.cell);
      bump(b.fam);
      bump(b.cell);
    }
    nf.push_back(a);
    nf.push_back(b);
  }
  // Leftover pairs 0..rot-1 instantiated at the old anchor join the finite
  // part adjacent to the repetend.
  std::vector<Ref> leftover;
  for (std::size_t i = 0; i < rot; ++i) {
    leftover.push_back(instantiate(flat[2 * i], anchor));
    leftover.push_back(instantiate(flat[2 * i + 1], anchor));
  }
  if (out) {
    p.out_rep = nf;
    for (const auto& r : leftover) p.mid.push_back(r);
  } else {
    // Tail order back to sequence order.
    std::vector<Ref> seq_rep(nf.rbegin(), nf.rend());
    p.in_rep = seq_rep;
    std::vector<Ref> seq_left(leftover.rbegin(), leftover.rend());
    for (std::size_t i = 0; i < seq_left.size(); ++i)
      p.mid.insert(p.mid.begin() + static_cast<long>(i), seq_left[i]);
  }
}

}  // namespace

WalkPresentation normalize(const Bundle& d, const WalkPresentation& p) {
  WalkPresentation n = p;
  if (n.mode == WalkMode::Finite) return n;
  if ((n.mode != WalkMode::ExtendedIn && n.out_rep.empty()) ||
      (n.mode != WalkMode::ExtendedOut && n.in_rep.empty()))
    throw DomainError("MalformedPresentation",
                      p.id + ": empty repetend for an infinite mode");
  if (n.mode == WalkMode::ExtendedOut || n.mode == WalkMode::Endless) {
    canonicalize_rotation(n, TipDir::Out);
    absorb(d, n, TipDir::Out);
  }
  if (n.mode == WalkMode::ExtendedIn || n.mode == WalkMode::Endless) {
    canonicalize_rotation(n, TipDir::In);
    absorb(d, n, TipDir::In);
  }
  return n;
}

// ---------------------------------------------------------------------------
// Ditips

std::vector<Ditip> compute_ditips(const Bundle& d, Rank rank) {
  struct Entry {
    std::string walk;
    int famre;
    bool famdep;
  };
  std::map<std::string, std::vector<Entry>> classes;
  for (const auto& [id, w] : d.walks) {
    if (w.rank != rank || w.mode == WalkMode::Finite) continue;
    for (TipDir side : {TipDir::In, TipDir::Out}) {
      if (!side_available(w, side)) continue;
      if (!is_extended(d, w, side)) continue;
      auto [key, famre] = canonical_tail_key(d, w, side);
      bool famdep = false;
      if (w.is_family) {
        for (const auto& r : tail_pattern(w, side)) {
          if ((r.fam && r.fam->base == Index::Base::Family) ||
              (r.cell && r.cell->base == Index::Base::Family))
            famdep = true;
        }
      }
      // Family walks whose tails do not depend on the family index denote
      // the same tail for every member; their tips collapse to one class.
      classes[key].push_back({id, famdep ? famre : 0, famdep});
    }
  }
  std::vector<Ditip> tips;
  for (auto& [key, entries] : classes) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.walk < b.walk; });
    Ditip t;
    t.dir = key.rfind("in/", 0) == 0 ? TipDir::In : TipDir::Out;
    t.rank = rank;
    t.is_family = entries.front().famdep;
    for (const auto& e : entries)
      t.members.push_back({e.walk, entries.front().famre - e.famre});
    t.id = entries.front().walk + "." + tip_dir_str(t.dir);
    tips.push_back(std::move(t));
  }
  std::sort(tips.begin(), tips.end(),
            [](const Ditip& a, const Ditip& b) { return a.id < b.id; });
  return tips;
}

ResolvedTip resolve_tip_ref(const std::vector<Ditip>& tips, const Ref& r) {
  ResolvedTip out;
  std::string walk;
  TipDir dir;
  if (!split_tip_name(r.name, walk, dir)) {
    out.error = r.name + " is not a tip reference";
    return out;
  }
  for (const auto& t : tips) {
    if (t.dir != dir) continue;
    for (const auto& m : t.members) {
      if (m.walk != walk) continue;
      out.tip_id = t.id;
      if (t.is_family) {
        if (!r.fam) {
          out.error = "tip " + t.id + " is a family, reference needs an index";
          return out;
        }
        Index adj = *r.fam;
        adj.offset -= m.fam_delta;
        out.index = adj;
      } else if (r.fam) {
        out.error = "tip " + t.id + " is not a family";
        return out;
      }
      out.valid = true;
      return out;
    }
  }
  out.error = "no declared tip matches " + r.str();
  return out;
}

}  // namespace tdg
