#include "tdg/walk.hpp"

#include <algorithm>
#include <map>

namespace tdg {

std::string termination_str(Termination t) {
  switch (t) {
    case Termination::TwoEnded:
      return "two-ended";
    case Termination::OneEndedLeft:
      return "one-ended-left";
    case Termination::OneEndedRight:
      return "one-ended-right";
    case Termination::Endless:
      return "endless";
  }
  return "?";
}

namespace {

struct ElemInfo {
  Ref ref;
  ElemKind kind = ElemKind::Unknown;
  Rank rank = Rank::finite(0);          // vertex rank, or walk/arc step rank
  const WalkPresentation* walk = nullptr;  // for walk steps
  std::optional<int> fam_index;            // literal family index if any
};

ElemInfo resolve_element(const Bundle& d, const std::string& text) {
  ElemInfo e;
  if (!parse_ref(text, e.ref))
    throw DomainError("UnknownElement", "cannot parse element " + text);
  auto res = eval_ref(d, e.ref, std::nullopt, std::nullopt);
  if (!res.valid) throw DomainError("UnknownElement", res.error);
  e.kind = res.kind;
  if (e.ref.fam && e.ref.fam->base == Index::Base::Lit)
    e.fam_index = e.ref.fam->offset;
  if (!e.ref.instance.empty()) {
    const Instance& inst = d.instances.at(e.ref.instance);
    const CellTemplate& t = d.templates.at(inst.template_id);
    e.rank = t.has_node(e.ref.name) ? Rank::finite(0) : Rank::finite(-1);
    if (e.kind == ElemKind::StepElem) e.rank = Rank::finite(-1);  // arc step
    return e;
  }
  if (e.kind == ElemKind::VertexElem) {
    if (e.ref.fam)
      e.rank = d.vertex_families.at(e.ref.name).rank;
    else
      e.rank = d.vertices.at(e.ref.name).rank;
    return e;
  }
  if (d.arcs.count(e.ref.name)) {
    e.rank = Rank::finite(-1);
    return e;
  }
  auto w = d.walks.find(e.ref.name);
  if (w != d.walks.end()) {
    e.walk = &w->second;
    e.rank = w->second.rank;
    return e;
  }
  throw DomainError("UnknownElement", text);
}

// Endpoint vertices of a step on each side, when the step has a finite end
// there: arcs always have both; walk steps have ends per mode, given by the
// first/last element of the denoted sequence.
std::optional<std::string> step_end(const Bundle& d, const ElemInfo& s,
                                    bool left) {
  if (s.walk == nullptr) {
    // Arc (concrete or template).
    if (!s.ref.instance.empty()) {
      const Instance& inst = d.instances.at(s.ref.instance);
      const CellTemplate& t = d.templates.at(inst.template_id);
      const TemplateArc* a = t.find_arc(s.ref.name);
      Ref v = s.ref;
      v.name = left ? a->tail_node : a->head_node;
      if (v.cell) v.cell->offset += left ? a->tail_off : a->head_off;
      auto res = eval_ref(d, v, std::nullopt, std::nullopt);
      if (!res.valid) return std::nullopt;
      return res.id;
    }
    const Arc& a = d.arcs.at(s.ref.name);
    auto res = eval_ref(d, left ? a.tail : a.head, std::nullopt, std::nullopt);
    if (!res.valid) return std::nullopt;
    return res.id;
  }
  const WalkPresentation& w = *s.walk;
  bool has_left =
      w.mode == WalkMode::Finite || w.mode == WalkMode::ExtendedOut;
  bool has_right = w.mode == WalkMode::Finite || w.mode == WalkMode::ExtendedIn;
  if (left && !has_left) return std::nullopt;
  if (!left && !has_right) return std::nullopt;
  auto seq = unfold_walk(d, w, 1, s.fam_index);
  if (seq.empty()) return std::nullopt;
  return left ? seq.front() : seq.back();
}

bool step_infinite_side(const ElemInfo& s, TipDir side) {
  if (s.walk == nullptr) return false;
  if (side == TipDir::In)
    return s.walk->mode == WalkMode::ExtendedIn ||
           s.walk->mode == WalkMode::Endless;
  return s.walk->mode == WalkMode::ExtendedOut ||
         s.walk->mode == WalkMode::Endless;
}

}  // namespace

bool vertex_contains_tip(const Bundle& d, const std::vector<Ditip>& tips,
                         const Ref& vertex, const std::string& walk_id,
                         std::optional<int> walk_index, TipDir dir) {
  Ref tipref;
  tipref.name = walk_id + "." + tip_dir_str(dir);
  if (walk_index) tipref.fam = Index{Index::Base::Lit, *walk_index};
  auto rt = resolve_tip_ref(tips, tipref);
  if (!rt.valid) return false;

  const std::vector<Ref>* members = nullptr;
  std::optional<int> vfam;
  if (vertex.fam && d.vertex_families.count(vertex.name)) {
    const auto& vf = d.vertex_families.at(vertex.name);
    members = dir == TipDir::In ? &vf.in_members : &vf.out_members;
    if (vertex.fam->base != Index::Base::Lit) return false;
    vfam = vertex.fam->offset;
  } else if (d.vertices.count(vertex.name)) {
    const auto& v = d.vertices.at(vertex.name);
    members = dir == TipDir::In ? &v.in_members : &v.out_members;
  } else {
    return false;
  }
  for (const auto& m : *members) {
    auto mt = resolve_tip_ref(tips, m);
    if (!mt.valid || mt.tip_id != rt.tip_id) continue;
    if (!rt.index && !mt.index) return true;
    if (!rt.index || !mt.index) continue;
    Index have = *mt.index;
    if (vfam && have.base == Index::Base::Family)
      have = Index{Index::Base::Lit, *vfam + have.offset};
    if (have == *rt.index) return true;
  }
  return false;
}

namespace {

struct WalkCheck {
  bool directed;
  Rank rank;
};

std::vector<ElemInfo> check_walk(const Bundle& d,
                                 const std::vector<std::string>& elements,
                                 const WalkCheck& opt) {
  if (elements.empty())
    throw DomainError("BadAlternation", "walk needs at least one vertex");
  if (elements.size() % 2 == 0)
    throw DomainError("DanglingTermination", "walk ends mid-step");

  std::vector<ElemInfo> info;
  info.reserve(elements.size());
  for (const auto& t : elements) info.push_back(resolve_element(d, t));

  for (std::size_t i = 0; i < info.size(); ++i) {
    bool want_vertex = i % 2 == 0;
    if (want_vertex && info[i].kind != ElemKind::VertexElem)
      throw DomainError("BadAlternation", elements[i] + " is not a vertex");
    if (!want_vertex && info[i].kind == ElemKind::VertexElem)
      throw DomainError("BadAlternation", elements[i] + " is not a step");
  }
  for (std::size_t i = 0; i < info.size(); i += 2) {
    if (info[i].rank > opt.rank)
      throw DomainError("RankBoundViolated",
                        elements[i] + " exceeds walk rank " + opt.rank.str());
  }

  // Tip tables per step rank, computed lazily.
  std::map<int, std::vector<Ditip>> tip_cache;
  auto tips_for = [&](int r) -> const std::vector<Ditip>& {
    auto it = tip_cache.find(r);
    if (it == tip_cache.end())
      it = tip_cache.emplace(r, compute_ditips(d, Rank::finite(r))).first;
    return it->second;
  };

  for (std::size_t i = 1; i + 1 < info.size(); i += 2) {
    const ElemInfo& lv = info[i - 1];
    const ElemInfo& st = info[i];
    const ElemInfo& rv = info[i + 1];
    if (!st.rank.is_finite() || (opt.rank.is_finite() &&
                                 st.rank.value() > opt.rank.value() - 1))
      throw DomainError("RankBoundViolated",
                        elements[i] + " exceeds step rank for a " +
                            opt.rank.str() + "-walk");
    int gamma = st.rank.value();
    for (bool left : {true, false}) {
      const ElemInfo& fv = left ? lv : rv;
      const std::string& ftext = left ? elements[i - 1] : elements[i + 1];
      if (!fv.rank.is_finite())
        throw DomainError("RankBoundViolated", ftext);
      int alpha = fv.rank.value();
      if (alpha > gamma + 1)
        throw DomainError(
            "RankBoundViolated",
            "step " + elements[i] + " of rank " + std::to_string(gamma) +
                " cannot connect to " + ftext + " of rank " +
                std::to_string(alpha));
      TipDir side = left ? TipDir::In : TipDir::Out;
      if (alpha == gamma + 1 && gamma >= 0) {
        // Reach through a tip of the step's own rank.
        if (!opt.directed) {
          // Semiwalks only need incidence: a tip on either side will do.
          bool anyinf = step_infinite_side(st, TipDir::In) ||
                        step_infinite_side(st, TipDir::Out);
          bool ok = anyinf && st.walk &&
                    (vertex_contains_tip(d, tips_for(gamma), fv.ref,
                                         st.walk->id, st.fam_index, TipDir::In) ||
                     vertex_contains_tip(d, tips_for(gamma), fv.ref,
                                         st.walk->id, st.fam_index, TipDir::Out));
          if (!ok)
            throw DomainError("BadIncidence",
                              elements[i] + " not incident to " + ftext);
          continue;
        }
        if (!step_infinite_side(st, side))
          throw DomainError(opt.directed ? "NonConformingDirection"
                                         : "BadIncidence",
                            "step " + elements[i] + " has no " +
                                tip_dir_str(side) + " side at " + ftext);
        if (!st.walk ||
            !vertex_contains_tip(d, tips_for(gamma), fv.ref, st.walk->id,
                                 st.fam_index, side))
          throw DomainError("BadIncidence", tip_dir_str(side) + "tip of " +
                                                elements[i] + " not in " +
                                                ftext);
        continue;
      }
      // Terminal connection: the step's finite end must be this vertex.
      auto end = step_end(d, st, left);
      auto other = step_end(d, st, !left);
      auto res = eval_ref(d, fv.ref, std::nullopt, std::nullopt);
      bool match = end && res.valid && *end == res.id;
      bool match_other = other && res.valid && *other == res.id;
      if (opt.directed) {
        if (!match) {
          bool code_dir = st.rank == Rank::finite(-1) || match_other;
          throw DomainError(code_dir ? "NonConformingDirection"
                                     : "BadIncidence",
                            "step " + elements[i] + " does not " +
                                (left ? "leave " : "enter ") + ftext);
        }
      } else {
        if (!match && !match_other)
          throw DomainError("BadIncidence", "step " + elements[i] +
                                                " not incident to " + ftext);
      }
    }
  }
  return info;
}

}  // namespace

Diwalk validate_diwalk(const Bundle& d, const std::vector<std::string>& elements,
                       Rank rank) {
  check_walk(d, elements, {true, rank});
  Diwalk w;
  w.rank = rank;
  w.elements = elements;
  w.termination = Termination::TwoEnded;
  return w;
}

Semiwalk validate_semiwalk(const Bundle& d,
                           const std::vector<std::string>& elements, Rank rank) {
  check_walk(d, elements, {false, rank});
  Semiwalk w;
  w.rank = rank;
  w.elements = elements;
  w.termination = Termination::TwoEnded;
  return w;
}

Termination classify_termination(const WalkPresentation& p) {
  switch (p.mode) {
    case WalkMode::Finite:
      return Termination::TwoEnded;
    case WalkMode::ExtendedOut:
      return Termination::OneEndedLeft;
    case WalkMode::ExtendedIn:
      return Termination::OneEndedRight;
    case WalkMode::Endless:
      return Termination::Endless;
  }
  return Termination::TwoEnded;
}

IncidenceKind incidence(const Bundle& d, const WalkPresentation& w,
                        const std::string& vertex_id, std::optional<int> family) {
  Ref vref;
  if (!parse_ref(vertex_id, vref))
    throw DomainError("UnknownElement", vertex_id);

  // Finite ends first: the walk starts or ends at the vertex.
  auto ends_at = [&](bool left) {
    bool has = w.mode == WalkMode::Finite ||
               (left ? w.mode == WalkMode::ExtendedOut
                     : w.mode == WalkMode::ExtendedIn);
    if (!has) return false;
    auto seq = unfold_walk(d, w, 1, family);
    if (seq.empty()) return false;
    return (left ? seq.front() : seq.back()) == vertex_id;
  };
  if (ends_at(true)) return IncidenceKind::Inward;

  if (w.rank.is_finite() && (w.mode == WalkMode::ExtendedIn ||
                             w.mode == WalkMode::Endless)) {
    auto tips = compute_ditips(d, w.rank);
    std::optional<int> widx = w.is_family ? family : std::nullopt;
    if (vertex_contains_tip(d, tips, vref, w.id, widx, TipDir::In))
      return IncidenceKind::Inward;
  }
  if (ends_at(false)) return IncidenceKind::Outward;
  if (w.rank.is_finite() && (w.mode == WalkMode::ExtendedOut ||
                             w.mode == WalkMode::Endless)) {
    auto tips = compute_ditips(d, w.rank);
    std::optional<int> widx = w.is_family ? family : std::nullopt;
    if (vertex_contains_tip(d, tips, vref, w.id, widx, TipDir::Out))
      return IncidenceKind::Outward;
  }
  return IncidenceKind::None;
}

bool traverses(const Bundle& d, const WalkPresentation& w, const Ditip& t) {
  for (const auto& m : t.members) {
    if (m.walk == w.id) return true;
    auto it = d.walks.find(m.walk);
    if (it == d.walks.end()) continue;
    try {
      if (eventually_identical(d, w, it->second, t.dir)) return true;
    } catch (const DomainError&) {
      continue;
    }
  }
  return false;
}

}  // namespace tdg
