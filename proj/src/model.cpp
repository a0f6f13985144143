#include "tdg/model.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "tdg/omega.hpp"
#include "tdg/present.hpp"

namespace tdg {

namespace {

bool parse_index_text(const std::string& s, Index& out,
                      const std::string& period_var,
                      const std::string& family_var) {
  if (s.empty()) return false;
  auto all_digits = [](const std::string& t, std::size_t from) {
    if (from >= t.size()) return false;
    for (std::size_t i = from; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    return true;
  };
  if (all_digits(s, s[0] == '-' ? 1 : 0)) {
    out = Index{Index::Base::Lit, std::stoi(s)};
    return true;
  }
  std::size_t cut = s.find_first_of("+-");
  std::string var = cut == std::string::npos ? s : s.substr(0, cut);
  int off = 0;
  if (cut != std::string::npos) {
    std::string rest = s.substr(cut);
    if (rest == "+" || rest == "-" || !all_digits(rest, 1)) return false;
    off = std::stoi(rest);
  }
  if (!period_var.empty() && var == period_var) {
    out = Index{Index::Base::Period, off};
    return true;
  }
  if (!family_var.empty() && var == family_var) {
    out = Index{Index::Base::Family, off};
    return true;
  }
  return false;
}

bool valid_ident(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')
    return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
      return false;
  return true;
}

// Splits "name[idx]" into parts; no brackets yields empty idx.
bool split_indexed(const std::string& s, std::string& name, std::string& idx) {
  auto lb = s.find('[');
  if (lb == std::string::npos) {
    name = s;
    idx.clear();
    return true;
  }
  if (s.back() != ']') return false;
  name = s.substr(0, lb);
  idx = s.substr(lb + 1, s.size() - lb - 2);
  return !idx.empty();
}

}  // namespace

bool parse_ref(const std::string& text, Ref& out, const std::string& period_var,
               const std::string& family_var) {
  out = Ref{};
  std::string body = text;
  auto at = body.find('@');
  if (at != std::string::npos) {
    Index cell;
    if (!parse_index_text(body.substr(at + 1), cell, period_var, family_var))
      return false;
    out.cell = cell;
    body = body.substr(0, at);
  }
  // With a cell, a single dot separates instance from node; without one a
  // dotted name is a tip reference and stays whole.
  if (at != std::string::npos) {
    auto dot = body.find('.');
    if (dot == std::string::npos) return false;  // template refs are qualified
    std::string inst_part = body.substr(0, dot);
    std::string name_part = body.substr(dot + 1);
    std::string iname, iidx;
    if (!split_indexed(inst_part, iname, iidx)) return false;
    if (!valid_ident(iname) || !valid_ident(name_part)) return false;
    out.instance = iname;
    out.name = name_part;
    if (!iidx.empty()) {
      Index fi;
      if (!parse_index_text(iidx, fi, period_var, family_var)) return false;
      out.fam = fi;
    }
    return true;
  }
  std::string name, idx;
  if (!split_indexed(body, name, idx)) return false;
  // Tip names carry one dot.
  auto dot = name.find('.');
  if (dot != std::string::npos) {
    std::string w = name.substr(0, dot), s = name.substr(dot + 1);
    if (!valid_ident(w) || (s != "in" && s != "out")) return false;
  } else if (!valid_ident(name)) {
    return false;
  }
  out.name = name;
  if (!idx.empty()) {
    Index fi;
    if (!parse_index_text(idx, fi, period_var, family_var)) return false;
    out.fam = fi;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Bundle validation

namespace {

// Adds an affine offset to an index expression.
Index index_plus(const Index& ix, int c) {
  return Index{ix.base, ix.offset + c};
}

struct TipTable {
  std::map<int, std::vector<Ditip>> by_rank;  // finite ranks
  const Ditip* find(int rank, const std::string& tip_id) const {
    auto it = by_rank.find(rank);
    if (it == by_rank.end()) return nullptr;
    for (const auto& t : it->second)
      if (t.id == tip_id) return &t;
    return nullptr;
  }
};

void validate_templates(const Bundle& d, ValidationReport& rep) {
  for (const auto& [id, t] : d.templates) {
    std::set<std::string> names;
    for (const auto& n : t.nodes)
      if (!names.insert(n).second)
        rep.add("duplicate-id", id, "template node " + n);
    for (const auto& a : t.arcs) {
      if (!names.insert(a.id).second)
        rep.add("duplicate-id", id, "template arc " + a.id);
      if (!t.has_node(a.tail_node) || !t.has_node(a.head_node))
        rep.add("unknown-template-node", id, "arc " + a.id);
      if (a.tail_off < -1 || a.tail_off > 1 || a.head_off < -1 ||
          a.head_off > 1)
        rep.add("offset-out-of-range", id, "arc " + a.id);
    }
  }
  for (const auto& [id, inst] : d.instances)
    if (!d.templates.count(inst.template_id))
      rep.add("unknown-template", id, inst.template_id);
}

void validate_arcs(const Bundle& d, ValidationReport& rep) {
  for (const auto& [id, a] : d.arcs) {
    for (const Ref* end : {&a.tail, &a.head}) {
      auto e = eval_ref(d, *end, std::nullopt, std::nullopt);
      if (!e.valid) {
        rep.add("unknown-arc-endpoint", id, e.error);
        continue;
      }
      if (e.kind != ElemKind::VertexElem) {
        rep.add("bad-arc-endpoint", id, end->str() + " is not a vertex");
        continue;
      }
      if (end->instance.empty()) {
        const Vertex& v = d.vertices.at(end->name);
        if (!(v.rank == Rank::finite(0)))
          rep.add("bad-arc-endpoint", id,
                  end->str() + " has rank " + v.rank.str());
      }
    }
  }
}

// Coverage bookkeeping for the partition property of one tip rank.
void check_partition(const Bundle& d, int rank, const std::vector<Ditip>& tips,
                     ValidationReport& rep) {
  // Collect, per tip id, the literal indices and family cover offsets of
  // every membership declaration at rank+1.
  struct Cover {
    std::vector<int> literals;      // from concrete vertices (or families
                                    // with literal refs: flagged separately)
    std::vector<int> family_froms;  // family member ref covering j >= from
  };
  std::map<std::string, Cover> covers;
  std::map<std::string, bool> concrete_covered;

  Rank vrank = Rank::finite(rank + 1);
  auto record = [&](const std::string& owner, bool owner_family,
                    const std::vector<Ref>& members, TipDir dir) {
    for (const auto& r : members) {
      auto rt = resolve_tip_ref(tips, r);
      if (!rt.valid) {
        rep.add("unknown-tip", owner, rt.error);
        continue;
      }
      const Ditip* tip = nullptr;
      for (const auto& t : tips)
        if (t.id == rt.tip_id) tip = &t;
      if (tip->dir != dir) {
        rep.add("tip-direction-mismatch", owner, r.str());
        continue;
      }
      if (!tip->is_family) {
        if (concrete_covered.count(rt.tip_id) || owner_family)
          rep.add(owner_family ? "partition-overlap" : "partition-overlap",
                  owner,
                  owner_family
                      ? "family assigns one tip " + rt.tip_id + " repeatedly"
                      : "tip " + rt.tip_id + " assigned twice");
        concrete_covered[rt.tip_id] = true;
        continue;
      }
      if (!rt.index) {
        rep.add("unknown-tip", owner, "family tip needs an index: " + r.str());
        continue;
      }
      if (rt.index->base == Index::Base::Lit) {
        covers[rt.tip_id].literals.push_back(rt.index->offset);
      } else if (owner_family && rt.index->base == Index::Base::Family) {
        covers[rt.tip_id].family_froms.push_back(rt.index->offset);
      } else {
        rep.add("unknown-tip", owner, "bad tip index in " + r.str());
      }
    }
  };

  for (const auto& [id, v] : d.vertices) {
    if (!(v.rank == vrank)) continue;
    record(id, false, v.in_members, TipDir::In);
    record(id, false, v.out_members, TipDir::Out);
  }
  for (const auto& [id, f] : d.vertex_families) {
    if (!(f.rank == vrank)) continue;
    record(id, true, f.in_members, TipDir::In);
    record(id, true, f.out_members, TipDir::Out);
  }

  for (const auto& t : tips) {
    if (!t.is_family) {
      if (!concrete_covered.count(t.id))
        rep.add("partition-incomplete", t.id, "tip unassigned");
      continue;
    }
    // Family tip domain starts at the smallest index any member provides.
    int jmin = 0;
    bool first = true;
    for (const auto& m : t.members) {
      int from = -m.fam_delta;
      jmin = first ? from : std::min(jmin, from);
      first = false;
    }
    const Cover& c = covers[t.id];
    int bound = jmin + 3;
    for (int x : c.literals) bound = std::max(bound, x + 2);
    for (int x : c.family_froms) bound = std::max(bound, x + 2);
    for (int j = jmin; j <= bound; ++j) {
      int n = 0;
      for (int x : c.literals)
        if (x == j) ++n;
      // A family cell with member index expression r+c covers tip index j
      // when its own instance index j-c is a natural number.
      for (int from : c.family_froms)
        if (j - from >= 0) ++n;
      if (n == 0)
        rep.add("partition-incomplete", t.id,
                "index " + std::to_string(j) + " unassigned");
      else if (n > 1)
        rep.add("partition-overlap", t.id,
                "index " + std::to_string(j) + " assigned " +
                    std::to_string(n) + " times");
      if (!rep.ok() && rep.violations.size() > 64) return;  // avoid floods
    }
  }
}

void validate_vertices(const Bundle& d, const TipTable& tips,
                       ValidationReport& rep) {
  auto check_members = [&](const std::string& id, Rank rank,
                           const std::vector<Ref>& in_members,
                           const std::vector<Ref>& out_members,
                           bool is_family) {
    bool needs_members = (rank.is_finite() && rank.value() >= 1) || rank.is_omega();
    if (rank == Rank::finite(0)) {
      if (!in_members.empty() || !out_members.empty())
        rep.add("rank0-members", id, "rank-0 vertices carry no explicit tips");
      return;
    }
    if (needs_members && in_members.empty() && out_members.empty()) {
      rep.add("empty-members", id, "vertex of rank " + rank.str());
      return;
    }
    if (rank.is_omega()) return;  // omega members validated with arrow tips
    int member_rank = rank.value() - 1;
    auto it = tips.by_rank.find(member_rank);
    const std::vector<Ditip> empty;
    const std::vector<Ditip>& table = it == tips.by_rank.end() ? empty : it->second;
    for (const auto& lists : {&in_members, &out_members}) {
      for (const auto& r : *lists) {
        // Pristineness: the referenced walk must have rank exactly one
        // below the vertex.
        std::string wname;
        TipDir dir;
        if (split_tip_name(r.name, wname, dir)) {
          auto w = d.walks.find(wname);
          if (w != d.walks.end() && !(w->second.rank == Rank::finite(member_rank))) {
            rep.add("non-pristine-member-rank", id,
                    r.str() + " has rank " + w->second.rank.str());
            continue;
          }
        } else if (d.has_vertex_id(r.name)) {
          rep.add("embraced-vertex", id, r.str() + " is a vertex");
          continue;
        }
        auto rt = resolve_tip_ref(table, r);
        if (!rt.valid) rep.add("unknown-tip", id, rt.error);
        if (rt.valid && is_family && rt.index &&
            rt.index->base == Index::Base::Lit) {
          // A family whose every instance contains the same concrete tip
          // instance breaks disjointness.
          const Ditip* tp = nullptr;
          for (const auto& t : table)
            if (t.id == rt.tip_id) tp = &t;
          if (tp && tp->is_family)
            rep.add("partition-overlap", id,
                    "family repeats tip instance " + r.str());
        }
      }
    }
  };

  for (const auto& [id, v] : d.vertices) {
    if (v.rank.is_arrow() || (v.rank.is_finite() && v.rank.value() < 0)) {
      rep.add("bad-vertex-rank", id, v.rank.str());
      continue;
    }
    check_members(id, v.rank, v.in_members, v.out_members, false);
  }
  for (const auto& [id, f] : d.vertex_families) {
    if (!f.rank.is_finite() || f.rank.value() < 1) {
      rep.add("bad-vertex-rank", id, f.rank.str());
      continue;
    }
    check_members(id, f.rank, f.in_members, f.out_members, true);
  }
}

// Incidence of rank >= 1 presentation steps: interior steps flanked by two
// rank-r vertices must be endless with the flanking tips; terminal flanks
// follow the mixed-rank rules.
void validate_walk_incidence(const Bundle& d, const TipTable& tips,
                             ValidationReport& rep) {
  for (const auto& [id, w] : d.walks) {
    if (!w.rank.is_finite() || w.rank.value() < 1) continue;
    int rho = w.rank.value();
    auto tt = tips.by_rank.find(rho - 1);
    const std::vector<Ditip> empty;
    const std::vector<Ditip>& table =
        tt == tips.by_rank.end() ? empty : tt->second;

    auto vertex_rank = [&](const Ref& r) -> std::optional<Rank> {
      if (!r.instance.empty()) return Rank::finite(0);
      if (r.fam) {
        auto f = d.vertex_families.find(r.name);
        if (f != d.vertex_families.end()) return f->second.rank;
        return std::nullopt;
      }
      auto v = d.vertices.find(r.name);
      if (v != d.vertices.end()) return v->second.rank;
      return std::nullopt;
    };
    auto step_walk = [&](const Ref& r) -> const WalkPresentation* {
      auto it2 = d.walks.find(r.name);
      return it2 == d.walks.end() ? nullptr : &it2->second;
    };
    // True when the vertex (given by ref, with symbolic index) contains
    // the tip of `step` on the given side, at the aligned index.
    auto contains_tip = [&](const Ref& vref, const Ref& sref, TipDir dir) {
      const WalkPresentation* sw = step_walk(sref);
      if (!sw) return false;
      Ref tipref;
      tipref.name = sw->id + "." + tip_dir_str(dir);
      // The step's member index expression transfers to the tip index.
      if (sw->is_family && sref.fam) tipref.fam = sref.fam;
      auto rt = resolve_tip_ref(table, tipref);
      if (!rt.valid) return false;
      const std::vector<Ref>* members = nullptr;
      bool vertex_is_family = false;
      if (vref.fam && d.vertex_families.count(vref.name)) {
        const auto& vf = d.vertex_families.at(vref.name);
        members = dir == TipDir::In ? &vf.in_members : &vf.out_members;
        vertex_is_family = true;
      } else if (d.vertices.count(vref.name)) {
        const auto& v = d.vertices.at(vref.name);
        members = dir == TipDir::In ? &v.in_members : &v.out_members;
      } else {
        return false;
      }
      for (const auto& m : *members) {
        auto mt = resolve_tip_ref(table, m);
        if (!mt.valid || mt.tip_id != rt.tip_id) continue;
        if (!rt.index && !mt.index) return true;
        if (!rt.index || !mt.index) continue;
        // Substitute the vertex's own index into family member patterns.
        Index have = *mt.index;
        if (vertex_is_family && have.base == Index::Base::Family) {
          have = index_plus(*vref.fam, have.offset);
        }
        if (have == *rt.index) return true;
      }
      return false;
    };

    // Sample the sequence: mid plus two periods each side.
    std::vector<Ref> seq;
    auto push_block = [&](const std::vector<Ref>& block, int t) {
      for (const auto& r : block) {
        Ref c = r;
        auto subst = [&](std::optional<Index>& ix) {
          if (ix && ix->base == Index::Base::Period)
            ix = Index{Index::Base::Lit, ix->offset + t};
        };
        // Keep symbolic: use Period bases evaluated to literal period ids;
        // family stays symbolic.
        subst(c.fam);
        subst(c.cell);
        seq.push_back(c);
      }
    };
    if (w.mode == WalkMode::ExtendedIn || w.mode == WalkMode::Endless)
      for (int t = w.in_anchor + 1; t >= w.in_anchor; --t)
        push_block(w.in_rep, t);
    for (const auto& r : w.mid) seq.push_back(r);
    if (w.mode == WalkMode::ExtendedOut || w.mode == WalkMode::Endless)
      for (int t = w.out_anchor; t <= w.out_anchor + 1; ++t)
        push_block(w.out_rep, t);
    if (w.mode == WalkMode::Finite) seq = w.mid;
    if (seq.empty()) continue;

    bool starts_with_vertex =
        (w.mode == WalkMode::Finite || w.mode == WalkMode::ExtendedOut);
    std::size_t i0 = starts_with_vertex ? 0 : 1;
    for (std::size_t i = i0; i + 2 < seq.size() + 1; i += 2) {
      if (i + 2 > seq.size()) break;
      const Ref& lv = seq[i];
      const Ref& st = seq[i + 1];
      bool has_right = i + 2 < seq.size();
      const Ref* rv = has_right ? &seq[i + 2] : nullptr;
      const WalkPresentation* sw = step_walk(st);
      if (!sw) {
        rep.add("BadIncidence", id, st.str() + " is not a declared walk");
        continue;
      }
      if (!(sw->rank == Rank::finite(rho - 1))) {
        rep.add("RankBoundViolated", id,
                "step " + st.str() + " has rank " + sw->rank.str());
        continue;
      }
      auto lrank = vertex_rank(lv);
      auto rrank = rv ? vertex_rank(*rv) : std::nullopt;
      if (!lrank) {
        rep.add("BadIncidence", id, lv.str() + " is not a vertex");
        continue;
      }
      // Left flank: rank rho vertex connects through an intip; lower-rank
      // flanks are terminal vertices of the step walk.
      Rank lr = *lrank;
      if (lr == Rank::finite(rho)) {
        if (sw->mode != WalkMode::ExtendedIn && sw->mode != WalkMode::Endless) {
          rep.add("BadIncidence", id,
                  "step " + st.str() + " cannot reach " + lv.str() +
                      " inward (no in side)");
        } else if (!contains_tip(lv, st, TipDir::In)) {
          rep.add("BadIncidence", id,
                  "intip of " + st.str() + " not in " + lv.str());
        }
      } else if (lr < Rank::finite(rho)) {
        // Terminal: the step must start at that vertex.
        if (sw->mode == WalkMode::ExtendedIn || sw->mode == WalkMode::Endless) {
          rep.add("BadIncidence", id,
                  "step " + st.str() + " has no left terminal for " + lv.str());
        }
      } else {
        rep.add("RankBoundViolated", id, lv.str());
      }
      if (!rv) continue;
      if (!rrank) {
        rep.add("BadIncidence", id, rv->str() + " is not a vertex");
        continue;
      }
      Rank rr = *rrank;
      if (rr == Rank::finite(rho)) {
        if (sw->mode != WalkMode::ExtendedOut && sw->mode != WalkMode::Endless) {
          rep.add("BadIncidence", id,
                  "step " + st.str() + " cannot reach " + rv->str() +
                      " outward (no out side)");
        } else if (!contains_tip(*rv, st, TipDir::Out)) {
          rep.add("BadIncidence", id,
                  "outtip of " + st.str() + " not in " + rv->str());
        }
      } else if (rr < Rank::finite(rho)) {
        if (sw->mode == WalkMode::ExtendedOut || sw->mode == WalkMode::Endless)
          rep.add("BadIncidence", id,
                  "step " + st.str() + " has no right terminal for " +
                      rv->str());
      } else {
        rep.add("RankBoundViolated", id, rv->str());
      }
    }
  }
}

}  // namespace

ValidationReport validate_bundle(const Bundle& d) {
  ValidationReport rep;
  validate_templates(d, rep);
  validate_arcs(d, rep);

  for (const auto& [id, w] : d.walks) {
    auto r = validate_presentation(d, w);
    for (auto& v : r.violations) rep.violations.push_back(v);
  }

  // Tips per finite rank below the bundle rank.
  TipTable tips;
  int top = d.rank.is_finite() ? d.rank.value() : 0;
  if (d.rank.is_finite()) {
    for (int r = 0; r < top; ++r) tips.by_rank[r] = compute_ditips(d, Rank::finite(r));
  } else {
    // Arrow and omega bundles keep concrete low levels; compute tips for
    // every rank any declared walk carries.
    for (const auto& [id, w] : d.walks)
      if (w.rank.is_finite() && !tips.by_rank.count(w.rank.value()))
        tips.by_rank[w.rank.value()] = compute_ditips(d, w.rank);
  }

  validate_vertices(d, tips, rep);
  validate_walk_incidence(d, tips, rep);

  if (d.rank.is_finite()) {
    for (int r = 0; r < top; ++r)
      check_partition(d, r, tips.by_rank[r], rep);
    // Level contiguity: every level 1..top holds at least one vertex.
    for (int r = 1; r <= top; ++r) {
      bool any = false;
      for (const auto& [id, v] : d.vertices)
        if (v.rank == Rank::finite(r)) any = true;
      for (const auto& [id, f] : d.vertex_families)
        if (f.rank == Rank::finite(r)) any = true;
      if (!any) rep.add("empty-level", "V^" + std::to_string(r), "no vertices");
    }
    for (const auto& [id, v] : d.vertices)
      if (v.rank.is_finite() && v.rank.value() > top)
        rep.add("rank-order", id, "vertex above bundle rank");
  }

  if (d.rank.is_arrow() || d.rank.is_omega()) {
    auto ar = validate_arrow(d);
    for (auto& v : ar.violations) rep.violations.push_back(v);
  }
  if (d.rank.is_omega()) {
    auto orep = validate_omega_level(d);
    for (auto& v : orep.violations) rep.violations.push_back(v);
  }
  return rep;
}

ValidationReport check_pristine(const Bundle& d) {
  ValidationReport rep;
  auto check = [&](const std::string& id, Rank rank,
                   const std::vector<Ref>& members) {
    for (const auto& r : members) {
      if (d.has_vertex_id(r.name)) {
        rep.add("embraced-vertex", id, r.str());
        continue;
      }
      std::string wname;
      TipDir dir;
      if (!split_tip_name(r.name, wname, dir)) continue;
      if (rank.is_omega()) {
        if (d.arrow_walks.count(wname)) continue;
        rep.add("non-pristine-member-rank", id, r.str());
        continue;
      }
      auto w = d.walks.find(wname);
      if (w == d.walks.end()) continue;
      if (!(w->second.rank == rank.tip_rank()))
        rep.add("non-pristine-member-rank", id,
                r.str() + " has rank " + w->second.rank.str());
    }
  };
  for (const auto& [id, v] : d.vertices) {
    if (v.rank == Rank::finite(0)) continue;
    check(id, v.rank, v.in_members);
    check(id, v.rank, v.out_members);
  }
  for (const auto& [id, f] : d.vertex_families) {
    check(id, f.rank, f.in_members);
    check(id, f.rank, f.out_members);
  }
  return rep;
}

}  // namespace tdg
