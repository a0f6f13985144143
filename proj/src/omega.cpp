#include "tdg/omega.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "tdg/present.hpp"

namespace tdg {

namespace {

const ArrowVertexPattern* find_vp(const ArrowTemplate& t, const std::string& id) {
  for (const auto& p : t.vertex_patterns)
    if (p.id == id) return &p;
  return nullptr;
}

const ArrowWalkPattern* find_wp(const ArrowTemplate& t, const std::string& id) {
  for (const auto& p : t.walk_patterns)
    if (p.id == id) return &p;
  return nullptr;
}

// Spine linkage of one side of an arrow walk: W[k] terminates at V[k] and
// V[k+1] contains W.<dir>[k].
void check_spine(const Bundle& d, const ArrowTemplate& t, const ArrowWalk& w,
                 const std::string& vp_id, const std::string& wp_id, TipDir dir,
                 ValidationReport& rep) {
  const auto* vp = find_vp(t, vp_id);
  const auto* wp = find_wp(t, wp_id);
  if (!vp || !wp) {
    rep.add("unknown-pattern", w.id, vp ? wp_id : vp_id);
    return;
  }
  if (dir == TipDir::Out && !wp->tips_out)
    rep.add("bad-spine", w.id, wp_id + " yields no outtips");
  if (dir == TipDir::In && !wp->tips_in)
    rep.add("bad-spine", w.id, wp_id + " yields no intips");
  if (dir == TipDir::Out && wp->mode != WalkMode::ExtendedOut)
    rep.add("bad-spine", w.id, wp_id + " is not extended outward");
  if (dir == TipDir::In && wp->mode != WalkMode::ExtendedIn)
    rep.add("bad-spine", w.id, wp_id + " is not extended inward");
  // Terminal: the walk pattern must terminate at the spine vertex of its
  // own level.
  bool terminal_ok = wp->terminal.instance.empty() &&
                     wp->terminal.name == vp_id && wp->terminal.fam &&
                     wp->terminal.fam->base == Index::Base::Period &&
                     wp->terminal.fam->offset == 0;
  if (!terminal_ok)
    rep.add("bad-spine", w.id,
            wp_id + " does not terminate at " + vp_id + "[k]");
  // Reach linkage: V[k+1] members contain W.<dir>[k].
  bool linked = false;
  for (const auto& m : vp->members) {
    std::string wname;
    TipDir mdir;
    if (!split_tip_name(m.name, wname, mdir)) continue;
    if (wname == wp_id && mdir == dir && m.fam &&
        m.fam->base == Index::Base::Period && m.fam->offset == -1)
      linked = true;
  }
  if (!linked)
    rep.add("bad-spine", w.id,
            vp_id + " does not receive " + wp_id + "." + tip_dir_str(dir) +
                "[k-1]");
  // Base: the walk's base vertex must be the level-0 spine vertex or an
  // existing concrete vertex of the base rank.
  if (w.base.instance.empty() && w.base.name == vp_id) {
    if (!w.base.fam || w.base.fam->base != Index::Base::Lit ||
        w.base.fam->offset != vp->from_level)
      rep.add("bad-base", w.id, "base must be " + vp_id + "[" +
                                    std::to_string(vp->from_level) + "]");
  } else if (!d.vertices.count(w.base.name)) {
    rep.add("bad-base", w.id, w.base.str());
  }
}

}  // namespace

std::vector<ArrowLevelStub> materialize_arrow_levels(const Bundle& d, int upto) {
  if (!d.arrow_template)
    throw DomainError("TemplateInstantiationError", "no arrow template");
  const ArrowTemplate& t = *d.arrow_template;
  std::vector<ArrowLevelStub> out;
  std::set<std::string> ids;
  for (const auto& [id, v] : d.vertices) ids.insert(id);
  for (int k = 0; k <= upto; ++k) {
    ArrowLevelStub stub;
    stub.level = k;
    stub.rank = Rank::finite(t.base_rank + k);
    for (const auto& vp : t.vertex_patterns) {
      if (k < vp.from_level) continue;
      Vertex v;
      v.id = vp.id + "[" + std::to_string(k) + "]";
      if (!ids.insert(v.id).second)
        throw DomainError("TemplateInstantiationError",
                          "id collision at level " + std::to_string(k) + ": " +
                              v.id);
      v.rank = stub.rank;
      for (const auto& m : vp.members) {
        if (!m.fam || m.fam->base != Index::Base::Period)
          throw DomainError("TemplateInstantiationError",
                            "member " + m.str() + " lacks a level index");
        int lvl = k + m.fam->offset;
        if (lvl < 0) continue;  // below the template floor
        std::string wname;
        TipDir dir;
        if (!split_tip_name(m.name, wname, dir))
          throw DomainError("TemplateInstantiationError",
                            "member " + m.str() + " is not a tip pattern");
        if (!find_wp(t, wname))
          throw DomainError("TemplateInstantiationError",
                            "unknown walk pattern " + wname + " at level " +
                                std::to_string(k));
        Ref r;
        r.name = m.name;
        r.fam = Index{Index::Base::Lit, lvl};
        (dir == TipDir::In ? v.in_members : v.out_members).push_back(r);
      }
      if (stub.rank >= Rank::finite(1) && v.in_members.empty() &&
          v.out_members.empty())
        throw DomainError("TemplateInstantiationError",
                          v.id + " has no members at level " +
                              std::to_string(k));
      stub.vertices.push_back(std::move(v));
    }
    for (const auto& wp : t.walk_patterns) {
      if (k < wp.from_level) continue;
      std::string wid = wp.id + "[" + std::to_string(k) + "]";
      if (!ids.insert(wid).second)
        throw DomainError("TemplateInstantiationError",
                          "id collision at level " + std::to_string(k) + ": " +
                              wid);
      // Terminal must resolve at this level.
      if (wp.terminal.instance.empty() && find_vp(t, wp.terminal.name)) {
        const auto* vp = find_vp(t, wp.terminal.name);
        if (k < vp->from_level)
          throw DomainError("TemplateInstantiationError",
                            wid + " terminal " + wp.terminal.name +
                                " missing at level " + std::to_string(k));
      } else if (!d.vertices.count(wp.terminal.name)) {
        throw DomainError("TemplateInstantiationError",
                          wid + " has unknown terminal " + wp.terminal.str());
      }
      stub.walks.push_back(wid);
    }
    out.push_back(std::move(stub));
  }
  return out;
}

ValidationReport validate_arrow(const Bundle& d) {
  ValidationReport rep;
  if (!d.arrow_template) {
    rep.add("missing-arrow-template", d.name, "arrow rank needs level patterns");
    return rep;
  }
  const ArrowTemplate& t = *d.arrow_template;
  std::set<std::string> names;
  for (const auto& p : t.vertex_patterns)
    if (!names.insert(p.id).second) rep.add("duplicate-id", p.id, "pattern");
  for (const auto& p : t.walk_patterns)
    if (!names.insert(p.id).second) rep.add("duplicate-id", p.id, "pattern");

  for (const auto& vp : t.vertex_patterns) {
    for (const auto& m : vp.members) {
      std::string wname;
      TipDir dir;
      if (!split_tip_name(m.name, wname, dir)) {
        rep.add("bad-member", vp.id, m.str());
        continue;
      }
      const auto* wp = find_wp(t, wname);
      if (!wp) {
        rep.add("bad-member", vp.id, "unknown walk pattern " + wname);
        continue;
      }
      if (dir == TipDir::In && !wp->tips_in)
        rep.add("bad-member", vp.id, wname + " yields no intips");
      if (dir == TipDir::Out && !wp->tips_out)
        rep.add("bad-member", vp.id, wname + " yields no outtips");
      // Pristine: members come from exactly one level below.
      if (!m.fam || m.fam->base != Index::Base::Period || m.fam->offset != -1)
        rep.add("non-pristine-member-rank", vp.id, m.str());
    }
  }
  try {
    materialize_arrow_levels(d, 3);
  } catch (const DomainError& e) {
    rep.add("TemplateInstantiationError", d.name, e.what());
  }

  for (const auto& [id, w] : d.arrow_walks) {
    switch (w.mode) {
      case WalkMode::ExtendedOut:
        check_spine(d, t, w, w.spine_vertex, w.spine_walk, TipDir::Out, rep);
        break;
      case WalkMode::ExtendedIn:
        check_spine(d, t, w, w.in_spine_vertex, w.in_spine_walk, TipDir::In,
                    rep);
        break;
      case WalkMode::Endless:
        check_spine(d, t, w, w.spine_vertex, w.spine_walk, TipDir::Out, rep);
        check_spine(d, t, w, w.in_spine_vertex, w.in_spine_walk, TipDir::In,
                    rep);
        break;
      case WalkMode::Finite:
        rep.add("bad-spine", id, "arrow walks cannot be finite");
        break;
    }
  }
  return rep;
}

Bundle assemble_arrow(const Bundle& base) {
  Bundle out = base;
  out.rank = Rank::arrow();
  auto rep = validate_arrow(out);
  for (const auto& v : rep.violations)
    if (v.code == "TemplateInstantiationError")
      throw DomainError("TemplateInstantiationError", v.detail);
  if (!rep.ok())
    throw DomainError("TemplateInstantiationError",
                      rep.violations.front().code + ": " +
                          rep.violations.front().subject);
  return out;
}

bool is_extended_arrow(const Bundle& d, const ArrowWalk& w) {
  if (!d.arrow_template) throw DomainError("InvalidArrowWalk", w.id);
  ValidationReport rep;
  const ArrowTemplate& t = *d.arrow_template;
  switch (w.mode) {
    case WalkMode::ExtendedOut:
      check_spine(d, t, w, w.spine_vertex, w.spine_walk, TipDir::Out, rep);
      break;
    case WalkMode::ExtendedIn:
      check_spine(d, t, w, w.in_spine_vertex, w.in_spine_walk, TipDir::In, rep);
      break;
    case WalkMode::Endless:
      check_spine(d, t, w, w.spine_vertex, w.spine_walk, TipDir::Out, rep);
      check_spine(d, t, w, w.in_spine_vertex, w.in_spine_walk, TipDir::In, rep);
      break;
    default:
      rep.add("bad-spine", w.id, "finite");
  }
  if (!rep.ok())
    throw DomainError("InvalidArrowWalk",
                      w.id + ": " + rep.violations.front().detail);
  // Ranks strictly increase along the spine, so terms beyond the finitely
  // many overrides are automatically distinct.
  return true;
}

ArrowWalk join_endless(const Bundle& d, const ArrowWalk& win,
                       const ArrowWalk& wout) {
  if (win.mode != WalkMode::ExtendedIn || wout.mode != WalkMode::ExtendedOut)
    throw DomainError("BaseMismatch", "join needs an in- and an out-diwalk");
  if (!(win.base == wout.base))
    throw DomainError("BaseMismatch", win.base.str() + " vs " +
                                          wout.base.str());
  (void)d;
  ArrowWalk e;
  e.id = win.id + "+" + wout.id;
  e.mode = WalkMode::Endless;
  e.base = wout.base;
  e.spine_vertex = wout.spine_vertex;
  e.spine_walk = wout.spine_walk;
  e.in_spine_vertex = win.in_spine_vertex;
  e.in_spine_walk = win.in_spine_walk;
  e.overrides = wout.overrides;
  for (const auto& [k, o] : win.overrides) e.overrides[k] = o;
  return e;
}

std::vector<Ditip> arrow_ditips(const Bundle& d) {
  std::map<std::string, std::vector<std::string>> classes;
  for (const auto& [id, w] : d.arrow_walks) {
    try {
      is_extended_arrow(d, w);
    } catch (const DomainError&) {
      continue;
    }
    if (w.mode == WalkMode::ExtendedOut || w.mode == WalkMode::Endless)
      classes["out/" + w.spine_vertex + "/" + w.spine_walk].push_back(id);
    if (w.mode == WalkMode::ExtendedIn || w.mode == WalkMode::Endless)
      classes["in/" + w.in_spine_vertex + "/" + w.in_spine_walk].push_back(id);
  }
  std::vector<Ditip> tips;
  for (auto& [key, members] : classes) {
    std::sort(members.begin(), members.end());
    Ditip t;
    t.dir = key.rfind("in/", 0) == 0 ? TipDir::In : TipDir::Out;
    t.rank = Rank::arrow();
    for (const auto& m : members) t.members.push_back({m, 0});
    t.id = members.front() + "." + tip_dir_str(t.dir);
    tips.push_back(std::move(t));
  }
  std::sort(tips.begin(), tips.end(),
            [](const Ditip& a, const Ditip& b) { return a.id < b.id; });
  return tips;
}

Bundle elevate_to_omega(const Bundle& d, const PartitionSpec& spec) {
  auto tips = arrow_ditips(d);
  if (tips.empty())
    throw DomainError("EmptyTipSet", "no arrow ditips declared");
  std::map<std::string, int> assigned;
  Bundle out = d;
  out.rank = Rank::omega();
  for (const auto& cell : spec.cells) {
    if (cell.is_family)
      throw DomainError("NotAPartition",
                        "omega vertices cannot be parametric");
    if (cell.tips.empty())
      throw DomainError("NotAPartition", "cell " + cell.id + " is empty");
    Vertex v;
    v.id = cell.id;
    v.rank = Rank::omega();
    for (const auto& r : cell.tips) {
      auto rt = resolve_tip_ref(tips, r);
      if (!rt.valid) throw DomainError("NotAPartition", rt.error);
      assigned[rt.tip_id] += 1;
      std::string w;
      TipDir dir;
      split_tip_name(r.name, w, dir);
      (dir == TipDir::In ? v.in_members : v.out_members).push_back(r);
    }
    if (out.vertices.count(v.id))
      throw DomainError("NotAPartition", "cell id " + v.id + " already used");
    out.vertices[v.id] = v;
  }
  for (const auto& t : tips) {
    auto it = assigned.find(t.id);
    if (it == assigned.end())
      throw DomainError("NotAPartition", "tip " + t.id + " unassigned");
    if (it->second > 1)
      throw DomainError("NotAPartition", "tip " + t.id + " assigned twice");
  }
  return out;
}

ValidationReport validate_omega_level(const Bundle& d) {
  ValidationReport rep;
  auto tips = arrow_ditips(d);
  std::map<std::string, int> assigned;
  bool any = false;
  for (const auto& [id, v] : d.vertices) {
    if (!v.rank.is_omega()) continue;
    any = true;
    if (v.in_members.empty() && v.out_members.empty())
      rep.add("empty-members", id, "omega vertex");
    for (const auto& lists : {&v.in_members, &v.out_members}) {
      for (const auto& r : *lists) {
        auto rt = resolve_tip_ref(tips, r);
        if (!rt.valid) {
          rep.add("unknown-tip", id, rt.error);
          continue;
        }
        assigned[rt.tip_id] += 1;
      }
    }
  }
  if (!any) rep.add("empty-level", "V^omega", "no omega vertices");
  for (const auto& t : tips) {
    auto it = assigned.find(t.id);
    if (it == assigned.end())
      rep.add("partition-incomplete", t.id, "arrow tip unassigned");
    else if (it->second > 1)
      rep.add("partition-overlap", t.id, "arrow tip assigned twice");
  }
  return rep;
}

Diwalk validate_omega_diwalk(const Bundle& d,
                             const std::vector<std::string>& elements) {
  if (elements.empty())
    throw DomainError("BadAlternation", "walk needs at least one vertex");
  if (elements.size() % 2 == 0)
    throw DomainError("DanglingTermination", "walk ends mid-step");
  auto tips = arrow_ditips(d);

  auto vertex_of = [&](const std::string& id) -> const Vertex* {
    auto it = d.vertices.find(id);
    return it == d.vertices.end() ? nullptr : &it->second;
  };
  auto contains = [&](const Vertex& v, const std::string& walk, TipDir dir) {
    const auto& members = dir == TipDir::In ? v.in_members : v.out_members;
    for (const auto& m : members) {
      std::string w;
      TipDir mdir;
      if (!split_tip_name(m.name, w, mdir)) continue;
      auto rt = resolve_tip_ref(tips, m);
      if (!rt.valid) continue;
      for (const auto& t : tips)
        if (t.id == rt.tip_id)
          for (const auto& tm : t.members)
            if (tm.walk == walk && mdir == dir) return true;
    }
    return false;
  };

  for (std::size_t i = 0; i < elements.size(); i += 2) {
    const Vertex* v = vertex_of(elements[i]);
    if (!v) throw DomainError("UnknownElement", elements[i]);
  }
  for (std::size_t i = 1; i + 1 < elements.size(); i += 2) {
    auto aw = d.arrow_walks.find(elements[i]);
    if (aw == d.arrow_walks.end())
      throw DomainError("BadAlternation", elements[i] + " is not an arrow walk");
    const Vertex* lv = vertex_of(elements[i - 1]);
    const Vertex* rv = vertex_of(elements[i + 1]);
    const ArrowWalk& w = aw->second;
    // Left flank.
    if (lv->rank.is_omega()) {
      if (w.mode != WalkMode::Endless && w.mode != WalkMode::ExtendedIn)
        throw DomainError("NonConformingDirection",
                          elements[i] + " has no in side at " + elements[i - 1]);
      if (!contains(*lv, w.id, TipDir::In))
        throw DomainError("BadIncidence", "intip of " + elements[i] +
                                              " not in " + elements[i - 1]);
    } else {
      // Terminal: out-diwalks terminate at their base.
      if (w.mode != WalkMode::ExtendedOut)
        throw DomainError("BadIncidence",
                          elements[i] + " has no left terminal");
      if (w.base.str() != elements[i - 1])
        throw DomainError("BadIncidence", elements[i] + " does not start at " +
                                              elements[i - 1]);
    }
    // Right flank.
    if (rv->rank.is_omega()) {
      if (w.mode != WalkMode::Endless && w.mode != WalkMode::ExtendedOut)
        throw DomainError("NonConformingDirection",
                          elements[i] + " has no out side at " +
                              elements[i + 1]);
      if (!contains(*rv, w.id, TipDir::Out))
        throw DomainError("BadIncidence", "outtip of " + elements[i] +
                                              " not in " + elements[i + 1]);
    } else {
      if (w.mode != WalkMode::ExtendedIn)
        throw DomainError("BadIncidence",
                          elements[i] + " has no right terminal");
      if (w.base.str() != elements[i + 1])
        throw DomainError("BadIncidence", elements[i] + " does not end at " +
                                              elements[i + 1]);
    }
  }
  Diwalk w;
  w.rank = Rank::omega();
  w.elements = elements;
  w.termination = Termination::TwoEnded;
  return w;
}

}  // namespace tdg
