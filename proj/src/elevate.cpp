#include "tdg/elevate.hpp"

#include <algorithm>
#include <set>

namespace tdg {

PartitionResult partition_tips(const Bundle& d, const PartitionSpec& spec) {
  auto tips = compute_ditips(d, spec.rank);
  if (tips.empty())
    throw DomainError("EmptyTipSet",
                      "no declared tips of rank " + spec.rank.str());

  PartitionResult out;
  Rank vrank = spec.rank.is_arrow() ? Rank::omega()
                                    : Rank::finite(spec.rank.value() + 1);
  for (const auto& cell : spec.cells) {
    if (cell.tips.empty())
      throw DomainError("NotAPartition", "cell " + cell.id + " is empty");
    std::vector<Ref> in_m, out_m;
    for (const auto& r : cell.tips) {
      auto rt = resolve_tip_ref(tips, r);
      if (!rt.valid) throw DomainError("NotAPartition", rt.error);
      std::string w;
      TipDir dir;
      split_tip_name(r.name, w, dir);
      (dir == TipDir::In ? in_m : out_m).push_back(r);
    }
    if (cell.is_family) {
      VertexFamily f;
      f.id = cell.id;
      f.rank = vrank;
      f.index_var = cell.index_var.empty() ? "r" : cell.index_var;
      f.in_members = in_m;
      f.out_members = out_m;
      out.families.push_back(std::move(f));
    } else {
      Vertex v;
      v.id = cell.id;
      v.rank = vrank;
      v.in_members = in_m;
      v.out_members = out_m;
      out.vertices.push_back(std::move(v));
    }
  }

  // Exactness of the cover is judged on the elevated bundle; reuse the
  // bundle validator so family coverage arithmetic lives in one place.
  Bundle probe = d;
  probe.rank = vrank;
  for (auto& v : out.vertices) {
    if (probe.vertices.count(v.id) || probe.vertex_families.count(v.id))
      throw DomainError("NotAPartition", "cell id " + v.id + " already used");
    probe.vertices[v.id] = v;
  }
  for (auto& f : out.families) {
    if (probe.vertices.count(f.id) || probe.vertex_families.count(f.id))
      throw DomainError("NotAPartition", "cell id " + f.id + " already used");
    probe.vertex_families[f.id] = f;
  }
  auto rep = validate_bundle(probe);
  for (const auto& v : rep.violations) {
    if (v.code == "partition-incomplete" || v.code == "partition-overlap" ||
        v.code == "unknown-tip")
      throw DomainError("NotAPartition", v.subject + ": " + v.detail);
  }
  return out;
}

Bundle elevate(const Bundle& d, const PartitionSpec& spec) {
  if (!(spec.rank == d.rank))
    throw DomainError("NotAPartition", "partition rank " + spec.rank.str() +
                                           " does not match bundle rank " +
                                           d.rank.str());
  auto parts = partition_tips(d, spec);
  Bundle out = d;
  out.rank = spec.rank.is_arrow() ? Rank::omega()
                                  : Rank::finite(spec.rank.value() + 1);
  for (auto& v : parts.vertices) out.vertices[v.id] = v;
  for (auto& f : parts.families) out.vertex_families[f.id] = f;
  return out;
}

UnderlyingGraph underlying_graph(const Bundle& d) {
  UnderlyingGraph g;
  for (const auto& [id, a] : d.arcs)
    g.branches.push_back({id, a.tail.str(), a.head.str()});
  std::sort(g.branches.begin(), g.branches.end(),
            [](const auto& x, const auto& y) { return x.id < y.id; });

  for (const auto& [id, v] : d.vertices) {
    int r = v.rank.is_finite() ? v.rank.value() : -2;
    g.node_levels[r].push_back(id);
  }
  for (const auto& [id, f] : d.vertex_families) {
    int r = f.rank.is_finite() ? f.rank.value() : -2;
    g.node_levels[r].push_back(id + "[" + f.index_var + "]");
  }
  for (const auto& [id, inst] : d.instances) {
    auto t = d.templates.find(inst.template_id);
    if (t == d.templates.end()) continue;
    for (const auto& n : t->second.nodes)
      g.node_levels[0].push_back(
          inst.is_family ? id + "[" + inst.index_var + "]." + n : id + "." + n);
  }
  for (auto& [r, ids] : g.node_levels) std::sort(ids.begin(), ids.end());

  if (d.rank.is_finite()) {
    for (int r = 0; r < d.rank.value(); ++r) {
      auto tips = compute_ditips(d, Rank::finite(r));
      for (const auto& t : tips) g.tip_levels[r].push_back(t.id);
    }
  }
  return g;
}

PartitionSpec discrete_partition(const Bundle& d, Rank rho) {
  PartitionSpec spec;
  spec.id = "discrete";
  spec.rank = rho;
  auto tips = compute_ditips(d, rho);
  for (const auto& t : tips) {
    PartitionCell cell;
    cell.id = "p_" + t.id;
    std::replace(cell.id.begin(), cell.id.end(), '.', '_');
    Ref r;
    r.name = t.id;
    if (t.is_family) {
      cell.is_family = true;
      cell.index_var = "r";
      r.fam = Index{Index::Base::Family, 0};
    }
    cell.tips.push_back(r);
    spec.cells.push_back(std::move(cell));
  }
  return spec;
}

PartitionSpec indiscrete_partition(const Bundle& d, Rank rho) {
  PartitionSpec spec;
  spec.id = "indiscrete";
  spec.rank = rho;
  auto tips = compute_ditips(d, rho);
  bool any_family = false;
  for (const auto& t : tips) any_family |= t.is_family;
  if (any_family) {
    // One cell per index, holding every family tip at that index plus, in
    // cell 0, all concrete tips.
    PartitionCell cell;
    cell.id = "all";
    cell.is_family = true;
    cell.index_var = "r";
    for (const auto& t : tips) {
      Ref r;
      r.name = t.id;
      if (t.is_family) {
        r.fam = Index{Index::Base::Family, 0};
        cell.tips.push_back(r);
      }
    }
    spec.cells.push_back(cell);
    PartitionCell c0;
    c0.id = "rest";
    for (const auto& t : tips) {
      if (t.is_family) continue;
      Ref r;
      r.name = t.id;
      c0.tips.push_back(r);
    }
    if (!c0.tips.empty()) spec.cells.push_back(c0);
  } else {
    PartitionCell cell;
    cell.id = "all";
    for (const auto& t : tips) {
      Ref r;
      r.name = t.id;
      cell.tips.push_back(r);
    }
    spec.cells.push_back(cell);
  }
  return spec;
}

}  // namespace tdg
