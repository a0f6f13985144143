#include "tdg/commands.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tdg/connect.hpp"
#include "tdg/elevate.hpp"
#include "tdg/omega.hpp"
#include "tdg/present.hpp"
#include "tdg/spec_doc.hpp"

namespace tdg {

using nlohmann::json;

namespace {

json meta_json(const GlobalOpts& opt) {
  return json{{"unfold_depth", opt.unfold_depth}};
}

CommandResult usage_error(const std::string& msg) {
  return {2, "usage error: " + msg + "\n"};
}

CommandResult wrap(const GlobalOpts& opt, const std::string& command,
                   const json& result, int code, const std::string& text) {
  if (opt.format == "json") {
    json out{{"command", command}, {"result", result}, {"meta", meta_json(opt)}};
    return {code, out.dump(2) + "\n"};
  }
  return {code, text};
}

CommandResult cmd_validate(const Bundle& d, const GlobalOpts& opt) {
  auto rep = validate_bundle(d);
  json jres{{"ok", rep.ok()}};
  std::ostringstream os;
  json jv = json::array();
  for (const auto& v : rep.violations) {
    os << "violation " << v.code << " " << v.subject;
    if (!v.detail.empty()) os << ": " << v.detail;
    os << "\n";
    jv.push_back({{"code", v.code}, {"subject", v.subject}, {"detail", v.detail}});
  }
  jres["violations"] = jv;
  if (rep.ok()) os << "ok\n";
  return wrap(opt, "validate", jres, rep.ok() ? 0 : 1, os.str());
}

CommandResult cmd_tips(const Bundle& d, const std::string& rank_text,
                       const GlobalOpts& opt) {
  Rank r = Rank::finite(0);
  if (!Rank::parse(rank_text, r)) return usage_error("bad rank " + rank_text);
  std::vector<Ditip> tips =
      r.is_arrow() ? arrow_ditips(d) : compute_ditips(d, r);
  std::ostringstream os;
  json jt = json::array();
  for (const auto& t : tips) {
    os << "tip " << t.id << " dir " << tip_dir_str(t.dir) << " rank "
       << t.rank.str() << (t.is_family ? " family" : "") << " members";
    json jm = json::array();
    for (const auto& m : t.members) {
      os << " " << m.walk;
      if (m.fam_delta != 0) os << "(" << m.fam_delta << ")";
      jm.push_back({{"walk", m.walk}, {"fam_delta", m.fam_delta}});
    }
    os << "\n";
    jt.push_back({{"id", t.id},
                  {"dir", tip_dir_str(t.dir)},
                  {"rank", t.rank.str()},
                  {"family", t.is_family},
                  {"members", jm}});
  }
  os << "count: " << tips.size() << "\n";
  return wrap(opt, "tips", json{{"tips", jt}, {"count", tips.size()}}, 0,
              os.str());
}

CommandResult cmd_components(const Bundle& d, const std::string& kind_text,
                             const std::string& rank_text,
                             const GlobalOpts& opt) {
  Rank r = Rank::finite(0);
  if (!Rank::parse(rank_text, r)) return usage_error("bad rank " + rank_text);
  ConnectKind kind;
  if (kind_text == "strong")
    kind = ConnectKind::Strong;
  else if (kind_text == "unilateral")
    kind = ConnectKind::Unilateral;
  else if (kind_text == "weak")
    kind = ConnectKind::Weak;
  else
    return usage_error("bad kind " + kind_text);

  ConnectOptions copt;
  copt.unfold_depth = opt.unfold_depth;
  copt.max_components = opt.max_components;
  auto cs = components(d, r, kind, copt);

  std::ostringstream os;
  os << "kind: " << connect_kind_str(kind) << "\n";
  os << "rank: " << r.str() << "\n";
  os << "method: " << cs.method << "\n";
  os << "unfold_depth: " << opt.unfold_depth << "\n";
  if (cs.method == "window") os << "window_depth: " << cs.window_depth << "\n";
  if (cs.truncated) os << "truncated: true\n";
  os << "count: " << cs.blocks.size() << "\n";
  json jc = json::array();
  for (const auto& b : cs.blocks) {
    os << "component:";
    if (b.per_index) os << " (one per index)";
    for (const auto& m : b.members) os << " " << m;
    os << "\n";
    jc.push_back({{"members", b.members}, {"per_index", b.per_index}});
  }
  json jres{{"kind", connect_kind_str(kind)},
            {"rank", r.str()},
            {"method", cs.method},
            {"count", cs.blocks.size()},
            {"truncated", cs.truncated},
            {"components", jc}};
  return wrap(opt, "components", jres, 0, os.str());
}

CommandResult cmd_reach(const Bundle& d, const std::string& from,
                        const std::string& to, const std::string& rank_text,
                        const GlobalOpts& opt) {
  Rank r = Rank::finite(0);
  if (!Rank::parse(rank_text, r)) return usage_error("bad rank " + rank_text);
  ConnectOptions copt;
  copt.unfold_depth = opt.unfold_depth;
  auto ans = reach_query(d, from, to, r, copt);
  std::ostringstream os;
  os << (ans.connected ? "true" : "false") << "\n";
  os << "method: " << ans.method << "\n";
  os << "unfold_depth: " << opt.unfold_depth << "\n";
  json jres{{"from", from},
            {"to", to},
            {"rank", r.str()},
            {"reachable", ans.connected},
            {"method", ans.method}};
  return wrap(opt, "reach", jres, 0, os.str());
}

CommandResult cmd_elevate(const Bundle& d, const std::string& partition_text,
                          const std::string& which, const GlobalOpts& opt) {
  auto pr = parse_spec(partition_text);
  // Partition files may omit the digraph header.
  std::vector<ParseError> hard;
  for (const auto& e : pr.errors)
    if (e.message != "missing digraph header") hard.push_back(e);
  if (!hard.empty())
    return {1, "parse error in partition file: " + hard.front().message + "\n"};
  if (pr.bundle.partitions.empty())
    return usage_error("partition file declares no partition");
  const PartitionSpec* spec = &pr.bundle.partitions.front();
  if (!which.empty()) {
    spec = nullptr;
    for (const auto& p : pr.bundle.partitions)
      if (p.id == which) spec = &p;
    if (!spec) return usage_error("no partition named " + which);
  }
  Bundle lifted = spec->rank.is_arrow() ? elevate_to_omega(d, *spec)
                                        : elevate(d, *spec);
  std::string text = print_spec(lifted);
  json jres{{"rank", lifted.rank.str()}, {"spec", text}};
  return wrap(opt, "elevate", jres, 0, text);
}

CommandResult cmd_underlying(const Bundle& d, const GlobalOpts& opt) {
  auto g = underlying_graph(d);
  std::ostringstream os;
  json jb = json::array();
  for (const auto& b : g.branches) {
    os << "branch " << b.id << " " << b.end1 << " " << b.end2 << "\n";
    jb.push_back({{"id", b.id}, {"ends", {b.end1, b.end2}}});
  }
  json jl = json::object();
  for (const auto& [r, ids] : g.node_levels) {
    os << "level " << r << ":";
    for (const auto& id : ids) os << " " << id;
    os << "\n";
    jl[std::to_string(r)] = ids;
  }
  json jt = json::object();
  for (const auto& [r, ids] : g.tip_levels) {
    os << "tips " << r << ":";
    for (const auto& id : ids) os << " " << id;
    os << "\n";
    jt[std::to_string(r)] = ids;
  }
  return wrap(opt, "underlying",
              json{{"branches", jb}, {"levels", jl}, {"tips", jt}}, 0,
              os.str());
}

}  // namespace

std::string export_dot(const Bundle& d, int unfold_depth) {
  std::ostringstream os;
  os << "digraph \"" << d.name << "\" {\n";
  auto base = unfold_base(d, unfold_depth);
  for (const auto& v : base.vertices) os << "  \"" << v << "\";\n";
  for (const auto& a : base.arcs)
    os << "  \"" << a.tail << "\" -> \"" << a.head << "\" [label=\"" << a.id
       << "\"];\n";

  // Higher-rank vertices grouped per rank, tips as dashed membership edges.
  std::vector<int> ranks;
  if (d.rank.is_finite())
    for (int r = 1; r <= d.rank.value(); ++r) ranks.push_back(r);
  for (int rho : ranks) {
    os << "  // rank " << rho << "\n";
    auto tips = compute_ditips(d, Rank::finite(rho - 1));
    auto emit_vertex = [&](const std::string& vid,
                           const std::vector<Ref>& in_m,
                           const std::vector<Ref>& out_m,
                           std::optional<int> fam) {
      os << "  \"" << vid << "\" [shape=box,label=\"v^" << rho << "_" << vid
         << "\"];\n";
      for (const auto& lists : {&in_m, &out_m}) {
        for (const auto& mref : *lists) {
          auto rt = resolve_tip_ref(tips, mref);
          if (!rt.valid) continue;
          // Anchor the membership edge at the first materialized tail
          // vertex of the tip's first member walk.
          for (const auto& t : tips) {
            if (t.id != rt.tip_id) continue;
            const auto& mem = t.members.front();
            auto w = d.walks.find(mem.walk);
            if (w == d.walks.end()) break;
            std::optional<int> widx;
            if (w->second.is_family) {
              if (!rt.index) break;
              Index have = *rt.index;
              if (have.base == Index::Base::Family && fam)
                have = Index{Index::Base::Lit, *fam + have.offset};
              if (have.base != Index::Base::Lit) break;
              widx = have.offset + mem.fam_delta;
              if (*widx < 0) break;
            }
            TipDir dirs = t.dir;
            try {
              auto tail = unfold_tail(d, w->second, dirs, 1, widx);
              if (!tail.empty())
                os << "  \"" << vid << "\" -> \"" << tail.front()
                   << "\" [style=dashed,label=\"" << t.id << "\"];\n";
            } catch (const DomainError&) {
            }
            break;
          }
        }
      }
    };
    for (const auto& [id, v] : d.vertices)
      if (v.rank == Rank::finite(rho))
        emit_vertex(id, v.in_members, v.out_members, std::nullopt);
    for (const auto& [id, f] : d.vertex_families)
      if (f.rank == Rank::finite(rho))
        for (int r = 0; r < unfold_depth; ++r) {
          std::vector<Ref> in_m = f.in_members, out_m = f.out_members;
          emit_vertex(id + "[" + std::to_string(r) + "]", in_m, out_m, r);
        }
  }
  os << "}\n";
  return os.str();
}

CommandResult run_command(const Bundle& d, const std::string& command,
                          const std::vector<std::string>& args,
                          const GlobalOpts& opt) {
  try {
    if (command == "validate") {
      if (!args.empty()) return usage_error("validate takes no arguments");
      return cmd_validate(d, opt);
    }
    if (command == "tips") {
      if (args.size() != 1) return usage_error("tips RANK");
      return cmd_tips(d, args[0], opt);
    }
    if (command == "components") {
      if (args.size() != 2) return usage_error("components KIND RANK");
      return cmd_components(d, args[0], args[1], opt);
    }
    if (command == "reach") {
      if (args.size() != 3) return usage_error("reach FROM TO RANK");
      return cmd_reach(d, args[0], args[1], args[2], opt);
    }
    if (command == "elevate") {
      if (args.empty() || args.size() > 2)
        return usage_error("elevate PARTITION_TEXT [NAME]");
      return cmd_elevate(d, args[0], args.size() > 1 ? args[1] : "", opt);
    }
    if (command == "underlying") {
      if (!args.empty()) return usage_error("underlying takes no arguments");
      return cmd_underlying(d, opt);
    }
    if (command == "export-dot") {
      if (!args.empty()) return usage_error("export-dot takes no arguments");
      std::string text = export_dot(d, opt.unfold_depth);
      return wrap(opt, "export-dot", json{{"dot", text}}, 0, text);
    }
    return usage_error("unknown command " + command);
  } catch (const DomainError& e) {
    std::ostringstream os;
    os << "error " << e.code << ": " << e.what() << "\n";
    if (opt.format == "json") {
      json out{{"command", command},
               {"result", {{"error", e.code}, {"message", e.what()}}},
               {"meta", meta_json(opt)}};
      return {1, out.dump(2) + "\n"};
    }
    return {1, os.str()};
  }
}

}  // namespace tdg
