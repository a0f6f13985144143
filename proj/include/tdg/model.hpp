#ifndef TDG_MODEL_HPP
#define TDG_MODEL_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdg/rank.hpp"

namespace tdg {

// Affine index appearing in references: a literal, k+c over the period
// variable of a repetend, or r+c over the index variable of a family.
struct Index {
  enum class Base { Lit, Period, Family };
  Base base = Base::Lit;
  int offset = 0;

  bool operator==(const Index&) const = default;
  auto operator<=>(const Index&) const = default;
};

// Reference to a named element. Covers concrete ids ("u"), family members
// ("v1[3]", "v1[r+1]", "v1[k]"), template cells ("lad.top@5",
// "rays[r].d@k+1") and tip names ("V.in", "V.out[r-1]").
struct Ref {
  std::string name;
  std::string instance;       // owning instance for template node/arc refs
  std::optional<Index> fam;   // [..] index
  std::optional<Index> cell;  // @.. index

  bool operator==(const Ref&) const = default;
  auto operator<=>(const Ref&) const = default;

  std::string str() const;
  static Ref concrete(std::string id) { return Ref{std::move(id), "", {}, {}}; }
};

struct Arc {
  std::string id;
  Ref tail;
  Ref head;
};

struct Vertex {
  std::string id;
  Rank rank = Rank::finite(0);     // finite >= 0, or omega
  std::vector<Ref> in_members;     // intip refs; empty at rank 0
  std::vector<Ref> out_members;    // outtip refs
};

struct VertexFamily {
  std::string id;
  Rank rank = Rank::finite(1);
  std::string index_var = "r";
  std::vector<Ref> in_members;     // may use the Family variable
  std::vector<Ref> out_members;
};

enum class WalkMode { Finite, ExtendedIn, ExtendedOut, Endless };

enum class TipDir { In, Out };

struct TipMember {
  std::string walk;
  // For family tips: member walk's family index = tip index + fam_delta.
  int fam_delta = 0;
  auto operator<=>(const TipMember&) const = default;
};

// An equivalence class of declared extended presentations under eventual
// identity, tagged with direction and rank.
struct Ditip {
  std::string id;  // "<first member walk>.<in|out>", deterministic
  TipDir dir = TipDir::In;
  Rank rank = Rank::finite(0);
  bool is_family = false;  // one tip per family index
  std::vector<TipMember> members;
};

// A walk given finitely: an explicit body plus, for the infinite modes,
// periodic repetends. Denoted sequences:
//   Finite:      mid (v s v ... v)
//   ExtendedOut: mid (v s ... v s | empty) ++ R(a), R(a+1), ...   R = out_rep
//   ExtendedIn:  ..., R(a+1), R(a) ++ mid (s v ... s v | empty)   R = in_rep
//   Endless:     ..., Rin(ai+1), Rin(ai) ++ mid (s | s v s ...) ++
//                Rout(ao), Rout(ao+1), ...
// out_rep alternates v s ... v s; in_rep alternates s v ... s v. Period
// variables in repetend refs take the period counter as value.
struct WalkPresentation {
  std::string id;
  Rank rank = Rank::finite(0);
  WalkMode mode = WalkMode::Finite;
  bool is_family = false;           // one walk per family index (over an
  std::string index_var;            // instance family)
  std::vector<Ref> mid;
  std::vector<Ref> out_rep;
  int out_anchor = 0;
  std::vector<Ref> in_rep;
  int in_anchor = 0;
};

struct TemplateArc {
  std::string id;
  std::string tail_node;
  int tail_off = 0;  // in {-1,0,+1}
  std::string head_node;
  int head_off = 0;
};

struct CellTemplate {
  std::string id;
  std::vector<std::string> nodes;
  std::vector<TemplateArc> arcs;

  const TemplateArc* find_arc(const std::string& arc_id) const;
  bool has_node(const std::string& node_id) const;
};

struct Instance {
  std::string id;
  std::string template_id;
  bool is_family = false;  // family: one disjoint copy per natural index
  std::string index_var;
};

struct PartitionCell {
  std::string id;  // new vertex id (pattern when parametric)
  bool is_family = false;
  std::string index_var;
  std::vector<Ref> tips;
};

struct PartitionSpec {
  std::string id;
  Rank rank = Rank::finite(0);  // rank of the tips being partitioned
  std::vector<PartitionCell> cells;
};

// Arrow-rank machinery: per-level patterns, uniform in the level index k.
struct ArrowVertexPattern {
  std::string id;           // materializes as id[k], rank base+k
  int from_level = 0;
  std::vector<Ref> members;  // tip pattern refs over the level variable
};

struct ArrowWalkPattern {
  std::string id;  // id[k], rank base+k
  int from_level = 0;
  WalkMode mode = WalkMode::ExtendedOut;
  Ref terminal;       // vertex pattern ref (id[k]) or a concrete vertex id
  bool tips_in = false;   // which tip patterns the walk produces
  bool tips_out = false;
};

struct ArrowTemplate {
  int base_rank = 0;
  std::vector<ArrowVertexPattern> vertex_patterns;
  std::vector<ArrowWalkPattern> walk_patterns;
};

struct ArrowWalk {
  std::string id;
  WalkMode mode = WalkMode::ExtendedOut;  // out-diwalk, in-diwalk or endless
  Ref base;                               // v0 at the base rank
  std::string spine_vertex;               // vertex pattern (out side)
  std::string spine_walk;                 // walk pattern (out side)
  std::string in_spine_vertex;            // in side (in/endless modes)
  std::string in_spine_walk;
  std::map<int, std::string> overrides;   // level -> override marker
};

struct Bundle {
  std::string name;
  Rank rank = Rank::finite(0);
  std::map<std::string, CellTemplate> templates;
  std::map<std::string, Instance> instances;
  std::map<std::string, Arc> arcs;
  std::map<std::string, Vertex> vertices;
  std::map<std::string, VertexFamily> vertex_families;
  std::map<std::string, WalkPresentation> walks;
  std::optional<ArrowTemplate> arrow_template;
  std::map<std::string, ArrowWalk> arrow_walks;
  std::vector<PartitionSpec> partitions;

  bool has_vertex_id(const std::string& id) const {
    return vertices.count(id) || vertex_families.count(id);
  }
};

struct Violation {
  std::string code;     // stable identifier, e.g. "non-pristine-member-rank"
  std::string subject;  // offending id
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  void add(std::string code, std::string subject, std::string detail = "") {
    violations.push_back({std::move(code), std::move(subject), std::move(detail)});
  }
};

// Checks every structural invariant of the bundle: arc endpoints, rank
// legality, pristineness (members exactly one rank below), nonempty members
// for ranks >= 1, contiguous nonempty levels, and the partition property of
// every vertex level against the declared tips of the rank below.
// Violations are data, not failures.
ValidationReport validate_bundle(const Bundle& d);

// Pristineness subset of validate_bundle: member ranks and no embraced
// vertices (vertex refs never appear as members).
ValidationReport check_pristine(const Bundle& d);

// Domain error with a stable code; thrown on contract violations.
struct DomainError : std::runtime_error {
  std::string code;
  DomainError(std::string c, const std::string& msg)
      : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

// Parses reference syntax: "u", "v1[3]", "v1[r+1]", "lad.top@5",
// "rays[r].d@k+1", "V.in", "V.out[r-1]". Variable names matching
// period_var / family_var map to the corresponding index bases; other
// names fail. Tip references keep the ".in"/".out" suffix in `name`.
bool parse_ref(const std::string& text, Ref& out,
               const std::string& period_var = "",
               const std::string& family_var = "");

}  // namespace tdg

#endif
