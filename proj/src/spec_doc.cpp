#include "tdg/spec_doc.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "tdg/present.hpp"

namespace tdg {

namespace {

struct Token {
  std::string text;
  int line = 0, col = 0;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::string cur;
  int cur_line = 0, cur_col = 0;
  int bracket_depth = 0;  // inside word-attached [..]
  auto flush = [&]() {
    if (!cur.empty()) {
      out.push_back({cur, cur_line, cur_col});
      cur.clear();
    }
    bracket_depth = 0;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '#') {
      flush();
      while (i < text.size() && text[i] != '\n') ++i;
      ++line;
      col = 1;
      continue;
    }
    if (c == '\n') {
      flush();
      ++line;
      col = 1;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
      ++col;
      continue;
    }
    if (c == '[' && cur.empty()) {
      out.push_back({"[", line, col});
      ++col;
      continue;
    }
    if (c == '[') {
      ++bracket_depth;
      cur += c;
      ++col;
      continue;
    }
    if (c == ']' && bracket_depth > 0) {
      --bracket_depth;
      cur += c;
      ++col;
      continue;
    }
    if (c == ']' || c == '{' || c == '}' || c == ';' || c == ',' || c == ':' ||
        c == '=') {
      flush();
      out.push_back({std::string(1, c), line, col});
      ++col;
      continue;
    }
    if (cur.empty()) {
      cur_line = line;
      cur_col = col;
    }
    cur += c;
    ++col;
  }
  flush();
  return out;
}

struct Parser {
  std::vector<Token> toks;
  std::size_t pos = 0;
  ParseResult res;
  std::set<std::string> all_ids;

  const Token& peek() const {
    static Token eof{"", 0, 0};
    return pos < toks.size() ? toks[pos] : eof;
  }
  bool at_end() const { return pos >= toks.size(); }
  Token take() {
    Token t = peek();
    if (pos < toks.size()) ++pos;
    return t;
  }
  void error(const std::string& code, const std::string& msg) {
    const Token& t = peek();
    res.errors.push_back({t.line, t.col, code, msg});
  }
  bool expect(const std::string& word) {
    if (peek().text == word) {
      take();
      return true;
    }
    error("SyntaxError", "expected '" + word + "', found '" + peek().text + "'");
    return false;
  }
  // Skips to the start of the next statement keyword after an error.
  void synchronize() {
    static const std::set<std::string> starts = {
        "digraph",   "template",     "instance", "instance-family",
        "vertex",    "vertex-family", "arc",      "walk",
        "walk-presentation", "walk-family", "partition", "arrow-template",
        "arrow-walk"};
    while (!at_end() && !starts.count(peek().text)) take();
  }

  bool declare(const std::string& id) {
    if (!all_ids.insert(id).second) {
      error("DuplicateId", id);
      return false;
    }
    return true;
  }

  bool parse_rank(Rank& r) {
    Token t = take();
    if (!Rank::parse(t.text, r)) {
      res.errors.push_back({t.line, t.col, "SyntaxError",
                            "bad rank '" + t.text + "'"});
      return false;
    }
    return true;
  }

  bool parse_ref_tok(Ref& r, const std::string& fam_var) {
    Token t = take();
    if (!tdg::parse_ref(t.text, r, "k", fam_var)) {
      res.errors.push_back(
          {t.line, t.col, "SyntaxError", "bad reference '" + t.text + "'"});
      return false;
    }
    return true;
  }

  bool parse_int(int& v) {
    Token t = take();
    try {
      std::size_t used = 0;
      v = std::stoi(t.text, &used);
      if (used != t.text.size()) throw std::invalid_argument("");
      return true;
    } catch (...) {
      res.errors.push_back(
          {t.line, t.col, "SyntaxError", "expected integer, found '" + t.text + "'"});
      return false;
    }
  }

  bool parse_ref_list(std::vector<Ref>& out, const std::string& fam_var) {
    if (!expect("[")) return false;
    while (peek().text != "]" && !at_end()) {
      Ref r;
      if (!parse_ref_tok(r, fam_var)) return false;
      out.push_back(r);
    }
    return expect("]");
  }

  void parse_digraph(Bundle& b) {
    take();  // digraph
    b.name = take().text;
    expect("rank");
    parse_rank(b.rank);
  }

  void parse_template(Bundle& b) {
    take();
    CellTemplate t;
    t.id = take().text;
    if (!declare(t.id)) return;
    if (!expect("{")) return;
    while (peek().text != "}" && !at_end()) {
      std::string kw = take().text;
      if (kw == "node") {
        t.nodes.push_back(take().text);
        expect(";");
      } else if (kw == "arc") {
        TemplateArc a;
        a.id = take().text;
        expect("from");
        // Template-arc endpoints are bare node@k+D references.
        auto parse_end = [&](std::string& node, int& off) {
          Token tok = take();
          auto at = tok.text.find('@');
          bool ok = at != std::string::npos;
          if (ok) {
            node = tok.text.substr(0, at);
            std::string ix = tok.text.substr(at + 1);
            try {
              if (ix == "k")
                off = 0;
              else if (ix.rfind("k+", 0) == 0)
                off = std::stoi(ix.substr(2));
              else if (ix.rfind("k-", 0) == 0)
                off = -std::stoi(ix.substr(2));
              else
                ok = false;
            } catch (...) {
              ok = false;
            }
          }
          if (!ok)
            res.errors.push_back({tok.line, tok.col, "SyntaxError",
                                  "template arcs need node@k+D endpoints, got '" +
                                      tok.text + "'"});
          return ok;
        };
        if (!parse_end(a.tail_node, a.tail_off)) return;
        expect("to");
        if (!parse_end(a.head_node, a.head_off)) return;
        expect(";");
        if (!std::count(t.nodes.begin(), t.nodes.end(), a.tail_node) ||
            !std::count(t.nodes.begin(), t.nodes.end(), a.head_node)) {
          res.errors.push_back({peek().line, peek().col, "ForwardReference",
                                "template arc " + a.id +
                                    " uses an undefined node"});
          return;
        }
        t.arcs.push_back(a);
      } else {
        error("SyntaxError", "expected node/arc in template, found '" + kw + "'");
        return;
      }
    }
    expect("}");
    std::sort(t.nodes.begin(), t.nodes.end());
    b.templates[t.id] = t;
  }

  void parse_instance(Bundle& b, bool family) {
    take();
    Instance inst;
    inst.id = take().text;
    inst.is_family = family;
    if (!declare(inst.id)) return;
    expect("template");
    inst.template_id = take().text;
    if (family) {
      expect("index");
      inst.index_var = take().text;
      if (inst.index_var == "k") {
        error("SyntaxError", "index variable k is reserved");
        return;
      }
    }
    b.instances[inst.id] = inst;
  }

  void parse_members(std::vector<Ref>& in_m, std::vector<Ref>& out_m,
                     const std::string& fam_var) {
    expect("{");
    while (peek().text != "}" && !at_end()) {
      std::string kw = take().text;
      bool is_in = kw == "intip";
      if (!is_in && kw != "outtip") {
        error("SyntaxError", "expected intip/outtip, found '" + kw + "'");
        return;
      }
      Ref r;
      if (!parse_ref_tok(r, fam_var)) return;
      (is_in ? in_m : out_m).push_back(r);
      expect(";");
    }
    expect("}");
  }

  void parse_vertex(Bundle& b, bool family) {
    take();
    std::string id = take().text;
    if (!declare(id)) return;
    Rank r = Rank::finite(0);
    expect("rank");
    if (!parse_rank(r)) return;
    std::string var;
    if (family) {
      expect("index");
      var = take().text;
      if (var == "k") {
        error("SyntaxError", "index variable k is reserved");
        return;
      }
    }
    std::vector<Ref> in_m, out_m;
    if (peek().text == "{") parse_members(in_m, out_m, var);
    if (family) {
      VertexFamily f;
      f.id = id;
      f.rank = r;
      f.index_var = var;
      f.in_members = in_m;
      f.out_members = out_m;
      b.vertex_families[id] = f;
    } else {
      Vertex v;
      v.id = id;
      v.rank = r;
      v.in_members = in_m;
      v.out_members = out_m;
      b.vertices[id] = v;
    }
  }

  void parse_arc(Bundle& b) {
    take();
    Arc a;
    a.id = take().text;
    if (!declare(a.id)) return;
    expect("from");
    if (!parse_ref_tok(a.tail, "")) return;
    expect("to");
    if (!parse_ref_tok(a.head, "")) return;
    b.arcs[a.id] = a;
  }

  void parse_walk(Bundle& b) {
    take();
    WalkPresentation w;
    w.mode = WalkMode::Finite;
    w.id = take().text;
    if (!declare(w.id)) return;
    expect("rank");
    if (!parse_rank(w.rank)) return;
    if (peek().text == "=") take();
    if (!parse_ref_list(w.mid, "")) return;
    b.walks[w.id] = w;
  }

  void parse_walk_presentation(Bundle& b, bool family) {
    take();
    WalkPresentation w;
    w.id = take().text;
    if (!declare(w.id)) return;
    expect("rank");
    if (!parse_rank(w.rank)) return;
    if (family) {
      expect("index");
      w.is_family = true;
      w.index_var = take().text;
      if (w.index_var == "k") {
        error("SyntaxError", "index variable k is reserved");
        return;
      }
    }
    expect("mode");
    std::string mode = take().text;
    const std::string& fv = w.index_var;
    if (mode == "out") {
      w.mode = WalkMode::ExtendedOut;
      expect("prefix");
      if (!parse_ref_list(w.mid, fv)) return;
      expect("repetend");
      if (!parse_ref_list(w.out_rep, fv)) return;
      expect("anchor");
      if (!parse_int(w.out_anchor)) return;
    } else if (mode == "in") {
      w.mode = WalkMode::ExtendedIn;
      expect("repetend");
      if (!parse_ref_list(w.in_rep, fv)) return;
      expect("anchor");
      if (!parse_int(w.in_anchor)) return;
      expect("prefix");
      if (!parse_ref_list(w.mid, fv)) return;
    } else if (mode == "endless") {
      w.mode = WalkMode::Endless;
      expect("in-repetend");
      if (!parse_ref_list(w.in_rep, fv)) return;
      expect("in-anchor");
      if (!parse_int(w.in_anchor)) return;
      expect("middle");
      if (!parse_ref_list(w.mid, fv)) return;
      expect("out-repetend");
      if (!parse_ref_list(w.out_rep, fv)) return;
      expect("out-anchor");
      if (!parse_int(w.out_anchor)) return;
    } else {
      error("SyntaxError", "bad mode '" + mode + "'");
      return;
    }
    b.walks[w.id] = w;
  }

  void parse_partition(Bundle& b) {
    take();
    PartitionSpec spec;
    spec.id = take().text;
    if (!declare(spec.id)) return;
    expect("rank");
    if (!parse_rank(spec.rank)) return;
    if (!expect("{")) return;
    while (peek().text != "}" && !at_end()) {
      PartitionCell cell;
      Token ct = take();
      std::string name = ct.text;
      auto lb = name.find('[');
      if (lb != std::string::npos && name.back() == ']') {
        cell.id = name.substr(0, lb);
        cell.index_var = name.substr(lb + 1, name.size() - lb - 2);
        cell.is_family = true;
        if (cell.index_var == "k") {
          error("SyntaxError", "index variable k is reserved");
          return;
        }
      } else {
        cell.id = name;
      }
      if (!expect(":")) return;
      for (;;) {
        Ref r;
        if (!parse_ref_tok(r, cell.index_var)) return;
        cell.tips.push_back(r);
        if (peek().text == ",") {
          take();
          continue;
        }
        break;
      }
      expect(";");
      spec.cells.push_back(cell);
    }
    expect("}");
    b.partitions.push_back(spec);
  }

  void parse_arrow_template(Bundle& b) {
    take();
    ArrowTemplate t;
    expect("base");
    if (!parse_int(t.base_rank)) return;
    if (!expect("{")) return;
    while (peek().text != "}" && !at_end()) {
      std::string kw = take().text;
      if (kw == "vertex-pattern") {
        ArrowVertexPattern p;
        p.id = take().text;
        if (!declare(p.id)) return;
        expect("from");
        if (!parse_int(p.from_level)) return;
        expect("members");
        if (!parse_ref_list(p.members, "")) return;
        expect(";");
        t.vertex_patterns.push_back(p);
      } else if (kw == "walk-pattern") {
        ArrowWalkPattern p;
        p.id = take().text;
        if (!declare(p.id)) return;
        expect("from");
        if (!parse_int(p.from_level)) return;
        expect("mode");
        std::string m = take().text;
        if (m == "out")
          p.mode = WalkMode::ExtendedOut;
        else if (m == "in")
          p.mode = WalkMode::ExtendedIn;
        else {
          error("SyntaxError", "bad walk-pattern mode '" + m + "'");
          return;
        }
        expect("terminal");
        if (!parse_ref_tok(p.terminal, "")) return;
        expect("tips");
        std::string tips = take().text;
        p.tips_in = tips == "in" || tips == "both";
        p.tips_out = tips == "out" || tips == "both";
        if (!p.tips_in && !p.tips_out) {
          error("SyntaxError", "bad tips '" + tips + "'");
          return;
        }
        expect(";");
        t.walk_patterns.push_back(p);
      } else {
        error("SyntaxError", "expected vertex-pattern/walk-pattern");
        return;
      }
    }
    expect("}");
    b.arrow_template = t;
  }

  void parse_arrow_walk(Bundle& b) {
    take();
    ArrowWalk w;
    w.id = take().text;
    if (!declare(w.id)) return;
    expect("mode");
    std::string m = take().text;
    expect("base");
    if (!parse_ref_tok(w.base, "")) return;
    if (m == "out") {
      w.mode = WalkMode::ExtendedOut;
      expect("spine");
      w.spine_vertex = take().text;
      w.spine_walk = take().text;
    } else if (m == "in") {
      w.mode = WalkMode::ExtendedIn;
      expect("spine");
      w.in_spine_vertex = take().text;
      w.in_spine_walk = take().text;
    } else if (m == "endless") {
      w.mode = WalkMode::Endless;
      expect("out-spine");
      w.spine_vertex = take().text;
      w.spine_walk = take().text;
      expect("in-spine");
      w.in_spine_vertex = take().text;
      w.in_spine_walk = take().text;
    } else {
      error("SyntaxError", "bad arrow-walk mode '" + m + "'");
      return;
    }
    while (peek().text == "override") {
      take();
      int k;
      if (!parse_int(k)) return;
      expect("=");
      w.overrides[k] = take().text;
    }
    b.arrow_walks[w.id] = w;
  }

  void run() {
    bool have_header = false;
    while (!at_end()) {
      std::string kw = peek().text;
      std::size_t before = res.errors.size();
      if (kw == "digraph") {
        parse_digraph(res.bundle);
        have_header = true;
      } else if (kw == "template")
        parse_template(res.bundle);
      else if (kw == "instance")
        parse_instance(res.bundle, false);
      else if (kw == "instance-family")
        parse_instance(res.bundle, true);
      else if (kw == "vertex")
        parse_vertex(res.bundle, false);
      else if (kw == "vertex-family")
        parse_vertex(res.bundle, true);
      else if (kw == "arc")
        parse_arc(res.bundle);
      else if (kw == "walk")
        parse_walk(res.bundle);
      else if (kw == "walk-presentation")
        parse_walk_presentation(res.bundle, false);
      else if (kw == "walk-family")
        parse_walk_presentation(res.bundle, true);
      else if (kw == "partition")
        parse_partition(res.bundle);
      else if (kw == "arrow-template")
        parse_arrow_template(res.bundle);
      else if (kw == "arrow-walk")
        parse_arrow_walk(res.bundle);
      else {
        error("SyntaxError", "unknown keyword '" + kw + "'");
        take();
      }
      if (res.errors.size() > before) synchronize();
    }
    if (!have_header && res.errors.empty())
      res.errors.push_back({1, 1, "SyntaxError", "missing digraph header"});
    // Late resolution: instances must name declared templates.
    for (const auto& [id, inst] : res.bundle.instances)
      if (!res.bundle.templates.count(inst.template_id))
        res.errors.push_back({0, 0, "ForwardReference",
                              "instance " + id + " uses unknown template " +
                                  inst.template_id});
  }
};

std::string index_out(const Index& ix, const std::string& fam_var) {
  switch (ix.base) {
    case Index::Base::Lit:
      return std::to_string(ix.offset);
    case Index::Base::Period:
      break;
    case Index::Base::Family:
      break;
  }
  std::string base = ix.base == Index::Base::Period ? "k" : fam_var;
  if (ix.offset > 0) return base + "+" + std::to_string(ix.offset);
  if (ix.offset < 0) return base + std::to_string(ix.offset);
  return base;
}

std::string ref_out(const Ref& r, const std::string& fam_var) {
  std::string s;
  if (!r.instance.empty()) {
    s += r.instance;
    if (r.fam) s += "[" + index_out(*r.fam, fam_var) + "]";
    s += "." + r.name;
  } else {
    s = r.name;
    if (r.fam) s += "[" + index_out(*r.fam, fam_var) + "]";
  }
  if (r.cell) s += "@" + index_out(*r.cell, fam_var);
  return s;
}

std::string list_out(const std::vector<Ref>& refs, const std::string& fam_var) {
  std::string s = "[";
  for (const auto& r : refs) s += " " + ref_out(r, fam_var);
  s += refs.empty() ? "]" : " ]";
  return s;
}

}  // namespace

ParseResult parse_spec(const std::string& text) {
  Parser p;
  p.toks = tokenize(text);
  p.run();
  return p.res;
}

Bundle parse_spec_or_throw(const std::string& text) {
  auto r = parse_spec(text);
  if (!r.ok()) {
    const auto& e = r.errors.front();
    throw DomainError("ParseFailed", e.code + " at " + std::to_string(e.line) +
                                         ":" + std::to_string(e.col) + ": " +
                                         e.message);
  }
  return r.bundle;
}

std::string print_spec(const Bundle& d) {
  std::ostringstream os;
  os << "digraph " << d.name << " rank " << d.rank.str() << "\n";

  for (const auto& [id, t] : d.templates) {
    os << "template " << id << " {\n";
    for (const auto& n : t.nodes) os << "  node " << n << ";\n";
    for (const auto& a : t.arcs) {
      auto cell = [](int off) {
        Ref r;
        r.name = "x";
        r.cell = Index{Index::Base::Period, off};
        auto s = r.str();
        return s.substr(s.find('@'));
      };
      os << "  arc " << a.id << " from " << a.tail_node << cell(a.tail_off)
         << " to " << a.head_node << cell(a.head_off) << ";\n";
    }
    os << "}\n";
  }
  for (const auto& [id, inst] : d.instances) {
    if (inst.is_family)
      os << "instance-family " << id << " template " << inst.template_id
         << " index " << inst.index_var << "\n";
    else
      os << "instance " << id << " template " << inst.template_id << "\n";
  }
  for (const auto& [id, v] : d.vertices) {
    os << "vertex " << id << " rank " << v.rank.str();
    if (!v.in_members.empty() || !v.out_members.empty()) {
      os << " {";
      for (const auto& m : v.in_members) os << " intip " << ref_out(m, "") << ";";
      for (const auto& m : v.out_members)
        os << " outtip " << ref_out(m, "") << ";";
      os << " }";
    }
    os << "\n";
  }
  for (const auto& [id, f] : d.vertex_families) {
    os << "vertex-family " << id << " rank " << f.rank.str() << " index "
       << f.index_var << " {";
    for (const auto& m : f.in_members)
      os << " intip " << ref_out(m, f.index_var) << ";";
    for (const auto& m : f.out_members)
      os << " outtip " << ref_out(m, f.index_var) << ";";
    os << " }\n";
  }
  for (const auto& [id, a] : d.arcs)
    os << "arc " << id << " from " << ref_out(a.tail, "") << " to "
       << ref_out(a.head, "") << "\n";
  for (const auto& [id, w] : d.walks) {
    const std::string& fv = w.index_var;
    switch (w.mode) {
      case WalkMode::Finite:
        os << "walk " << id << " rank " << w.rank.str() << " "
           << list_out(w.mid, fv) << "\n";
        break;
      case WalkMode::ExtendedOut:
        os << (w.is_family ? "walk-family " : "walk-presentation ") << id
           << " rank " << w.rank.str();
        if (w.is_family) os << " index " << fv;
        os << " mode out prefix " << list_out(w.mid, fv) << " repetend "
           << list_out(w.out_rep, fv) << " anchor " << w.out_anchor << "\n";
        break;
      case WalkMode::ExtendedIn:
        os << (w.is_family ? "walk-family " : "walk-presentation ") << id
           << " rank " << w.rank.str();
        if (w.is_family) os << " index " << fv;
        os << " mode in repetend " << list_out(w.in_rep, fv) << " anchor "
           << w.in_anchor << " prefix " << list_out(w.mid, fv) << "\n";
        break;
      case WalkMode::Endless:
        os << (w.is_family ? "walk-family " : "walk-presentation ") << id
           << " rank " << w.rank.str();
        if (w.is_family) os << " index " << fv;
        os << " mode endless in-repetend " << list_out(w.in_rep, fv)
           << " in-anchor " << w.in_anchor << " middle " << list_out(w.mid, fv)
           << " out-repetend " << list_out(w.out_rep, fv) << " out-anchor "
           << w.out_anchor << "\n";
        break;
    }
  }
  for (const auto& spec : d.partitions) {
    os << "partition " << spec.id << " rank " << spec.rank.str() << " {\n";
    for (const auto& cell : spec.cells) {
      os << "  " << cell.id;
      if (cell.is_family) os << "[" << cell.index_var << "]";
      os << ":";
      for (std::size_t i = 0; i < cell.tips.size(); ++i)
        os << (i ? ", " : " ") << ref_out(cell.tips[i], cell.index_var);
      os << ";\n";
    }
    os << "}\n";
  }
  if (d.arrow_template) {
    const auto& t = *d.arrow_template;
    os << "arrow-template base " << t.base_rank << " {\n";
    for (const auto& p : t.vertex_patterns)
      os << "  vertex-pattern " << p.id << " from " << p.from_level
         << " members " << list_out(p.members, "") << ";\n";
    for (const auto& p : t.walk_patterns) {
      os << "  walk-pattern " << p.id << " from " << p.from_level << " mode "
         << (p.mode == WalkMode::ExtendedOut ? "out" : "in") << " terminal "
         << ref_out(p.terminal, "") << " tips "
         << (p.tips_in && p.tips_out ? "both" : (p.tips_in ? "in" : "out"))
         << ";\n";
    }
    os << "}\n";
  }
  for (const auto& [id, w] : d.arrow_walks) {
    os << "arrow-walk " << id << " mode ";
    if (w.mode == WalkMode::ExtendedOut)
      os << "out base " << ref_out(w.base, "") << " spine " << w.spine_vertex
         << " " << w.spine_walk;
    else if (w.mode == WalkMode::ExtendedIn)
      os << "in base " << ref_out(w.base, "") << " spine " << w.in_spine_vertex
         << " " << w.in_spine_walk;
    else
      os << "endless base " << ref_out(w.base, "") << " out-spine "
         << w.spine_vertex << " " << w.spine_walk << " in-spine "
         << w.in_spine_vertex << " " << w.in_spine_walk;
    for (const auto& [k, o] : w.overrides) os << " override " << k << " = " << o;
    os << "\n";
  }
  return os.str();
}

}  // namespace tdg
