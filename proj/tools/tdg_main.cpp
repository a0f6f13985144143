#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tdg/commands.hpp"
#include "tdg/spec_doc.hpp"

namespace {

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transfinite digraph tool"};
  app.require_subcommand(1);
  app.fallthrough();

  tdg::GlobalOpts opt;
  app.add_option("--unfold-depth", opt.unfold_depth,
                 "bound for unfolding oracles and windows")
      ->capture_default_str();
  app.add_option("--format", opt.format, "output format: text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  app.add_option("--max-components", opt.max_components,
                 "cap for unilateral component enumeration")
      ->capture_default_str();

  std::string file, rank = "0", kind = "weak", from, to, partition_file,
              partition_name;

  auto add_file = [&](CLI::App* sub) {
    sub->add_option("file", file, "input .tdg document")->required();
  };

  auto* validate = app.add_subcommand("validate", "check every invariant");
  add_file(validate);
  auto* tips = app.add_subcommand("tips", "list computed ditips");
  add_file(tips);
  tips->add_option("--rank", rank, "tip rank")->required();
  auto* comps = app.add_subcommand("components", "connectivity components");
  add_file(comps);
  comps->add_option("--kind", kind, "strong|unilateral|weak")->required();
  comps->add_option("--rank", rank, "component rank")->required();
  auto* reach = app.add_subcommand("reach", "directed reachability");
  add_file(reach);
  reach->add_option("from", from)->required();
  reach->add_option("to", to)->required();
  reach->add_option("--rank", rank, "walk rank")->required();
  auto* elevate = app.add_subcommand("elevate", "add the next vertex level");
  add_file(elevate);
  elevate->add_option("--partition", partition_file, "partition .tdg file")
      ->required();
  elevate->add_option("--name", partition_name, "partition block to use");
  auto* underlying =
      app.add_subcommand("underlying", "direction-forgotten graph");
  add_file(underlying);
  auto* dot = app.add_subcommand("export-dot", "DOT export");
  add_file(dot);

  CLI11_PARSE(app, argc, argv);

  std::string text;
  if (!read_file(file, text)) {
    std::cerr << "cannot read " << file << "\n";
    return 2;
  }
  auto parsed = tdg::parse_spec(text);
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors)
      std::cerr << file << ":" << e.line << ":" << e.col << ": " << e.code
                << ": " << e.message << "\n";
    return 1;
  }

  std::string command;
  std::vector<std::string> args;
  if (validate->parsed()) command = "validate";
  if (tips->parsed()) {
    command = "tips";
    args = {rank};
  }
  if (comps->parsed()) {
    command = "components";
    args = {kind, rank};
  }
  if (reach->parsed()) {
    command = "reach";
    args = {from, to, rank};
  }
  if (elevate->parsed()) {
    command = "elevate";
    std::string ptext;
    if (!read_file(partition_file, ptext)) {
      std::cerr << "cannot read " << partition_file << "\n";
      return 2;
    }
    args = {ptext};
    if (!partition_name.empty()) args.push_back(partition_name);
  }
  if (underlying->parsed()) command = "underlying";
  if (dot->parsed()) command = "export-dot";

  auto result = tdg::run_command(parsed.bundle, command, args, opt);
  std::cout << result.output;
  return result.exit_code;
}
