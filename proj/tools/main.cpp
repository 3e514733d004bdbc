// Batch front end: evaluate scenario files, list worlds, run postulate
// suites, and replay the bundled reference scenarios.
//
// Exit codes: 0 success, 1 query or golden mismatch, 2 input error,
// 3 enumeration budget exceeded.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "expertise/expertise.hpp"
#include "expertise/repro.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw expertise::InvalidScenario("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw expertise::InvalidScenario("cannot write file: " + out_path);
  out << text;
}

int cmd_eval(const std::string& path, bool no_timing,
             const std::string& out_path) {
  expertise::Scenario s = expertise::load_scenario_text(read_file(path));
  expertise::EvalDocument doc = expertise::run_eval(s, !no_timing);
  emit(doc.doc.dump(2) + "\n", out_path);
  return doc.status == 0 ? kExitOk : kExitMismatch;
}

int cmd_worlds(const std::string& path, const std::string& set,
               std::uint64_t limit, const std::string& out_path) {
  if (set != "possible" && set != "plausible")
    throw expertise::InvalidScenario("--set must be possible or plausible");
  expertise::Scenario s = expertise::load_scenario_text(read_file(path));
  emit(expertise::run_worlds(s, set == "plausible", limit), out_path);
  return kExitOk;
}

int cmd_postulates(const std::string& path, std::string operator_name,
                   std::string postulate_list, const std::string& out_path) {
  expertise::Scenario s = expertise::load_scenario_text(read_file(path));
  if (operator_name.empty()) operator_name = s.operator_name;
  std::vector<std::string> names;
  if (postulate_list.empty()) {
    names = {"Closure",       "Containment",  "Consistency",
             "Soundness",     "K-bound",      "Prior-Extension",
             "Rearrangement", "Equivalence",  "Conditional-consistency",
             "K-conjunction"};
  } else {
    std::stringstream ss(postulate_list);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) names.push_back(item);
  }
  nlohmann::json doc = expertise::run_postulates(s, operator_name, names);
  emit(doc.dump(2) + "\n", out_path);
  return kExitOk;
}

int cmd_repro(const std::string& id, const std::string& golden_path) {
  std::string golden =
      golden_path.empty() ? expertise::kReproGolden : read_file(golden_path);
  std::vector<std::string> ids;
  if (id == "all")
    ids = expertise::repro_ids(golden);
  else
    ids.push_back(id);

  bool all_pass = true;
  for (const std::string& one : ids) {
    expertise::ReproResult r = expertise::run_repro(one, golden);
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ": "
              << r.description << "\n";
    for (const expertise::ReproCheck& c : r.checks) {
      if (r.pass) continue;
      std::cout << "  " << (c.pass ? "ok   " : "FAIL ") << c.description;
      if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
      std::cout << "\n";
    }
    all_pass &= r.pass;
  }
  return all_pass ? kExitOk : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact engine for belief change under unknown expertise"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, set_name = "possible";
  std::string operator_name, postulate_list, repro_id, golden_path;
  std::uint64_t limit = ~std::uint64_t{0};
  bool no_timing = false;

  CLI::App* eval_cmd =
      app.add_subcommand("eval", "evaluate a scenario and print the result");
  eval_cmd->add_option("scenario", scenario_path, "scenario JSON file")
      ->required();
  eval_cmd->add_flag("--no-timing", no_timing,
                     "zero wall_ms for byte-stable output");
  eval_cmd->add_option("-o,--output", out_path, "write the document here");

  CLI::App* worlds_cmd = app.add_subcommand(
      "worlds", "list the worlds of the operator's possible or plausible set");
  worlds_cmd->add_option("scenario", scenario_path, "scenario JSON file")
      ->required();
  worlds_cmd->add_option("--set", set_name, "possible|plausible");
  worlds_cmd->add_option("--limit", limit, "print at most this many worlds");
  worlds_cmd->add_option("-o,--output", out_path, "write the listing here");

  CLI::App* post_cmd = app.add_subcommand(
      "postulates", "check postulates over the scenario's sequence space");
  post_cmd->add_option("scenario", scenario_path, "scenario JSON file")
      ->required();
  post_cmd->add_option("--operator", operator_name,
                       "operator name (default: the scenario's)");
  post_cmd->add_option("--postulates,--postulate-list", postulate_list,
                       "comma-separated postulate names");
  post_cmd->add_option("-o,--output", out_path, "write the report here");

  CLI::App* repro_cmd = app.add_subcommand(
      "repro", "replay a bundled reference scenario against golden values");
  repro_cmd->add_option("id", repro_id, "scenario id, or \"all\"")->required();
  repro_cmd->add_option("--golden", golden_path,
                        "override the built-in golden file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (eval_cmd->parsed()) return cmd_eval(scenario_path, no_timing, out_path);
    if (worlds_cmd->parsed())
      return cmd_worlds(scenario_path, set_name, limit, out_path);
    if (post_cmd->parsed())
      return cmd_postulates(scenario_path, operator_name, postulate_list,
                            out_path);
    if (repro_cmd->parsed()) return cmd_repro(repro_id, golden_path);
  } catch (const expertise::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const expertise::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
