#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdtl/sdtl.hpp"

namespace {

using namespace sdtl;
using nlohmann::json;

enum Exit { kOk = 0, kProgramError = 1, kUsage = 2, kViolation = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Integer> parseVector(const std::string& text) {
  std::vector<Integer> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    auto e = item.find_last_not_of(" \t");
    try {
      out.emplace_back(item.substr(b, e - b + 1));
    } catch (const std::exception&) {
      throw UsageError("not an integer: '" + item + "'");
    }
  }
  return out;
}

std::vector<std::vector<Integer>> parseVectors(const std::string& text) {
  std::vector<std::vector<Integer>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) out.push_back(parseVector(item));
  if (!text.empty() && text.back() == ';') out.emplace_back();
  return out;
}

struct Options {
  std::string file;
  std::string input;
  std::string inputSets;
  std::string format = "text";
  bool trace = false;
  std::uint64_t fuel = concrete::ConcreteOptions{}.fuel;
  std::size_t maxDepth = concrete::ConcreteOptions{}.maxDepth;
  std::size_t maxIterations = abstract::AbstractOptions{}.maxIterations;
  std::string curriedUpdate = "accumulate";
  bool generate = false;
  std::uint64_t seed = 1;
  std::size_t count = 200;
  std::size_t size = 10;
  bool perStatement = false;
};

concrete::ConcreteOptions concreteOptions(const Options& o) { return {o.fuel, o.maxDepth}; }

abstract::AbstractOptions abstractOptions(const Options& o) {
  abstract::AbstractOptions a;
  a.maxIterations = o.maxIterations;
  a.curriedUpdate = o.curriedUpdate == "overwrite" ? abstract::CurriedUpdate::Overwrite
                                                   : abstract::CurriedUpdate::Accumulate;
  return a;
}

int runCommand(const Options& o) {
  Program p = parse(readFile(o.file));
  concrete::StatementObserver observe;
  if (o.trace) observe = [](Sid n, const concrete::CState& s) { std::cerr << serialize::traceLine(n, s) << "\n"; };
  auto result = concrete::runProgram(p, parseVector(o.input), concreteOptions(o), observe);
  for (const auto& v : result.output()) std::cout << v << "\n";
  if (result.state.ex) {
    std::cerr << "error: uncaught exception " << serialize::toText(*result.state.ex) << "\n";
    return kProgramError;
  }
  return kOk;
}

int analyzeCommand(const Options& o) {
  Program p = parse(readFile(o.file));
  auto result = abstract::analyzeProgram(p, abstractOptions(o));
  if (o.format == "json") {
    json diags = json::array();
    for (const auto& d : result.diagnostics) diags.push_back(serialize::toJson(d));
    json out = {{"states", serialize::statesJson(result.finals)}, {"diagnostics", diags}};
    std::cout << out.dump(2) << "\n";
    return kOk;
  }
  std::vector<std::string> texts;
  for (const auto& s : result.finals) texts.push_back(serialize::toText(s));
  std::sort(texts.begin(), texts.end());
  std::cout << texts.size() << " final state" << (texts.size() == 1 ? "" : "s") << "\n";
  for (std::size_t k = 0; k < texts.size(); ++k) std::cout << "state " << k << ":\n" << texts[k];
  for (const auto& d : result.diagnostics) std::cout << "diagnostic: node " << d.node << ": " << d.message << "\n";
  return kOk;
}

void printReport(const soundness::Report& r) {
  std::cout << r.program << ": checked " << r.checked << ", violations " << r.hardViolations()
            << ", caveats " << r.caveats() << ", skipped " << r.skipped.size() << "\n";
  for (const auto& v : r.violations) {
    std::cout << "  " << (v.caveat ? "caveat" : "VIOLATION") << " at " << v.stage << " inputs [";
    for (std::size_t k = 0; k < v.inputs.size(); ++k) std::cout << (k ? "," : "") << v.inputs[k];
    std::cout << "]\n";
    for (const auto& e : v.explanations) std::cout << "    " << e << "\n";
  }
  for (const auto& s : r.skipped) std::cout << "  skipped: " << s.reason << "\n";
}

int checkCommand(const Options& o) {
  soundness::HarnessOptions h{concreteOptions(o), abstractOptions(o), o.perStatement};
  if (!o.generate) {
    if (o.file.empty()) throw UsageError("check-soundness needs a file or --generate");
    auto vectors = o.inputSets.empty() ? gen::inputVectors(o.seed, 4) : parseVectors(o.inputSets);
    auto report = soundness::differentialTest(parse(readFile(o.file)), vectors, h, o.file);
    if (o.format == "json") {
      std::cout << soundness::toJson(report).dump(2) << "\n";
    } else {
      printReport(report);
    }
    return report.sound() ? kOk : kViolation;
  }

  auto vectors = o.inputSets.empty() ? gen::inputVectors(o.seed, 4) : parseVectors(o.inputSets);
  auto programs = gen::generatePrograms(o.seed, o.count, o.size);
  json reports = json::array();
  std::size_t checked = 0, hard = 0, caveats = 0, skipped = 0;
  for (std::size_t k = 0; k < programs.size(); ++k) {
    std::string name = "generated #" + std::to_string(k) + " (seed " + std::to_string(o.seed + k) + ")";
    auto report = soundness::differentialTest(parse(programs[k]), vectors, h, name);
    checked += report.checked;
    hard += report.hardViolations();
    caveats += report.caveats();
    skipped += report.skipped.size();
    if (report.violations.empty()) continue;
    bool hardFailure = !report.sound();
    std::string minimal = gen::shrink(programs[k], [&](const std::string& candidate) {
      auto r = soundness::differentialTest(parse(candidate), vectors, h);
      return hardFailure ? !r.sound() : !r.violations.empty();
    });
    if (o.format == "json") {
      json j = soundness::toJson(report);
      j["minimized"] = minimal;
      reports.push_back(j);
    } else {
      printReport(report);
      std::cout << "  minimized program:\n" << minimal;
    }
  }
  if (o.format == "json") {
    json out = {{"programs", programs.size()}, {"checked", checked}, {"violations", hard},
                {"caveats", caveats},          {"skipped", skipped}, {"reports", reports}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "programs " << programs.size() << ", checked " << checked << ", violations " << hard
              << ", caveats " << caveats << ", skipped " << skipped << "\n";
  }
  return hard == 0 ? kOk : kViolation;
}

int dumpCommand(const Options& o) {
  std::cout << AstJson::dump(parse(readFile(o.file))).dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SDTL toolkit: run, analyze and cross-check SDTL programs"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "Run a program concretely and print its output log");
  run->add_option("file", o.file, "Program source")->required();
  run->add_option("--input", o.input, "Comma-separated input queue");
  run->add_flag("--trace", o.trace, "Print one line per executed statement to stderr");
  run->add_option("--fuel", o.fuel, "Step budget");
  run->add_option("--max-depth", o.maxDepth, "Call depth budget");

  auto* analyze = app.add_subcommand("analyze", "Type-analyze a program");
  analyze->add_option("file", o.file, "Program source")->required();
  analyze->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  analyze->add_option("--max-iterations", o.maxIterations, "Fixed-point iteration cap");
  analyze->add_option("--curried-update", o.curriedUpdate, "accumulate or overwrite")
      ->check(CLI::IsMember({"accumulate", "overwrite"}));

  auto* check = app.add_subcommand("check-soundness", "Check concrete runs against the analysis");
  check->add_option("file", o.file, "Program source");
  check->add_option("--input-sets", o.inputSets, "Input vectors, e.g. \"0;1;2,3\"");
  check->add_flag("--generate", o.generate, "Check a generated corpus instead of a file");
  check->add_option("--seed", o.seed, "Generator seed");
  check->add_option("--count", o.count, "Number of generated programs");
  check->add_option("--size", o.size, "Statement bound per generated program");
  check->add_flag("--per-statement", o.perStatement, "Also compare states before each top-level statement");
  check->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  check->add_option("--fuel", o.fuel, "Concrete step budget");
  check->add_option("--max-iterations", o.maxIterations, "Fixed-point iteration cap");
  check->add_option("--curried-update", o.curriedUpdate, "accumulate or overwrite")
      ->check(CLI::IsMember({"accumulate", "overwrite"}));

  auto* dump = app.add_subcommand("dump-ast", "Print the id-annotated syntax tree as JSON");
  dump->add_option("file", o.file, "Program source")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return runCommand(o);
    if (*analyze) return analyzeCommand(o);
    if (*check) return checkCommand(o);
    return dumpCommand(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SyntaxError& e) {
    std::cerr << "syntax error: " << e.what() << "\n";
    return kProgramError;
  } catch (const RuntimeError& e) {
    std::cerr << "run-time error: " << e.describe() << "\n";
    return kProgramError;
  } catch (const AnalysisError& e) {
    std::cerr << "analysis error: " << e.what() << "\n";
    return kProgramError;
  }
}
