// charon-lite: MIR-lite in, (U)LLBC JSON out.
//
//   charon-lite prog.mirl -o out            -> out.llbc.json
//   charon-lite prog.mirl --ullbc           -> prog.ullbc.json
//   charon-lite prog.mirl --analyze taint --format json
//   charon-lite prog.mirl interp fact 5u32
//
// Exit codes: 0 ok, 1 diagnostics or taint violations (output still written),
// 2 fatal (parse failure, I/O, bad arguments).

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "charon/cfg.hpp"
#include "charon/frontend.hpp"
#include "charon/interp.hpp"
#include "charon/passes.hpp"
#include "charon/serialize.hpp"
#include "charon/taint.hpp"

namespace fs = std::filesystem;
using namespace charon;

namespace {

struct Fatal {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Fatal{"cannot read `" + path + "`"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Fatal{"cannot write `" + path + "`"};
}

std::string where(const TranslatedCrate& crate, const Span& span) {
  if (span == Span{}) return crate.crate_name;
  std::string file = span.file.index < crate.files.size() ? crate.files[span.file.index].name : "?";
  return file + ":" + std::to_string(span.beg_line) + ":" + std::to_string(span.beg_col);
}

void report(const TranslatedCrate& crate, const Diagnostics& diags) {
  for (const auto& d : diags) {
    std::cerr << where(crate, d.span) << ": error[" << d.code << "]: " << d.message;
    if (!d.item.empty()) std::cerr << " (in `" << d.item << "`)";
    std::cerr << "\n";
  }
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string default_output(const std::string& input) {
  for (const char* ext : {".ullbc.json", ".llbc.json", ".json", ".mirl"})
    if (ends_with(input, ext)) return input.substr(0, input.size() - std::string(ext).size());
  return input;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Translate MIR-lite programs to (U)LLBC JSON"};
  app.set_version_flag("--version", "charon-lite 0.1.0");

  std::vector<std::string> inputs;
  std::string output;
  bool ullbc_out = false;
  std::vector<std::string> no_pass;
  bool print = false;
  std::string analyze;
  std::string format = "text";
  bool lenient = false;
  std::vector<std::string> panic_fns;
  std::uint64_t fuel = InterpConfig{}.fuel;

  app.add_option("inputs", inputs, ".mirl files forming one crate, or a single .json file")->required();
  app.add_option("-o,--output", output, "output path without extension");
  app.add_flag("--ullbc", ullbc_out, "stop before control-flow reconstruction");
  app.add_option("--no-pass", no_pass, "skip a pass (repeatable)")
      ->check(CLI::IsMember({"panics", "checked-arith", "match-reconstruction", "constants", "decl-groups"}))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_flag("--print", print, "pretty-print the final IR to standard output");
  app.add_option("--analyze", analyze, "run an analysis on the result")->check(CLI::IsMember({"taint"}));
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"text", "json"}));
  app.add_flag("--lenient", lenient, "ignore unknown fields in JSON input");
  app.add_option("--panic-fn", panic_fns, "additional function treated as a panic (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("--fuel", fuel, "interpreter step budget")->check(CLI::PositiveNumber);

  auto* interp = app.add_subcommand("interp", "run a function with the reference interpreter");
  std::string interp_fn;
  interp->add_option("function", interp_fn, "function name")->required();
  // arguments in constant syntax (5u32, true, [u8; 2][1u8, 2u8]); taken verbatim
  // because CLI11 would split bracketed values
  interp->prefix_command();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  PassConfig passes;
  for (const auto& p : no_pass) {
    if (p == "panics") passes.unify_panics = false;
    if (p == "checked-arith") passes.fuse_checked_arith = false;
    if (p == "match-reconstruction") passes.reconstruct_matches = false;
    if (p == "constants") passes.decode_constants = false;
    if (p == "decl-groups") passes.decl_groups = false;
  }
  for (const auto& f : panic_fns) passes.panic_functions.insert(f);

  TranslatedCrate crate;
  Diagnostics diags;
  try {
    bool structured = false;
    if (inputs.size() == 1 && ends_with(inputs[0], ".json")) {
      LoadedCrate loaded = from_json(read_file(inputs[0]), JsonOptions{lenient});
      crate = std::move(loaded.crate);
      structured = loaded.form == BodyForm::Llbc;
      if (structured && ullbc_out) throw Fatal{"--ullbc given for a structured (llbc) input"};
    } else {
      std::vector<SourceFile> files;
      for (const auto& path : inputs) files.push_back(SourceFile{fs::path(path).filename().string(), read_file(path)});
      std::string name = fs::path(inputs[0]).stem().string();
      crate = parse_crate(files, name);
      diags = run_pipeline(crate, passes);
    }
    if (!ullbc_out && !structured) {
      auto more = restructure_crate(crate);
      diags.insert(diags.end(), more.begin(), more.end());
    }
    report(crate, diags);
    int status = diags.empty() ? 0 : 1;

    if (interp->parsed()) {
      const FunDecl* fun = crate.find_fun(interp_fn);
      if (fun == nullptr) throw Fatal{"no function named `" + interp_fn + "`"};
      std::vector<Value> args;
      for (const auto& a : interp->remaining()) args.push_back(value_of(parse_constant(crate, a)));
      InterpConfig cfg;
      cfg.fuel = fuel;
      cfg.panic_functions.insert(passes.panic_functions.begin(), passes.panic_functions.end());
      std::cout << to_string(interp_fun(crate, fun->id, args, cfg)) << "\n";
      return status;
    }

    std::string out = (output.empty() ? default_output(inputs[0]) : output) + (ullbc_out ? ".ullbc.json" : ".llbc.json");
    write_file(out, to_json(crate, ullbc_out ? BodyForm::Ullbc : BodyForm::Llbc));
    if (print) std::cout << pretty_print(crate);

    if (analyze == "taint") {
      TranslatedCrate analyzed = crate;
      if (ullbc_out) restructure_crate(analyzed);  // diagnostics already reported once
      TaintReport r = analyze_taint(analyzed);
      std::cout << (format == "json" ? report_json(analyzed, r) : report_text(analyzed, r));
      if (!r.violations.empty()) status = 1;
    }
    return status;
  } catch (const Fatal& e) {
    std::cerr << "fatal: " << e.message << "\n";
  } catch (const Error& e) {
    std::string loc = e.span() ? where(crate, *e.span()) + ": " : std::string();
    if (e.span() && crate.files.empty()) {
      // parse errors: the crate was never built, name the file directly
      loc = (e.span()->file.index < inputs.size() ? fs::path(inputs[e.span()->file.index]).filename().string() : "?") +
            ":" + std::to_string(e.span()->beg_line) + ":" + std::to_string(e.span()->beg_col) + ": ";
    }
    std::cerr << loc << "error[" << e.code() << "]: " << e.what() << "\n";
  }
  return 2;
}
