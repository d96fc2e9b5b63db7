// pvtool: check, decompose and geometry commands over JSON input files.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pvm/cli.hpp"

namespace {

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace pvm::cli;

  CLI::App app{"Puffini-Videv model and chart verification"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string input;
  std::string out_path;
  std::string trace_path;
  Options opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("spec", input, "input file (JSON)")->required();
    sub->add_option("--out", out_path, "write the report here instead of stdout");
    sub->add_option_function<double>("--tol", [&](double v) { opts.tol = v; },
                                     "deterministic tolerance");
    sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { opts.seed = v; },
                                            "random seed");
  };

  CLI::App* check = app.add_subcommand("check", "deterministic and sampled PV criteria");
  add_common(check);
  check->add_option_function<int>("--samples", [&](int v) { opts.samples = v; },
                                  "planes per admissible signature (default 50)");
  check->add_option_function<double>("--sampled-tol", [&](double v) { opts.sampled_tol = v; },
                                     "tolerance of the sampled criterion (default 1e-6)");

  CLI::App* decompose = app.add_subcommand("decompose", "split into Ricci eigenspace blocks");
  add_common(decompose);

  CLI::App* geometry = app.add_subcommand("geometry", "run the verification battery on a chart");
  add_common(geometry);
  geometry->add_option_function<int>("--points", [&](int v) { opts.points = v; },
                                     "sample points (default 20)");
  geometry->add_option_function<double>("--step", [&](double v) { opts.step = v; },
                                        "geodesic step (default 1e-3)");
  geometry->add_option("--trace", trace_path, "write the blowup geodesic as a text table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kParseError;
  }

  std::string text;
  if (!read_file(input, text)) {
    std::cerr << "cannot read " << input << "\n";
    return kParseError;
  }
  opts.want_trace = !trace_path.empty();

  Outcome result;
  if (check->parsed()) result = run_check(text, opts);
  else if (decompose->parsed()) result = run_decompose(text, opts);
  else result = run_geometry(text, opts);

  const std::string report = result.report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << report;
  } else if (!write_file(out_path, report)) {
    std::cerr << "cannot write " << out_path << "\n";
  }
  if (!trace_path.empty() && !result.trace_table.empty() &&
      !write_file(trace_path, result.trace_table)) {
    std::cerr << "cannot write " << trace_path << "\n";
  }
  if (!result.diagnostic.empty()) std::cerr << result.diagnostic << "\n";
  return result.exit_code;
}
