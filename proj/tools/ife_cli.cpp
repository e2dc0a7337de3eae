#include <iostream>

#include <CLI11.hpp>

#include "ife/scenario.hpp"

namespace {

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    double v = 0.0;
    const char* first = item.data();
    const char* last = first + item.size();
    while (first < last && *first == ' ') ++first;
    auto [end, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || end != last)
      throw ife::ParseError("cli", "bad sweep value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ife::ParseError("cli", "no sweep values given");
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant-subspace (IFE) analysis of split time-dependent Hamiltonians"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list-models", "Print the model catalog");

  std::string scenario_path, out_dir;
  auto* run = app.add_subcommand("run", "Analyse one scenario");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();

  std::string sweep_path, sweep_out, param, values;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario over a list of parameter values");
  sweep->add_option("scenario", sweep_path, "Scenario JSON file")->required();
  sweep->add_option("--param", param, "Parameter name (dotted path)")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--out", sweep_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      std::cout << ife::cli::list_models_text();
    } else if (run->parsed()) {
      const auto result = ife::cli::run_scenario(ife::cli::load_json_file(scenario_path));
      ife::cli::write_run(result, out_dir);
      if (result.report.contains("check_state"))
        for (const auto& s : result.report["check_state"])
          std::cout << s["label"].get<std::string>() << ": " << s["verdict"].get<std::string>() << '\n';
      if (result.report.contains("find_subspaces"))
        std::cout << "subspaces found: " << result.report["find_subspaces"].size() << '\n';
    } else if (sweep->parsed()) {
      const auto rows = ife::cli::sweep(ife::cli::load_json_file(sweep_path), param,
                                        parse_values(values), sweep_out);
      for (const auto& r : rows)
        std::cout << param << '=' << ife::cli::format_number(r.value) << ": " << r.verdict << '\n';
    }
  } catch (const ife::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
