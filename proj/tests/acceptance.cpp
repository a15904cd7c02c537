// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tslab/settings.hpp"
#include "tslab/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  std::vector<std::string> sets;
  std::uint64_t seed = 20240611;
  std::string json_out;
  app.add_option("--only", only, "Criterion ids to run (repeatable)");
  app.add_option("--seed", seed, "Seed of the randomized checks");
  app.add_option("--set", sets, "Override key=value")->take_all();
  app.add_option("--json", json_out, "Also write the JSON report here");
  CLI11_PARSE(app, argc, argv);

  tslab::Settings s;
  try {
    for (const auto& a : sets) tslab::apply_assignment(s, a);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  tslab::VerifyOptions opts;
  opts.seed = seed;
  opts.tol = s.verify;
  opts.numerics = s.scatter;
  opts.pulse = s.pulse;
  opts.only = only;

  const tslab::VerifyReport report = tslab::run_verification(opts, [](const tslab::CriterionResult& c) {
    std::cout << tslab::format_line(c) << std::endl;
  });

  if (!json_out.empty()) {
    std::FILE* f = std::fopen(json_out.c_str(), "w");
    if (!f) {
      std::cerr << "cannot write " << json_out << "\n";
      return 2;
    }
    const std::string text = tslab::report_to_json(report);
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
  }

  int failed = 0;
  for (const auto& c : report.criteria) failed += c.passed ? 0 : 1;
  std::cout << (failed ? "FAILED " : "all passed ") << report.criteria.size() - failed << "/" << report.criteria.size()
            << std::endl;
  return failed ? 1 : 0;
}
