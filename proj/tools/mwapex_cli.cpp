#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mwapex/mwapex.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw mwapex::IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct Summary {
  double sbar = 0.0;
  double kappa = 0.0;
  int n_elastic = 0, n_smooth = 0, n_apex = 0;
  double max_abs_f = 0.0;
  int apex_first = 0;  // 1-based step index, 0 if never
};

Summary summarize(const mwapex::RunResult& run, const mwapex::MaterialParams& p,
                  const mwapex::Tolerances& tol) {
  Summary s;
  s.sbar = run.final_sigma.trace() / 3.0;
  s.kappa = run.final_state.kappa;
  for (const mwapex::StepRecord& r : run.records) {
    switch (r.mode) {
      case mwapex::Mode::Elastic: ++s.n_elastic; break;
      case mwapex::Mode::SmoothReturn: ++s.n_smooth; break;
      case mwapex::Mode::ApexReturn:
        ++s.n_apex;
        if (s.apex_first == 0) s.apex_first = r.step;
        break;
    }
    if (r.mode != mwapex::Mode::Elastic) {
      const double f = mwapex::yield_f(mwapex::to_hw(r.sigma, tol.rho_eps), r.kappa, p);
      s.max_abs_f = std::max(s.max_abs_f, std::abs(f));
    }
  }
  return s;
}

void print_summary(std::ostream& os, const std::string& scenario, const Summary& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "scenario=%s final_sbar=%.9g final_kappa=%.9g "
                "modes=Elastic:%d,SmoothReturn:%d,ApexReturn:%d max_abs_f=%.3g",
                scenario.c_str(), s.sbar, s.kappa, s.n_elastic, s.n_smooth, s.n_apex, s.max_abs_f);
  os << buf;
  if (s.apex_first > 0) os << " apex_first=" << s.apex_first;
  os << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Menetrey-Willam material point driver with return-to-apex integration"};
  std::string config_path, scenario_flag, out_flag, format_flag = "csv";
  bool quiet = false;
  app.add_option("--config", config_path, "config file (key = value)")->required();
  app.add_option("--scenario", scenario_flag, "scenario preset or program file; overrides config");
  app.add_option("--out", out_flag, "output path; overrides config, default stdout");
  app.add_option("--format", format_flag, "output format")
      ->check(CLI::IsMember({"csv", "json-lines"}));
  app.add_flag("--quiet", quiet, "suppress the summary line");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // flag misuse is an input error
  }

  try {
    const mwapex::RunConfig cfg = mwapex::parse_config(slurp(config_path), scenario_flag);
    const mwapex::MaterialParams& p = cfg.material;
    const mwapex::ElasticModuli mod(p.E, p.nu);

    mwapex::Tolerances tol = mwapex::Tolerances::defaults(p);
    if (cfg.toll > 0.0) tol.toll = cfg.toll;
    if (cfg.tol_f > 0.0) tol.tol_f = cfg.tol_f;

    mwapex::LoadingProgram program;
    if (mwapex::is_preset_scenario(cfg.scenario))
      program = mwapex::make_scenario(cfg.scenario, cfg.increments > 0 ? cfg.increments : 200);
    else {
      program = mwapex::parse_program(slurp(cfg.scenario));
      if (cfg.increments > 0)
        for (mwapex::Phase& ph : program.phases) ph.increments = cfg.increments;
    }

    const mwapex::RunResult run = mwapex::run_program(program, p, mod, tol);

    const mwapex::OutputFormat format =
        format_flag == "csv" ? mwapex::OutputFormat::Csv : mwapex::OutputFormat::JsonLines;
    const std::string out_path = !out_flag.empty() ? out_flag : cfg.output;
    if (!out_path.empty())
      mwapex::write_records_file(out_path, run.records, format);
    else
      mwapex::write_records(std::cout, run.records, format);

    if (!quiet) {
      // keep stdout machine-readable when the records stream there
      std::ostream& os = out_path.empty() ? std::cerr : std::cout;
      print_summary(os, program.label, summarize(run, p, tol));
    }
    return 0;
  } catch (const mwapex::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const mwapex::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const mwapex::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
