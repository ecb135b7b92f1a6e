#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <string>

#include "mwapex/config.hpp"
#include "mwapex/io.hpp"
#include "support/oracles.hpp"

using namespace mwapex;

namespace {

const char* kTab1Block =
    "# reference parameter set\n"
    "material.E   = 30000\n"
    "material.nu  = 0.15\n"
    "material.fc  = 32\n"
    "material.ft  = 3\n"
    "material.e   = 0.52\n"
    "material.t   = 0.0055\n"
    "material.k1d = 0.10008\n"
    "material.qh0 = 0.20\n"
    "material.gA  = 21.22\n"
    "material.gB  = 31.46\n";

std::string with_run(const std::string& extra) { return std::string(kTab1Block) + extra; }

std::string csv_of(const std::vector<StepRecord>& records) {
  std::ostringstream ss;
  write_records(ss, records, OutputFormat::Csv);
  return ss.str();
}

}  // namespace

TEST_CASE("config: reference block parses with defaults") {
  const RunConfig cfg = parse_config(with_run("run.scenario = 2.1\n"));
  CHECK(cfg.material.E == 30000.0);
  CHECK(cfg.material.nu == 0.15);
  CHECK(cfg.material.k1d == 0.10008);
  CHECK(cfg.material.gB == 31.46);
  CHECK(cfg.scenario == "2.1");
  CHECK(cfg.increments == 0);
  CHECK(cfg.toll < 0.0);
  CHECK(cfg.tol_f < 0.0);
  CHECK(cfg.output.empty());
}

TEST_CASE("config: run keys") {
  const RunConfig cfg = parse_config(with_run(
      "run.scenario = 2.3\nrun.increments = 50\nrun.toll = 1e-8\nrun.tolf = 1e-10\n"
      "run.output = out.csv\n"));
  CHECK(cfg.increments == 50);
  CHECK(cfg.toll == 1e-8);
  CHECK(cfg.tol_f == 1e-10);
  CHECK(cfg.output == "out.csv");
}

TEST_CASE("config: scenario override argument wins") {
  const RunConfig cfg = parse_config(with_run("run.scenario = 2.1\n"), "2.2");
  CHECK(cfg.scenario == "2.2");
  CHECK(cfg.material.k1d == 1e-4);  // preset-pinned value
}

TEST_CASE("config: presets supply and pin their constitutive values") {
  // k1d omitted entirely: preset 2.2 supplies it
  const std::string no_k1d =
      "material.E = 30000\nmaterial.nu = 0.15\nmaterial.fc = 32\nmaterial.ft = 3\n"
      "material.e = 0.52\nmaterial.t = 0.0055\nmaterial.qh0 = 0.20\n"
      "material.gA = 21.22\nmaterial.gB = 31.46\n";
  CHECK(parse_config(no_k1d + "run.scenario = 2.2\n").material.k1d == 1e-4);

  // same config without the preset: the key is genuinely missing
  CHECK_THROWS_WITH(parse_config(no_k1d + "run.scenario = 2.1\n"),
                    Catch::Matchers::ContainsSubstring("material.k1d"));

  // preset overrides an explicitly supplied value
  const RunConfig c24 = parse_config(with_run("run.scenario = 2.4\n"));
  CHECK(c24.material.k1d == 8e-5);
  CHECK(c24.material.t == 1e-3);

  // a custom program path gets no preset help
  CHECK_THROWS_AS(parse_config(no_k1d + "run.scenario = my.prog\n"), ValidationError);
}

TEST_CASE("config: parse errors carry line numbers") {
  try {
    parse_config("material.E = 30000\nmaterial.nu = 0.15\nwhat is this\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("key = value"));
  }

  CHECK_THROWS_AS(parse_config(""), ParseError);
  CHECK_THROWS_AS(parse_config("# only comments\n\n"), ParseError);
  CHECK_THROWS_AS(parse_config(with_run("bogus.key = 1\nrun.scenario = 2.1\n")), ParseError);
  CHECK_THROWS_AS(parse_config(with_run("material.E = 1\nrun.scenario = 2.1\n")), ParseError);
  CHECK_THROWS_AS(parse_config(with_run("run.scenario = 2.1\nrun.increments = ten\n")), ParseError);
  CHECK_THROWS_AS(parse_config(with_run("run.scenario = 2.1\nmaterial.qh0 =\n")), ParseError);
  CHECK_THROWS_AS(parse_config("material.E = 30000 # trailing comment\n"), ParseError);
}

TEST_CASE("config: validation errors") {
  // nu at the incompressible limit
  std::string bad = with_run("run.scenario = 2.1\n");
  bad.replace(bad.find("material.nu  = 0.15"), 19, "material.nu  = 0.50");
  CHECK_THROWS_WITH(parse_config(bad), Catch::Matchers::ContainsSubstring("material.nu"));

  CHECK_THROWS_AS(parse_config(with_run("")), ValidationError);  // scenario missing
  CHECK_THROWS_AS(parse_config(with_run("run.scenario = 2.1\nrun.increments = 0\n")),
                  ValidationError);
  CHECK_THROWS_AS(parse_config(with_run("run.scenario = 2.1\nrun.toll = -1\n")), ValidationError);
}

TEST_CASE("program file parsing") {
  const LoadingProgram prog = parse_program(
      "# two-phase test program\n"
      "phase 10 sig:-8 sig:-8 sig:-8 eps:0 eps:0 eps:0\n"
      "\n"
      "phase 20 eps:2e-4 eps:2e-4 eps:5e-4 eps:0 eps:0 eps:0\n");
  REQUIRE(prog.phases.size() == 2);
  CHECK(prog.label == "custom");
  CHECK(prog.phases[0].increments == 10);
  CHECK(prog.phases[0].targets[0].control == Control::Stress);
  CHECK(prog.phases[0].targets[0].value == -8.0);
  CHECK(prog.phases[0].targets[3].control == Control::Strain);
  CHECK(prog.phases[1].increments == 20);
  CHECK(prog.phases[1].targets[2].value == 5e-4);

  CHECK_THROWS_AS(parse_program(""), ParseError);
  CHECK_THROWS_AS(parse_program("step 10 eps:0 eps:0 eps:0 eps:0 eps:0 eps:0\n"), ParseError);
  CHECK_THROWS_AS(parse_program("phase 0 eps:0 eps:0 eps:0 eps:0 eps:0 eps:0\n"), ParseError);
  CHECK_THROWS_AS(parse_program("phase 10 eps:0 eps:0 eps:0 eps:0 eps:0\n"), ParseError);
  CHECK_THROWS_AS(parse_program("phase 10 eps:0 eps:0 eps:0 eps:0 eps:0 eps:0 eps:0\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_program("phase 10 eps:0 eps:0 foo:0 eps:0 eps:0 eps:0\n"), ParseError);
  CHECK_THROWS_AS(parse_program("phase 10 eps:0 eps:0 eps:zz eps:0 eps:0 eps:0\n"), ParseError);

  try {
    parse_program("phase 5 eps:0 eps:0 eps:0 eps:0 eps:0 eps:0\nphase x\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("csv writer: header, units comment, single elastic record") {
  StepRecord r;
  r.step = 1;
  r.eps[0] = 1e-5;
  r.sigma[0] = 0.3;
  r.mode = Mode::Elastic;
  const std::string text = csv_of({r});

  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  CHECK(line.rfind("# units:", 0) == 0);
  std::getline(is, line);
  CHECK(line ==
        "step,eps11,eps22,eps33,gam12,gam13,gam23,"
        "sig11,sig22,sig33,sig12,sig13,sig23,xi,rho,theta,kappa,qh,qs,xia,mode,iters");
  std::getline(is, line);
  CHECK_THAT(line, Catch::Matchers::StartsWith("1,1e-05,"));
  CHECK_THAT(line, Catch::Matchers::ContainsSubstring(",Elastic,0"));
  CHECK(!std::getline(is, line));  // exactly one data row
}

TEST_CASE("csv round trip is lossless at the serialized precision") {
  const MaterialParams p = scenario_params("2.3", oracle::tab1());
  const RunResult run = run_program(make_scenario("2.3", 40), p, ElasticModuli(p.E, p.nu),
                                    Tolerances::defaults(p));
  const std::string once = csv_of(run.records);
  std::istringstream is(once);
  const std::vector<StepRecord> back = read_records_csv(is);
  REQUIRE(back.size() == run.records.size());
  CHECK(csv_of(back) == once);  // write -> read -> write is byte-stable

  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].step == run.records[i].step);
    CHECK(back[i].mode == run.records[i].mode);
    CHECK(back[i].iterations == run.records[i].iterations);
    CHECK(oracle::rel_err(back[i].sigma[2], run.records[i].sigma[2]) < 1e-8);
    CHECK(oracle::rel_err(back[i].kappa + 1.0, run.records[i].kappa + 1.0) < 1e-8);
  }
}

TEST_CASE("csv output is deterministic") {
  const MaterialParams p = oracle::tab1();
  const auto once = run_program(make_scenario("2.1", 60), p, ElasticModuli(p.E, p.nu),
                                Tolerances::defaults(p));
  const auto twice = run_program(make_scenario("2.1", 60), p, ElasticModuli(p.E, p.nu),
                                 Tolerances::defaults(p));
  CHECK(csv_of(once.records) == csv_of(twice.records));
}

TEST_CASE("hydrostatic scenario: xi column equals sqrt(3) sig11 on every row") {
  const MaterialParams p = oracle::tab1();
  const RunResult run = run_program(make_scenario("2.1", 60), p, ElasticModuli(p.E, p.nu),
                                    Tolerances::defaults(p));
  std::istringstream is(csv_of(run.records));
  for (const StepRecord& r : read_records_csv(is))
    CHECK(oracle::rel_err(r.xi, kSqrt3 * r.sigma[0]) < 1e-8);
}

TEST_CASE("json-lines format") {
  StepRecord r;
  r.step = 3;
  r.sigma[0] = 1.25;
  r.mode = Mode::ApexReturn;
  r.iterations = 2;
  std::ostringstream ss;
  write_records(ss, {r}, OutputFormat::JsonLines);
  std::istringstream is(ss.str());
  std::string line;
  std::getline(is, line);
  CHECK_THAT(line, Catch::Matchers::StartsWith("{\"units\":"));
  std::getline(is, line);
  CHECK_THAT(line, Catch::Matchers::StartsWith("{\"step\":3,"));
  CHECK_THAT(line, Catch::Matchers::ContainsSubstring("\"sig11\":1.25"));
  CHECK_THAT(line, Catch::Matchers::ContainsSubstring("\"mode\":\"ApexReturn\""));
  CHECK_THAT(line, Catch::Matchers::ContainsSubstring("\"iters\":2"));
  CHECK(!std::getline(is, line));
}

TEST_CASE("mode names round-trip and io errors carry the path") {
  CHECK(mode_from_name(mode_name(Mode::Elastic)) == Mode::Elastic);
  CHECK(mode_from_name(mode_name(Mode::SmoothReturn)) == Mode::SmoothReturn);
  CHECK(mode_from_name(mode_name(Mode::ApexReturn)) == Mode::ApexReturn);
  CHECK_THROWS_AS(mode_from_name("Plastic"), IoError);

  CHECK_THROWS_WITH(write_records_file("/nonexistent-dir/x.csv", {}, OutputFormat::Csv),
                    Catch::Matchers::ContainsSubstring("/nonexistent-dir/x.csv"));

  std::istringstream empty("");
  CHECK_THROWS_AS(read_records_csv(empty), IoError);
  std::istringstream badhdr("a,b,c\n");
  CHECK_THROWS_AS(read_records_csv(badhdr), IoError);
}
