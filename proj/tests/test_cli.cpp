#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliResult result;
  result.code = strn::cli_main(args, out, err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "strn_cli_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("solve prints a text report and exits with the termination code") {
  const CliResult r = run({"solve", "affine_box"});
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  CHECK(r.out.find("problem: affine_box (start 0)") != std::string::npos);
  CHECK(r.out.find("reason: converged (code 0)") != std::string::npos);
  CHECK(r.out.find("iterations: 1") != std::string::npos);
  CHECK(r.out.find("residual evals: 2") != std::string::npos);
  CHECK(r.out.find("jacobian evals: 1") != std::string::npos);
  // The converged point matches the algebraic solution (0.5, -0.25, 1) up to
  // the last bits of the linear solve; match prefixes rather than exact bits.
  CHECK(r.out.find("x: 0.49999999") != std::string::npos);
  CHECK(r.out.find(" -0.24999999") != std::string::npos);
}

TEST_CASE("solve exit codes mirror non-converged outcomes") {
  CHECK(run({"solve", "rosenbrock_system", "--max-iterations", "2"}).code == 1);
  CHECK(run({"solve", "powell_badly_scaled", "--start", "1"}).code == 5);
}

TEST_CASE("solve --trace appends per-iteration lines") {
  const CliResult r = run({"solve", "rosenbrock_system", "--trace"});
  CHECK(r.code == 0);
  CHECK(r.out.find("trace:\n") != std::string::npos);
  CHECK(r.out.find("k=0 ") != std::string::npos);
  CHECK(r.out.find("kind=") != std::string::npos);
  CHECK(r.out.find("rho_f=") != std::string::npos);
}

TEST_CASE("solve --variable-theta lists every attempt") {
  const CliResult r = run({"solve", "boundary_root", "--max-iterations", "4",
                           "--variable-theta"});
  CHECK(r.code == 0);
  CHECK(r.out.find("reason: converged (code 0)") != std::string::npos);
  CHECK(r.out.find("attempts:\n") != std::string::npos);
  CHECK(r.out.find("theta=0.7 ") != std::string::npos);
  CHECK(r.out.find("reason=max_iterations") != std::string::npos);
  CHECK(r.out.find("theta=0.875 ") != std::string::npos);
}

TEST_CASE("solve --json emits a machine-readable report") {
  const CliResult r = run({"solve", "himmelblau_system", "--json", "--trace"});
  CHECK(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j.at("problem") == "himmelblau_system");
  CHECK(j.at("start_index") == 0);
  CHECK(j.at("termination_code") == 0);
  CHECK(j.at("reason") == "converged");
  CHECK(j.at("attempts").size() == 1);

  CHECK(j.at("final_residual_norm").get<double>() <= 1e-8);
  const auto x = j.at("x").get<std::vector<double>>();
  REQUIRE(x.size() == 2);
  CHECK(std::isfinite(x[0]));
  CHECK(std::isfinite(x[1]));

  REQUIRE(j.contains("trace"));
  CHECK(j.at("trace").size() == j.at("iterations").get<std::size_t>());
  CHECK(j.at("trace").at(0).contains("step_kind"));
}

TEST_CASE("usage errors exit 64") {
  CHECK(run({}).code == 64);                                  // no subcommand
  CHECK(run({"solve"}).code == 64);                           // missing target
  CHECK(run({"solve", "affine_box", "--nope"}).code == 64);   // unknown flag
  CHECK(run({"sweep", "--param", "delta"}).code == 64);       // unknown parameter
  CHECK(run({"sweep"}).code == 64);                           // missing --param

  const CliResult bad_theta = run({"solve", "affine_box", "--theta", "1.5"});
  CHECK(bad_theta.code == 64);
  CHECK(bad_theta.err.find("error:") != std::string::npos);

  const CliResult bad_start = run({"solve", "affine_box", "--start", "7"});
  CHECK(bad_start.code == 64);
  CHECK(bad_start.err.find("out of range") != std::string::npos);
}

TEST_CASE("data errors exit 65 with diagnostics on stderr") {
  const CliResult unknown = run({"solve", "rosenbrok_system"});
  CHECK(unknown.code == 65);
  CHECK(unknown.err.find("did you mean:") != std::string::npos);
  CHECK(unknown.err.find("rosenbrock_system") != std::string::npos);

  CHECK(run({"solve", "/no/such/file.nls"}).code == 65);
  CHECK(run({"sweep", "--param", "theta", "--problems", "nope"}).code == 65);

  const auto bad_path = temp_dir() / "bad.nls";
  std::ofstream(bad_path) << "name bad\nwhat 2\n";
  const CliResult bad = run({"check", bad_path.string()});
  CHECK(bad.code == 65);
  CHECK(bad.err.find("(line 2)") != std::string::npos);
}

TEST_CASE("--help exits 0 and describes the subcommands") {
  const CliResult r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("solve") != std::string::npos);
  CHECK(r.out.find("sweep") != std::string::npos);
}

TEST_CASE("list prints the suite, optionally filtered") {
  const CliResult all = run({"list"});
  CHECK(all.code == 0);
  CHECK(all.out.find("affine_box (n=3, starts=2)") != std::string::npos);
  CHECK(all.out.find("himmelblau_system (n=2, starts=4)") != std::string::npos);
  int lines = 0;
  for (const char c : all.out)
    if (c == '\n') ++lines;
  CHECK(lines == 9);

  const CliResult filtered = run({"list", "rosenbrock"});
  CHECK(filtered.out.find("rosenbrock_system") != std::string::npos);
  CHECK(filtered.out.find("affine_box") == std::string::npos);

  const CliResult none = run({"list", "zzz"});
  CHECK(none.code == 0);
  CHECK(none.out.empty());
}

TEST_CASE("sweep writes CSV to stdout or a file, reproducibly") {
  const std::vector<std::string> base = {"sweep",    "--param",       "theta",
                                         "--values", "0.8,0.99995",   "--problems",
                                         "boundary_root", "--starts", "0",
                                         "--zero-elapsed"};
  const CliResult first = run(base);
  CHECK(first.code == 0);
  CHECK(first.out.rfind("problem,start_index,parameter,value,", 0) == 0);
  CHECK(first.out.find("boundary_root,0,theta,0.8,5,") != std::string::npos);
  CHECK(first.out.find("boundary_root,0,theta,0.99995,2,") != std::string::npos);
  CHECK(run(base).out == first.out);

  std::vector<std::string> serial = base;
  serial.insert(serial.end(), {"--jobs", "1"});
  std::vector<std::string> parallel = base;
  parallel.insert(parallel.end(), {"--jobs", "4"});
  CHECK(run(serial).out == run(parallel).out);

  const auto csv_path = temp_dir() / "sweep.csv";
  std::vector<std::string> to_file = base;
  to_file.insert(to_file.end(), {"--out", csv_path.string()});
  const CliResult filed = run(to_file);
  CHECK(filed.code == 0);
  CHECK(filed.out.empty());
  CHECK(slurp(csv_path) == first.out);
}

TEST_CASE("sweep --table and --profile replace the CSV on stdout") {
  const CliResult table = run({"sweep", "--param", "theta", "--problems", "boundary_root",
                               "--table"});
  CHECK(table.code == 0);
  CHECK(table.out.find("# iterations by theta") != std::string::npos);
  CHECK(table.out.find("problem,start_index") == std::string::npos);

  const CliResult profile = run({"sweep", "--param", "theta", "--problems", "boundary_root",
                                 "--starts", "0", "--profile"});
  CHECK(profile.code == 0);
  CHECK(profile.out.find("# ratios") != std::string::npos);
  CHECK(profile.out.find("# profile") != std::string::npos);

  const CliResult inert = run({"sweep", "--param", "theta", "--problems", "rosenbrock_system",
                               "--table"});
  CHECK(inert.out.find("insensitive") != std::string::npos);
  const CliResult kept = run({"sweep", "--param", "theta", "--problems", "rosenbrock_system",
                              "--table", "--include-insensitive"});
  CHECK(kept.out.find("| rosenbrock_system |") != std::string::npos);
}

TEST_CASE("export, check, and solve round-trip through a problem file") {
  const auto path = temp_dir() / "rosenbrock_system.nls";
  const CliResult exported = run({"export", "rosenbrock_system", "--out", path.string()});
  CHECK(exported.code == 0);

  const CliResult checked = run({"check", path.string()});
  CHECK(checked.code == 0);
  CHECK(checked.out.find("ok: rosenbrock_system (n=2, starts=2, solution given)") !=
        std::string::npos);

  const CliResult solved = run({"solve", path.string()});
  CHECK(solved.code == 0);
  CHECK(solved.out.find("reason: converged (code 0)") != std::string::npos);
}
