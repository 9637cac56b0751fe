// Exercises the CLI's exit-code contract and a few end-to-end output checks
// through the real binary (path via --cli).  Complements the replay check in
// the acceptance suite.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void expect(bool ok, const std::string& what) {
  std::printf("%s %s\n", ok ? "ok  " : "FAIL", what.c_str());
  if (!ok) ++g_failures;
}

int run(const std::string& cmd) {
  const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& file) {
  std::ifstream in(file);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
  if (cli.empty()) {
    std::printf("FAIL no --cli path given\n");
    return 1;
  }
  const fs::path out = fs::temp_directory_path() / "primpoints_cli_contract";
  fs::remove_all(out);
  fs::create_directories(out);
  const std::string o = " --out " + out.string();

  // exit-code contract: 0 success, 2 validation, 4 budget
  expect(run(cli + " sieve qmax=20 Q=30 beta=1/2" + o) == 0, "sieve succeeds -> 0");
  expect(run(cli + " sieve beta=bogus" + o) == 2, "malformed beta -> 2");
  expect(run(cli + " sieve beta=0" + o) == 2, "non-positive beta -> 2");
  expect(run(cli + " dichotomy Qs=100,50 samples=1" + o) == 2, "non-increasing Q schedule -> 2");
  expect(run(cli + " enumerate m=2 n=1 theta=0.3,0.4 Q=50000" + o) == 4, "q box over budget -> 4");
  expect(run(cli + " measure task=nonsense" + o) == 2, "unknown task -> 2");
  expect(run(cli + " orbit bound=1" + o) == 2, "orbit without pi -> 2");
  expect(run(cli + " bogus-subcommand" + o) == 2, "unknown subcommand -> 2");

  // sieve output: the q = 1 row counts every integer in the box
  {
    const auto rows = read_csv(out / "sieve.csv");
    expect(rows.size() == 21, "sieve row count (header + qmax)");
    bool q1_ok = rows.size() > 1 && rows[1][0] == "1" && rows[1][3] == "15" && rows[1][5] == "1";
    expect(q1_ok, "sieve q=1 row equals floor(beta*Q) = 15 and matches");
    bool all_match = true;
    for (std::size_t r = 1; r < rows.size(); ++r) all_match = all_match && rows[r][5] == "1";
    expect(all_match, "sieve match flag true on every row");
  }

  // enumerate output on the worked instance: exactly the two coprime records
  {
    expect(run(cli + " enumerate m=1 n=1 theta=0.5 y=0 psi=0.4 Q=10 'pi={1,2}'" + o) == 0,
           "enumerate succeeds");
    const auto rows = read_csv(out / "enumerate.csv");
    expect(rows.size() == 3, "enumerate finds exactly 2 solutions");
    bool content_ok = rows.size() == 3 && rows[1][0] == "-2" && rows[1][1] == "1" &&
                      rows[2][0] == "2" && rows[2][1] == "-1";
    expect(content_ok, "enumerate emits (-2,1) then (2,-1) in shell order");
  }

  // measure strip: estimate near the closed-form value 2*psi = 0.2
  {
    expect(run(cli + " measure task=strip variant=F q=3 n=1 y=0.2 psi=0.1 samples=1000000 --seed 5" + o) == 0,
           "measure strip succeeds");
    const auto rows = read_csv(out / "measure.csv");
    bool near = false;
    if (rows.size() == 2 && rows[1][0] == "lambda_F") {
      const double est = std::stod(rows[1][1]);
      const double se = std::stod(rows[1][2]);
      near = std::abs(est - 0.2) <= 3 * se;
    }
    expect(near, "lambda_F estimate within 3 sigma of 0.2");
  }

  // orbit: eight vectors in the unit ball plus a verified reduction word
  {
    expect(run(cli + " orbit m=1 n=1 'pi={1,2}' bound=1 reduce=2,1" + o) == 0, "orbit succeeds");
    expect(read_csv(out / "orbit.csv").size() == 9, "orbit ball holds 8 vectors");
    std::ifstream words(out / "orbit_words.txt");
    std::string word;
    std::getline(words, word);
    expect(!word.empty(), "reduction word emitted");
  }

  // manifests exist for every command that ran
  for (const char* name : {"sieve_manifest.txt", "enumerate_manifest.txt", "measure_manifest.txt",
                           "orbit_manifest.txt"})
    expect(fs::exists(out / name), std::string(name) + " written");

  fs::remove_all(out);
  if (g_failures == 0) std::printf("cli contract: all checks passed\n");
  return g_failures == 0 ? 0 : 1;
}
