// End-to-end tests of the pmv-forge command line driven as a subprocess.
// Compiled to a no-op when the tool target is not part of the build.
#ifdef PMV_FORGE_BIN

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "doctest.h"
#include "pmv/montecarlo.hpp"
#include "pmv/settings.hpp"

using namespace pmv;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined
};

RunResult run_forge(const std::string& args) {
  std::string cmd = std::string(PMV_FORGE_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, got);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string make_temp_dir() {
  char tmpl[] = "/tmp/pmvcliXXXXXX";
  char* dir = mkdtemp(tmpl);
  REQUIRE(dir != nullptr);
  return std::string(dir);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

SettingFamily toy_family() {
  SettingFamily fam;
  fam.problem = Problem::MoV;
  fam.rule = plurality(2);
  fam.settings = {toy_setting()};
  return fam;
}

}  // namespace

TEST_CASE("command line help and argument validation") {
  RunResult help = run_forge("--help");
  CHECK(help.exit_code == 0);
  CHECK(contains(help.output, "classify"));
  CHECK(contains(help.output, "estimate"));

  CHECK(run_forge("").exit_code != 0);               // a subcommand is required
  CHECK(run_forge("no-such-command").exit_code != 0);

  RunResult bad = run_forge("build --problem nope --rule borda --m 3");
  CHECK(bad.exit_code == 1);
  CHECK(contains(bad.output, "error:"));

  RunResult nofile = run_forge("fit --in /nonexistent/scan.csv");
  CHECK(nofile.exit_code == 1);
  CHECK(contains(nofile.output, "error:"));

  RunResult nofam = run_forge("oracle --problem membership --m 2 --profile /dev/null");
  CHECK(nofam.exit_code == 1);
  CHECK(contains(nofam.output, "--family"));
}

TEST_CASE("build writes a family that classify consumes") {
  std::string dir = make_temp_dir();
  std::string fam_path = dir + "/fam.json";

  RunResult build = run_forge("build --problem cm --rule borda --m 3 --out " +
                              fam_path);
  CHECK(build.exit_code == 0);
  CHECK(contains(build.output, "cm-borda-1to2"));
  CHECK(contains(build.output, "ops=15"));

  std::ifstream in(fam_path);
  REQUIRE(in.good());
  std::string json((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  SettingFamily fam = family_from_json(json);
  CHECK(fam.settings.size() == 6);
  CHECK(fam.problem == Problem::CM);

  std::string pi_path = dir + "/pi.json";
  write_text(pi_path, pi_to_json({uniform_distribution(3)}));
  RunResult cls = run_forge("classify --family " + fam_path + " --pi " +
                            pi_path + " --n 10000 --b 1");
  CHECK(cls.exit_code == 0);
  CHECK(contains(cls.output, "poly-exponent"));

  RunResult badmode = run_forge("classify --family " + fam_path + " --pi " +
                                pi_path + " --n 10000 --mode sideways");
  CHECK(badmode.exit_code == 1);
  CHECK(contains(badmode.output, "error:"));
}

TEST_CASE("classification exit codes distinguish clear and knife cases") {
  std::string dir = make_temp_dir();
  std::string fam_path = dir + "/toy.json";
  write_text(fam_path, family_to_json(toy_family()));

  std::string pi_deficit = dir + "/pi25.json";
  write_text(pi_deficit, pi_to_json({{rat(2, 5), rat(3, 5)}}));
  RunResult knife = run_forge("classify --family " + fam_path + " --pi " +
                              pi_deficit + " --n 100 --b 10");
  CHECK(knife.exit_code == 2);
  CHECK(contains(knife.output, "knife"));

  RunResult above = run_forge("classify --family " + fam_path + " --pi " +
                              pi_deficit + " --n 100 --b 20");
  CHECK(above.exit_code == 0);
  CHECK(contains(above.output, "above-threshold"));
  CHECK(contains(above.output, "1/10"));

  std::string pi_far = dir + "/pi81.json";
  write_text(pi_far, pi_to_json({{rat(4, 5), rat(1, 5)}}));
  RunResult expo = run_forge("classify --family " + fam_path + " --pi " +
                             pi_far + " --n 100 --b 1");
  CHECK(expo.exit_code == 0);
  CHECK(contains(expo.output, "exponential"));
}

TEST_CASE("estimation emits deterministic CSV rows") {
  std::string dir = make_temp_dir();
  std::string fam_path = dir + "/toy.json";
  std::string pi_path = dir + "/pi.json";
  write_text(fam_path, family_to_json(toy_family()));
  write_text(pi_path, pi_to_json({{rat(1, 2), rat(1, 2)}}));

  std::string cmd = "estimate --family " + fam_path + " --pi " + pi_path +
                    " --n 10 --b 1 --trials 4000 --seed 5";
  RunResult est = run_forge(cmd);
  CHECK(est.exit_code == 0);
  CHECK(contains(est.output, scan_csv_header()));
  CHECK(contains(est.output, "\n10,1,0,4000,"));
  CHECK(contains(est.output, ",toy,mov,plurality"));

  // Column 6 is p-hat; the balanced coin puts it near C(10,5)/2^10.
  std::size_t row_at = est.output.find("\n10,1,0,4000,") + 1;
  std::string row = est.output.substr(row_at);
  std::vector<std::string> cols;
  std::string cur;
  for (char c : row) {
    if (c == ',') {
      cols.push_back(cur);
      cur.clear();
    } else if (c == '\n') {
      break;
    } else {
      cur += c;
    }
  }
  REQUIRE(cols.size() >= 6);
  double p_hat = std::stod(cols[5]);
  CHECK(std::abs(p_hat - 252.0 / 1024.0) < 0.03);

  RunResult again = run_forge(cmd);
  CHECK(again.output == est.output);

  RunResult conflict = run_forge(cmd + " --sup-search --alpha 1");
  CHECK(conflict.exit_code == 1);
  CHECK(contains(conflict.output, "mutually exclusive"));
}

TEST_CASE("scans stream a grid to CSV and a file copy matches stdout") {
  std::string dir = make_temp_dir();
  std::string fam_path = dir + "/toy.json";
  std::string pi_path = dir + "/pi.json";
  std::string out_path = dir + "/scan.csv";
  write_text(fam_path, family_to_json(toy_family()));
  write_text(pi_path, pi_to_json({{rat(1, 2), rat(1, 2)}}));

  RunResult scan = run_forge("scan --family " + fam_path + " --pi " + pi_path +
                             " --n 10,20 --b 1,2 --trials 500 --seed 3 --out " +
                             out_path);
  CHECK(scan.exit_code == 0);
  long lines = std::count(scan.output.begin(), scan.output.end(), '\n');
  CHECK(lines == 5);  // header + 2x2 grid

  std::ifstream in(out_path);
  REQUIRE(in.good());
  std::string file((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(file == scan.output);
}

TEST_CASE("slope fitting over a scan CSV recovers the exponent") {
  std::string dir = make_temp_dir();
  std::string csv_path = dir + "/points.csv";
  std::string csv = scan_csv_header();
  csv += "100,1,0,10000,1000,0.1,0.09,0.11,1,toy,mov,plurality\n";
  csv += "400,1,0,10000,500,0.05,0.045,0.055,1,toy,mov,plurality\n";
  csv += "1600,1,0,10000,250,0.025,0.022,0.028,1,toy,mov,plurality\n";
  csv += "6400,1,0,10000,125,0.0125,0.011,0.014,1,toy,mov,plurality\n";
  write_text(csv_path, csv);

  RunResult fit = run_forge("fit --in " + csv_path + " --axis n");
  CHECK(fit.exit_code == 0);
  CHECK(contains(fit.output, "slope -0.500000"));
  CHECK(contains(fit.output, "points 4"));

  RunResult bad_axis = run_forge("fit --in " + csv_path + " --axis q");
  CHECK(bad_axis.exit_code == 1);
  CHECK(contains(bad_axis.output, "axis"));
}

TEST_CASE("ground-truth oracle runs on concrete profiles") {
  std::string dir = make_temp_dir();
  std::string prof_path = dir + "/profile.txt";
  write_text(prof_path,
             "# three-alternative profile\n"
             "2: 1>2>3\n"
             "1: 2>3>1\n"
             "1: 3>2>1\n");

  // One coalition vote cannot change the plurality winner, but one
  // arbitrary vote change can.
  RunResult cm = run_forge("oracle --problem cm --rule plurality --m 3 "
                           "--profile " + prof_path + " --b 1");
  CHECK(cm.exit_code == 0);
  CHECK(contains(cm.output, "success: no"));

  RunResult mov = run_forge("oracle --problem mov --rule plurality --m 3 "
                            "--profile " + prof_path + " --b 1");
  CHECK(mov.exit_code == 0);
  CHECK(contains(mov.output, "success: yes"));
  CHECK(contains(mov.output, "remove"));
  CHECK(contains(mov.output, "cost"));

  std::string fam_path = dir + "/toy.json";
  write_text(fam_path, family_to_json(toy_family()));
  std::string prof2 = dir + "/profile2.txt";
  write_text(prof2, "1: 1>2\n1: 2>1\n");
  RunResult mem = run_forge("oracle --problem membership --m 2 --profile " +
                            prof2 + " --family " + fam_path + " --b 1");
  CHECK(mem.exit_code == 0);
  CHECK(contains(mem.output, "membership: yes"));

  RunResult over = run_forge("oracle --problem cm --rule plurality --m 3 "
                             "--profile " + prof_path + " --b 7");
  CHECK(over.exit_code == 1);
  CHECK(contains(over.output, "caps"));
}

#endif  // PMV_FORGE_BIN
