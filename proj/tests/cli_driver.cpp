// Black-box checks of the installed CLI: exit codes, output formats, config
// precedence, determinism across reruns. argv[1] is the binary under test.
#include <sys/stat.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

std::string g_bin;
int g_case = 0;
int g_failures = 0;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run(const std::string& args) {
  const std::string out_path = "cli_scratch/out_" + std::to_string(g_case) + ".txt";
  const std::string cmd =
      "\"" + g_bin + "\" " + args + " > " + out_path + " 2> cli_scratch/err.txt";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out_path);
  return r;
}

void check(const char* name, bool ok, const std::string& detail = "") {
  ++g_case;
  std::printf("%2d. %-34s %s%s%s\n", g_case, name, ok ? "ok" : "FAIL",
              detail.empty() ? "" : "  ", detail.c_str());
  if (!ok) ++g_failures;
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

int line_count(const std::string& text) {
  int n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: cli_tests <path-to-belldice-binary>\n");
    return 2;
  }
  g_bin = argv[1];
  mkdir("cli_scratch", 0755);

  {
    const RunResult r = run("");
    check("no subcommand rejected", r.exit_code == 2,
          "exit " + std::to_string(r.exit_code));
  }
  {
    const RunResult r = run("frobnicate");
    check("unknown subcommand rejected", r.exit_code == 2,
          "exit " + std::to_string(r.exit_code));
  }
  {
    const RunResult r = run("optimize --eta 1.5");
    check("out-of-range flag rejected at parse", r.exit_code == 2,
          "exit " + std::to_string(r.exit_code));
  }
  {
    // Passes the parser's [0, 1] range, dies in domain validation.
    const RunResult r = run("optimize --eta 0");
    check("domain error maps to exit 3", r.exit_code == 3,
          "exit " + std::to_string(r.exit_code));
  }

  std::string optimize_flags_out;
  {
    const RunResult r = run("optimize --eta 1 --restarts 8 --seed 3 --workers 1");
    optimize_flags_out = r.out;
    bool ok = r.exit_code == 0;
    double s_opt = 0.0;
    std::string first_key;
    if (ok) {
      const auto j = nlohmann::ordered_json::parse(r.out, nullptr, false);
      ok = !j.is_discarded() && j.is_object();
      if (ok) {
        first_key = j.begin().key();
        s_opt = j.value("s_opt", 0.0);
        ok = first_key == "eta" && std::abs(s_opt - 2.688) < 1e-2 &&
             j.value("converged", false);
      }
    }
    check("optimize json output", ok,
          "exit " + std::to_string(r.exit_code) + ", s_opt=" + std::to_string(s_opt));
  }
  {
    const RunResult r =
        run("optimize --eta 1 --restarts 8 --seed 3 --workers 1 --format csv");
    const bool ok =
        r.exit_code == 0 &&
        contains(r.out,
                 "eta,s_opt,g_opt,t_opt,alpha1,alpha2,beta1,beta2,h_min,"
                 "rate_pump,rate_detection,converged\n") &&
        line_count(r.out) == 2;
    check("optimize csv output", ok, "exit " + std::to_string(r.exit_code));
  }

  {
    std::ofstream cfg("cli_scratch/flags.ini");
    cfg << "[optimize]\nrestarts=8\nseed=3\n";
    cfg.close();
    const RunResult r =
        run("optimize --config cli_scratch/flags.ini --eta 1 --workers 1");
    check("config file equals flags", r.exit_code == 0 && r.out == optimize_flags_out);
  }
  {
    std::ofstream cfg("cli_scratch/prec.ini");
    cfg << "[optimize]\nrestarts=8\nseed=5\n";
    cfg.close();
    const RunResult r =
        run("optimize --config cli_scratch/prec.ini --eta 1 --seed 3 --workers 1");
    check("command line beats config", r.exit_code == 0 && r.out == optimize_flags_out);
  }
  {
    const RunResult r = run("optimize --config cli_scratch/absent.ini --eta 1");
    check("missing config file rejected", r.exit_code == 2,
          "exit " + std::to_string(r.exit_code));
  }

  {
    const RunResult r = run("trajectory --eta 0.7 --steps 2 --alpha-max 0.5");
    const std::string want =
        "alpha,mu,nx,ny,nz,mu_nx,mu_ny,mu_nz\n"
        "0,0.69999999999999996,0,0,1,0,0,0.69999999999999996\n"
        "0.5,0.76178412045928157,-0.7713732785400772,-0,0.63638295479556362,"
        "-0.58761991453844509,-0,0.48478642949421719\n";
    check("trajectory csv exact", r.exit_code == 0 && r.out == want);
  }
  {
    const RunResult r = run("trajectory --steps 2");
    check("trajectory requires eta", r.exit_code == 2,
          "exit " + std::to_string(r.exit_code));
  }
  {
    const RunResult r = run("trajectory --eta 0.7 --steps 2 --alpha-max 0.5 "
                            "--out /nonexistent_dir_xyz/t.csv");
    check("unwritable output maps to exit 2", r.exit_code == 2,
          "exit " + std::to_string(r.exit_code));
  }

  {
    const std::string flags = "sweep --eta-start 0.9 --eta-stop 0.91 --eta-step "
                              "0.005 --restarts 8 --workers 1";
    const RunResult r1 = run(flags + " --out cli_scratch/s1.csv");
    const RunResult r2 = run(flags + " --out cli_scratch/s2.csv");
    const std::string s1 = read_file("cli_scratch/s1.csv");
    const std::string s2 = read_file("cli_scratch/s2.csv");
    const bool ok = r1.exit_code == 0 && r2.exit_code == 0 && !s1.empty() &&
                    s1 == s2 && line_count(s1) == 4;
    check("sweep rerun byte-identical", ok,
          std::to_string(line_count(s1)) + " lines");
  }
  {
    const RunResult r = run("sweep --eta-start 0.9 --eta-stop 0.91 --eta-step "
                            "0.005 --restarts 8 --workers 1 --format json");
    bool ok = r.exit_code == 0;
    if (ok) {
      const auto j = nlohmann::json::parse(r.out, nullptr, false);
      ok = !j.is_discarded() && j.is_array() && j.size() == 3;
    }
    check("sweep json output", ok, "exit " + std::to_string(r.exit_code));
  }

  {
    const RunResult r = run("oracle-check --samples 5 --workers 1");
    check("oracle check agrees", r.exit_code == 0 && contains(r.out, "agree"),
          "exit " + std::to_string(r.exit_code));
  }
  {
    // Pinned truncation too small for the sampled gains: must fail loudly.
    const RunResult r = run("oracle-check --samples 5 --workers 1 --n-max 3");
    check("pinned truncation fails loudly",
          r.exit_code == 1 && contains(r.out, "truncation failures"),
          "exit " + std::to_string(r.exit_code));
  }
  {
    const RunResult r = run("oracle-check --samples 0");
    check("nonpositive sample count rejected", r.exit_code == 2,
          "exit " + std::to_string(r.exit_code));
  }

  if (g_failures > 0) {
    std::printf("%d of %d cli checks failed\n", g_failures, g_case);
    return 1;
  }
  std::printf("all %d cli checks passed\n", g_case);
  return 0;
}
