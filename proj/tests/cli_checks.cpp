// End-to-end checks of the command-line tool: spawns the built binary and
// inspects its files/exit codes. Exit code is the number of failed checks.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
    std::printf("[%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
    if (!ok)
        ++failures;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& args) {
    std::string cmd = std::string(JMQKD_CLI_PATH) + " " + args + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    return rc == -1 ? -1 : WEXITSTATUS(rc);
}

}  // namespace

int main() {
    expect(run("jm-threshold --dirs z,x --v 1.0 --out /tmp/jmqkd_thr.txt") == 0,
           "jm-threshold exits 0");
    std::string thr = slurp("/tmp/jmqkd_thr.txt");
    expect(thr.find("solver-threshold: 0.5") != std::string::npos,
           "orthogonal pair threshold prints 0.5");
    expect(thr.find("binary-qubit: 0.5") != std::string::npos, "matching analytic bound printed");

    expect(run("jm-threshold --dirs z --v 0.7 --out /tmp/jmqkd_single.txt") == 0,
           "single-direction threshold exits 0");
    expect(slurp("/tmp/jmqkd_single.txt").find("solver-threshold: 1") != std::string::npos,
           "single measurement is compatible up to eta = 1");

    expect(run("curve --id fig4-solid-2 --min 0.6666666666666666 --max 1 --points 5 "
               "--out /tmp/jmqkd_c1.csv") == 0,
           "curve command exits 0");
    std::string c1 = slurp("/tmp/jmqkd_c1.csv");
    expect(c1.rfind("x,y,formula", 0) == 0, "csv header present");
    expect(c1.find("0.666666667,1,fig4-solid-2") != std::string::npos,
           "curve endpoint row hits eta = 1 at v = 2/3");

    expect(run("curve --id fig4-solid-2 --min 0.6666666666666666 --max 1 --points 5 "
               "--out /tmp/jmqkd_c2.csv") == 0,
           "second curve run exits 0");
    expect(slurp("/tmp/jmqkd_c1.csv") == slurp("/tmp/jmqkd_c2.csv"),
           "curve output is byte-identical across runs");

    {
        std::string base = "curve --id fig6-inf-inf-inf --min 0.9 --max 1 --points 12 --out ";
        int rc1 = std::system(
            ("THREADS=1 " + std::string(JMQKD_CLI_PATH) + " " + base + "/tmp/jmqkd_t1.csv").c_str());
        int rc3 = std::system(
            ("THREADS=3 " + std::string(JMQKD_CLI_PATH) + " " + base + "/tmp/jmqkd_t3.csv").c_str());
        expect(WEXITSTATUS(rc1) == 0 && WEXITSTATUS(rc3) == 0, "thread-capped curve runs exit 0");
        expect(slurp("/tmp/jmqkd_t1.csv") == slurp("/tmp/jmqkd_t3.csv"),
               "curve output does not depend on the worker count");
    }

    expect(run("curve --id fig6-321 --min 0.99 --max 1 --points 2 --out /tmp/jmqkd_c3.csv") == 0,
           "threshold curve exits 0");
    expect(slurp("/tmp/jmqkd_c3.csv").find(",0.88") != std::string::npos,
           "threshold curve lands near 0.883 at v = 1");

    expect(run("curve --id nonsense --min 0 --max 1 --points 3") == 1,
           "unknown curve id exits nonzero");
    expect(run("keyrate --protocol unknown") == 1, "unknown protocol exits nonzero");

    expect(run("gaussian --eta 0.5 --eps 0 --N 2 --out /tmp/jmqkd_g.txt") == 0,
           "gaussian command exits 0");
    std::string g = slurp("/tmp/jmqkd_g.txt");
    expect(g.find("extendable") == 0 || g.find("\nextendable") != std::string::npos,
           "boundary transmittance is extendable");
    expect(g.find("sigma2: 0") != std::string::npos, "boundary dither variance is zero");

    expect(run("tables --format json --out /tmp/jmqkd_tables.json") == 0, "tables exits 0");
    expect(slurp("/tmp/jmqkd_tables.json").find("attack-dispatch") != std::string::npos,
           "tables report includes the dispatch map");

    expect(run("keyrate --protocol bb84 --v 1 --eta 0.85 --threshold eta "
               "--out /tmp/jmqkd_k.txt") == 0,
           "keyrate command exits 0");
    expect(slurp("/tmp/jmqkd_k.txt").find("threshold-eta: 0.8294") != std::string::npos,
           "bb84 threshold prints 0.8294..");

    std::printf("%d cli checks failed\n", failures);
    return failures;
}
