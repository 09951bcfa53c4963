// End-to-end tests of the command-line tool. The binary path is supplied in
// the LBT_CLI environment variable (set by CTest).
#include "lbt/models.hpp"
#include "lbt/response.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using nlohmann::json;
using namespace lbt;

namespace {

struct RunResult {
  std::string out;
  int exit_code = -1;
};

RunResult run_cli(const std::string& args) {
  const char* bin = std::getenv("LBT_CLI");
  if (!bin) throw std::runtime_error("LBT_CLI environment variable not set");
  const std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) throw std::runtime_error("popen failed");
  RunResult r;
  char buf[4096];
  size_t n = 0;
  while ((n = fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.exit_code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

json run_json(const std::string& args) {
  const RunResult r = run_cli(args);
  REQUIRE(r.exit_code == 0);
  return json::parse(r.out);
}

json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const Mat& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(complex_json(M(i, j)));
    rows.push_back(row);
  }
  return rows;
}

Mat matrix_from_json(const json& rows) {
  const int r = int(rows.size());
  const int c = r ? int(rows.at(0).size()) : 0;
  Mat M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) {
      const json& z = rows.at(size_t(i)).at(size_t(j));
      M(i, j) = Complex(z.at(0).get<double>(), z.at(1).get<double>());
    }
  return M;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = "lbt_cli_test_" + name;
  std::ofstream f(path);
  f << text;
  return path;
}

}  // namespace

TEST_CASE("spectrum command: schema and gap against the library") {
  const json j = run_json("spectrum four_level --alpha 1");
  CHECK(j.at("schema_version") == 1);
  CHECK(j.at("dim") == 4);
  CHECK(j.at("eigenvalues").size() == 16);
  const SuperMat L = build_generator(four_level(1.0));
  const Spectrum s = spectrum(L);
  CHECK(j.at("dissipative_gap").get<double>() ==
        doctest::Approx(dissipative_gap(s, s.default_zero_tol())).epsilon(1e-9));
  // every reported eigenvalue has nonpositive real part (within tolerance)
  for (const auto& z : j.at("eigenvalues")) CHECK(z.at(0).get<double>() < 1e-9);
}

TEST_CASE("corners command: rank and validator residuals") {
  const json j = run_json("corners four_level --alpha 1");
  CHECK(j.at("schema_version") == 1);
  CHECK(j.at("nondecaying_rank") == 2);
  for (const auto& r : j.at("jump_confinement_residuals")) CHECK(r.get<double>() < 1e-9);
  CHECK(j.at("hamiltonian_corner_residual").get<double>() < 1e-9);
  CHECK(j.at("triangularity_residual").get<double>() < 1e-9);
  CHECK(j.at("jump_annihilation_holds") == true);
  CHECK(j.at("parent_gap").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("asymptotics command: transferred coherence weight") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    std::ostringstream args;
    args << "asymptotics four_level --alpha " << alpha;
    const json j = run_json(args.str());
    CHECK(j.at("modes") == 4);
    CHECK(j.at("steady") == true);

    // reconstruct the asymptotic projection and apply it to |e2><e3|
    Mat r = Mat::Zero(4, 4);
    r(2, 3) = 1.0;
    Mat proj = Mat::Zero(4, 4);
    for (int mu = 0; mu < 4; ++mu) {
      const Mat Psi = matrix_from_json(j.at("eigenmatrices").at(size_t(mu)));
      const Mat J = matrix_from_json(j.at("conserved_quantities").at(size_t(mu)));
      proj += Psi * hs_inner(J, r);
    }
    const double w = 1.0 / (1.0 + 2.0 * alpha * alpha);
    CHECK(std::abs(proj(0, 1) - w) < 1e-9);
    CHECK(proj.norm() == doctest::Approx(w).epsilon(1e-9));
  }
}

TEST_CASE("respond command matches the library response") {
  Mat V(2, 2), A(2, 2);
  V << 0, 1, 1, 0;
  A << 0, Complex(0, -1), Complex(0, 1), 0;
  const std::string vf = write_temp("V.json", matrix_json(V).dump());
  const std::string af = write_temp("A.json", matrix_json(A).dump());

  const json j = run_json("respond thermal_qubit --kappa 1 --kappa-up 0.4 --perturbation " +
                          vf + " --observable " + af + " --omega 0 --omega 0.7");
  REQUIRE(j.at("response").size() == 2);

  const LindbladModel m = thermal_qubit(1.0, 0.4);
  const SuperMat L = build_generator(m);
  const Spectrum s = spectrum(L);
  const CornerProjectors cp = nondecaying_projector(L, s, s.default_zero_tol());
  const AsymptoticSpace as = asymptotic_space(L, s, cp, s.default_zero_tol());
  Perturbation p;
  p.V = V;
  const SuperMat dL = perturbation_superop(p, m);
  Mat rho = as.apply_pinf(Mat::Identity(2, 2) / 2.0);
  rho /= rho.trace();

  for (const auto& row : j.at("response")) {
    const double w = row.at("omega").get<double>();
    const FrequencyResponse fr = frequency_response(L, A, dL, rho, w);
    CHECK(row.at("value").at(0).get<double>() ==
          doctest::Approx(fr.value.real()).epsilon(1e-9));
    CHECK(row.at("value").at(1).get<double>() ==
          doctest::Approx(fr.value.imag()).epsilon(1e-9));
    CHECK(row.at("resonant").get<bool>() == fr.resonant);
  }
  std::remove(vf.c_str());
  std::remove(af.c_str());
}

TEST_CASE("gap-sweep command: CSV structure and small-alpha values") {
  const RunResult r = run_cli("gap-sweep two_photon --alpha 0:0.2:0.1 --trunc 20");
  REQUIRE(r.exit_code == 0);

  std::istringstream lines(r.out);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "alpha,delta_dg,delta_edg,complement_gap,parent_gap,trunc_warn");
  int rows = 0;
  const double alphas[] = {0.0, 0.1, 0.2};
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(cells, cell, ',')) v.push_back(std::stod(cell));
    REQUIRE(v.size() == 6);
    REQUIRE(rows < 3);
    CHECK(v[0] == doctest::Approx(alphas[rows]).epsilon(1e-12));
    // effective gap can only improve on the full-generator gap
    CHECK(v[2] >= v[1] - 1e-9);
    for (int c = 1; c <= 4; ++c) CHECK(v[size_t(c)] > 0.5);
    CHECK(v[5] == 0.0);  // truncation self-check clean at these alphas
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("holonomy command: phase accuracy and unitarity") {
  const json j = run_json("holonomy --radius 0.3 --steps 100");
  CHECK(j.at("expected_phase").get<double>() ==
        doctest::Approx(2 * M_PI * 0.09).epsilon(1e-12));
  CHECK(j.at("relative_error").get<double>() < 0.01);
  CHECK(j.at("unitarity_residual").get<double>() < 1e-3);
}

TEST_CASE("qgt command: qubit family values") {
  const json j = run_json("qgt --theta 0.3");
  CHECK(j.at("metric").get<double>() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(j.at("alt_metric").get<double>() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(j.at("metric").get<double>() ==
        doctest::Approx(2.0 * j.at("fubini_study").get<double>()).epsilon(1e-6));
  for (const auto& a : j.at("connection")) CHECK(std::abs(a.get<double>()) < 1e-9);
}

TEST_CASE("embed-channel command: verified round trip") {
  std::vector<Mat> kraus;
  Mat K0 = Mat::Zero(2, 2), K1 = Mat::Zero(2, 2);
  K0(0, 0) = 1.0;
  K0(1, 1) = 0.8;
  K1(0, 1) = 0.6;
  kraus.push_back(K0);
  kraus.push_back(K1);
  json spec;
  spec["kraus"] = json::array({matrix_json(K0), matrix_json(K1)});
  const std::string kf = write_temp("kraus.json", spec.dump());

  const json j = run_json("embed-channel --kraus " + kf + " --verify");
  CHECK(j.at("d_in") == 2);
  CHECK(j.at("d_out") == 2);
  CHECK(j.at("embedded_dim") == 4);
  CHECK(j.at("max_channel_deviation").get<double>() < 1e-9);
  std::remove(kf.c_str());
}

TEST_CASE("deterministic output and --out file writing") {
  const RunResult a = run_cli("spectrum four_level --alpha 0.5");
  const RunResult b = run_cli("spectrum four_level --alpha 0.5");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);

  const std::string path = "lbt_cli_test_out.json";
  const RunResult c = run_cli("--out " + path + " spectrum four_level --alpha 0.5");
  CHECK(c.exit_code == 0);
  CHECK(c.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == a.out);
  std::remove(path.c_str());
}

TEST_CASE("exit codes: 1 for argument errors, 2 for numerical failures") {
  CHECK(run_cli("spectrum nosuchmodel").exit_code == 1);
  CHECK(run_cli("gap-sweep two_photon --alpha bad").exit_code == 1);
  CHECK(run_cli("spectrum four_level --nosuchoption").exit_code == 1);
  CHECK(run_cli("--help").exit_code == 0);

  // dimension mismatch surfaces as a numerical failure
  Mat V3 = Mat::Identity(3, 3);
  const std::string vf = write_temp("V3.json", matrix_json(V3).dump());
  const std::string af = write_temp("A2.json", matrix_json(Mat::Identity(2, 2)).dump());
  CHECK(run_cli("respond thermal_qubit --perturbation " + vf + " --observable " + af +
                " --omega 1")
            .exit_code == 2);
  std::remove(vf.c_str());
  std::remove(af.c_str());
}
