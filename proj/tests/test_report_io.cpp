#include "bravl/report_io.hpp"

#include "bravl/spectral.hpp"
#include "bravl/virial.hpp"
#include "oracle_utils.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

using bravl::json;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("report_io");

namespace {

fs::path temp_dir() {
  const fs::path dir =
      fs::temp_directory_path() / ("bravl_io_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

} // namespace

TEST_CASE("17-significant-digit formatting round-trips exactly") {
  auto gen = oracle::rng(67);
  std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  for (int k = 0; k < 2000; ++k) {
    const double x = std::ldexp(mantissa(gen), expo(gen));
    const std::string text = bravl::format_sig17(x);
    CHECK(std::stod(text) == x);
  }
  CHECK(bravl::format_sig17(0.0) == "0");
  CHECK(std::stod(bravl::format_sig17(0.1)) == 0.1);
}

TEST_CASE("tagged values carry units") {
  const json j = bravl::tagged(2.5, "mc2");
  CHECK(j.at("value") == 2.5);
  CHECK(j.at("units") == "mc2");
}

TEST_CASE("atomic text write lands complete, creating parent directories") {
  const fs::path dir = temp_dir();
  const fs::path target = dir / "nested" / "deep" / "out.txt";
  bravl::write_text_atomic(target, "payload line\n");
  CHECK(slurp(target) == "payload line\n");
  // no leftover temporary
  for (const auto& entry : fs::directory_iterator(target.parent_path()))
    CHECK(entry.path().extension() != ".tmp");
  // overwrite is atomic too
  bravl::write_text_atomic(target, "second\n");
  CHECK(slurp(target) == "second\n");
  fs::remove_all(dir);
}

TEST_CASE("atomic json write parses back identically") {
  const fs::path dir = temp_dir();
  json doc;
  doc["a"] = 1;
  doc["b"] = json::array({1.5, 2.5});
  bravl::write_json_atomic(dir / "doc.json", doc);
  const json back = json::parse(slurp(dir / "doc.json"));
  CHECK(back == doc);
  fs::remove_all(dir);
}

TEST_CASE("output record envelope: schema, command, determinism") {
  json payload;
  payload["x"] = 1;
  const json det = bravl::make_output_record("spectrum", json::object(),
                                             payload, json::array(), true);
  CHECK(det.at("schema_version") == bravl::kSchemaVersion);
  CHECK(det.at("command") == "spectrum");
  CHECK(!det.contains("timestamp"));
  CHECK(det.at("payload") == payload);

  const json live = bravl::make_output_record("spectrum", json::object(),
                                              payload, json::array(), false);
  REQUIRE(live.contains("timestamp"));
  const std::string stamp = live["timestamp"].get<std::string>();
  // 2026-08-16T12:34:56Z
  REQUIRE(stamp.size() == 20);
  CHECK(stamp[4] == '-');
  CHECK(stamp[10] == 'T');
  CHECK(stamp[19] == 'Z');
}

TEST_CASE("config parser: comments, trimming, and error reporting") {
  const fs::path dir = temp_dir();
  const fs::path cfg = dir / "run.cfg";
  {
    std::ofstream out(cfg);
    out << "# a comment\n"
        << "\n"
        << "  nu = 0.5  \n"
        << "nodes=100,200,400\n"
        << "label = spaced value here # not a comment marker mid-line\n";
  }
  const auto kv = bravl::parse_config_file(cfg);
  CHECK(kv.size() == 3);
  CHECK(kv.at("nu") == "0.5");
  CHECK(kv.at("nodes") == "100,200,400");
  CHECK(kv.at("label") == "spaced value here # not a comment marker mid-line");

  {
    std::ofstream out(cfg);
    out << "key_without_equals\n";
  }
  try {
    bravl::parse_config_file(cfg);
    FAIL("expected a parse error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }

  {
    std::ofstream out(cfg);
    out << "ok=1\n= empty key\n";
  }
  try {
    bravl::parse_config_file(cfg);
    FAIL("expected a parse error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  CHECK_THROWS(bravl::parse_config_file(dir / "missing.cfg"));
  fs::remove_all(dir);
}

TEST_CASE("identity rows serialize with units and survive the csv") {
  const std::vector<bravl::IdentityResult> rows = bravl::verify_identities(2);
  const json j = bravl::identity_json(rows.front());
  CHECK(j.at("id") == rows.front().id);
  CHECK(j.at("computed").at("units") == "dimensionless");
  CHECK(j.at("computed").at("value").get<double>() == rows.front().computed);

  const std::string csv = bravl::identities_csv(rows);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line.find("id") != std::string::npos);
  int count = 0;
  while (std::getline(lines, line))
    if (!line.empty()) ++count;
  CHECK(count == static_cast<int>(rows.size()));
}

TEST_CASE("sweep csv header is the documented stable interface") {
  const std::string csv = bravl::sweep_csv({});
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "nu,N,lambda_min_over_mc2,lower_bound,residual_corollary,"
        "residual_theorem,embedded_verdict");
}

TEST_CASE("channel matrix csv and metadata round-trip a small system") {
  bravl::MomentumGrid grid;
  grid.nodes = {1.0, 2.0, 3.0};
  grid.weights = {0.5, 1.0, 1.5};
  bravl::PhysicalParams params;
  params.alpha = 1.0;
  params.Z = 0.5;
  const bravl::ChannelMatrix cm =
      bravl::assemble(bravl::Channel{0, 1}, grid, params);

  const json meta = bravl::channel_matrix_meta(cm);
  CHECK(meta.at("n") == 3);
  CHECK(meta.at("channel") == "(0, +1/2)");

  const std::string csv = bravl::channel_matrix_csv(cm);
  // size line, node line, weight line, then one line per matrix row
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "N,3");
  std::getline(lines, line);
  CHECK(line.rfind("nodes,", 0) == 0);
  std::getline(lines, line);
  CHECK(line.rfind("weights,", 0) == 0);
  int rows = 0;
  double first_entry = 0.0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    if (rows == 0) {
      std::istringstream fields(line);
      std::string field;
      std::getline(fields, field, ',');
      first_entry = std::stod(field);
    }
    ++rows;
  }
  CHECK(rows == 3);
  CHECK(first_entry == cm.matrix(0, 0));
}

TEST_CASE("eigen solution exports: units, ordering, eigenvector sampling") {
  bravl::PhysicalParams params;
  params.alpha = 1.0;
  params.Z = 0.5;
  const bravl::ChannelScan scan = bravl::scan_channel(
      bravl::Channel{0, 1}, params, {60, 90, 140});
  const bravl::EigenSolution& sol = scan.solutions.back();

  const json j = bravl::eigen_solution_json(sol);
  CHECK(j.at("n") == 140);
  CHECK(j.at("units") == "mc2");
  const auto& values = j.at("eigenvalues");
  REQUIRE(values.size() == 140);
  // natural units: the rest energy is 1, so the scaled values are the raw ones
  CHECK(values[0].get<double>() == sol.eigenvalues(0));

  const std::string csv = bravl::eigenvectors_csv(sol, 2);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "p,w,phi_0,phi_1");
  std::string first;
  std::getline(lines, first);
  std::istringstream fields(first);
  std::string field;
  std::getline(fields, field, ',');
  CHECK(std::stod(field) == sol.grid.nodes[0]);
  std::getline(fields, field, ',');
  CHECK(std::stod(field) == sol.grid.weights[0]);
  std::getline(fields, field, ',');
  CHECK(std::stod(field) == sol.eigenfunction(0)(0));
}

TEST_CASE("scan reports serialize with verdicts and units") {
  bravl::PhysicalParams params;
  params.alpha = 1.0;
  params.Z = 0.5;
  const bravl::ChannelScan scan = bravl::scan_channel(
      bravl::Channel{0, 1}, params, {60, 90, 140});

  const json bound = bravl::bound_state_set_json(scan.bound);
  CHECK(bound.at("threshold").at("units") == "mc2");
  REQUIRE(bound.at("states").size() == scan.bound.states.size());
  CHECK(bound.at("states")[0].at("lambda").at("value").get<double>() ==
        scan.bound.states[0].lambda);

  const json embedded = bravl::embedded_report_json(scan.embedded);
  CHECK(embedded.at("pass") == scan.embedded.pass);
  CHECK(embedded.at("scanned") == scan.embedded.scanned);

  const Eigen::VectorXcd v =
      scan.solutions.back().eigenvectors.col(0).cast<std::complex<double>>();
  const bravl::VirialReport report = bravl::virial_residual(
      scan.solutions.back().eigenvalues(0), v, scan.matrices.back());
  const json vr = bravl::virial_report_json(report);
  CHECK(vr.at("form") == "corollary");
  CHECK(vr.at("rel_residual").at("value").get<double>() ==
        report.rel_residual);
  CHECK(vr.at("rel_residual").at("units") == "dimensionless");
}

TEST_CASE("profile exports share a sample axis and keep extrema") {
  using bravl::ProfileId;
  std::vector<bravl::BoundProfile> profiles;
  for (ProfileId id : {ProfileId::ratio_r, ProfileId::ratio_s})
    profiles.push_back(bravl::bound_profile(id, 0.01, 100.0, 0.5, 200));

  const json j = bravl::bound_profile_json(profiles[0], false);
  CHECK(!j.contains("p"));
  CHECK(j.at("extremum_value").at("value").get<double>() ==
        profiles[0].extremum_value);
  const json with = bravl::bound_profile_json(profiles[0], true);
  REQUIRE(with.contains("p"));
  CHECK(with.at("p").size() == 200);
  CHECK(with.at("value").size() == 200);

  const std::string csv = bravl::profiles_csv(profiles);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "p,ratio_r,ratio_s");
  int rows = 0;
  std::string line;
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 200);

  // mismatched axes are rejected
  std::vector<bravl::BoundProfile> bad = profiles;
  bad[1].p[0] *= 1.5;
  CHECK_THROWS(bravl::profiles_csv(bad));
}

TEST_CASE("sweep rows serialize numerically intact") {
  const std::vector<bravl::SweepRow> rows =
      bravl::z_sweep(bravl::Channel{0, 1}, {0.5}, {60, 90, 140});
  const json j = bravl::sweep_json(rows);
  REQUIRE(j.size() == rows.size());
  CHECK(j[0].at("nu").at("value").get<double>() == rows[0].nu);
  CHECK(j[0].at("lambda_min").at("value").get<double>() ==
        rows[0].lambda_min_over_mc2);
  const std::string csv = bravl::sweep_csv(rows);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line); // header
  std::getline(lines, line); // first row
  std::istringstream fields(line);
  std::string field;
  std::getline(fields, field, ',');
  CHECK(std::stod(field) == 0.5);
  std::getline(fields, field, ',');
  CHECK(std::stoi(field) == 60);
  std::getline(fields, field, ',');
  CHECK(std::stod(field) == rows[0].lambda_min_over_mc2);
}

TEST_SUITE_END();
