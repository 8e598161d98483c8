#include "bravl/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bravl {

std::string format_sig17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json tagged(double value, std::string_view units) {
  json j;
  j["value"] = value;
  j["units"] = units;
  return j;
}

void write_text_atomic(const std::filesystem::path& path,
                       std::string_view text) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_json_atomic(const std::filesystem::path& path, const json& doc) {
  write_text_atomic(path, doc.dump(2) + "\n");
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

} // namespace

json make_output_record(std::string_view command, const json& config_echo,
                        const json& payload, const json& verdicts,
                        bool deterministic) {
  json record;
  record["schema_version"] = kSchemaVersion;
  record["command"] = command;
  if (!deterministic) record["timestamp"] = utc_timestamp();
  record["config"] = config_echo;
  record["payload"] = payload;
  record["verdicts"] = verdicts;
  return record;
}

std::map<std::string, std::string> parse_config_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    const std::string key = trim(stripped.substr(0, eq));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key");
    out[key] = trim(stripped.substr(eq + 1));
  }
  return out;
}

json params_json(const PhysicalParams& params) {
  json j;
  j["mass"] = params.mass;
  j["c"] = params.c;
  j["hbar"] = params.hbar;
  j["alpha"] = params.alpha;
  j["Z"] = params.Z;
  j["nu"] = tagged(params.nu(), "dimensionless");
  return j;
}

json identity_json(const IdentityResult& row) {
  json j;
  j["id"] = row.id;
  j["computed"] = tagged(row.computed, "dimensionless");
  j["reference"] = tagged(row.reference, "dimensionless");
  j["abs_error"] = tagged(row.abs_error, "dimensionless");
  j["level"] = row.level;
  j["converged"] = row.converged;
  j["refinement_delta"] = tagged(row.refinement_delta, "dimensionless");
  return j;
}

std::string identities_csv(const std::vector<IdentityResult>& rows) {
  std::ostringstream out;
  out << "id,computed,reference,abs_error,level,converged,refinement_delta\n";
  for (const IdentityResult& row : rows)
    out << row.id << ',' << format_sig17(row.computed) << ','
        << format_sig17(row.reference) << ',' << format_sig17(row.abs_error)
        << ',' << row.level << ',' << (row.converged ? 1 : 0) << ','
        << format_sig17(row.refinement_delta) << '\n';
  return out.str();
}

std::string channel_matrix_csv(const ChannelMatrix& cm) {
  const std::size_t n = cm.grid.size();
  std::ostringstream out;
  out << "N," << n << '\n';
  out << "nodes";
  for (double p : cm.grid.nodes) out << ',' << format_sig17(p);
  out << "\nweights";
  for (double w : cm.grid.weights) out << ',' << format_sig17(w);
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out << ',';
      out << format_sig17(cm.matrix(static_cast<Eigen::Index>(i),
                                    static_cast<Eigen::Index>(j)));
    }
    out << '\n';
  }
  return out.str();
}

json channel_matrix_meta(const ChannelMatrix& cm) {
  json j;
  j["channel"] = cm.channel.label();
  j["l"] = cm.channel.l;
  j["twice_s"] = cm.channel.twice_s;
  j["params"] = params_json(cm.params);
  j["map"] = cm.grid.map.name;
  j["sigma"] = tagged(cm.grid.map.sigma, "momentum_mc");
  j["n"] = cm.grid.size();
  j["units"] = "matrix entries in mc2; nodes in momentum_mc";
  return j;
}

namespace {

const char* eigen_units(const PhysicalParams& params) {
  return params.mass > 0.0 ? "mc2" : "c_sigma";
}

double eigen_unit_scale(const EigenSolution& sol) {
  return sol.params.mass > 0.0 ? sol.params.rest_energy()
                               : sol.params.c * sol.grid.map.sigma;
}

} // namespace

json eigen_solution_json(const EigenSolution& sol) {
  const double scale = eigen_unit_scale(sol);
  json j;
  j["channel"] = sol.channel.label();
  j["n"] = sol.grid.size();
  j["sigma"] = tagged(sol.grid.map.sigma, "momentum_mc");
  j["params"] = params_json(sol.params);
  j["units"] = eigen_units(sol.params);
  j["matrix_norm"] = tagged(sol.matrix_norm / scale, eigen_units(sol.params));
  j["max_residual_norm"] = sol.residual_norms.maxCoeff();
  json values = json::array();
  for (Eigen::Index k = 0; k < sol.eigenvalues.size(); ++k)
    values.push_back(sol.eigenvalues(k) / scale);
  j["eigenvalues"] = std::move(values);
  json residuals = json::array();
  for (Eigen::Index k = 0; k < sol.residual_norms.size(); ++k)
    residuals.push_back(sol.residual_norms(k));
  j["residual_norms"] = std::move(residuals);
  return j;
}

std::string eigenvectors_csv(const EigenSolution& sol, int max_columns) {
  const Eigen::Index n = sol.eigenvalues.size();
  const Eigen::Index cols =
      max_columns < 0 ? n : std::min<Eigen::Index>(max_columns, n);
  std::ostringstream out;
  out << "p,w";
  for (Eigen::Index k = 0; k < cols; ++k) out << ",phi_" << k;
  out << '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t iu = static_cast<std::size_t>(i);
    out << format_sig17(sol.grid.nodes[iu]) << ','
        << format_sig17(sol.grid.weights[iu]);
    const double inv_sw = 1.0 / std::sqrt(sol.grid.weights[iu]);
    for (Eigen::Index k = 0; k < cols; ++k)
      out << ',' << format_sig17(sol.eigenvectors(i, k) * inv_sw);
    out << '\n';
  }
  return out.str();
}

json bound_state_set_json(const BoundStateSet& set) {
  const double e0 = set.threshold;
  json j;
  j["channel"] = set.channel.label();
  j["nu"] = tagged(set.params.nu(), "dimensionless");
  j["sigma"] = tagged(set.sigma, "momentum_mc");
  j["n_sequence"] = set.n_sequence;
  j["threshold"] = tagged(1.0, "mc2");
  j["lower_bound"] = tagged(set.lower_bound / e0, "mc2");
  j["stability_tol"] = set.stability_tol;
  if (!set.warning.empty()) j["warning"] = set.warning;
  json states = json::array();
  for (const BoundState& s : set.states) {
    json row;
    row["lambda"] = tagged(s.lambda / e0, "mc2");
    row["drift"] = s.drift;
    row["stable"] = s.stable;
    json per_grid = json::array();
    for (double v : s.per_grid) per_grid.push_back(v / e0);
    row["per_grid"] = std::move(per_grid);
    states.push_back(std::move(row));
  }
  j["states"] = std::move(states);
  return j;
}

json embedded_report_json(const EmbeddedScanReport& report) {
  const double e0 = report.params.rest_energy();
  json j;
  j["channel"] = report.channel.label();
  j["nu"] = tagged(report.params.nu(), "dimensionless");
  j["sigma"] = tagged(report.sigma, "momentum_mc");
  j["n_sequence"] = report.n_sequence;
  j["exclusion_edge"] = tagged(report.threshold / e0, "mc2");
  j["stability_tol"] = report.stability_tol;
  j["scanned"] = report.scanned;
  if (!report.warning.empty()) j["warning"] = report.warning;
  json candidates = json::array();
  for (const EmbeddedCandidate& c : report.stable_candidates) {
    json row;
    row["lambda"] = tagged(c.lambda / e0, "mc2");
    row["offset_drift"] = c.offset_drift;
    candidates.push_back(std::move(row));
  }
  j["stable_candidates"] = std::move(candidates);
  j["stable_above_threshold"] = report.stable_above_threshold;
  j["pass"] = report.pass;
  return j;
}

json virial_report_json(const VirialReport& report) {
  json j;
  j["channel"] = report.channel.label();
  j["form"] = report.form;
  j["n"] = report.grid_n;
  j["sigma"] = tagged(report.sigma, "momentum_mc");
  j["lambda"] = tagged(report.lambda, "mc2");
  j["norm_sq"] = tagged(report.norm_sq, "dimensionless");
  j["lhs"] = tagged(report.lhs, "mc2");
  j["rhs"] = tagged(report.rhs, "mc2");
  j["rhs_kernel_term"] = tagged(report.rhs_kernel_term, "mc2");
  j["rhs_mass_term"] = tagged(report.rhs_mass_term, "mc2");
  j["abs_residual"] = tagged(report.abs_residual, "mc2");
  j["rel_residual"] = tagged(report.rel_residual, "dimensionless");
  j["imag_leak"] = tagged(report.imag_leak, "dimensionless");
  j["imag_ok"] = report.imag_ok;
  return j;
}

json bound_profile_json(const BoundProfile& profile, bool include_samples) {
  json j;
  j["id"] = profile_name(profile.id);
  j["nu"] = tagged(profile.nu, "dimensionless");
  j["extremum_p"] = tagged(profile.extremum_p, "momentum_mc");
  j["extremum_value"] = tagged(profile.extremum_value, "dimensionless");
  j["extremum_at_infinity"] = profile.extremum_at_infinity;
  if (include_samples) {
    j["p"] = profile.p;
    j["value"] = profile.value;
  }
  return j;
}

std::string profiles_csv(const std::vector<BoundProfile>& profiles) {
  if (profiles.empty()) return "p\n";
  const std::vector<double>& p = profiles.front().p;
  for (const BoundProfile& prof : profiles)
    if (prof.p != p)
      throw std::invalid_argument(
          "profiles_csv: profiles must share sample points");
  std::ostringstream out;
  out << "p";
  for (const BoundProfile& prof : profiles) out << ',' << profile_name(prof.id);
  out << '\n';
  for (std::size_t i = 0; i < p.size(); ++i) {
    out << format_sig17(p[i]);
    for (const BoundProfile& prof : profiles)
      out << ',' << format_sig17(prof.value[i]);
    out << '\n';
  }
  return out.str();
}

json psi_check_json(const PsiCheck& check) {
  json j;
  j["coefficient"] = tagged(check.coefficient, "dimensionless");
  j["reference"] = tagged(check.reference, "dimensionless");
  j["below_one"] = check.below_one;
  j["max_psi"] = tagged(check.max_psi, "dimensionless");
  j["strictly_negative"] = check.strictly_negative;
  return j;
}

json sweep_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const SweepRow& row : rows) {
    json j;
    j["nu"] = tagged(row.nu, "dimensionless");
    j["N"] = row.n;
    j["lambda_min"] = tagged(row.lambda_min_over_mc2, "mc2");
    j["lower_bound"] = tagged(row.lower_bound, "mc2");
    j["residual_corollary"] = tagged(row.residual_corollary, "dimensionless");
    j["residual_theorem"] = tagged(row.residual_theorem, "dimensionless");
    j["embedded_verdict"] = row.embedded_verdict;
    j["ok"] = row.ok;
    if (!row.note.empty()) j["note"] = row.note;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "nu,N,lambda_min_over_mc2,lower_bound,residual_corollary,"
         "residual_theorem,embedded_verdict\n";
  for (const SweepRow& row : rows)
    out << format_sig17(row.nu) << ',' << row.n << ','
        << format_sig17(row.lambda_min_over_mc2) << ','
        << format_sig17(row.lower_bound) << ','
        << format_sig17(row.residual_corollary) << ','
        << format_sig17(row.residual_theorem) << ',' << row.embedded_verdict
        << '\n';
  return out.str();
}

} // namespace bravl
