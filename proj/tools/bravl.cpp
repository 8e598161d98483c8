// bravl: spectral toolkit for Brown-Ravenhall partial-wave channels.
// Commands: identities, spectrum, virial, bounds, sweep.
// Exit codes: 0 ok, 1 usage/config error, 2 verification failure,
// 3 numerical failure.

#include "bravl/channel.hpp"
#include "bravl/legendre.hpp"
#include "bravl/report_io.hpp"
#include "bravl/spectral.hpp"
#include "bravl/virial.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

using bravl::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;
constexpr int kExitNumerical = 3;

struct RunConfig {
  std::string command;
  std::string channel_text = "0,0.5";
  bravl::Channel channel{0, 1};
  std::vector<double> nu_list; // one value except for sweep
  double alpha = 0.0;
  double Z = -1.0;
  std::vector<int> nodes{100, 200, 400};
  double sigma = 1.0;
  double tol = -1.0; // command-specific default when negative
  std::string out_dir = ".";
  std::vector<std::string> formats{"json", "csv"};
  std::string config_file;
  bool deterministic = false;
  bool allow_supercritical = false;
  bool massless = false;
  bool dump_matrix = false;

  bool has_nu() const { return !nu_list.empty(); }
  bool has_alpha_z() const { return alpha > 0.0 || Z >= 0.0; }
};

// CLI::Option handles for one subcommand, used to decide which config-file
// keys a command-line flag already overrides.
struct OptionSet {
  CLI::Option* channel = nullptr;
  CLI::Option* nu = nullptr;
  CLI::Option* alpha = nullptr;
  CLI::Option* Z = nullptr;
  CLI::Option* nodes = nullptr;
  CLI::Option* sigma = nullptr;
  CLI::Option* tol = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* format = nullptr;
  CLI::Option* deterministic = nullptr;
  CLI::Option* allow_supercritical = nullptr;
  CLI::Option* massless = nullptr;
  CLI::Option* dump_matrix = nullptr;
};

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) parts.push_back(item);
  return parts;
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size())
    throw CLI::ValidationError("config key '" + key + "': bad number '" +
                               text + "'");
  return value;
}

int parse_int(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size())
    throw CLI::ValidationError("config key '" + key + "': bad integer '" +
                               text + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw CLI::ValidationError("config key '" + key + "': bad boolean '" +
                             text + "'");
}

// Applies file values only where no command-line flag was given.
void apply_config(RunConfig& cfg, const OptionSet& opts) {
  const std::map<std::string, std::string> kv =
      bravl::parse_config_file(cfg.config_file);
  for (const auto& [raw_key, value] : kv) {
    std::string key = raw_key;
    for (char& ch : key)
      if (ch == '-') ch = '_';
    if (key == "channel") {
      if (opts.channel->count() == 0) cfg.channel_text = value;
    } else if (key == "nu") {
      if (opts.nu->count() == 0) {
        cfg.nu_list.clear();
        for (const std::string& part : split_csv(value))
          cfg.nu_list.push_back(parse_double(key, part));
      }
    } else if (key == "alpha") {
      if (opts.alpha->count() == 0) cfg.alpha = parse_double(key, value);
    } else if (key == "Z" || key == "z") {
      if (opts.Z->count() == 0) cfg.Z = parse_double(key, value);
    } else if (key == "nodes") {
      if (opts.nodes->count() == 0) {
        cfg.nodes.clear();
        for (const std::string& part : split_csv(value))
          cfg.nodes.push_back(parse_int(key, part));
      }
    } else if (key == "sigma") {
      if (opts.sigma->count() == 0) cfg.sigma = parse_double(key, value);
    } else if (key == "tol") {
      if (opts.tol->count() == 0) cfg.tol = parse_double(key, value);
    } else if (key == "out") {
      if (opts.out->count() == 0) cfg.out_dir = value;
    } else if (key == "format") {
      if (opts.format->count() == 0) cfg.formats = split_csv(value);
    } else if (key == "deterministic") {
      if (opts.deterministic->count() == 0)
        cfg.deterministic = parse_bool(key, value);
    } else if (key == "allow_supercritical") {
      if (opts.allow_supercritical->count() == 0)
        cfg.allow_supercritical = parse_bool(key, value);
    } else if (key == "massless") {
      if (opts.massless->count() == 0) cfg.massless = parse_bool(key, value);
    } else if (key == "dump_matrix") {
      if (opts.dump_matrix != nullptr && opts.dump_matrix->count() == 0)
        cfg.dump_matrix = parse_bool(key, value);
    } else {
      throw CLI::ValidationError("config key '" + raw_key +
                                 "' is not recognized");
    }
  }
}

// Resolves the coupling per the config contract: exactly one of nu or the
// (alpha, Z) pair; when both are present they must agree to 1e-12.
bravl::PhysicalParams resolve_params(RunConfig& cfg, bool coupling_required) {
  bravl::PhysicalParams params;
  params.mass = cfg.massless ? 0.0 : 1.0;

  const bool pair_complete = cfg.alpha > 0.0 && cfg.Z >= 0.0;
  if (cfg.has_alpha_z() && !pair_complete)
    throw CLI::ValidationError("--alpha and --Z must be given together");

  if (pair_complete) {
    params.alpha = cfg.alpha;
    params.Z = cfg.Z;
    if (cfg.has_nu()) {
      if (cfg.nu_list.size() != 1)
        throw CLI::ValidationError("--nu with --alpha/--Z takes one value");
      if (std::abs(cfg.nu_list[0] - params.nu()) > 1e-12)
        throw CLI::ValidationError(
            "--nu and --alpha*--Z disagree beyond 1e-12");
    } else {
      cfg.nu_list = {params.nu()};
    }
  } else if (cfg.has_nu()) {
    params.alpha = 1.0;
    params.Z = cfg.nu_list[0]; // nu = alpha Z; the split does not matter
  } else if (coupling_required) {
    throw CLI::ValidationError(
        "supply a coupling: --nu X, or --alpha A with --Z Z");
  }

  for (double nu : cfg.nu_list) {
    if (!(nu >= 0.0) || !std::isfinite(nu))
      throw CLI::ValidationError("coupling must be finite and >= 0");
    if (nu >= bravl::critical_nu() && !cfg.allow_supercritical)
      throw CLI::ValidationError(
          "coupling " + std::to_string(nu) +
          " is at or above the critical value " +
          std::to_string(bravl::critical_nu()) +
          "; pass --allow-supercritical to proceed");
  }
  params.validate();
  return params;
}

void validate_common(const RunConfig& cfg) {
  for (const std::string& f : cfg.formats)
    if (f != "json" && f != "csv")
      throw CLI::ValidationError("--format accepts json and csv only");
  if (!(cfg.sigma > 0.0) || !std::isfinite(cfg.sigma))
    throw CLI::ValidationError("--sigma must be finite and > 0");
  for (int n : cfg.nodes)
    if (n < 8) throw CLI::ValidationError("--nodes values must be >= 8");
}

bool wants(const RunConfig& cfg, const std::string& format) {
  for (const std::string& f : cfg.formats)
    if (f == format) return true;
  return false;
}

json config_echo(const RunConfig& cfg, const bravl::PhysicalParams& params) {
  json j;
  j["command"] = cfg.command;
  j["channel"] = cfg.channel.label();
  json nus = json::array();
  for (double nu : cfg.nu_list) nus.push_back(nu);
  j["nu"] = std::move(nus);
  j["alpha"] = params.alpha;
  j["Z"] = params.Z;
  j["mass"] = params.mass;
  j["nodes"] = cfg.nodes;
  j["sigma"] = cfg.sigma;
  j["tol"] = cfg.tol;
  // The destination directory does not influence any computed value; echoing
  // it would break the byte-identical guarantee of deterministic mode.
  if (!cfg.deterministic) j["out"] = cfg.out_dir;
  j["format"] = cfg.formats;
  j["deterministic"] = cfg.deterministic;
  j["allow_supercritical"] = cfg.allow_supercritical;
  j["massless"] = cfg.massless;
  return j;
}

json verdict_row(const std::string& check, bool pass,
                 const std::string& detail = "") {
  json j;
  j["check"] = check;
  j["status"] = pass ? "PASS" : "FAIL";
  if (!detail.empty()) j["detail"] = detail;
  return j;
}

// Returns 2 when any verdict failed, else 0; writes the record files.
int emit(const RunConfig& cfg, const bravl::PhysicalParams& params,
         const json& payload, const json& verdicts,
         const std::string& csv_text) {
  const json record = bravl::make_output_record(
      cfg.command, config_echo(cfg, params), payload, verdicts,
      cfg.deterministic);
  const std::filesystem::path dir(cfg.out_dir);
  if (wants(cfg, "json"))
    bravl::write_json_atomic(dir / (cfg.command + ".json"), record);
  if (wants(cfg, "csv") && !csv_text.empty())
    bravl::write_text_atomic(dir / (cfg.command + ".csv"), csv_text);

  bool all_pass = true;
  for (const json& v : verdicts)
    if (v.at("status") != "PASS" && v.at("status") != "SKIP") all_pass = false;
  for (const json& v : verdicts) {
    const std::string detail =
        v.contains("detail") ? " (" + v["detail"].get<std::string>() + ")"
                             : "";
    std::printf("[%s] %s%s\n", v["status"].get<std::string>().c_str(),
                v["check"].get<std::string>().c_str(), detail.c_str());
  }
  return all_pass ? kExitOk : kExitVerification;
}

int cmd_identities(RunConfig& cfg) {
  const bravl::PhysicalParams params = resolve_params(cfg, false);
  const double tol_abs = cfg.tol > 0.0 ? cfg.tol : 1e-8;
  const double tol_rel = cfg.tol > 0.0 ? cfg.tol : 1e-7;

  std::vector<bravl::IdentityResult> rows = bravl::verify_identities();
  const std::vector<bravl::IdentityResult> conv =
      bravl::verify_convolution_identities();
  const std::size_t n_const = rows.size();
  rows.insert(rows.end(), conv.begin(), conv.end());

  json payload;
  payload["tolerance_abs"] = tol_abs;
  payload["tolerance_rel"] = tol_rel;
  json items = json::array();
  json verdicts = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const bravl::IdentityResult& row = rows[i];
    items.push_back(bravl::identity_json(row));
    const bool is_conv = i >= n_const;
    const double err =
        is_conv ? row.abs_error / std::abs(row.reference) : row.abs_error;
    const bool pass = row.converged && err <= (is_conv ? tol_rel : tol_abs);
    verdicts.push_back(verdict_row(row.id, pass,
                                   (is_conv ? "rel_error=" : "abs_error=") +
                                       bravl::format_sig17(err)));
  }
  payload["identities"] = std::move(items);
  return emit(cfg, params, payload, verdicts, bravl::identities_csv(rows));
}

int cmd_spectrum(RunConfig& cfg) {
  const bravl::PhysicalParams params = resolve_params(cfg, true);
  const double stability_tol = cfg.tol > 0.0 ? cfg.tol : 1e-4;
  const bravl::ChannelScan scan =
      bravl::scan_channel(cfg.channel, params, cfg.nodes, cfg.sigma,
                          stability_tol, cfg.allow_supercritical);
  const bravl::EigenSolution& finest = scan.solutions.back();

  json payload;
  payload["bound_states"] = bravl::bound_state_set_json(scan.bound);
  payload["embedded"] = bravl::embedded_report_json(scan.embedded);
  payload["finest"] = bravl::eigen_solution_json(finest);

  json verdicts = json::array();
  const double e0 = params.rest_energy();
  const bool positive = finest.eigenvalues(0) > 0.0;
  verdicts.push_back(verdict_row(
      "all_eigenvalues_positive", positive,
      "lambda_min=" + bravl::format_sig17(finest.eigenvalues(0))));
  if (params.mass > 0.0) {
    const bool above = finest.eigenvalues(0) >= scan.bound.lower_bound - 1e-3 * e0;
    verdicts.push_back(verdict_row(
        "lambda_min_above_lower_bound", above,
        "lower_bound=" + bravl::format_sig17(scan.bound.lower_bound)));
  }
  verdicts.push_back(verdict_row(
      "no_stable_embedded_eigenvalues", scan.embedded.pass,
      "stable_above_threshold=" +
          std::to_string(scan.embedded.stable_above_threshold)));

  const std::filesystem::path dir(cfg.out_dir);
  if (cfg.dump_matrix) {
    const bravl::ChannelMatrix& cm = scan.matrices.back();
    bravl::write_text_atomic(dir / "matrix.csv",
                             bravl::channel_matrix_csv(cm));
    bravl::write_json_atomic(dir / "matrix.meta.json",
                             bravl::channel_matrix_meta(cm));
  }
  const int cols = static_cast<int>(scan.bound.states.size());
  return emit(cfg, params, payload, verdicts,
              bravl::eigenvectors_csv(finest, cols));
}

int cmd_virial(RunConfig& cfg) {
  const bravl::PhysicalParams params = resolve_params(cfg, true);
  if (cfg.massless)
    throw CLI::ValidationError("virial identities need a rest energy scale; "
                               "--massless is not allowed here");
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-3;
  const bravl::ChannelScan scan = bravl::scan_channel(
      cfg.channel, params, cfg.nodes, cfg.sigma, 1e-4,
      cfg.allow_supercritical);

  const double e0 = params.rest_energy();
  json payload;
  json reports = json::array();
  json verdicts = json::array();
  std::ostringstream csv;
  csv << "form,N,lambda,norm_sq,lhs,rhs,abs_residual,rel_residual,imag_leak\n";

  std::vector<double> corollary_residuals;
  bool any_pair = false;
  bool forms_agree = true;
  bool imag_ok = true;
  for (std::size_t g = 0; g < scan.solutions.size(); ++g) {
    const bravl::EigenSolution& sol = scan.solutions[g];
    if (!(sol.eigenvalues(0) < e0)) continue;
    any_pair = true;
    const Eigen::VectorXcd v =
        sol.eigenvectors.col(0).cast<std::complex<double>>();
    const bravl::VirialReport cor =
        bravl::virial_residual(sol.eigenvalues(0), v, scan.matrices[g]);
    const bravl::VirialReport thm = bravl::virial_residual_theorem_form(
        sol.eigenvalues(0), v, scan.matrices[g]);
    for (const bravl::VirialReport* r : {&cor, &thm}) {
      reports.push_back(bravl::virial_report_json(*r));
      csv << r->form << ',' << r->grid_n << ','
          << bravl::format_sig17(r->lambda) << ','
          << bravl::format_sig17(r->norm_sq) << ','
          << bravl::format_sig17(r->lhs) << ',' << bravl::format_sig17(r->rhs)
          << ',' << bravl::format_sig17(r->abs_residual) << ','
          << bravl::format_sig17(r->rel_residual) << ','
          << bravl::format_sig17(r->imag_leak) << '\n';
      imag_ok = imag_ok && r->imag_ok;
    }
    corollary_residuals.push_back(cor.rel_residual);
    const double larger = std::max(cor.rel_residual, thm.rel_residual);
    const double smaller = std::min(cor.rel_residual, thm.rel_residual);
    if (larger > 2.0 * smaller && larger > 1e-12) forms_agree = false;
  }
  payload["reports"] = std::move(reports);

  if (!any_pair) {
    payload["note"] = "no admissible eigenpair: no eigenvalue below mc^2";
    json verdict;
    verdict["check"] = "virial_residual";
    verdict["status"] = "SKIP";
    verdict["detail"] = "no bound state to test";
    verdicts.push_back(std::move(verdict));
    return emit(cfg, params, payload, verdicts, csv.str());
  }

  bool monotone = true;
  for (std::size_t i = 0; i + 1 < corollary_residuals.size(); ++i)
    if (corollary_residuals[i + 1] >= corollary_residuals[i]) monotone = false;
  const double final_residual = corollary_residuals.back();
  verdicts.push_back(verdict_row(
      "residual_below_tolerance", final_residual <= tol,
      "rel_residual=" + bravl::format_sig17(final_residual)));
  if (corollary_residuals.size() > 1)
    verdicts.push_back(verdict_row("residual_decreasing", monotone));
  verdicts.push_back(verdict_row("forms_agree_within_2x", forms_agree));
  verdicts.push_back(verdict_row("imaginary_parts_negligible", imag_ok));
  return emit(cfg, params, payload, verdicts, csv.str());
}

int cmd_bounds(RunConfig& cfg) {
  const bravl::PhysicalParams params = resolve_params(cfg, true);
  const double nu = cfg.nu_list.empty() ? params.nu() : cfg.nu_list[0];
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-6;

  using bravl::ProfileId;
  const std::vector<ProfileId> ids{ProfileId::ratio_r, ProfileId::ratio_s,
                                   ProfileId::Phi, ProfileId::Theta,
                                   ProfileId::Psi};
  std::vector<bravl::BoundProfile> profiles;
  profiles.reserve(ids.size());
  for (ProfileId id : ids)
    profiles.push_back(bravl::bound_profile(id, 1e-4, 1e4, nu));

  const bravl::PsiCheck psi = bravl::psi_coefficient_check();

  json payload;
  json prof_json = json::array();
  for (const bravl::BoundProfile& prof : profiles)
    prof_json.push_back(bravl::bound_profile_json(prof, false));
  payload["profiles"] = std::move(prof_json);
  payload["psi_coefficient"] = bravl::psi_check_json(psi);
  payload["embedded_threshold"] =
      bravl::tagged(bravl::embedded_threshold(cfg.channel, nu), "mc2");

  json verdicts = json::array();
  verdicts.push_back(verdict_row(
      "ratio_r_min_is_3_4", std::abs(profiles[0].extremum_value - 0.75) <= tol,
      "min=" + bravl::format_sig17(profiles[0].extremum_value)));
  verdicts.push_back(verdict_row(
      "ratio_s_sup_is_2", std::abs(profiles[1].extremum_value - 2.0) <= tol,
      "sup=" + bravl::format_sig17(profiles[1].extremum_value)));
  const double envelope = nu <= 0.75 ? 0.0 : 2.0 * (nu - 0.75) + 1e-9;
  for (std::size_t i : {std::size_t{2}, std::size_t{3}}) {
    double max_sampled = profiles[i].value[0];
    for (double v : profiles[i].value) max_sampled = std::max(max_sampled, v);
    verdicts.push_back(verdict_row(
        profile_name(profiles[i].id) + "_envelope", max_sampled <= envelope,
        "max=" + bravl::format_sig17(max_sampled) +
            " envelope=" + bravl::format_sig17(envelope)));
  }
  verdicts.push_back(verdict_row(
      "psi_coefficient_below_one", psi.below_one,
      "coefficient=" + bravl::format_sig17(psi.coefficient)));
  if (nu <= bravl::critical_nu()) {
    double max_psi = profiles[4].value[0];
    for (double v : profiles[4].value) max_psi = std::max(max_psi, v);
    verdicts.push_back(verdict_row(
        "psi_strictly_negative", max_psi < 0.0,
        "max=" + bravl::format_sig17(max_psi)));
  }
  return emit(cfg, params, payload, verdicts, bravl::profiles_csv(profiles));
}

int cmd_sweep(RunConfig& cfg) {
  const bravl::PhysicalParams params = resolve_params(cfg, true);
  const std::vector<bravl::SweepRow> rows =
      bravl::z_sweep(cfg.channel, cfg.nu_list, cfg.nodes, cfg.sigma);

  json payload;
  payload["rows"] = bravl::sweep_json(rows);
  json verdicts = json::array();
  bool all_ok = true;
  for (const bravl::SweepRow& row : rows) all_ok = all_ok && row.ok;
  verdicts.push_back(verdict_row("all_rows_ok", all_ok));
  return emit(cfg, params, payload, verdicts, bravl::sweep_csv(rows));
}

OptionSet add_common_flags(CLI::App* cmd, RunConfig& cfg) {
  OptionSet opts;
  opts.channel =
      cmd->add_option("--channel", cfg.channel_text,
                      "Channel as L,S with S = 0.5 or -0.5 (default 0,0.5)");
  opts.nu = cmd->add_option(
                   "--nu", cfg.nu_list,
                   "Coupling nu = alpha*Z (sweep accepts a comma list)")
                ->delimiter(',');
  opts.alpha = cmd->add_option("--alpha", cfg.alpha,
                               "Fine-structure constant");
  opts.Z = cmd->add_option("--Z", cfg.Z, "Nuclear charge");
  opts.nodes = cmd->add_option(
                      "--nodes", cfg.nodes,
                      "Grid refinement sequence (default 100,200,400)")
                   ->delimiter(',');
  opts.sigma =
      cmd->add_option("--sigma", cfg.sigma, "Momentum map scale (default 1)");
  opts.tol =
      cmd->add_option("--tol", cfg.tol, "Verification tolerance override");
  opts.out =
      cmd->add_option("--out", cfg.out_dir, "Output directory (default .)");
  opts.format =
      cmd->add_option("--format", cfg.formats, "Output formats: json,csv")
          ->delimiter(',');
  opts.deterministic = cmd->add_flag("--deterministic", cfg.deterministic,
                                     "Byte-stable output: omit timestamps");
  opts.allow_supercritical =
      cmd->add_flag("--allow-supercritical", cfg.allow_supercritical,
                    "Proceed when nu >= critical coupling");
  opts.massless =
      cmd->add_flag("--massless", cfg.massless, "Set the mass to zero");
  cmd->add_option("--config", cfg.config_file,
                  "Flat key=value configuration file; command-line flags "
                  "take precedence");
  return opts;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Momentum-space spectral toolkit for the Brown-Ravenhall "
               "operator's partial-wave channels"};
  app.require_subcommand(1);

  RunConfig cfg;
  int (*runners[])(RunConfig&) = {cmd_identities, cmd_spectrum, cmd_virial,
                                  cmd_bounds, cmd_sweep};
  const char* names[] = {"identities", "spectrum", "virial", "bounds",
                         "sweep"};
  const char* descriptions[] = {
      "Verify the g-profile integral constants and convolution identities",
      "Bound states, grid stability, and the embedded-eigenvalue scan",
      "Virial identity residuals for the ground-state eigenpair",
      "Bound profiles, extremal constants, and envelope checks",
      "Coupling sweep: one row per (nu, N)"};
  int selected = -1;
  OptionSet option_sets[5];
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
    option_sets[i] = add_common_flags(sub, cfg);
    if (names[i] == std::string("spectrum"))
      option_sets[i].dump_matrix = sub->add_flag(
          "--dump-matrix", cfg.dump_matrix,
          "Also write the finest assembled matrix (CSV + metadata)");
    sub->callback([&selected, i] { selected = i; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    cfg.command = names[selected];
    if (!cfg.config_file.empty()) apply_config(cfg, option_sets[selected]);
    cfg.channel = bravl::Channel::parse(cfg.channel_text);
    validate_common(cfg);
    return runners[selected](cfg);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
}
