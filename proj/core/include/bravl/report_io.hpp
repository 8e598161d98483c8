#pragma once

#include "bravl/channel.hpp"
#include "bravl/legendre.hpp"
#include "bravl/spectral.hpp"
#include "bravl/virial.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace bravl {

using json = nlohmann::ordered_json;

// 17 significant digits, '.' decimal separator, no locale dependence.
std::string format_sig17(double x);

// {"value": v, "units": "..."} - every emitted number carries a units tag.
json tagged(double value, std::string_view units);

// Write-then-rename so readers never observe a partial file.
void write_text_atomic(const std::filesystem::path& path,
                       std::string_view text);
void write_json_atomic(const std::filesystem::path& path, const json& doc);

// Top-level envelope for every emitted file. The timestamp is omitted when
// deterministic is set so reruns are byte-identical.
inline constexpr int kSchemaVersion = 1;
json make_output_record(std::string_view command, const json& config_echo,
                        const json& payload, const json& verdicts,
                        bool deterministic);

// Flat key=value configuration text: '#' comments, blank lines ignored,
// whitespace around keys and values trimmed. No includes, no sections.
std::map<std::string, std::string> parse_config_file(
    const std::filesystem::path& path);

json params_json(const PhysicalParams& params);

json identity_json(const IdentityResult& row);
std::string identities_csv(const std::vector<IdentityResult>& rows);

// N, nodes, weights, then the row-major matrix entries.
std::string channel_matrix_csv(const ChannelMatrix& cm);
json channel_matrix_meta(const ChannelMatrix& cm);

json eigen_solution_json(const EigenSolution& sol);
// Node samples phi_i = v_i / sqrt(w_i), lowest max_columns eigenvectors.
std::string eigenvectors_csv(const EigenSolution& sol, int max_columns = -1);

json bound_state_set_json(const BoundStateSet& set);
json embedded_report_json(const EmbeddedScanReport& report);
json virial_report_json(const VirialReport& report);

json bound_profile_json(const BoundProfile& profile, bool include_samples);
// Plot-ready table: column of p plus one column per profile; all profiles
// must share the same sample points.
std::string profiles_csv(const std::vector<BoundProfile>& profiles);
json psi_check_json(const PsiCheck& check);

json sweep_json(const std::vector<SweepRow>& rows);
std::string sweep_csv(const std::vector<SweepRow>& rows);

} // namespace bravl
