#include "papc/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "papc/errors.hpp"

namespace papc {

using nlohmann::json;

std::string scenario_to_json(const Scenario& sc) {
  json j;
  j["format_version"] = kScenarioFormatVersion;
  j["cells"] = sc.cells;
  j["subcarriers"] = sc.subcarriers;
  j["inter_site_distance_m"] = sc.inter_site_distance_m;
  j["bandwidth_hz"] = sc.bandwidth_hz;
  j["noise_power_w"] = sc.noise_power_w;
  j["p_max_w"] = sc.p_max_w;
  j["seed"] = sc.seed;
  json bs = json::array();
  for (const auto& p : sc.bs_positions) bs.push_back({p.x, p.y});
  j["bs_positions"] = std::move(bs);
  json users = json::array();
  json assignment = json::array();
  for (std::size_t u = 0; u < sc.user_positions.size(); ++u) {
    users.push_back({sc.user_positions[u].x, sc.user_positions[u].y});
    const auto n = static_cast<std::size_t>(sc.subcarriers);
    assignment.push_back({u / n, u % n});
  }
  j["user_positions"] = std::move(users);
  j["user_assignment"] = std::move(assignment);
  j["gains_layout"] = "row-major (m, j, n): BS j to the user served by BS m on subcarrier n";
  j["gains"] = sc.gains;
  return j.dump(1) + "\n";
}

Scenario scenario_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario file is not valid JSON: ") + e.what());
  }
  try {
    if (!j.contains("format_version")) throw ConfigError("scenario file lacks format_version");
    const int version = j.at("format_version").get<int>();
    if (version != kScenarioFormatVersion)
      throw ConfigError("unsupported scenario format_version " + std::to_string(version));
    Scenario sc;
    sc.cells = j.at("cells").get<int>();
    sc.subcarriers = j.at("subcarriers").get<int>();
    sc.inter_site_distance_m = j.at("inter_site_distance_m").get<double>();
    sc.bandwidth_hz = j.at("bandwidth_hz").get<double>();
    sc.noise_power_w = j.at("noise_power_w").get<double>();
    sc.p_max_w = j.at("p_max_w").get<double>();
    sc.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& p : j.at("bs_positions")) sc.bs_positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    for (const auto& p : j.at("user_positions"))
      sc.user_positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    const auto& assignment = j.at("user_assignment");
    if (assignment.size() != sc.user_positions.size())
      throw ConfigError("user_assignment and user_positions differ in length");
    for (std::size_t u = 0; u < assignment.size(); ++u) {
      const auto m = assignment[u].at(0).get<std::size_t>();
      const auto n = assignment[u].at(1).get<std::size_t>();
      if (sc.subcarriers <= 0 || m * static_cast<std::size_t>(sc.subcarriers) + n != u)
        throw ConfigError("user_assignment must list (m, n) in row-major order");
    }
    sc.gains = j.at("gains").get<std::vector<double>>();
    sc.validate();
    return sc;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scenario file: ") + e.what());
  }
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << scenario_to_json(scenario);
  if (!out) throw IoError("failed writing " + path.string());
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

}  // namespace papc
