// reports.hpp: figure-data generators and CSV/metadata output

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "superabsorb/config.hpp"
#include "superabsorb/dicke.hpp"
#include "superabsorb/environment.hpp"

namespace superabsorb::reports {

inline constexpr const char* artifact_version = "0.1.0";

struct CsvTable {
    std::string name;                // file stem
    std::vector<std::string> header; // "name (unit)"
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
    std::vector<double> column(std::size_t k) const;
};

struct ResultBundle {
    std::vector<CsvTable> tables;
    nlohmann::json summary = nlohmann::json::object();
    nlohmann::json metadata; // filled by run()
};

// %.17g, so values survive a text round trip.
std::string format_number(double x);
std::string to_csv(const CsvTable& table);

// Writes <name>.csv per table, metadata.json and resolved_config.json.
void write_bundle(const ResultBundle& bundle, const std::string& directory);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

// Ladder, windows and rates assembled from the system/environment/trap
// sections for n_atoms atoms.
struct EngineeredSystem {
    dicke::DickeLadder ladder;
    env::SpectralDensityModel sd;
    env::OccupationModel occ;
    env::RateSet rates;
};
EngineeredSystem engineered_system(const config::RunConfig& cfg, int n_atoms);

// Uniform on [0, t_end], or 0 followed by a geometric grid from t_first.
std::vector<double> time_grid(const std::string& kind, int n_times, double t_end, double t_first);

ResultBundle cmd_ladder(const config::RunConfig& cfg);
ResultBundle cmd_fig2(const config::RunConfig& cfg);
ResultBundle cmd_fig3(const config::RunConfig& cfg);
ResultBundle cmd_fig4(const config::RunConfig& cfg);
ResultBundle cmd_si_validation(const config::RunConfig& cfg);
ResultBundle cmd_disorder(const config::RunConfig& cfg);
ResultBundle cmd_resolution(const config::RunConfig& cfg);

// Validates cfg, dispatches on cfg.command and attaches metadata.
ResultBundle run(const config::RunConfig& cfg);

} // namespace superabsorb::reports
