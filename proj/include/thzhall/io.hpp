// SPDX-License-Identifier: Apache-2.0
//
// thzhall: THz channel measurement processing and hybrid modelling for L-shaped hallways
// Copyright (C) 2026 The thzhall authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef THZHALL_IO_HPP
#define THZHALL_IO_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thzhall/analysis.hpp"
#include "thzhall/core.hpp"
#include "thzhall/evolve.hpp"
#include "thzhall/pathloss.hpp"
#include "thzhall/raytrace.hpp"
#include "thzhall/sounding.hpp"
#include "thzhall/synth.hpp"

// File formats. CSV files start with `# key=value` provenance lines, then a header row.
// JSON files carry a "provenance" object. Readers throw InputError with the line number.

namespace thzhall::io
{
    // Ordered key=value pairs written into every artefact
    using Provenance = std::vector<std::pair<std::string, std::string>>;

    std::string read_text(const std::filesystem::path &path);
    void write_text(const std::filesystem::path &path, std::string_view text); // creates parent directories

    // Shortest round-trip decimal form
    std::string num(double v);

    // ---------------------------------------------------------------------------------------------
    // Generic CSV

    struct CsvRecord
    {
        std::size_t line = 0;
        std::vector<std::string> fields;
    };

    struct CsvDocument
    {
        std::string source;
        std::map<std::string, std::string> meta; // from `# key=value` lines
        std::vector<std::string> header;
        std::vector<CsvRecord> records;

        // Column index by name; throws InputError naming the missing column
        std::size_t column(std::string_view name) const;
        double number(const CsvRecord &r, std::size_t col) const;
        std::optional<double> optional_number(const CsvRecord &r, std::size_t col) const; // empty -> nullopt
        const std::string &text(const CsvRecord &r, std::size_t col) const;
    };

    // Throws InputError for a missing header, ragged rows or an empty body when `require_rows`
    CsvDocument parse_csv(std::string_view text, const std::string &source, bool require_rows = true);

    // `# key=value` lines, header and body
    std::string csv_text(const Provenance &prov, const std::vector<std::string> &header,
                         const std::vector<std::vector<std::string>> &rows);

    // ---------------------------------------------------------------------------------------------
    // Sounding data

    std::string sweep_csv(std::span<const SweepRecord> sweeps, const BandConfig &band, const Provenance &prov);
    std::vector<SweepRecord> read_sweep_csv(std::string_view text, const std::string &source, const BandConfig &band);

    std::string calibration_csv(const CalibrationRecord &calib, const BandConfig &band, const Provenance &prov);
    CalibrationRecord read_calibration_csv(std::string_view text, const std::string &source, const BandConfig &band);

    // Sparse: only taps with power >= floor_dbm are listed
    std::string cir_csv(std::span<const Cir> cirs, double floor_dbm, const Provenance &prov);
    std::vector<Cir> read_cir_csv(std::string_view text, const std::string &source, const BandConfig &band);

    std::string mpc_csv(std::span<const Mpc> mpcs, const Provenance &prov);
    std::vector<Mpc> read_mpc_csv(std::string_view text, const std::string &source);

    // ---------------------------------------------------------------------------------------------
    // Analysis products

    std::string profile_csv(const AzimuthPowerProfile &profile, const Provenance &prov);
    AzimuthPowerProfile read_profile_csv(std::string_view text, const std::string &source);

    std::string beams_csv(std::span<const Beam> beams, const Provenance &prov);
    std::vector<Beam> read_beams_csv(std::string_view text, const std::string &source);

    struct SpreadRow
    {
        std::string id;
        std::size_t mpc_count = 0;
        double delay_spread_ns = 0.0;
        double azimuth_spread_deg = 0.0;
        double elevation_spread_deg = 0.0;
    };
    std::string spreads_csv(std::span<const SpreadRow> rows, const Provenance &prov);
    std::vector<SpreadRow> read_spreads_csv(std::string_view text, const std::string &source);

    std::string toa_density_csv(const ToaHistogram &hist, const Provenance &prov);

    std::string clusters_csv(std::span<const Cluster> clusters, const Provenance &prov);
    std::vector<Cluster> read_clusters_csv(std::string_view text, const std::string &source);

    // ---------------------------------------------------------------------------------------------
    // Path loss

    std::string path_loss_samples_csv(std::span<const PathLossSample> samples, const Provenance &prov);
    std::vector<PathLossSample> read_path_loss_samples_csv(std::string_view text, const std::string &source);

    std::string fit_report_json(const PathLossFit &fit, std::span<const PathLossSample> samples, const Provenance &prov);
    PathLossFit read_fit_report_json(std::string_view text, const std::string &source);

    // ---------------------------------------------------------------------------------------------
    // Geometry, models and realisations (JSON)

    std::string scene_json(const LShapeScene &scene, const Provenance &prov);
    LShapeScene read_scene_json(std::string_view text, const std::string &source);

    std::string band_json(const BandConfig &band);

    std::string params_json(const EvolveParams &params, const Provenance &prov);
    EvolveParams read_params_json(std::string_view text, const std::string &source);

    std::string laws_json(const StatLaws &laws, const Provenance &prov);
    StatLaws read_laws_json(std::string_view text, const std::string &source);

    // `laws` and `params`, when given, are recorded alongside the clusters
    std::string realization_json(const ChannelRealization &real, const Provenance &prov, const BandLaws *laws = nullptr,
                                 const EvolveParams *params = nullptr);
    ChannelRealization read_realization_json(std::string_view text, const std::string &source);

    std::string paths_json(const LShapeScene &scene, const std::string &rx_id, std::span<const RayPath> paths,
                           const ReferencePaths *reference, const Provenance &prov);
    std::vector<RayPath> read_paths_json(std::string_view text, const std::string &source);

    std::string evolved_json(const ReferenceAnchor &anchor, const std::string &band,
                             const std::vector<std::pair<double, std::vector<EvolvedPath>>> &by_dd, const Provenance &prov);
    std::vector<std::pair<double, EvolvedPath>> read_evolved_json(std::string_view text, const std::string &source);

    std::string observations_csv(std::span<const BeamObservation> obs, const Provenance &prov);
    std::vector<BeamObservation> read_observations_csv(std::string_view text, const std::string &source);
}

#endif
