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

#include "thzhall/cli.hpp"
#include "thzhall/analysis.hpp"
#include "thzhall/error.hpp"
#include "thzhall/evolve.hpp"
#include "thzhall/io.hpp"
#include "thzhall/pathloss.hpp"
#include "thzhall/raytrace.hpp"
#include "thzhall/sounding.hpp"
#include "thzhall/synth.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <ostream>

namespace fs = std::filesystem;

namespace thzhall::cli
{
    namespace
    {
        constexpr const char *tool_version = "0.1.0";
        constexpr const char *laws_note = "illustrative, not fitted to measurements";
    }

    BandConfig RunConfig::resolve_band() const
    {
        BandConfig b;
        if (band == "custom")
        {
            b.name = "custom";
            b.f_start_hz = f_start_hz;
            b.f_stop_hz = f_stop_hz;
            b.n_points = n_points;
        }
        else
            b = band_from_name(band);
        if (dynamic_range_db)
            b.dynamic_range_db = *dynamic_range_db;
        if (noise_floor_dbm)
            b.noise_floor_dbm = *noise_floor_dbm;
        b.validate();
        return b;
    }

    namespace
    {
        // Files are staged and written only once the whole command has succeeded
        class Outputs
        {
        public:
            explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

            void add(const fs::path &rel, std::string text) { files_.emplace_back(dir_ / rel, std::move(text)); }

            void commit(std::ostream &out) const
            {
                for (const auto &[path, text] : files_)
                {
                    io::write_text(path, text);
                    out << "wrote " << path.string() << "\n";
                }
            }

        private:
            fs::path dir_;
            std::vector<std::pair<fs::path, std::string>> files_;
        };

        std::string base_of(const fs::path &p)
        {
            std::string name = p.filename().string();
            for (const char *suffix : {".sweep.csv", ".cir.csv", ".mpcs.csv", ".csv", ".json"})
            {
                const std::string s(suffix);
                if (name.size() > s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0)
                    return name.substr(0, name.size() - s.size());
            }
            return name;
        }

        std::string basenames(const std::vector<std::string> &files)
        {
            std::string s;
            for (const auto &f : files)
                s += (s.empty() ? "" : ";") + fs::path(f).filename().string();
            return s;
        }

        io::Provenance provenance(const RunConfig &cfg, const BandConfig &band, const std::string &command)
        {
            return {{"tool", "thzhall"},
                    {"version", tool_version},
                    {"command", command},
                    {"band", band.name},
                    {"f_start_hz", io::num(band.f_start_hz)},
                    {"f_stop_hz", io::num(band.f_stop_hz)},
                    {"n_points", std::to_string(band.n_points)},
                    {"delay_bin_ns", io::num(band.delay_bin_ns())},
                    {"dynamic_range_db", io::num(band.dynamic_range_db)},
                    {"noise_floor_dbm", io::num(band.noise_floor_dbm)},
                    {"seed", std::to_string(cfg.seed)}};
        }

        io::Provenance operator+(io::Provenance p, const io::Provenance &extra)
        {
            p.insert(p.end(), extra.begin(), extra.end());
            return p;
        }

        LShapeScene load_scene(const std::string &path)
        {
            if (path.empty())
                throw ModelError("--scene is required");
            return io::read_scene_json(io::read_text(path), path);
        }

        std::vector<std::size_t> select_rx(const LShapeScene &scene, const std::vector<std::string> &ids)
        {
            std::vector<std::size_t> out;
            if (ids.empty())
                for (std::size_t i = 0; i < scene.rx.size(); ++i)
                    out.push_back(i);
            for (const auto &id : ids)
                out.push_back(scene.rx_index(id));
            return out;
        }

        // -----------------------------------------------------------------------------------------
        // Subcommands

        struct CalibrateOptions
        {
            std::string sweep, calib;
            std::optional<double> antenna_gains_db;
        };

        void cmd_calibrate(const RunConfig &cfg, const CalibrateOptions &o, Outputs &outs, std::ostream &log)
        {
            const BandConfig band = cfg.resolve_band();
            const auto sweeps = io::read_sweep_csv(io::read_text(o.sweep), o.sweep, band);
            const auto calib = io::read_calibration_csv(io::read_text(o.calib), o.calib, band);
            const double gains = o.antenna_gains_db.value_or(band.cascaded_antenna_gain_db());
            std::vector<Cir> cirs;
            for (const auto &s : sweeps)
                cirs.push_back(ctf_to_cir(calibrate(s, calib, gains), band, s.az_deg, s.el_deg));
            const auto prov = provenance(cfg, band, "calibrate") +
                              io::Provenance{{"inputs", basenames({o.sweep, o.calib})},
                                             {"antenna_gains_db", io::num(gains)},
                                             {"attenuator_gain_db", io::num(calib.attenuator_gain_db)}};
            outs.add(base_of(o.sweep) + ".cir.csv", io::cir_csv(cirs, band.noise_floor_dbm, prov));
            log << fmt::format("{}: {} directions calibrated\n", o.sweep, cirs.size());
        }

        struct ExtractOptions
        {
            std::vector<std::string> cirs;
        };

        void cmd_extract(const RunConfig &cfg, const ExtractOptions &o, Outputs &outs, std::ostream &log)
        {
            const BandConfig band = cfg.resolve_band();
            for (const auto &f : o.cirs)
            {
                const auto cirs = io::read_cir_csv(io::read_text(f), f, band);
                const auto res = extract_mpcs(cirs, band);
                const auto prov = provenance(cfg, band, "extract") +
                                  io::Provenance{{"inputs", basenames({f})},
                                                 {"peak_dbm", io::num(res.peak_dbm)},
                                                 {"threshold_dbm", io::num(res.threshold_dbm)},
                                                 {"no_signal", res.no_signal ? "true" : "false"}};
                outs.add(base_of(f) + ".mpcs.csv", io::mpc_csv(res.mpcs, prov));
                log << fmt::format("{}: {} MPCs{}\n", f, res.mpcs.size(), res.no_signal ? " (no signal)" : "");
            }
        }

        struct BeamsOptions
        {
            std::vector<std::string> mpcs;
            double min_prominence_db = 15.0;
            std::optional<double> floor_dbm;
        };

        void cmd_beams(const RunConfig &cfg, const BeamsOptions &o, Outputs &outs, std::ostream &log)
        {
            const BandConfig band = cfg.resolve_band();
            const double floor = o.floor_dbm.value_or(band.noise_floor_dbm);
            const ScanGrid grid = default_scan_grid();
            for (const auto &f : o.mpcs)
            {
                const auto mpcs = io::read_mpc_csv(io::read_text(f), f);
                const auto profile = azimuth_power_profile(mpcs, grid, floor);
                const auto beams = detect_beams(profile, o.min_prominence_db);
                const auto prov = provenance(cfg, band, "beams") +
                                  io::Provenance{{"inputs", basenames({f})},
                                                 {"min_prominence_db", io::num(o.min_prominence_db)},
                                                 {"floor_dbm", io::num(floor)}};
                outs.add(base_of(f) + ".profile.csv", io::profile_csv(profile, prov));
                outs.add(base_of(f) + ".beams.csv", io::beams_csv(beams, prov));
                log << fmt::format("{}: {} beams\n", f, beams.size());
            }
        }

        struct SpreadsOptions
        {
            std::vector<std::string> mpcs;
            std::optional<double> toa_bin_ns;
        };

        void cmd_spreads(const RunConfig &cfg, const SpreadsOptions &o, Outputs &outs, std::ostream &log)
        {
            const BandConfig band = cfg.resolve_band();
            const auto prov = provenance(cfg, band, "spreads") +
                              io::Provenance{{"inputs", basenames(o.mpcs)},
                                             {"gate_delay_ns", io::num(cfg.gate_delay_ns)},
                                             {"gate_angle_deg", io::num(cfg.gate_angle_deg)}};
            std::vector<io::SpreadRow> rows;
            std::vector<Mpc> pooled;
            for (const auto &f : o.mpcs)
            {
                const auto mpcs = io::read_mpc_csv(io::read_text(f), f);
                if (mpcs.empty())
                    throw InputError(f, 0, "no MPCs (no signal); spreads are undefined");
                rows.push_back({base_of(f), mpcs.size(), rms_delay_spread(mpcs),
                                angular_spread(mpcs, AngleDomain::azimuth),
                                angular_spread(mpcs, AngleDomain::elevation)});
                const auto clusters = cluster_mpcs(mpcs, cfg.gate_delay_ns, cfg.gate_angle_deg);
                outs.add(base_of(f) + ".clusters.csv", io::clusters_csv(clusters, prov));
                pooled.insert(pooled.end(), mpcs.begin(), mpcs.end());
                log << fmt::format("{}: DS {} ns, ASA {} deg, {} clusters\n", f, io::num(rows.back().delay_spread_ns),
                                   io::num(rows.back().azimuth_spread_deg), clusters.size());
            }
            outs.add("spreads.csv", io::spreads_csv(rows, prov));
            if (o.toa_bin_ns)
                outs.add("toa_density.csv",
                         io::toa_density_csv(toa_density(pooled, *o.toa_bin_ns),
                                             prov + io::Provenance{{"toa_bin_ns", io::num(*o.toa_bin_ns)}}));
        }

        struct PlfitOptions
        {
            std::string samples;
            std::string mpcs_dir;
            std::string model = "ci";
            std::string kind = "best";
            std::string region; // los, nlos, all; empty: nlos for mab, all otherwise
            double d0_m = 1.0;
            std::optional<double> d1_m;
            std::optional<double> frequency_hz;
            bool per_row = false;
        };

        void cmd_plfit(const RunConfig &cfg, const PlfitOptions &o, Outputs &outs, std::ostream &log)
        {
            const BandConfig band = cfg.resolve_band();
            const auto model = path_loss_model_from_string(o.model);
            const auto kind = path_loss_kind_from_string(o.kind);
            std::optional<LShapeScene> scene;
            if (!cfg.scene.empty())
                scene = load_scene(cfg.scene);

            std::vector<PathLossSample> samples;
            std::vector<std::string> inputs;
            if (!o.samples.empty() == !o.mpcs_dir.empty())
                throw ModelError("plfit: give exactly one of --samples or --mpcs-dir");
            if (!o.samples.empty())
            {
                samples = io::read_path_loss_samples_csv(io::read_text(o.samples), o.samples);
                inputs.push_back(o.samples);
            }
            else
            {
                if (!scene)
                    throw ModelError("plfit: --mpcs-dir needs --scene");
                std::vector<fs::path> files;
                if (!fs::is_directory(o.mpcs_dir))
                    throw InputError(o.mpcs_dir, 0, "not a directory");
                for (const auto &e : fs::directory_iterator(o.mpcs_dir))
                {
                    const std::string n = e.path().filename().string();
                    if (e.is_regular_file() && n.size() > 9 && n.ends_with(".mpcs.csv"))
                        files.push_back(e.path());
                }
                std::sort(files.begin(), files.end());
                if (files.empty())
                    throw InputError(o.mpcs_dir, 0, "no *.mpcs.csv files");
                for (const auto &f : files)
                {
                    const std::string id = base_of(f);
                    std::size_t idx = 0;
                    try
                    {
                        idx = scene->rx_index(id);
                    }
                    catch (const ModelError &)
                    {
                        throw InputError(f.string(), 0, "file name does not match an Rx of the scene");
                    }
                    const auto mpcs = io::read_mpc_csv(io::read_text(f), f.string());
                    if (mpcs.empty())
                    {
                        log << fmt::format("{}: no signal, skipped\n", f.string());
                        continue;
                    }
                    samples.push_back(make_path_loss_sample(*scene, idx, mpcs));
                    inputs.push_back(f.string());
                }
                std::sort(samples.begin(), samples.end(),
                          [](const PathLossSample &a, const PathLossSample &b) { return a.bent_d_m < b.bent_d_m; });
            }

            const std::optional<double> d1 = o.d1_m ? o.d1_m : (scene ? std::optional<double>(scene->d1) : std::nullopt);
            const std::string region = !o.region.empty() ? o.region : (model == PathLossModel::mab ? "nlos" : "all");
            if (region != "all" && region != "los" && region != "nlos")
                throw ModelError("plfit: --region must be los, nlos or all");
            if (region != "all" && !d1)
                throw ModelError("plfit: region '" + region + "' needs --d1 or --scene");
            if (model == PathLossModel::mab && !d1)
                throw ModelError("plfit: the mab model needs --d1 or --scene");

            std::vector<PathLossSample> used;
            for (const auto &s : samples)
                if (region == "all" || (region == "los") == (s.bent_d_m <= *d1))
                    used.push_back(s);

            const double f = o.frequency_hz.value_or(band.center_hz());
            auto fit_one = [&](std::span<const PathLossSample> ss)
            {
                switch (model)
                {
                case PathLossModel::ci:
                    return fit_ci(ss, kind, o.d0_m, f);
                case PathLossModel::ab:
                    return fit_ab(ss, kind);
                case PathLossModel::mab:
                    break;
                }
                return fit_mab(ss, kind, *d1);
            };

            auto prov = provenance(cfg, band, "plfit") +
                        io::Provenance{{"inputs", basenames(inputs)},
                                       {"model", o.model},
                                       {"kind", o.kind},
                                       {"region", region},
                                       {"d0_m", io::num(o.d0_m)},
                                       {"d1_m", d1 ? io::num(*d1) : std::string("none")},
                                       {"frequency_hz", io::num(f)}};
            const auto fit = fit_one(used);
            const std::string stem = "plfit_" + o.model + "_" + o.kind;
            outs.add(stem + ".json", io::fit_report_json(fit, used, prov));
            if (o.samples.empty())
                outs.add("pl_samples.csv", io::path_loss_samples_csv(samples, prov));
            if (model == PathLossModel::ci)
                log << fmt::format("ci {} on {} samples: PLE {} sigma_SF {} dB\n", o.kind, used.size(),
                                   io::num(fit.ple), io::num(fit.sigma_sf_db));
            else
                log << fmt::format("{} {} on {} samples: alpha {} beta {} dB sigma_SF {} dB\n", o.model, o.kind,
                                   used.size(), io::num(fit.alpha), io::num(fit.beta_db), io::num(fit.sigma_sf_db));

            if (o.per_row)
            {
                if (model != PathLossModel::mab)
                    throw ModelError("plfit: --per-row applies to the mab model");
                for (const auto &[row, rf] : fit_mab_per_row(used, kind, *d1))
                {
                    std::vector<PathLossSample> rs;
                    for (const auto &s : used)
                        if (s.row == row)
                            rs.push_back(s);
                    outs.add(fmt::format("{}_row{}.json", stem, row),
                             io::fit_report_json(rf, rs, prov + io::Provenance{{"row", std::to_string(row)}}));
                }
                if (const auto off = mean_row_offset_db(used, kind, 1, 2))
                    log << fmt::format("mean row offset {} dB\n", io::num(*off));
            }
        }

        struct TraceOptions
        {
            std::vector<std::string> rx;
            int max_bounces = 6;
        };

        void cmd_trace(const RunConfig &cfg, const TraceOptions &o, Outputs &outs, std::ostream &log)
        {
            const BandConfig band = cfg.resolve_band();
            const auto scene = load_scene(cfg.scene);
            const auto prov = provenance(cfg, band, "trace") +
                              io::Provenance{{"inputs", basenames({cfg.scene})},
                                             {"max_bounces", std::to_string(o.max_bounces)},
                                             {"frequency_hz", io::num(band.center_hz())}};
            for (const auto idx : select_rx(scene, o.rx))
            {
                const auto paths = trace(scene, idx, o.max_bounces, band.center_hz());
                std::optional<ReferencePaths> ref;
                if (bent_axis_distance(scene, idx).region == RxRegion::near_nlos)
                    ref = select_reference_paths(scene, paths);
                const auto &id = scene.rx[idx].id;
                outs.add(id + ".paths.json", io::paths_json(scene, id, paths, ref ? &*ref : nullptr, prov));
                log << fmt::format("{}: {} paths\n", id, paths.size());
                if (ref)
                    for (const auto &w : ref->warnings)
                        log << fmt::format("{}: warning: {}\n", id, w);
            }
        }

        struct EvolveOptions
        {
            std::string ref;
            std::string params;
            std::vector<double> dd;
            std::string fit;
            int max_bounces = 6;
        };

        void cmd_evolve(const RunConfig &cfg, const EvolveOptions &o, Outputs &outs, std::ostream &log)
        {
            const BandConfig band = cfg.resolve_band();
            const auto scene = load_scene(cfg.scene);
            if (o.ref.empty())
                throw ModelError("evolve: --ref is required");
            const std::size_t ref_idx = scene.rx_index(o.ref);
            const auto ref = reference_dominant_mpcs(scene, ref_idx, o.max_bounces, band.center_hz());
            for (const auto &w : ref.warnings)
                log << fmt::format("{}: warning: {}\n", o.ref, w);
            const auto anchor = make_anchor(scene, ref_idx, ref);
            const EvolveParams params =
                o.params.empty() ? EvolveParams::defaults() : io::read_params_json(io::read_text(o.params), o.params);
            std::vector<std::string> inputs{cfg.scene};
            if (!o.params.empty())
                inputs.push_back(o.params);

            if (!o.fit.empty())
            {
                inputs.push_back(o.fit);
                const auto obs = io::read_observations_csv(io::read_text(o.fit), o.fit);
                const auto fit = fit_evolve_params(obs, anchor, band.name, params);
                for (const auto &n : fit.notes)
                    log << "note: " << n << "\n";
                auto prov = provenance(cfg, band, "evolve") +
                            io::Provenance{{"inputs", basenames(inputs)}, {"reference_rx", o.ref}};
                for (int s = 0; s < 2; ++s)
                    prov.push_back({"k_side" + std::to_string(s + 1),
                                    fit.k_per_side[std::size_t(s)] ? io::num(*fit.k_per_side[std::size_t(s)]) : "none"});
                outs.add("evolve_params.json", io::params_json(fit.params, prov));
                log << fmt::format("k = {}\n", io::num(fit.params.k));
                return;
            }

            std::vector<double> dds = o.dd;
            if (dds.empty())
                for (std::size_t j = 0; j < scene.rx.size(); ++j)
                {
                    if (scene.rx[j].row != scene.rx[ref_idx].row)
                        continue;
                    const auto p = bent_axis_distance(scene, j);
                    if (p.is_nlos() && p.d >= anchor.ref_d_m)
                        dds.push_back(p.d - anchor.ref_d_m);
                }
            std::vector<std::pair<double, std::vector<EvolvedPath>>> by_dd;
            for (double dd : dds)
                by_dd.emplace_back(dd, evolve_dominant_mpcs(anchor, dd, band.name, params));
            const auto prov = provenance(cfg, band, "evolve") +
                              io::Provenance{{"inputs", basenames(inputs)},
                                             {"reference_rx", o.ref},
                                             {"k", io::num(params.k)},
                                             {"max_bounces", std::to_string(o.max_bounces)}};
            outs.add("evolved.json", io::evolved_json(anchor, band.name, by_dd, prov));
            log << fmt::format("evolved {} positions from {}\n", by_dd.size(), o.ref);
        }

        struct SynthOptionsCli
        {
            std::vector<std::string> rx;
            std::string params;
            std::string laws;
            int max_bounces = 6;
            bool demo = false;
        };

        void synth_one(const RunConfig &cfg, const LShapeScene &scene, const std::string &scene_file,
                       const std::string &rx_id, const BandConfig &band, const EvolveParams &params,
                       const StatLaws &laws, const io::Provenance &extra, const SynthOptions &so, Outputs &outs,
                       const fs::path &subdir)
        {
            const auto real = synthesize(scene, rx_id, band, params, laws, cfg.seed, so);
            const auto prov = provenance(cfg, band, "synth") +
                              io::Provenance{{"inputs", basenames({scene_file})},
                                             {"rx", rx_id},
                                             {"max_bounces", std::to_string(so.max_bounces)}} +
                              extra;
            const BandLaws &bl = laws.for_band(band.name);
            outs.add(subdir / (rx_id + ".realization.json"), io::realization_json(real, prov, &bl, &params));
            outs.add(subdir / (rx_id + ".cir.csv"),
                     io::cir_csv(realization_to_cirs(real, default_scan_grid()), band.noise_floor_dbm, prov));
        }

        // Sounder-side records whose calibration reproduces the realisation's CIRs
        void demo_sweep(const RunConfig &cfg, const LShapeScene &scene, const std::string &rx_id,
                        const BandConfig &band, const EvolveParams &params, const StatLaws &laws,
                        const SynthOptions &so, Outputs &outs)
        {
            const auto real = synthesize(scene, rx_id, band, params, laws, cfg.seed, so);
            ScanGrid ring = default_scan_grid();
            ring.elevations_deg = {0.0};
            CalibrationRecord calib;
            calib.attenuator_gain_db = -40.0;
            calib.s21 = Eigen::VectorXcd(Eigen::Index(band.n_points));
            for (Eigen::Index k = 0; k < calib.s21.size(); ++k)
            {
                const double x = double(k) / double(band.n_points - 1);
                calib.s21(k) = std::polar(0.5 * (1.0 + 0.2 * std::cos(8.0 * std::numbers::pi * x)),
                                          -2.0 * std::numbers::pi * 37.0 * x);
            }
            const double g = db_to_amplitude(band.cascaded_antenna_gain_db() - calib.attenuator_gain_db);
            std::vector<SweepRecord> sweeps;
            for (const auto &c : realization_to_cirs(real, ring))
            {
                if (c.energy() == 0.0)
                    continue;
                SweepRecord s;
                s.az_deg = c.az_deg;
                s.el_deg = c.el_deg;
                s.s21 = (forward_dft(c.taps).array() * calib.s21.array() * g).matrix();
                sweeps.push_back(std::move(s));
            }
            const auto prov = provenance(cfg, band, "synth --demo") +
                              io::Provenance{{"rx", rx_id}, {"note", "synthetic sounder records"}};
            outs.add(fs::path("sweep") / (rx_id + ".sweep.csv"), io::sweep_csv(sweeps, band, prov));
            outs.add(fs::path("sweep") / "calib.csv", io::calibration_csv(calib, band, prov));
        }

        void cmd_synth(const RunConfig &cfg, const SynthOptionsCli &o, Outputs &outs, std::ostream &log)
        {
            SynthOptions so;
            so.max_bounces = o.max_bounces;
            if (o.demo)
            {
                const EvolveParams params = EvolveParams::defaults();
                const StatLaws laws = StatLaws::illustrative();
                const BandConfig b0 = cfg.resolve_band();
                const io::Provenance base = provenance(cfg, b0, "synth --demo");
                const auto indoor = indoor_l_scene();
                outs.add("scenes/indoor.json", io::scene_json(indoor, base));
                outs.add("scenes/outdoor.json", io::scene_json(outdoor_l_scene(), base));
                outs.add("scenes/long_corridor.json", io::scene_json(long_corridor_scene(), base));
                outs.add("params.json", io::params_json(params, base));
                outs.add("laws.json", io::laws_json(laws, base + io::Provenance{{"note", laws_note}}));
                for (auto make : {band_306_321, band_356_371})
                {
                    RunConfig bc = cfg;
                    bc.band = make().name;
                    const BandConfig band = bc.resolve_band();
                    for (const auto &rx : indoor.rx)
                        synth_one(bc, indoor, "indoor.json", rx.id, band, params, laws,
                                  {{"laws_note", laws_note}}, so, outs, band.name);
                    log << fmt::format("{}: {} realizations\n", band.name, indoor.rx.size());
                }
                RunConfig sc = cfg;
                sc.band = "306-321";
                demo_sweep(sc, indoor, "Rx5", sc.resolve_band(), params, laws, so, outs);
                return;
            }

            const BandConfig band = cfg.resolve_band();
            const auto scene = load_scene(cfg.scene);
            const EvolveParams params =
                o.params.empty() ? EvolveParams::defaults() : io::read_params_json(io::read_text(o.params), o.params);
            const StatLaws laws = o.laws.empty() ? StatLaws::illustrative() : io::read_laws_json(io::read_text(o.laws), o.laws);
            io::Provenance extra;
            extra.push_back({"params", o.params.empty() ? "defaults" : fs::path(o.params).filename().string()});
            extra.push_back({"laws", o.laws.empty() ? std::string(laws_note) : fs::path(o.laws).filename().string()});
            for (const auto idx : select_rx(scene, o.rx))
            {
                synth_one(cfg, scene, cfg.scene, scene.rx[idx].id, band, params, laws, extra, so, outs, "");
                log << fmt::format("{}: synthesized\n", scene.rx[idx].id);
            }
        }

        // -----------------------------------------------------------------------------------------

        void add_common(CLI::App *sub, RunConfig &cfg, bool with_scene)
        {
            sub->add_option("--band", cfg.band, "306-321, 356-371 or custom")->capture_default_str();
            sub->add_option("--f-start-hz", cfg.f_start_hz, "custom band: first frequency");
            sub->add_option("--f-stop-hz", cfg.f_stop_hz, "custom band: last frequency");
            sub->add_option("--n-points", cfg.n_points, "custom band: sweep points");
            sub->add_option("--dynamic-range-db", cfg.dynamic_range_db, "MPC dynamic range (default 30)");
            sub->add_option("--noise-floor-dbm", cfg.noise_floor_dbm, "noise floor (default -180)");
            sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
            sub->add_option("--out", cfg.out, "output directory")->capture_default_str();
            if (with_scene)
                sub->add_option("--scene", cfg.scene, "scene JSON");
        }
    }

    int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"THz L-shaped hallway channel toolkit", "thzhall"};
        app.set_config("--config", "", "TOML or INI configuration file; flags override it");
        app.require_subcommand(1, 1);
        app.set_version_flag("--version", tool_version);

        RunConfig cfg;
        std::function<void(Outputs &)> action;

        CalibrateOptions cal;
        auto *s_cal = app.add_subcommand("calibrate", "sweep + calibration records -> CIRs");
        add_common(s_cal, cfg, false);
        s_cal->add_option("--sweep", cal.sweep, "sweep CSV")->required();
        s_cal->add_option("--calib", cal.calib, "calibration CSV")->required();
        s_cal->add_option("--antenna-gains-db", cal.antenna_gains_db, "cascaded Tx+Rx antenna gain");
        s_cal->callback([&] { action = [&](Outputs &o) { cmd_calibrate(cfg, cal, o, out); }; });

        ExtractOptions ext;
        auto *s_ext = app.add_subcommand("extract", "CIRs -> MPCs");
        add_common(s_ext, cfg, false);
        s_ext->add_option("--cir", ext.cirs, "CIR CSV files")->required();
        s_ext->callback([&] { action = [&](Outputs &o) { cmd_extract(cfg, ext, o, out); }; });

        BeamsOptions bm;
        auto *s_bm = app.add_subcommand("beams", "MPCs -> azimuth power profile and beams");
        add_common(s_bm, cfg, false);
        s_bm->add_option("--mpcs", bm.mpcs, "MPC CSV files")->required();
        s_bm->add_option("--min-prominence-db", bm.min_prominence_db)->capture_default_str();
        s_bm->add_option("--floor-dbm", bm.floor_dbm, "profile value of empty azimuths (default: noise floor)");
        s_bm->callback([&] { action = [&](Outputs &o) { cmd_beams(cfg, bm, o, out); }; });

        SpreadsOptions sp;
        auto *s_sp = app.add_subcommand("spreads", "MPCs -> delay / angular spreads and clusters");
        add_common(s_sp, cfg, false);
        s_sp->add_option("--mpcs", sp.mpcs, "MPC CSV files")->required();
        s_sp->add_option("--toa-bin-ns", sp.toa_bin_ns, "also write the pooled ToA density");
        s_sp->add_option("--gate-delay-ns", cfg.gate_delay_ns)->capture_default_str();
        s_sp->add_option("--gate-angle-deg", cfg.gate_angle_deg)->capture_default_str();
        s_sp->callback([&] { action = [&](Outputs &o) { cmd_spreads(cfg, sp, o, out); }; });

        PlfitOptions pf;
        auto *s_pf = app.add_subcommand("plfit", "path-loss model fitting");
        add_common(s_pf, cfg, true);
        s_pf->add_option("--samples", pf.samples, "path-loss samples CSV");
        s_pf->add_option("--mpcs-dir", pf.mpcs_dir, "directory of <rx_id>.mpcs.csv files (needs --scene)");
        s_pf->add_option("--model", pf.model, "ci, ab or mab")->capture_default_str();
        s_pf->add_option("--kind", pf.kind, "best or omni")->capture_default_str();
        s_pf->add_option("--region", pf.region, "los, nlos or all (default: nlos for mab, else all)");
        s_pf->add_option("--d0", pf.d0_m, "CI reference distance, m")->capture_default_str();
        s_pf->add_option("--d1", pf.d1_m, "corner distance d1, m (default: from the scene)");
        s_pf->add_option("--frequency-hz", pf.frequency_hz, "CI frequency (default: band centre)");
        s_pf->add_flag("--per-row", pf.per_row, "mab: also fit each NLoS row");
        s_pf->callback([&] { action = [&](Outputs &o) { cmd_plfit(cfg, pf, o, out); }; });

        TraceOptions tr;
        auto *s_tr = app.add_subcommand("trace", "image-method ray tracing");
        add_common(s_tr, cfg, true);
        s_tr->add_option("--rx", tr.rx, "Rx ids (default: all)");
        s_tr->add_option("--max-bounces", tr.max_bounces)->capture_default_str();
        s_tr->callback([&] { action = [&](Outputs &o) { cmd_trace(cfg, tr, o, out); }; });

        EvolveOptions ev;
        auto *s_ev = app.add_subcommand("evolve", "far-NLoS dominant paths from a near-NLoS reference");
        add_common(s_ev, cfg, true);
        s_ev->add_option("--ref", ev.ref, "reference near-NLoS Rx id");
        s_ev->add_option("--params", ev.params, "evolve parameter JSON (default: built-in fits)");
        s_ev->add_option("--dd", ev.dd, "displacements, m (default: NLoS Rx of the reference row)");
        s_ev->add_option("--fit", ev.fit, "fit parameters from a beam observation CSV");
        s_ev->add_option("--max-bounces", ev.max_bounces)->capture_default_str();
        s_ev->callback([&] { action = [&](Outputs &o) { cmd_evolve(cfg, ev, o, out); }; });

        SynthOptionsCli sy;
        auto *s_sy = app.add_subcommand("synth", "hybrid channel realizations");
        add_common(s_sy, cfg, true);
        s_sy->add_option("--rx", sy.rx, "Rx ids (default: all)");
        s_sy->add_option("--params", sy.params, "evolve parameter JSON");
        s_sy->add_option("--laws", sy.laws, "statistical law JSON");
        s_sy->add_option("--max-bounces", sy.max_bounces)->capture_default_str();
        s_sy->add_flag("--demo", sy.demo, "regenerate the bundled fixture tree in --out");
        s_sy->callback([&] { action = [&](Outputs &o) { cmd_synth(cfg, sy, o, out); }; });

        try
        {
            std::vector<std::string> rev(args.rbegin(), args.rend());
            app.parse(rev);
        }
        catch (const CLI::ParseError &e)
        {
            const int code = app.exit(e, out, err);
            return code == 0 ? exit_ok : exit_usage;
        }

        try
        {
            Outputs outs(cfg.out);
            action(outs);
            outs.commit(out);
            return exit_ok;
        }
        catch (const InputError &e)
        {
            err << "input error: " << e.what() << "\n";
            return exit_input_error;
        }
        catch (const ModelError &e)
        {
            err << "error: " << e.what() << "\n";
            return exit_model_error;
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << "\n";
            return exit_io_error;
        }
    }

    int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
    {
        std::vector<std::string> args;
        for (int i = 1; i < argc; ++i)
            args.emplace_back(argv[i]);
        return run(args, out, err);
    }
}
