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

#include "thzhall/io.hpp"
#include "thzhall/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace thzhall::io
{
    using json = nlohmann::json;

    std::string read_text(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw InputError(path.string(), 0, "cannot open file");
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void write_text(const std::filesystem::path &path, std::string_view text)
    {
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + path.string());
        out.write(text.data(), std::streamsize(text.size()));
        if (!out)
            throw std::runtime_error("write failed: " + path.string());
    }

    std::string num(double v)
    {
        return fmt::format("{}", v);
    }

    // ---------------------------------------------------------------------------------------------
    // CSV

    namespace
    {
        std::string_view trim(std::string_view s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string_view::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        std::vector<std::string> split(std::string_view line)
        {
            std::vector<std::string> out;
            std::size_t start = 0;
            while (true)
            {
                const auto pos = line.find(',', start);
                out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
                if (pos == std::string_view::npos)
                    break;
                start = pos + 1;
            }
            return out;
        }
    }

    std::size_t CsvDocument::column(std::string_view name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        throw InputError(source, records.empty() ? 0 : records.front().line - 1,
                         "missing column '" + std::string(name) + "'");
    }

    double CsvDocument::number(const CsvRecord &r, std::size_t col) const
    {
        const std::string &f = r.fields[col];
        double v = 0.0;
        const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
        if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(v))
            throw InputError(source, r.line, "column '" + header[col] + "': not a finite number: '" + f + "'");
        return v;
    }

    std::optional<double> CsvDocument::optional_number(const CsvRecord &r, std::size_t col) const
    {
        if (r.fields[col].empty())
            return std::nullopt;
        return number(r, col);
    }

    const std::string &CsvDocument::text(const CsvRecord &r, std::size_t col) const
    {
        return r.fields[col];
    }

    CsvDocument parse_csv(std::string_view text, const std::string &source, bool require_rows)
    {
        CsvDocument doc;
        doc.source = source;
        std::size_t line_no = 0, pos = 0;
        bool have_header = false;
        while (pos <= text.size())
        {
            auto end = text.find('\n', pos);
            if (end == std::string_view::npos)
                end = text.size();
            const std::string_view line = trim(text.substr(pos, end - pos));
            ++line_no;
            pos = end + 1;
            if (line.empty())
            {
                if (end == text.size())
                    break;
                continue;
            }
            if (line.front() == '#')
            {
                const auto body = trim(line.substr(1));
                const auto eq = body.find('=');
                if (eq != std::string_view::npos)
                    doc.meta[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
                continue;
            }
            if (!have_header)
            {
                doc.header = split(line);
                have_header = true;
                continue;
            }
            CsvRecord r{line_no, split(line)};
            if (r.fields.size() != doc.header.size())
                throw InputError(source, line_no,
                                 fmt::format("expected {} fields, got {}", doc.header.size(), r.fields.size()));
            doc.records.push_back(std::move(r));
        }
        if (!have_header)
            throw InputError(source, line_no == 0 ? 1 : line_no, "empty file: no header row");
        if (require_rows && doc.records.empty())
            throw InputError(source, line_no, "no data rows");
        return doc;
    }

    std::string csv_text(const Provenance &prov, const std::vector<std::string> &header,
                         const std::vector<std::vector<std::string>> &rows)
    {
        std::string out;
        for (const auto &[k, v] : prov)
            out += "# " + k + "=" + v + "\n";
        auto join = [&](const std::vector<std::string> &fields)
        {
            for (std::size_t i = 0; i < fields.size(); ++i)
            {
                if (i)
                    out += ',';
                out += fields[i];
            }
            out += '\n';
        };
        join(header);
        for (const auto &r : rows)
            join(r);
        return out;
    }

    // ---------------------------------------------------------------------------------------------
    // Sounding data

    namespace
    {
        void check_frequency(const CsvDocument &doc, const CsvRecord &r, std::size_t col, const BandConfig &band,
                             std::size_t k)
        {
            const double f = doc.number(r, col);
            if (std::abs(f - band.frequency_hz(k)) > 1e-6 * band.step_hz())
                throw InputError(doc.source, r.line,
                                 fmt::format("frequency {} Hz does not match sweep point {} of band {} ({} Hz)", f, k,
                                             band.name, band.frequency_hz(k)));
        }

        Provenance with(Provenance prov, std::initializer_list<std::pair<std::string, std::string>> extra)
        {
            for (const auto &e : extra)
                prov.push_back(e);
            return prov;
        }
    }

    std::string sweep_csv(std::span<const SweepRecord> sweeps, const BandConfig &band, const Provenance &prov)
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto &s : sweeps)
            for (Eigen::Index k = 0; k < s.s21.size(); ++k)
                rows.push_back({num(s.az_deg), num(s.el_deg), num(band.frequency_hz(std::size_t(k))),
                                num(s.s21(k).real()), num(s.s21(k).imag())});
        return csv_text(prov, {"az_deg", "el_deg", "freq_hz", "re", "im"}, rows);
    }

    std::vector<SweepRecord> read_sweep_csv(std::string_view text, const std::string &source, const BandConfig &band)
    {
        const auto doc = parse_csv(text, source);
        const auto c_az = doc.column("az_deg"), c_el = doc.column("el_deg"), c_f = doc.column("freq_hz"),
                   c_re = doc.column("re"), c_im = doc.column("im");

        std::vector<SweepRecord> out;
        std::vector<std::size_t> first_line, filled;
        std::map<std::pair<double, double>, std::size_t> index;
        for (const auto &r : doc.records)
        {
            const std::pair<double, double> dir{doc.number(r, c_az), doc.number(r, c_el)};
            auto it = index.find(dir);
            if (it == index.end())
            {
                it = index.emplace(dir, out.size()).first;
                SweepRecord s;
                s.az_deg = dir.first;
                s.el_deg = dir.second;
                s.s21 = Eigen::VectorXcd::Zero(Eigen::Index(band.n_points));
                out.push_back(std::move(s));
                first_line.push_back(r.line);
                filled.push_back(0);
            }
            const std::size_t i = it->second;
            if (filled[i] >= band.n_points)
                throw InputError(source, r.line,
                                 fmt::format("direction ({}, {}) has more than {} sweep points", dir.first, dir.second,
                                             band.n_points));
            check_frequency(doc, r, c_f, band, filled[i]);
            out[i].s21(Eigen::Index(filled[i])) = {doc.number(r, c_re), doc.number(r, c_im)};
            ++filled[i];
        }
        for (std::size_t i = 0; i < out.size(); ++i)
            if (filled[i] != band.n_points)
                throw InputError(source, first_line[i],
                                 fmt::format("direction ({}, {}) has {} sweep points, expected {}", out[i].az_deg,
                                             out[i].el_deg, filled[i], band.n_points));
        return out;
    }

    std::string calibration_csv(const CalibrationRecord &calib, const BandConfig &band, const Provenance &prov)
    {
        std::vector<std::vector<std::string>> rows;
        for (Eigen::Index k = 0; k < calib.s21.size(); ++k)
            rows.push_back({num(band.frequency_hz(std::size_t(k))), num(calib.s21(k).real()), num(calib.s21(k).imag())});
        return csv_text(with(prov, {{"attenuator_gain_db", num(calib.attenuator_gain_db)}}), {"freq_hz", "re", "im"},
                        rows);
    }

    CalibrationRecord read_calibration_csv(std::string_view text, const std::string &source, const BandConfig &band)
    {
        const auto doc = parse_csv(text, source);
        const auto c_f = doc.column("freq_hz"), c_re = doc.column("re"), c_im = doc.column("im");
        if (doc.records.size() != band.n_points)
            throw InputError(source, doc.records.back().line,
                             fmt::format("{} calibration points, expected {}", doc.records.size(), band.n_points));
        CalibrationRecord c;
        c.s21 = Eigen::VectorXcd(Eigen::Index(band.n_points));
        for (std::size_t k = 0; k < doc.records.size(); ++k)
        {
            const auto &r = doc.records[k];
            check_frequency(doc, r, c_f, band, k);
            c.s21(Eigen::Index(k)) = {doc.number(r, c_re), doc.number(r, c_im)};
        }
        if (const auto it = doc.meta.find("attenuator_gain_db"); it != doc.meta.end())
        {
            double v = 0.0;
            const auto res = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
            if (res.ec != std::errc())
                throw InputError(source, 0, "attenuator_gain_db is not a number");
            c.attenuator_gain_db = v;
        }
        return c;
    }

    std::string cir_csv(std::span<const Cir> cirs, double floor_dbm, const Provenance &prov)
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto &c : cirs)
            for (Eigen::Index k = 0; k < c.taps.size(); ++k)
            {
                const double p = std::norm(c.taps(k));
                if (p > 0.0 && linear_to_db(p) >= floor_dbm)
                    rows.push_back({num(c.az_deg), num(c.el_deg), std::to_string(k), num(c.taps(k).real()),
                                    num(c.taps(k).imag())});
            }
        const double bin = cirs.empty() ? 0.0 : cirs.front().bin_ns;
        return csv_text(with(prov, {{"bin_ns", num(bin)}, {"floor_dbm", num(floor_dbm)}}),
                        {"az_deg", "el_deg", "bin", "re", "im"}, rows);
    }

    std::vector<Cir> read_cir_csv(std::string_view text, const std::string &source, const BandConfig &band)
    {
        const auto doc = parse_csv(text, source);
        const auto c_az = doc.column("az_deg"), c_el = doc.column("el_deg"), c_bin = doc.column("bin"),
                   c_re = doc.column("re"), c_im = doc.column("im");
        std::vector<Cir> out;
        std::map<std::pair<double, double>, std::size_t> index;
        std::set<std::tuple<std::size_t, long long>> seen;
        for (const auto &r : doc.records)
        {
            const std::pair<double, double> dir{doc.number(r, c_az), doc.number(r, c_el)};
            auto it = index.find(dir);
            if (it == index.end())
            {
                it = index.emplace(dir, out.size()).first;
                Cir c;
                c.az_deg = dir.first;
                c.el_deg = dir.second;
                c.bin_ns = band.delay_bin_ns();
                c.taps = Eigen::VectorXcd::Zero(Eigen::Index(band.n_points));
                out.push_back(std::move(c));
            }
            const double b = doc.number(r, c_bin);
            if (b != std::floor(b) || b < 0.0 || b >= double(band.n_points))
                throw InputError(source, r.line,
                                 fmt::format("bin {} is not an integer in [0, {})", doc.text(r, c_bin), band.n_points));
            if (!seen.emplace(it->second, static_cast<long long>(b)).second)
                throw InputError(source, r.line, fmt::format("duplicate bin {} for direction ({}, {})",
                                                             static_cast<long long>(b), dir.first, dir.second));
            out[it->second].taps(Eigen::Index(b)) = {doc.number(r, c_re), doc.number(r, c_im)};
        }
        return out;
    }

    std::string mpc_csv(std::span<const Mpc> mpcs, const Provenance &prov)
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto &m : mpcs)
            rows.push_back({num(m.toa_ns), num(m.aoa_az_deg), num(m.aoa_el_deg), num(m.power_db)});
        return csv_text(prov, {"toa_ns", "az_deg", "el_deg", "power_db"}, rows);
    }

    std::vector<Mpc> read_mpc_csv(std::string_view text, const std::string &source)
    {
        const auto doc = parse_csv(text, source, false);
        const auto c_t = doc.column("toa_ns"), c_az = doc.column("az_deg"), c_el = doc.column("el_deg"),
                   c_p = doc.column("power_db");
        std::vector<Mpc> out;
        for (const auto &r : doc.records)
            out.push_back({doc.number(r, c_t), doc.number(r, c_az), doc.number(r, c_el), doc.number(r, c_p)});
        return out;
    }

    // ---------------------------------------------------------------------------------------------
    // Analysis products

    std::string profile_csv(const AzimuthPowerProfile &profile, const Provenance &prov)
    {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < profile.size(); ++i)
            rows.push_back({num(profile.azimuths_deg[i]), num(profile.power_dbm[i])});
        return csv_text(prov, {"az_deg", "power_dbm"}, rows);
    }

    AzimuthPowerProfile read_profile_csv(std::string_view text, const std::string &source)
    {
        const auto doc = parse_csv(text, source);
        const auto c_az = doc.column("az_deg"), c_p = doc.column("power_dbm");
        AzimuthPowerProfile p;
        for (const auto &r : doc.records)
        {
            p.azimuths_deg.push_back(doc.number(r, c_az));
            p.power_dbm.push_back(doc.number(r, c_p));
        }
        return p;
    }

    std::string beams_csv(std::span<const Beam> beams, const Provenance &prov)
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto &b : beams)
            rows.push_back({num(b.center_deg), num(b.width_deg), num(b.peak_dbm), num(b.prominence_db),
                            std::to_string(b.peak_index)});
        return csv_text(prov, {"center_deg", "width_deg", "peak_dbm", "prominence_db", "peak_index"}, rows);
    }

    std::vector<Beam> read_beams_csv(std::string_view text, const std::string &source)
    {
        const auto doc = parse_csv(text, source, false);
        const auto c_c = doc.column("center_deg"), c_w = doc.column("width_deg"), c_p = doc.column("peak_dbm"),
                   c_pr = doc.column("prominence_db"), c_i = doc.column("peak_index");
        std::vector<Beam> out;
        for (const auto &r : doc.records)
        {
            const double idx = doc.number(r, c_i);
            if (idx < 0.0 || idx != std::floor(idx))
                throw InputError(source, r.line, "peak_index must be a non-negative integer");
            out.push_back({doc.number(r, c_c), doc.number(r, c_w), doc.number(r, c_p), doc.number(r, c_pr),
                           std::size_t(idx)});
        }
        return out;
    }

    std::string spreads_csv(std::span<const SpreadRow> rows_in, const Provenance &prov)
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto &s : rows_in)
            rows.push_back({s.id, std::to_string(s.mpc_count), num(s.delay_spread_ns), num(s.azimuth_spread_deg),
                            num(s.elevation_spread_deg)});
        return csv_text(prov, {"id", "mpc_count", "ds_ns", "asa_deg", "esa_deg"}, rows);
    }

    std::vector<SpreadRow> read_spreads_csv(std::string_view text, const std::string &source)
    {
        const auto doc = parse_csv(text, source);
        const auto c_id = doc.column("id"), c_n = doc.column("mpc_count"), c_ds = doc.column("ds_ns"),
                   c_as = doc.column("asa_deg"), c_es = doc.column("esa_deg");
        std::vector<SpreadRow> out;
        for (const auto &r : doc.records)
            out.push_back({doc.text(r, c_id), std::size_t(doc.number(r, c_n)), doc.number(r, c_ds),
                           doc.number(r, c_as), doc.number(r, c_es)});
        return out;
    }

    std::string toa_density_csv(const ToaHistogram &hist, const Provenance &prov)
    {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < hist.density.size(); ++i)
            rows.push_back({num(hist.bin_center_ns(i)), num(hist.density[i])});
        return csv_text(with(prov, {{"start_ns", num(hist.start_ns)}, {"bin_ns", num(hist.bin_ns)}}),
                        {"toa_ns", "density_per_ns"}, rows);
    }

    std::string clusters_csv(std::span<const Cluster> clusters, const Provenance &prov)
    {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < clusters.size(); ++i)
        {
            const auto &c = clusters[i];
            auto row = [&](const Mpc &m, const char *role)
            {
                rows.push_back({std::to_string(i), std::string(to_string(c.kind)), role, num(m.toa_ns),
                                num(m.aoa_az_deg), num(m.aoa_el_deg), num(m.power_db)});
            };
            row(c.center, "center");
            for (const auto &s : c.subpaths)
                row(s, "subpath");
        }
        return csv_text(prov, {"cluster", "kind", "role", "toa_ns", "az_deg", "el_deg", "power_db"}, rows);
    }

    std::vector<Cluster> read_clusters_csv(std::string_view text, const std::string &source)
    {
        const auto doc = parse_csv(text, source, false);
        const auto c_i = doc.column("cluster"), c_k = doc.column("kind"), c_r = doc.column("role"),
                   c_t = doc.column("toa_ns"), c_az = doc.column("az_deg"), c_el = doc.column("el_deg"),
                   c_p = doc.column("power_db");
        std::vector<Cluster> out;
        for (const auto &r : doc.records)
        {
            const double idx = doc.number(r, c_i);
            const Mpc m{doc.number(r, c_t), doc.number(r, c_az), doc.number(r, c_el), doc.number(r, c_p)};
            const std::string &role = doc.text(r, c_r);
            if (role == "center")
            {
                if (idx != double(out.size()))
                    throw InputError(source, r.line, fmt::format("cluster index {} out of sequence", idx));
                Cluster c;
                const std::string &kind = doc.text(r, c_k);
                if (kind == "rt")
                    c.kind = ClusterKind::rt;
                else if (kind == "non-rt")
                    c.kind = ClusterKind::non_rt;
                else
                    throw InputError(source, r.line, "unknown cluster kind '" + kind + "'");
                c.center = m;
                out.push_back(std::move(c));
            }
            else if (role == "subpath")
            {
                if (out.empty() || idx != double(out.size() - 1))
                    throw InputError(source, r.line, "subpath before its cluster centre");
                out.back().subpaths.push_back(m);
            }
            else
                throw InputError(source, r.line, "unknown role '" + role + "' (expected center or subpath)");
        }
        return out;
    }

    // ---------------------------------------------------------------------------------------------
    // Path loss

    std::string path_loss_samples_csv(std::span<const PathLossSample> samples, const Provenance &prov)
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto &s : samples)
            rows.push_back({s.rx_id, std::to_string(s.row), num(s.d_m), num(s.bent_d_m), num(s.pl_best_db),
                            num(s.pl_omni_db)});
        return csv_text(prov, {"rx_id", "row", "d_m", "bent_d_m", "pl_best_db", "pl_omni_db"}, rows);
    }

    std::vector<PathLossSample> read_path_loss_samples_csv(std::string_view text, const std::string &source)
    {
        const auto doc = parse_csv(text, source);
        const auto c_id = doc.column("rx_id"), c_row = doc.column("row"), c_d = doc.column("d_m"),
                   c_b = doc.column("bent_d_m"), c_pb = doc.column("pl_best_db"), c_po = doc.column("pl_omni_db");
        std::vector<PathLossSample> out;
        for (const auto &r : doc.records)
        {
            const double row = doc.number(r, c_row);
            if (row != std::floor(row))
                throw InputError(source, r.line, "row must be an integer");
            out.push_back({doc.text(r, c_id), int(row), doc.number(r, c_d), doc.number(r, c_b), doc.number(r, c_pb),
                           doc.number(r, c_po)});
        }
        return out;
    }

    // ---------------------------------------------------------------------------------------------
    // JSON helpers

    namespace
    {
        json parse_json(std::string_view text, const std::string &source)
        {
            try
            {
                return json::parse(text);
            }
            catch (const json::parse_error &e)
            {
                std::size_t line = 1;
                for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
                    if (text[i] == '\n')
                        ++line;
                throw InputError(source, line, e.what());
            }
        }

        const json &at(const json &j, const char *key, const std::string &source)
        {
            if (!j.is_object() || !j.contains(key))
                throw InputError(source, 0, std::string("missing field '") + key + "'");
            return j.at(key);
        }

        template <class T>
        T get(const json &j, const char *key, const std::string &source)
        {
            const json &v = at(j, key, source);
            try
            {
                return v.get<T>();
            }
            catch (const json::exception &e)
            {
                throw InputError(source, 0, std::string("field '") + key + "': " + e.what());
            }
        }

        template <class T>
        T get_or(const json &j, const char *key, T fallback, const std::string &source)
        {
            if (!j.is_object() || !j.contains(key) || j.at(key).is_null())
                return fallback;
            return get<T>(j, key, source);
        }

        json point(const Point2 &p)
        {
            return json::array({p.x(), p.y()});
        }

        Point2 point_from(const json &j, const char *key, const std::string &source)
        {
            const auto v = get<std::vector<double>>(j, key, source);
            if (v.size() != 2)
                throw InputError(source, 0, std::string("field '") + key + "': expected [x, y]");
            return {v[0], v[1]};
        }

        json prov_json(const Provenance &prov)
        {
            json p = json::object();
            for (const auto &[k, v] : prov)
                p[k] = v;
            return p;
        }

        std::string dump(const json &j)
        {
            return j.dump(1) + "\n";
        }

        json mpc_tuple(const Mpc &m)
        {
            return json::array({m.toa_ns, m.aoa_az_deg, m.aoa_el_deg, m.power_db});
        }

        Mpc mpc_from(const json &j, const std::string &source)
        {
            if (!j.is_array() || j.size() != 4)
                throw InputError(source, 0, "MPC tuple must be [toa_ns, az_deg, el_deg, power_db]");
            try
            {
                return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
            }
            catch (const json::exception &e)
            {
                throw InputError(source, 0, std::string("MPC tuple: ") + e.what());
            }
        }

        RxRegion region_from(const std::string &s, const std::string &source)
        {
            for (auto r : {RxRegion::los, RxRegion::corner, RxRegion::near_nlos, RxRegion::far_nlos})
                if (to_string(r) == s)
                    return r;
            throw InputError(source, 0, "unknown region '" + s + "'");
        }

        json band_to(const BandConfig &b)
        {
            return {{"name", b.name},
                    {"f_start_hz", b.f_start_hz},
                    {"f_stop_hz", b.f_stop_hz},
                    {"n_points", b.n_points},
                    {"if_freq_hz", b.if_freq_hz},
                    {"tx_gain_db", b.tx_gain_db},
                    {"rx_gain_db", b.rx_gain_db},
                    {"noise_floor_dbm", b.noise_floor_dbm},
                    {"dynamic_range_db", b.dynamic_range_db}};
        }

        BandConfig band_from(const json &j, const std::string &source)
        {
            BandConfig b;
            b.name = get<std::string>(j, "name", source);
            b.f_start_hz = get<double>(j, "f_start_hz", source);
            b.f_stop_hz = get<double>(j, "f_stop_hz", source);
            b.n_points = get<std::size_t>(j, "n_points", source);
            b.if_freq_hz = get_or<double>(j, "if_freq_hz", b.if_freq_hz, source);
            b.tx_gain_db = get_or<double>(j, "tx_gain_db", b.tx_gain_db, source);
            b.rx_gain_db = get_or<double>(j, "rx_gain_db", b.rx_gain_db, source);
            b.noise_floor_dbm = get_or<double>(j, "noise_floor_dbm", b.noise_floor_dbm, source);
            b.dynamic_range_db = get_or<double>(j, "dynamic_range_db", b.dynamic_range_db, source);
            try
            {
                b.validate();
            }
            catch (const ModelError &e)
            {
                throw InputError(source, 0, std::string("band: ") + e.what());
            }
            return b;
        }

        json law_to(const LogNormalLaw &l)
        {
            return {{"mu", l.mu}, {"sigma", l.sigma}};
        }

        LogNormalLaw law_from(const json &j, const char *key, const std::string &source)
        {
            const json &v = at(j, key, source);
            return {get<double>(v, "mu", source), get<double>(v, "sigma", source)};
        }

        json cluster_laws_to(const std::optional<ClusterLaws> &c)
        {
            if (!c)
                return nullptr;
            return {{"subpath_count", law_to(c->subpath_count)},
                    {"delay_spread_ns", law_to(c->delay_spread_ns)},
                    {"angular_spread_deg", law_to(c->angular_spread_deg)},
                    {"subpath_decay_db", c->subpath_decay_db}};
        }

        std::optional<ClusterLaws> cluster_laws_from(const json &j, const char *key, const std::string &source)
        {
            if (!j.contains(key) || j.at(key).is_null())
                return std::nullopt;
            const json &v = j.at(key);
            ClusterLaws c;
            c.subpath_count = law_from(v, "subpath_count", source);
            c.delay_spread_ns = law_from(v, "delay_spread_ns", source);
            c.angular_spread_deg = law_from(v, "angular_spread_deg", source);
            c.subpath_decay_db = get_or<double>(v, "subpath_decay_db", c.subpath_decay_db, source);
            return c;
        }

        json band_laws_to(const BandLaws &b)
        {
            const auto &p = b.placement;
            return {{"rt", cluster_laws_to(b.rt)},
                    {"non_rt", cluster_laws_to(b.non_rt)},
                    {"placement",
                     {{"mean_count", p.mean_count},
                      {"toa_min_ns", p.toa_min_ns},
                      {"toa_max_ns", p.toa_max_ns},
                      {"aoa_min_deg", p.aoa_min_deg},
                      {"aoa_max_deg", p.aoa_max_deg},
                      {"power_min_db", p.power_min_db},
                      {"power_max_db", p.power_max_db}}}};
        }

        BandLaws band_laws_from(const json &j, const std::string &source)
        {
            BandLaws b;
            b.rt = cluster_laws_from(j, "rt", source);
            b.non_rt = cluster_laws_from(j, "non_rt", source);
            if (j.contains("placement"))
            {
                const json &p = j.at("placement");
                auto &pl = b.placement;
                pl.mean_count = get_or<double>(p, "mean_count", pl.mean_count, source);
                pl.toa_min_ns = get_or<double>(p, "toa_min_ns", pl.toa_min_ns, source);
                pl.toa_max_ns = get_or<double>(p, "toa_max_ns", pl.toa_max_ns, source);
                pl.aoa_min_deg = get_or<double>(p, "aoa_min_deg", pl.aoa_min_deg, source);
                pl.aoa_max_deg = get_or<double>(p, "aoa_max_deg", pl.aoa_max_deg, source);
                pl.power_min_db = get_or<double>(p, "power_min_db", pl.power_min_db, source);
                pl.power_max_db = get_or<double>(p, "power_max_db", pl.power_max_db, source);
            }
            return b;
        }

        json lines_to(const std::map<std::string, LinearLaw> &m)
        {
            json j = json::object();
            for (const auto &[band, l] : m)
                j[band] = {{"slope", l.slope}, {"offset", l.offset}};
            return j;
        }

        std::map<std::string, LinearLaw> lines_from(const json &j, const char *key, const std::string &source)
        {
            std::map<std::string, LinearLaw> out;
            const json &v = at(j, key, source);
            if (!v.is_object())
                throw InputError(source, 0, std::string("field '") + key + "' must be an object keyed by band");
            for (const auto &[band, l] : v.items())
                out[band] = {get<double>(l, "slope", source), get<double>(l, "offset", source)};
            return out;
        }

        json params_to(const EvolveParams &p)
        {
            return {{"k", p.k}, {"power_db", lines_to(p.power_db)}, {"delay_ns", lines_to(p.delay_ns)}};
        }

        // Converts model-level validation failures into input errors
        template <class F>
        auto validated(const std::string &source, F &&f)
        {
            try
            {
                return f();
            }
            catch (const ModelError &e)
            {
                throw InputError(source, 0, e.what());
            }
        }
    }

    std::string fit_report_json(const PathLossFit &fit, std::span<const PathLossSample> samples, const Provenance &prov)
    {
        json j;
        j["provenance"] = prov_json(prov);
        j["model"] = std::string(to_string(fit.model));
        j["kind"] = std::string(to_string(fit.kind));
        j["ple"] = fit.ple;
        j["d0_m"] = fit.d0_m;
        j["frequency_hz"] = fit.frequency_hz;
        j["alpha"] = fit.alpha;
        j["beta_db"] = fit.beta_db;
        j["d1_m"] = fit.d1_m;
        j["sigma_sf_db"] = fit.sigma_sf_db;
        json rows = json::array();
        for (std::size_t i = 0; i < samples.size() && i < fit.residuals_db.size(); ++i)
        {
            const auto &s = samples[i];
            rows.push_back({{"rx_id", s.rx_id},
                            {"row", s.row},
                            {"d_m", s.d_m},
                            {"bent_d_m", s.bent_d_m},
                            {"pl_db", fit.kind == PathLossKind::best ? s.pl_best_db : s.pl_omni_db},
                            {"residual_db", fit.residuals_db[i]}});
        }
        j["samples"] = rows;
        return dump(j);
    }

    PathLossFit read_fit_report_json(std::string_view text, const std::string &source)
    {
        const json j = parse_json(text, source);
        PathLossFit f;
        validated(source, [&]
                  {
                      f.model = path_loss_model_from_string(get<std::string>(j, "model", source));
                      f.kind = path_loss_kind_from_string(get<std::string>(j, "kind", source));
                      return 0;
                  });
        // Parameters that do not belong to the model are written as null
        const double nan = std::numeric_limits<double>::quiet_NaN();
        f.ple = get_or<double>(j, "ple", nan, source);
        f.d0_m = get_or<double>(j, "d0_m", nan, source);
        f.frequency_hz = get_or<double>(j, "frequency_hz", nan, source);
        f.alpha = get_or<double>(j, "alpha", nan, source);
        f.beta_db = get_or<double>(j, "beta_db", nan, source);
        f.d1_m = get_or<double>(j, "d1_m", nan, source);
        f.sigma_sf_db = get<double>(j, "sigma_sf_db", source);
        for (const auto &s : at(j, "samples", source))
            f.residuals_db.push_back(get<double>(s, "residual_db", source));
        return f;
    }

    // ---------------------------------------------------------------------------------------------
    // Scene, params, laws

    std::string scene_json(const LShapeScene &scene, const Provenance &prov)
    {
        json walls = json::array();
        for (const auto &w : scene.walls)
            walls.push_back({{"name", w.name}, {"a", point(w.a)}, {"b", point(w.b)},
                             {"reflection_loss_db", w.reflection_loss_db}});
        json rx = json::array();
        for (const auto &r : scene.rx)
            rx.push_back({{"id", r.id}, {"position", point(r.position)}, {"row", r.row}});
        json j;
        j["provenance"] = prov_json(prov);
        j["name"] = scene.name;
        j["los_corridor_width"] = scene.los_corridor_width;
        j["nlos_corridor_width"] = scene.nlos_corridor_width;
        j["tx_position"] = point(scene.tx_position);
        j["tx_height"] = scene.tx_height;
        j["rx_height"] = scene.rx_height;
        j["d1"] = scene.d1;
        j["d2"] = scene.d2;
        j["d3"] = scene.d3;
        j["axis_x"] = scene.axis_x;
        j["axis_origin_y"] = scene.axis_origin_y;
        j["walls"] = walls;
        j["rx"] = rx;
        return dump(j);
    }

    LShapeScene read_scene_json(std::string_view text, const std::string &source)
    {
        const json j = parse_json(text, source);
        LShapeScene s;
        s.name = get_or<std::string>(j, "name", "", source);
        s.los_corridor_width = get<double>(j, "los_corridor_width", source);
        s.nlos_corridor_width = get<double>(j, "nlos_corridor_width", source);
        s.tx_position = point_from(j, "tx_position", source);
        s.tx_height = get_or<double>(j, "tx_height", s.tx_height, source);
        s.rx_height = get_or<double>(j, "rx_height", s.rx_height, source);
        s.d1 = get<double>(j, "d1", source);
        s.d2 = get<double>(j, "d2", source);
        s.d3 = get<double>(j, "d3", source);
        s.axis_x = get<double>(j, "axis_x", source);
        s.axis_origin_y = get<double>(j, "axis_origin_y", source);
        for (const auto &w : at(j, "walls", source))
            s.walls.push_back({get<std::string>(w, "name", source), point_from(w, "a", source),
                               point_from(w, "b", source), get_or<double>(w, "reflection_loss_db", 0.0, source)});
        for (const auto &r : at(j, "rx", source))
            s.rx.push_back({get<std::string>(r, "id", source), point_from(r, "position", source),
                            get_or<int>(r, "row", 0, source)});
        validated(source, [&]
                  {
                      s.validate();
                      return 0;
                  });
        return s;
    }

    std::string band_json(const BandConfig &band)
    {
        return dump(band_to(band));
    }

    std::string params_json(const EvolveParams &params, const Provenance &prov)
    {
        json j = params_to(params);
        j["provenance"] = prov_json(prov);
        return dump(j);
    }

    EvolveParams read_params_json(std::string_view text, const std::string &source)
    {
        const json j = parse_json(text, source);
        EvolveParams p;
        p.k = get<double>(j, "k", source);
        if (!std::isfinite(p.k))
            throw InputError(source, 0, "k must be finite");
        p.power_db = lines_from(j, "power_db", source);
        p.delay_ns = lines_from(j, "delay_ns", source);
        return p;
    }

    std::string laws_json(const StatLaws &laws, const Provenance &prov)
    {
        json bands = json::object();
        for (const auto &[name, b] : laws.bands)
            bands[name] = band_laws_to(b);
        json j;
        j["provenance"] = prov_json(prov);
        j["bands"] = bands;
        return dump(j);
    }

    StatLaws read_laws_json(std::string_view text, const std::string &source)
    {
        const json j = parse_json(text, source);
        StatLaws laws;
        const json &bands = at(j, "bands", source);
        if (!bands.is_object())
            throw InputError(source, 0, "field 'bands' must be an object keyed by band");
        for (const auto &[name, b] : bands.items())
            laws.bands[name] = band_laws_from(b, source);
        validated(source, [&]
                  {
                      laws.validate();
                      return 0;
                  });
        return laws;
    }

    // ---------------------------------------------------------------------------------------------
    // Realisations

    std::string realization_json(const ChannelRealization &real, const Provenance &prov, const BandLaws *laws,
                                 const EvolveParams *params)
    {
        json clusters = json::array();
        for (std::size_t i = 0; i < real.clusters.size(); ++i)
        {
            const auto &c = real.clusters[i];
            json subs = json::array();
            for (const auto &s : c.subpaths)
                subs.push_back(mpc_tuple(s));
            json cj = {{"kind", std::string(to_string(c.kind))}, {"center", mpc_tuple(c.center)}, {"subpaths", subs}};
            if (i < real.draws.size())
            {
                const auto &d = real.draws[i];
                cj["side"] = d.side;
                cj["subpath_count"] = d.subpath_count;
                cj["delay_spread_ns"] = d.delay_spread_ns;
                cj["angular_spread_deg"] = d.angular_spread_deg;
                cj["truncated"] = d.truncated;
            }
            clusters.push_back(cj);
        }
        json j;
        j["provenance"] = prov_json(prov);
        j["rx_id"] = real.rx_id;
        j["seed"] = real.seed;
        j["region"] = std::string(to_string(real.region));
        j["reference_rx_id"] = real.reference_rx_id;
        j["band"] = band_to(real.band);
        j["clusters"] = clusters;
        if (laws)
            j["laws"] = band_laws_to(*laws);
        if (params)
            j["params"] = params_to(*params);
        return dump(j);
    }

    ChannelRealization read_realization_json(std::string_view text, const std::string &source)
    {
        const json j = parse_json(text, source);
        ChannelRealization r;
        r.rx_id = get<std::string>(j, "rx_id", source);
        r.seed = get<std::uint64_t>(j, "seed", source);
        r.region = region_from(get<std::string>(j, "region", source), source);
        r.reference_rx_id = get_or<std::string>(j, "reference_rx_id", "", source);
        r.band = band_from(at(j, "band", source), source);
        for (const auto &cj : at(j, "clusters", source))
        {
            Cluster c;
            const auto kind = get<std::string>(cj, "kind", source);
            if (kind == "rt")
                c.kind = ClusterKind::rt;
            else if (kind == "non-rt")
                c.kind = ClusterKind::non_rt;
            else
                throw InputError(source, 0, "unknown cluster kind '" + kind + "'");
            c.center = mpc_from(at(cj, "center", source), source);
            for (const auto &s : at(cj, "subpaths", source))
                c.subpaths.push_back(mpc_from(s, source));
            ClusterDraw d;
            d.side = get_or<int>(cj, "side", 0, source);
            d.subpath_count = get_or<std::size_t>(cj, "subpath_count", c.subpaths.size(), source);
            d.delay_spread_ns = get_or<double>(cj, "delay_spread_ns", 0.0, source);
            d.angular_spread_deg = get_or<double>(cj, "angular_spread_deg", 0.0, source);
            d.truncated = get_or<bool>(cj, "truncated", false, source);
            r.clusters.push_back(std::move(c));
            r.draws.push_back(d);
        }
        return r;
    }

    std::string paths_json(const LShapeScene &scene, const std::string &rx_id, std::span<const RayPath> paths,
                           const ReferencePaths *reference, const Provenance &prov)
    {
        json arr = json::array();
        for (const auto &p : paths)
        {
            json names = json::array(), pts = json::array();
            for (auto w : p.walls)
                names.push_back(scene.walls[w].name);
            for (const auto &q : p.interaction_points)
                pts.push_back(point(q));
            arr.push_back({{"bounces", p.bounce_count},
                           {"walls", names},
                           {"wall_indices", p.walls},
                           {"points", pts},
                           {"length_m", p.total_length_m},
                           {"toa_ns", p.toa_ns},
                           {"aoa_az_deg", p.aoa_az_deg},
                           {"power_db", p.power_db}});
        }
        json j;
        j["provenance"] = prov_json(prov);
        j["rx_id"] = rx_id;
        j["paths"] = arr;
        if (reference)
        {
            auto side = [](const std::optional<RayPath> &p) -> json
            {
                if (!p)
                    return nullptr;
                return {{"walls", p->walls}, {"toa_ns", p->toa_ns}, {"aoa_az_deg", p->aoa_az_deg},
                        {"power_db", p->power_db}};
            };
            j["reference"] = {{"wall_c", side(reference->wall_c)}, {"wall_d", side(reference->wall_d)},
                              {"warnings", reference->warnings}};
        }
        return dump(j);
    }

    std::vector<RayPath> read_paths_json(std::string_view text, const std::string &source)
    {
        const json j = parse_json(text, source);
        std::vector<RayPath> out;
        for (const auto &pj : at(j, "paths", source))
        {
            RayPath p;
            p.bounce_count = get<int>(pj, "bounces", source);
            p.walls = get<std::vector<std::size_t>>(pj, "wall_indices", source);
            for (const auto &q : at(pj, "points", source))
            {
                const auto v = q.get<std::vector<double>>();
                if (v.size() != 2)
                    throw InputError(source, 0, "interaction point must be [x, y]");
                p.interaction_points.emplace_back(v[0], v[1]);
            }
            p.total_length_m = get<double>(pj, "length_m", source);
            p.toa_ns = get<double>(pj, "toa_ns", source);
            p.aoa_az_deg = get<double>(pj, "aoa_az_deg", source);
            p.power_db = get<double>(pj, "power_db", source);
            if (p.walls.size() != std::size_t(p.bounce_count) || p.interaction_points.size() != p.walls.size())
                throw InputError(source, 0, "path with inconsistent bounce count");
            out.push_back(std::move(p));
        }
        return out;
    }

    std::string evolved_json(const ReferenceAnchor &anchor, const std::string &band,
                             const std::vector<std::pair<double, std::vector<EvolvedPath>>> &by_dd, const Provenance &prov)
    {
        json sides = json::array();
        for (int side = 1; side <= 2; ++side)
        {
            if (!anchor.has_side(side))
                continue;
            const std::size_t s = std::size_t(side - 1);
            sides.push_back({{"side", side},
                             {"wall_distance_m", anchor.wall_distance_m[s]},
                             {"phi_ref_deg", *anchor.phi_ref_deg[s]},
                             {"interaction_point", point(*anchor.interaction_point[s])}});
        }
        json paths = json::array();
        for (const auto &[dd, ps] : by_dd)
            for (const auto &p : ps)
                paths.push_back({{"delta_d_m", dd}, {"side", p.side}, {"mpc", mpc_tuple(p.mpc)}});
        json j;
        j["provenance"] = prov_json(prov);
        j["band"] = band;
        j["reference"] = {{"rx_id", anchor.ref_rx_id}, {"row", anchor.row}, {"position", point(anchor.ref_position)},
                          {"d_m", anchor.ref_d_m}, {"sides", sides}};
        j["paths"] = paths;
        return dump(j);
    }

    std::vector<std::pair<double, EvolvedPath>> read_evolved_json(std::string_view text, const std::string &source)
    {
        const json j = parse_json(text, source);
        std::vector<std::pair<double, EvolvedPath>> out;
        for (const auto &pj : at(j, "paths", source))
            out.push_back({get<double>(pj, "delta_d_m", source),
                           EvolvedPath{get<int>(pj, "side", source), mpc_from(at(pj, "mpc", source), source)}});
        return out;
    }

    std::string observations_csv(std::span<const BeamObservation> obs, const Provenance &prov)
    {
        auto opt = [](const std::optional<double> &v) { return v ? num(*v) : std::string(); };
        std::vector<std::vector<std::string>> rows;
        for (const auto &o : obs)
            rows.push_back({num(o.delta_d), std::to_string(o.side), opt(o.aoa_deg), opt(o.power_db), opt(o.delay_ns)});
        return csv_text(prov, {"delta_d_m", "side", "aoa_deg", "power_db", "delay_ns"}, rows);
    }

    std::vector<BeamObservation> read_observations_csv(std::string_view text, const std::string &source)
    {
        const auto doc = parse_csv(text, source);
        const auto c_dd = doc.column("delta_d_m"), c_s = doc.column("side"), c_a = doc.column("aoa_deg"),
                   c_p = doc.column("power_db"), c_d = doc.column("delay_ns");
        std::vector<BeamObservation> out;
        for (const auto &r : doc.records)
        {
            BeamObservation o;
            o.delta_d = doc.number(r, c_dd);
            const double side = doc.number(r, c_s);
            if (side != 1.0 && side != 2.0)
                throw InputError(source, r.line, "side must be 1 or 2");
            o.side = int(side);
            o.aoa_deg = doc.optional_number(r, c_a);
            o.power_db = doc.optional_number(r, c_p);
            o.delay_ns = doc.optional_number(r, c_d);
            out.push_back(o);
        }
        return out;
    }
}
