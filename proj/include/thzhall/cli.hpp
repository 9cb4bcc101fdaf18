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

#ifndef THZHALL_CLI_HPP
#define THZHALL_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "thzhall/core.hpp"

namespace thzhall::cli
{
    enum ExitCode : int
    {
        exit_ok = 0,
        exit_usage = 1,
        exit_input_error = 2,
        exit_model_error = 3,
        exit_io_error = 4
    };

    // Settings shared by all subcommands
    struct RunConfig
    {
        std::string band = "306-321"; // 306-321, 356-371 or custom
        double f_start_hz = 0.0;      // custom band only
        double f_stop_hz = 0.0;
        std::size_t n_points = 0;
        std::optional<double> dynamic_range_db;
        std::optional<double> noise_floor_dbm;
        std::uint64_t seed = 1;
        std::string scene; // scene JSON
        std::string out = "out";
        double gate_delay_ns = 5.0;   // MPC clustering gates
        double gate_angle_deg = 20.0;

        // Throws ModelError for an unknown band or invalid custom grid
        BandConfig resolve_band() const;
    };

    // Parses and runs one command line (without the program name). Errors are reported on `err`;
    // returns the exit code. Nothing is written when a command fails.
    int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
    int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);
}

#endif
