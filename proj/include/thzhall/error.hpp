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

#ifndef THZHALL_ERROR_HPP
#define THZHALL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace thzhall
{
    // Invalid arguments or violated preconditions of a model operation
    class ModelError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Malformed input file; carries the 1-based line number when known (0 otherwise)
    class InputError : public std::runtime_error
    {
    public:
        InputError(const std::string &source, std::size_t line, const std::string &what)
            : std::runtime_error(format(source, line, what)), source_(source), line_(line) {}

        const std::string &source() const noexcept { return source_; }
        std::size_t line() const noexcept { return line_; }

    private:
        static std::string format(const std::string &source, std::size_t line, const std::string &what)
        {
            if (line == 0)
                return source + ": " + what;
            return source + ":" + std::to_string(line) + ": " + what;
        }

        std::string source_;
        std::size_t line_;
    };
}

#endif
