// Copyright 2026 The cvcluster Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CVCLUSTER_TOOLS_COMMANDS_H
#define CVCLUSTER_TOOLS_COMMANDS_H

#include <ostream>
#include <string>
#include <vector>

namespace cvcluster {

/// Environment variable naming the default output directory.
constexpr const char *OUTPUT_DIR_ENV = "CVCLUSTER_OUT";

enum ExitCode {
    EXIT_OK = 0,
    EXIT_INVALID_CONFIG = 2,
    EXIT_NUMERICAL = 3,
    EXIT_IO = 4,
};

/// Runs the command line tool. `args` excludes the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Data files (manifest excluded) that a subcommand writes, in write order.
std::vector<std::string> data_files_for(const std::string &command);

}  // namespace cvcluster

#endif
