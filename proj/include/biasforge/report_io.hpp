// Copyright 2026 The BiasForge Authors
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

#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "biasforge/scoring.hpp"

namespace biasforge {

nlohmann::json report_to_json(const CorpusReport& report);
CorpusReport report_from_json(const nlohmann::json& j);

// Pretty-printed, key-sorted JSON. Undefined ratios are written as null.
void write_report(const CorpusReport& report, std::ostream& out);
void write_report_file(const CorpusReport& report, const std::string& path);
CorpusReport read_report(std::istream& in);
CorpusReport read_report_file(const std::string& path);

}  // namespace biasforge
