// Copyright 2026 The treeleak Authors
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

// JSON text forms of transcripts, models and reports.

#ifndef TREELEAK_SERIALIZE_H_
#define TREELEAK_SERIALIZE_H_

#include <string>

#include "treeleak/comm.h"
#include "treeleak/ldp.h"
#include "treeleak/tree.h"
#include "treeleak/vfl.h"

namespace treeleak {

std::string transcript_to_json(const PartyTranscript& t);
// Throws MalformedInputError on missing or mistyped fields.
PartyTranscript transcript_from_json(const std::string& text);

std::string model_to_json(const TreeModel& m);
TreeModel model_from_json(const std::string& text);

std::string comm_to_json(const CommStats& c);
std::string graft_report_to_json(const GraftReport& r);

// Whole-file helpers. write_file_atomic writes a sibling temp file and
// renames it over `path`, creating parent directories.
std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace treeleak

#endif  // TREELEAK_SERIALIZE_H_
