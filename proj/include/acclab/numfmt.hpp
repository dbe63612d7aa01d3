// Copyright 2026 The acclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>

namespace acclab {

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_double(double v);

/// Parses the full string as a double (accepts "nan", "inf"); throws
/// InvalidParameter on trailing garbage or an empty field.
[[nodiscard]] double parse_double(std::string_view s);

}  // namespace acclab
