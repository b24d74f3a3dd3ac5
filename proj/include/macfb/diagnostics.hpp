#pragma once

#include <functional>
#include <string_view>

namespace macfb {

using WarningSink = std::function<void(std::string_view)>;

/// Replaces the process-wide warning sink (default: one line on stderr).
/// Returns the previous sink. Passing an empty function silences warnings.
WarningSink set_warning_sink(WarningSink sink);

void warn(std::string_view message);

}  // namespace macfb
