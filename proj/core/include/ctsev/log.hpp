#pragma once

#include <functional>
#include <string_view>

namespace ctsev {

using LogSink = std::function<void(std::string_view)>;

// Installs the sink warnings are routed to (stderr by default). Passing an
// empty function silences warnings. Returns the previous sink.
LogSink set_warning_sink(LogSink sink);

void warn(std::string_view message);

}  // namespace ctsev
