#include "wsie/errors.hpp"

#include <atomic>
#include <iostream>

namespace wsie {

namespace {

void stderr_sink(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

std::atomic<WarningSink> g_sink{&stderr_sink};

}  // namespace

WarningSink set_warning_sink(WarningSink sink) {
    return g_sink.exchange(sink ? sink : &stderr_sink);
}

void warn(const std::string& message) { g_sink.load()(message); }

}  // namespace wsie
