#include "tdiff/report.hpp"

#include <algorithm>
#include <sstream>

namespace tdiff {

bool Report::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok; });
}

const Check* Report::first_failure() const {
    for (const auto& c : checks)
        if (!c.ok) return &c;
    return nullptr;
}

void Report::add(std::string name, bool ok, std::string detail) { checks.push_back(Check{std::move(name), ok, std::move(detail)}); }

std::string Report::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.ok ? "ok   " : "FAIL ") << c.name;
        if (!c.detail.empty()) os << ": " << c.detail;
        os << "\n";
    }
    return os.str();
}

}  // namespace tdiff
