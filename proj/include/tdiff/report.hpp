#pragma once

#include <string>
#include <vector>

namespace tdiff {

struct Check {
    std::string name;
    bool ok = true;
    std::string detail;
};

struct Report {
    std::vector<Check> checks;

    bool ok() const;
    const Check* first_failure() const;
    void add(std::string name, bool ok, std::string detail = {});
    std::string summary() const;
};

}  // namespace tdiff
