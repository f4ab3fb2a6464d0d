#ifndef DGMORSE_REPORT_HPP
#define DGMORSE_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

namespace dgmorse {

/// Location of a failed identity: the degree and basis tensor it was evaluated on, and the nonzero residue.
struct Witness {
    int degree = 0;
    std::string tensor;
    std::string value;
};

struct Check {
    std::string name;
    bool pass = true;
    std::optional<Witness> witness;
    std::string detail;
};

/// Outcome of a verification. Verifiers never throw on a failed identity; they record it here.
struct Report {
    std::string subject;
    std::vector<Check> checks;

    bool pass() const
    {
        for (const auto& c : checks)
            if (!c.pass)
                return false;
        return true;
    }

    const Check* first_failure() const
    {
        for (const auto& c : checks)
            if (!c.pass)
                return &c;
        return nullptr;
    }

    void add(std::string name, bool ok, std::optional<Witness> w = std::nullopt, std::string detail = {})
    {
        checks.push_back({std::move(name), ok, std::move(w), std::move(detail)});
    }

    void merge(const Report& other, const std::string& prefix = {})
    {
        for (auto c : other.checks) {
            if (!prefix.empty())
                c.name = prefix + c.name;
            checks.push_back(std::move(c));
        }
    }
};

} // namespace dgmorse

#endif // DGMORSE_REPORT_HPP
