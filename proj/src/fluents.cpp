#include "spotter/fluents.h"

#include <algorithm>

namespace spotter {

std::string Fluent::to_string() const {
    std::string out = predicate;
    if (!args.empty()) {
        out += "(";
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (i > 0)
                out += ",";
            out += args[i];
        }
        out += ")";
    }
    return out;
}

std::string Literal::to_string() const {
    return positive ? fluent.to_string() : "!" + fluent.to_string();
}

PartialFluentState::PartialFluentState(std::vector<Literal> literals)
    : literals_(std::move(literals)) {
    std::sort(literals_.begin(), literals_.end());
    literals_.erase(std::unique(literals_.begin(), literals_.end()), literals_.end());
    for (std::size_t i = 1; i < literals_.size(); ++i) {
        if (literals_[i].fluent == literals_[i - 1].fluent)
            throw InconsistentState("fluent " + literals_[i].fluent.to_string() +
                                    " appears with both polarities");
    }
}

bool PartialFluentState::contains(const Literal &lit) const {
    return std::binary_search(literals_.begin(), literals_.end(), lit);
}

std::optional<bool> PartialFluentState::value(const Fluent &f) const {
    Literal probe(f, false);
    auto it = std::lower_bound(literals_.begin(), literals_.end(), probe);
    if (it != literals_.end() && it->fluent == f)
        return it->positive;
    return std::nullopt;
}

bool PartialFluentState::subset_of(const PartialFluentState &other) const {
    // Both sides sorted: single merge pass.
    auto it = other.literals_.begin();
    for (const Literal &lit : literals_) {
        while (it != other.literals_.end() && *it < lit)
            ++it;
        if (it == other.literals_.end() || *it != lit)
            return false;
    }
    return true;
}

PartialFluentState PartialFluentState::unite(const PartialFluentState &other) const {
    std::vector<Literal> merged;
    merged.reserve(literals_.size() + other.literals_.size());
    merged.insert(merged.end(), literals_.begin(), literals_.end());
    merged.insert(merged.end(), other.literals_.begin(), other.literals_.end());
    return PartialFluentState(std::move(merged));
}

PartialFluentState PartialFluentState::minus(const PartialFluentState &other) const {
    std::vector<Literal> out;
    out.reserve(literals_.size());
    std::set_difference(literals_.begin(), literals_.end(),
                        other.literals_.begin(), other.literals_.end(),
                        std::back_inserter(out));
    PartialFluentState result;
    result.literals_ = std::move(out); // difference of a consistent set stays consistent
    return result;
}

PartialFluentState PartialFluentState::intersect(const PartialFluentState &other) const {
    std::vector<Literal> out;
    std::set_intersection(literals_.begin(), literals_.end(),
                          other.literals_.begin(), other.literals_.end(),
                          std::back_inserter(out));
    PartialFluentState result;
    result.literals_ = std::move(out);
    return result;
}

PartialFluentState PartialFluentState::restricted_to(const std::set<Fluent> &keep) const {
    std::vector<Literal> out;
    for (const Literal &lit : literals_) {
        if (keep.count(lit.fluent))
            out.push_back(lit);
    }
    PartialFluentState result;
    result.literals_ = std::move(out);
    return result;
}

std::set<Fluent> PartialFluentState::fluents() const {
    std::set<Fluent> out;
    for (const Literal &lit : literals_)
        out.insert(lit.fluent);
    return out;
}

std::size_t hash_combine(std::size_t seed, std::size_t value) {
    return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t PartialFluentState::hash() const {
    std::size_t h = 0x811c9dc5u;
    std::hash<std::string> sh;
    for (const Literal &lit : literals_) {
        h = hash_combine(h, sh(lit.fluent.predicate));
        for (const std::string &a : lit.fluent.args)
            h = hash_combine(h, sh(a));
        h = hash_combine(h, lit.positive ? 1u : 2u);
    }
    return h;
}

std::string PartialFluentState::to_string() const {
    std::string out = "{";
    for (std::size_t i = 0; i < literals_.size(); ++i) {
        if (i > 0)
            out += ", ";
        out += literals_[i].to_string();
    }
    out += "}";
    return out;
}

} // namespace spotter
