#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace hjq {

enum class SymbolKind : std::uint8_t {
    Coordinate = 0,
    Momentum = 1,
    Parameter = 2,
    Coupling = 3,
    Time = 4,
};

inline const char* to_string(SymbolKind k) {
    switch (k) {
        case SymbolKind::Coordinate: return "coordinate";
        case SymbolKind::Momentum: return "momentum";
        case SymbolKind::Parameter: return "parameter";
        case SymbolKind::Coupling: return "coupling";
        case SymbolKind::Time: return "time";
    }
    return "?";
}

/// A scalar indeterminate. (kind, name, indices) identifies it; equality is
/// structural. The total order (kind, then name, then indices) fixes the
/// canonical form of every expression and hence all printed output.
class Symbol {
public:
    Symbol() = default;
    Symbol(SymbolKind kind, std::string name, std::vector<int> indices = {})
        : kind_(kind), name_(std::move(name)), indices_(std::move(indices)) {}

    static Symbol coordinate(std::string name, std::vector<int> idx = {}) {
        return {SymbolKind::Coordinate, std::move(name), std::move(idx)};
    }
    static Symbol momentum(std::string name, std::vector<int> idx = {}) {
        return {SymbolKind::Momentum, std::move(name), std::move(idx)};
    }
    static Symbol parameter(std::string name, std::vector<int> idx = {}) {
        return {SymbolKind::Parameter, std::move(name), std::move(idx)};
    }
    static Symbol coupling(std::string name) {
        return {SymbolKind::Coupling, std::move(name)};
    }
    static Symbol time() { return {SymbolKind::Time, "t"}; }

    SymbolKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    const std::vector<int>& indices() const { return indices_; }

    friend std::strong_ordering operator<=>(const Symbol& a, const Symbol& b) {
        if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
        if (auto c = a.name_ <=> b.name_; c != 0) return c;
        return a.indices_ <=> b.indices_;
    }
    friend bool operator==(const Symbol& a, const Symbol& b) = default;

    std::string str() const {
        std::string s = name_;
        if (!indices_.empty()) {
            s += '[';
            for (size_t i = 0; i < indices_.size(); ++i) {
                if (i) s += ',';
                s += std::to_string(indices_[i]);
            }
            s += ']';
        }
        return s;
    }

    friend std::ostream& operator<<(std::ostream& os, const Symbol& s) {
        return os << s.str();
    }

private:
    SymbolKind kind_ = SymbolKind::Parameter;
    std::string name_;
    std::vector<int> indices_;
};

} // namespace hjq
