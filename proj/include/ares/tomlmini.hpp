#pragma once

// Minimal TOML subset for flat config files: [section] headers, bare keys,
// basic "..."-quoted strings, integers, floats, booleans, and # comments.
// Values are addressed by dotted path ("judge.model"). Arrays, inline tables,
// dates, and multi-line strings are deliberately out of scope.

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace ares::toml {

class Table {
  public:
    static Table parse(const std::string& text);
    static Table parse_file(const std::string& path);

    bool contains(const std::string& key) const;

    // Typed lookups return nullopt when the key is absent and throw
    // ParseError when it holds a different type. get_double accepts
    // integer-valued keys.
    std::optional<std::string> get_string(const std::string& key) const;
    std::optional<std::int64_t> get_int(const std::string& key) const;
    std::optional<double> get_double(const std::string& key) const;
    std::optional<bool> get_bool(const std::string& key) const;

    std::size_t size() const { return values_.size(); }

  private:
    enum class Kind { string, integer, floating, boolean };
    struct Value {
        Kind kind;
        std::string str;
        std::int64_t integer = 0;
        double floating = 0.0;
        bool boolean = false;
    };

    const Value* find(const std::string& key) const;

    std::map<std::string, Value> values_;
};

}  // namespace ares::toml
