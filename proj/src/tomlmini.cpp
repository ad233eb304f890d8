#include "ares/tomlmini.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>

#include "ares/errors.hpp"

namespace ares::toml {

namespace {

[[noreturn]] void bad(std::size_t lineno, const std::string& why) {
    throw ParseError("config line " + std::to_string(lineno) + ": " + why);
}

bool is_bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// Parses the value text after '='; `rest` must be empty or a comment.
std::string parse_quoted(const std::string& raw, std::size_t lineno, std::size_t* consumed) {
    std::string out;
    std::size_t i = 1;  // past the opening quote
    while (i < raw.size() && raw[i] != '"') {
        char c = raw[i];
        if (c == '\\') {
            if (i + 1 >= raw.size()) bad(lineno, "dangling escape in string");
            char e = raw[i + 1];
            switch (e) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                default: bad(lineno, std::string("unsupported escape \\") + e);
            }
            i += 2;
        } else {
            out += c;
            ++i;
        }
    }
    if (i >= raw.size()) bad(lineno, "unterminated string");
    *consumed = i + 1;
    return out;
}

bool is_integer_literal(const std::string& s) {
    std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

}  // namespace

Table Table::parse(const std::string& text) {
    Table table;
    std::string section;
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string line =
            end == std::string::npos ? text.substr(start) : text.substr(start, end - start);
        ++lineno;

        std::string stripped = trim(line);
        if (!stripped.empty() && stripped[0] != '#') {
            if (stripped[0] == '[') {
                if (stripped.back() != ']') bad(lineno, "unterminated section header");
                section = trim(stripped.substr(1, stripped.size() - 2));
                if (section.empty()) bad(lineno, "empty section name");
                for (char c : section) {
                    if (!is_bare_char(c)) bad(lineno, "invalid section name '" + section + "'");
                }
            } else {
                std::size_t eq = stripped.find('=');
                if (eq == std::string::npos) bad(lineno, "expected key = value");
                std::string key = trim(stripped.substr(0, eq));
                if (key.empty()) bad(lineno, "empty key");
                for (char c : key) {
                    if (!is_bare_char(c) || c == '.') bad(lineno, "invalid key '" + key + "'");
                }
                std::string raw = trim(stripped.substr(eq + 1));
                if (raw.empty()) bad(lineno, "missing value for '" + key + "'");

                Value value;
                if (raw[0] == '"') {
                    std::size_t consumed = 0;
                    value.kind = Kind::string;
                    value.str = parse_quoted(raw, lineno, &consumed);
                    std::string rest = trim(raw.substr(consumed));
                    if (!rest.empty() && rest[0] != '#') bad(lineno, "trailing text after string");
                } else {
                    std::size_t hash = raw.find('#');
                    if (hash != std::string::npos) raw = trim(raw.substr(0, hash));
                    if (raw.empty()) bad(lineno, "missing value for '" + key + "'");
                    if (raw == "true" || raw == "false") {
                        value.kind = Kind::boolean;
                        value.boolean = raw == "true";
                    } else if (is_integer_literal(raw)) {
                        value.kind = Kind::integer;
                        try {
                            value.integer = std::stoll(raw);
                        } catch (const std::exception&) {
                            bad(lineno, "integer out of range: " + raw);
                        }
                    } else {
                        char* parse_end = nullptr;
                        value.floating = std::strtod(raw.c_str(), &parse_end);
                        if (parse_end != raw.c_str() + raw.size()) {
                            bad(lineno, "unrecognized value: " + raw);
                        }
                        value.kind = Kind::floating;
                    }
                }
                std::string full_key = section.empty() ? key : section + "." + key;
                if (!table.values_.emplace(full_key, std::move(value)).second) {
                    bad(lineno, "duplicate key '" + full_key + "'");
                }
            }
        }

        if (end == std::string::npos) break;
        start = end + 1;
    }
    return table;
}

Table Table::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse(text);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

const Table::Value* Table::find(const std::string& key) const {
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

bool Table::contains(const std::string& key) const { return find(key) != nullptr; }

std::optional<std::string> Table::get_string(const std::string& key) const {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    if (v->kind != Kind::string) throw ParseError("config key '" + key + "' is not a string");
    return v->str;
}

std::optional<std::int64_t> Table::get_int(const std::string& key) const {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    if (v->kind != Kind::integer) throw ParseError("config key '" + key + "' is not an integer");
    return v->integer;
}

std::optional<double> Table::get_double(const std::string& key) const {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    if (v->kind == Kind::integer) return static_cast<double>(v->integer);
    if (v->kind != Kind::floating) throw ParseError("config key '" + key + "' is not a number");
    return v->floating;
}

std::optional<bool> Table::get_bool(const std::string& key) const {
    const Value* v = find(key);
    if (!v) return std::nullopt;
    if (v->kind != Kind::boolean) throw ParseError("config key '" + key + "' is not a boolean");
    return v->boolean;
}

}  // namespace ares::toml
