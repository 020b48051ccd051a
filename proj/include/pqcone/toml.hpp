#pragma once

#include "pqcone/errors.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>

namespace pqcone {

/**
 * Reader for the TOML subset used by problem files: tables, arrays of tables, dotted
 * keys, basic and literal strings, integers, floats, booleans, arrays and inline tables.
 * Dates, multi-line strings and hex/octal literals are rejected.
 */
class TomlReader {
public:
    static nlohmann::json parse(std::string_view text) {
        TomlReader r(text);
        return r.document();
    }

private:
    explicit TomlReader(std::string_view text) : s_(text) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw SpecError("toml line " + std::to_string(line_) + ": " + what);
    }

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[pos_]; }

    void skip_blank() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
    }

    void skip_comment() {
        if (peek() == '#')
            while (!eof() && peek() != '\n') ++pos_;
    }

    /// Whitespace, comments and newlines, as allowed inside arrays.
    void skip_all() {
        for (;;) {
            skip_blank();
            skip_comment();
            if (peek() == '\n') {
                ++pos_;
                ++line_;
            } else if (peek() == '\r') {
                ++pos_;
            } else {
                return;
            }
        }
    }

    void end_of_line() {
        skip_blank();
        skip_comment();
        if (peek() == '\r') ++pos_;
        if (eof()) return;
        if (peek() != '\n') fail("unexpected '" + std::string(1, peek()) + "' after value");
        ++pos_;
        ++line_;
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    static bool bare_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    }

    std::string key_part() {
        skip_blank();
        if (peek() == '"') return basic_string();
        if (peek() == '\'') return literal_string();
        const std::size_t start = pos_;
        while (!eof() && bare_char(peek())) ++pos_;
        if (pos_ == start) fail("expected a key");
        return std::string(s_.substr(start, pos_ - start));
    }

    std::vector<std::string> dotted_key() {
        std::vector<std::string> parts{key_part()};
        skip_blank();
        while (peek() == '.') {
            ++pos_;
            parts.push_back(key_part());
            skip_blank();
        }
        return parts;
    }

    std::string basic_string() {
        expect('"');
        std::string out;
        for (;;) {
            if (eof() || peek() == '\n') fail("unterminated string");
            char c = s_[pos_++];
            if (c == '"') return out;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (eof()) fail("unterminated escape");
            c = s_[pos_++];
            switch (c) {
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            case 'r': out += '\r'; break;
            default: fail(std::string("unsupported escape \\") + c);
            }
        }
    }

    std::string literal_string() {
        expect('\'');
        const std::size_t start = pos_;
        while (!eof() && peek() != '\'' && peek() != '\n') ++pos_;
        if (peek() != '\'') fail("unterminated literal string");
        std::string out(s_.substr(start, pos_ - start));
        ++pos_;
        return out;
    }

    nlohmann::json number_or_bool() {
        const std::size_t start = pos_;
        while (!eof() && (bare_char(peek()) || peek() == '+' || peek() == '.')) ++pos_;
        std::string tok(s_.substr(start, pos_ - start));
        if (tok == "true") return true;
        if (tok == "false") return false;
        if (tok.empty()) fail("expected a value");
        std::string digits;
        for (char c : tok)
            if (c != '_') digits += c;
        const std::string body = (digits[0] == '+' || digits[0] == '-') ? digits.substr(1) : digits;
        const double sign = digits[0] == '-' ? -1.0 : 1.0;
        if (body == "inf") return sign * std::numeric_limits<double>::infinity();
        if (body == "nan") return std::numeric_limits<double>::quiet_NaN();
        const bool is_float = body.find_first_of(".eE") != std::string::npos;
        if (body.size() > 1 && body[0] == '0' && std::isdigit(static_cast<unsigned char>(body[1])))
            fail("leading zeros are not allowed in '" + tok + "'");
        for (char c : body)
            if (!std::isdigit(static_cast<unsigned char>(c)) && c != '.' && c != 'e' && c != 'E' &&
                c != '+' && c != '-')
                fail("invalid value '" + tok + "'");
        std::size_t used = 0;
        try {
            if (is_float) {
                const double x = std::stod(digits, &used);
                if (used == digits.size()) return x;
            } else {
                const long long n = std::stoll(digits, &used);
                if (used == digits.size()) return n;
            }
        } catch (const std::exception&) {
        }
        fail("invalid number '" + tok + "'");
    }

    nlohmann::json value() {
        skip_blank();
        const char c = peek();
        if (c == '"') return basic_string();
        if (c == '\'') return literal_string();
        if (c == '[') return array();
        if (c == '{') return inline_table();
        return number_or_bool();
    }

    nlohmann::json array() {
        expect('[');
        nlohmann::json out = nlohmann::json::array();
        for (;;) {
            skip_all();
            if (peek() == ']') {
                ++pos_;
                return out;
            }
            out.push_back(value());
            skip_all();
            if (peek() == ',') {
                ++pos_;
            } else if (peek() != ']') {
                fail("expected ',' or ']' in array");
            }
        }
    }

    nlohmann::json inline_table() {
        expect('{');
        nlohmann::json out = nlohmann::json::object();
        skip_blank();
        if (peek() == '}') {
            ++pos_;
            return out;
        }
        for (;;) {
            const auto key = dotted_key();
            skip_blank();
            expect('=');
            assign(out, key, value());
            skip_blank();
            if (peek() == '}') {
                ++pos_;
                return out;
            }
            expect(',');
        }
    }

    void assign(nlohmann::json& table, const std::vector<std::string>& key, nlohmann::json v) {
        nlohmann::json* t = &table;
        for (std::size_t i = 0; i + 1 < key.size(); ++i) {
            nlohmann::json& next = (*t)[key[i]];
            if (next.is_null()) next = nlohmann::json::object();
            if (!next.is_object()) fail("key '" + key[i] + "' is not a table");
            t = &next;
        }
        if (t->contains(key.back())) fail("duplicate key '" + key.back() + "'");
        (*t)[key.back()] = std::move(v);
    }

    nlohmann::json& open_table(nlohmann::json& root, const std::vector<std::string>& path,
                               bool array_item) {
        nlohmann::json* t = &root;
        for (std::size_t i = 0; i < path.size(); ++i) {
            nlohmann::json& next = (*t)[path[i]];
            const bool last = i + 1 == path.size();
            if (last && array_item) {
                if (next.is_null()) next = nlohmann::json::array();
                if (!next.is_array()) fail("'" + path[i] + "' is not an array of tables");
                next.push_back(nlohmann::json::object());
                return next.back();
            }
            if (next.is_null()) next = nlohmann::json::object();
            if (next.is_array() && !next.empty() && next.back().is_object()) {
                t = &next.back();
                continue;
            }
            if (!next.is_object()) fail("'" + path[i] + "' is not a table");
            t = &next;
        }
        return *t;
    }

    nlohmann::json document() {
        nlohmann::json root = nlohmann::json::object();
        nlohmann::json* current = &root;
        for (;;) {
            skip_all();
            if (eof()) return root;
            if (peek() == '[') {
                ++pos_;
                const bool array_item = peek() == '[';
                if (array_item) ++pos_;
                const auto path = dotted_key();
                expect(']');
                if (array_item) expect(']');
                current = &open_table(root, path, array_item);
                end_of_line();
                continue;
            }
            const auto key = dotted_key();
            skip_blank();
            expect('=');
            assign(*current, key, value());
            end_of_line();
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

} // namespace pqcone
