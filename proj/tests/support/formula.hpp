// SPDX-License-Identifier: Apache-2.0
// Symbolic latency formulas for tests: integers, identifiers, +, *, max(...)
// and parentheses. "f_X" and "X" both read the value bound to X.
#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace testsupport {

class Formula {
public:
    Formula(std::string_view text, const std::map<std::string, std::int64_t>& values)
        : text_(text), values_(values) {}

    std::int64_t evaluate() {
        pos_ = 0;
        const auto value = sum();
        skip_space();
        if (pos_ != text_.size()) {
            fail("trailing input");
        }
        return value;
    }

private:
    std::int64_t sum() {
        auto value = product();
        while (accept('+')) {
            value += product();
        }
        return value;
    }

    std::int64_t product() {
        auto value = factor();
        while (accept('*')) {
            value *= factor();
        }
        return value;
    }

    std::int64_t factor() {
        skip_space();
        if (accept('(')) {
            const auto value = sum();
            expect(')');
            return value;
        }
        if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            std::int64_t value = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                value = value * 10 + (text_[pos_++] - '0');
            }
            return value;
        }
        const auto name = identifier();
        if (name == "max") {
            expect('(');
            auto value = sum();
            while (accept(',')) {
                value = std::max(value, sum());
            }
            expect(')');
            return value;
        }
        const auto key = name.rfind("f_", 0) == 0 ? name.substr(2) : name;
        const auto it = values_.find(key);
        if (it == values_.end()) {
            fail("unbound identifier " + name);
        }
        return it->second;
    }

    std::string identifier() {
        skip_space();
        const auto start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        if (start == pos_) {
            fail("expected an identifier");
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            fail(std::string("expected '") + c + "'");
        }
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("formula '" + std::string(text_) + "' at " + std::to_string(pos_) + ": " + what);
    }

    std::string_view text_;
    const std::map<std::string, std::int64_t>& values_;
    std::size_t pos_ = 0;
};

inline std::int64_t evaluate_formula(std::string_view text, const std::map<std::string, std::int64_t>& values) {
    return Formula(text, values).evaluate();
}

} // namespace testsupport
