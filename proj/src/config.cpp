#include "cefsim/config.hpp"

#include <algorithm>

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "cefsim/csv.hpp"
#include "cefsim/error.hpp"

namespace cefsim::config {
namespace {

class LineParser {
public:
    LineParser(std::string_view text, std::string_view origin, std::size_t line_no)
        : text_(text), origin_(origin), line_no_(line_no) {}

    [[noreturn]] void fail(std::string_view what) const {
        throw ConfigError(fmt::format("{}:{}: {}", origin_, line_no_, what));
    }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    bool at_end_or_comment() {
        skip_ws();
        return pos_ >= text_.size() || text_[pos_] == '#' || text_[pos_] == '\r';
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string quoted() {
        // Caller has verified the opening quote.
        ++pos_;
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
            out.push_back(text_[pos_++]);
        }
        if (pos_ >= text_.size()) fail("unterminated string");
        ++pos_;
        return out;
    }

    // Bare or quoted key segment.
    std::string key() {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '"') return quoted();
        const auto start = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            const bool bare = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                              (c >= '0' && c <= '9') || c == '_' || c == '-';
            if (!bare) break;
            ++pos_;
        }
        if (start == pos_) fail("expected key");
        return std::string(text_.substr(start, pos_ - start));
    }

    std::string dotted_key() {
        std::string out = key();
        while (consume('.')) out += "." + key();
        return out;
    }

    double number() {
        skip_ws();
        const auto start = pos_;
        while (pos_ < text_.size() && std::string_view("+-0123456789.eE_").find(text_[pos_]) !=
                                          std::string_view::npos) {
            ++pos_;
        }
        std::string digits;
        for (char c : text_.substr(start, pos_ - start)) {
            if (c != '_') digits.push_back(c);
        }
        const auto v = csv::parse_number(digits);
        if (!v) fail("expected number");
        return *v;
    }

    Value value() {
        skip_ws();
        if (pos_ >= text_.size()) fail("missing value");
        const char c = text_[pos_];
        if (c == '"') return quoted();
        if (text_.substr(pos_, 4) == "true") {
            pos_ += 4;
            return true;
        }
        if (text_.substr(pos_, 5) == "false") {
            pos_ += 5;
            return false;
        }
        if (c == '[') {
            ++pos_;
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '"') {
                std::vector<std::string> items;
                do {
                    skip_ws();
                    if (pos_ >= text_.size() || text_[pos_] != '"') break;
                    items.push_back(quoted());
                } while (consume(','));
                if (!consume(']')) fail("expected ']'");
                return items;
            }
            std::vector<double> items;
            if (consume(']')) return items;
            do {
                skip_ws();
                if (pos_ < text_.size() && text_[pos_] == ']') break;
                items.push_back(number());
            } while (consume(','));
            if (!consume(']')) fail("expected ']'");
            return items;
        }
        return number();
    }

private:
    std::string_view text_;
    std::string_view origin_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
};

}  // namespace

Document Document::parse(std::string_view text, std::string_view origin) {
    Document doc;
    doc.source_ = std::string(text);
    doc.tables_[""];
    std::string current;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        LineParser p(line, origin, line_no);
        if (p.at_end_or_comment()) continue;
        if (p.consume('[')) {
            current = p.dotted_key();
            if (!p.consume(']')) p.fail("expected ']' after table name");
            if (!p.at_end_or_comment()) p.fail("trailing characters after table header");
            doc.tables_[current];
            continue;
        }
        const auto key = p.key();
        if (!p.consume('=')) p.fail("expected '='");
        auto value = p.value();
        if (!p.at_end_or_comment()) p.fail("trailing characters after value");
        auto& table = doc.tables_[current];
        if (table.count(key)) p.fail("duplicate key '" + key + "'");
        table.emplace(key, std::move(value));
    }
    return doc;
}

Document Document::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

bool Document::has_table(const std::string& table) const { return tables_.count(table) != 0; }

const std::map<std::string, Value>* Document::table(const std::string& table) const {
    auto it = tables_.find(table);
    return it == tables_.end() ? nullptr : &it->second;
}

std::vector<std::string> Document::subtables(const std::string& prefix) const {
    std::vector<std::string> out;
    const auto lead = prefix.empty() ? std::string() : prefix + ".";
    for (const auto& [name, _] : tables_) {
        if (name.size() <= lead.size() || name.compare(0, lead.size(), lead) != 0) continue;
        const auto rest = name.substr(lead.size());
        auto child = rest.substr(0, rest.find('.'));
        if (std::find(out.begin(), out.end(), child) == out.end()) out.push_back(std::move(child));
    }
    return out;
}

const Value* Document::find(const std::string& table, const std::string& key) const {
    auto t = tables_.find(table);
    if (t == tables_.end()) return nullptr;
    auto v = t->second.find(key);
    return v == t->second.end() ? nullptr : &v->second;
}

std::optional<double> Document::number(const std::string& table, const std::string& key) const {
    const auto* v = find(table, key);
    if (!v) return std::nullopt;
    if (const auto* d = std::get_if<double>(v)) return *d;
    throw ConfigError(fmt::format("[{}] {}: expected a number", table, key));
}

std::optional<std::string> Document::string(const std::string& table, const std::string& key) const {
    const auto* v = find(table, key);
    if (!v) return std::nullopt;
    if (const auto* s = std::get_if<std::string>(v)) return *s;
    throw ConfigError(fmt::format("[{}] {}: expected a string", table, key));
}

std::optional<std::vector<double>> Document::numbers(const std::string& table,
                                                     const std::string& key) const {
    const auto* v = find(table, key);
    if (!v) return std::nullopt;
    if (const auto* d = std::get_if<std::vector<double>>(v)) return *d;
    throw ConfigError(fmt::format("[{}] {}: expected a numeric array", table, key));
}

std::optional<std::vector<std::string>> Document::strings(const std::string& table,
                                                          const std::string& key) const {
    const auto* v = find(table, key);
    if (!v) return std::nullopt;
    if (const auto* s = std::get_if<std::vector<std::string>>(v)) return *s;
    if (const auto* d = std::get_if<std::vector<double>>(v); d && d->empty()) {
        return std::vector<std::string>{};
    }
    throw ConfigError(fmt::format("[{}] {}: expected a string array", table, key));
}

}  // namespace cefsim::config
