#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cefsim::config {

// Value of a key in a flat key-value config file.
using Value = std::variant<double, bool, std::string, std::vector<double>, std::vector<std::string>>;

// A parsed config document. Table names are the dotted header paths
// ("fuel_params.2019.DE"); the root table is "".
//
// Supported syntax is the TOML subset the shipped configs use:
//   # comment
//   [table.sub."quoted part"]
//   key = 1.5
//   "quoted key" = "string"
//   pair = [0.3, 0.45]
//   names = ["other_conv"]
//   flag = true
class Document {
public:
    static Document parse(std::string_view text, std::string_view origin = "<config>");
    static Document load(const std::string& path);

    bool has_table(const std::string& table) const;
    const std::map<std::string, Value>* table(const std::string& table) const;

    // Names of direct sub-tables of `prefix` ("fuel_params" -> {"2019", ...}).
    std::vector<std::string> subtables(const std::string& prefix) const;

    std::optional<double> number(const std::string& table, const std::string& key) const;
    std::optional<std::string> string(const std::string& table, const std::string& key) const;
    std::optional<std::vector<double>> numbers(const std::string& table, const std::string& key) const;
    std::optional<std::vector<std::string>> strings(const std::string& table,
                                                    const std::string& key) const;

    // Raw source text; hashed into run provenance.
    const std::string& source() const { return source_; }

private:
    const Value* find(const std::string& table, const std::string& key) const;

    std::map<std::string, std::map<std::string, Value>> tables_;
    std::string source_;
};

}  // namespace cefsim::config
