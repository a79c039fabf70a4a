#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace coolwalk {

/// `# key=value` lines written ahead of every CSV body.
struct Metadata {
    std::vector<std::pair<std::string, std::string>> fields;

    Metadata& add(std::string key, std::string value)
    {
        fields.emplace_back(std::move(key), std::move(value));
        return *this;
    }
};

void write_metadata(std::ostream& out, const Metadata& meta);

/// A rectangular table of already formatted cells.
class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(std::vector<std::string> cells);

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }

    /// Index of a column by name; throws InvalidArgument if missing.
    std::size_t column(const std::string& name) const;

    void write_csv(std::ostream& out, const Metadata& meta) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace coolwalk
