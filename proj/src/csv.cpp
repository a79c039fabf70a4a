#include "coolwalk/csv.hpp"

#include "coolwalk/error.hpp"

#include <algorithm>
#include <ostream>

namespace coolwalk {

void write_metadata(std::ostream& out, const Metadata& meta)
{
    for (const auto& [key, value] : meta.fields)
        out << "# " << key << '=' << value << '\n';
}

void Table::add_row(std::vector<std::string> cells)
{
    if (cells.size() != columns_.size())
        throw Error(ErrorCode::InvalidArgument, "row has " + std::to_string(cells.size())
                                                    + " cells, table has "
                                                    + std::to_string(columns_.size()) + " columns");
    rows_.push_back(std::move(cells));
}

std::size_t Table::column(const std::string& name) const
{
    const auto it = std::find(columns_.begin(), columns_.end(), name);
    if (it == columns_.end())
        throw Error(ErrorCode::InvalidArgument, "no column named " + name);
    return static_cast<std::size_t>(it - columns_.begin());
}

void Table::write_csv(std::ostream& out, const Metadata& meta) const
{
    write_metadata(out, meta);
    for (std::size_t i = 0; i < columns_.size(); ++i)
        out << (i ? "," : "") << columns_[i];
    out << '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

} // namespace coolwalk
