#include "jumpdet/grid.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "jumpdet/serialize.hpp"

namespace jumpdet {

namespace {

bool parse_strict_double(const std::string& text, double& out) {
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtod(begin, &end);
    if (end == begin || errno == ERANGE) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    return *end == '\0';
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

ReturnGrid make_grid(Eigen::ArrayXd returns, int m, double delta) {
    if (m < 2) throw ConfigError("m must be at least 2, got " + std::to_string(m));
    if (!(delta > 0.0)) throw ConfigError("delta must be positive, got " + format_double(delta));
    if (returns.size() == 0) throw DataError("empty return series");
    if (returns.size() % m != 0)
        throw DataError("return count " + std::to_string(returns.size()) +
                        " is not divisible by m=" + std::to_string(m) +
                        " (remainder " + std::to_string(returns.size() % m) + ")");
    for (Eigen::Index j = 0; j < returns.size(); ++j)
        if (!std::isfinite(returns(j)))
            throw DataError("non-finite return at index " + std::to_string(j + 1));
    ReturnGrid grid;
    grid.m = m;
    grid.N = static_cast<int>(returns.size() / m);
    grid.delta = delta;
    grid.returns = std::move(returns);
    return grid;
}

ReturnGrid load_returns(const std::string& path, int m, double delta, InputLayout layout) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);

    if (layout == InputLayout::prices) {
        std::vector<std::vector<double>> blocks;
        long long current_day = -1;
        std::string line;
        long line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (blank(line)) continue;
            auto comma = line.find(',');
            if (comma == std::string::npos)
                throw DataError(path + ":" + std::to_string(line_no) +
                                ": expected day_id,price");
            double day_value = 0.0, price = 0.0;
            if (!parse_strict_double(line.substr(0, comma), day_value) ||
                !parse_strict_double(line.substr(comma + 1), price))
                throw DataError(path + ":" + std::to_string(line_no) +
                                ": malformed day_id,price line");
            long long day = static_cast<long long>(day_value);
            if (day < current_day)
                throw DataError(path + ":" + std::to_string(line_no) +
                                ": day ids must be non-decreasing");
            if (day != current_day) {
                blocks.emplace_back();
                current_day = day;
            }
            blocks.back().push_back(price);
        }
        ReturnGrid grid = prices_to_log_returns(blocks, delta);
        if (grid.m != m)
            throw DataError(path + ": price blocks imply m=" + std::to_string(grid.m) +
                            " but m=" + std::to_string(m) + " was requested");
        return grid;
    }

    std::vector<double> values;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        double v = 0.0;
        if (!parse_strict_double(line, v))
            throw DataError(path + ":" + std::to_string(line_no) + ": not a number: " + line);
        if (!std::isfinite(v))
            throw DataError(path + ": non-finite return at index " + std::to_string(values.size() + 1));
        values.push_back(v);
    }
    if (values.empty()) throw DataError(path + ": no data");
    if (static_cast<Eigen::Index>(values.size()) % m != 0)
        throw DataError(path + ": return count " + std::to_string(values.size()) +
                        " is not divisible by m=" + std::to_string(m) +
                        " (remainder " + std::to_string(values.size() % m) + ")");
    Eigen::ArrayXd returns = Eigen::Map<const Eigen::ArrayXd>(values.data(), values.size());
    return make_grid(std::move(returns), m, delta);
}

ReturnGrid prices_to_log_returns(const std::vector<std::vector<double>>& day_blocks,
                                 double delta) {
    if (day_blocks.empty()) throw DataError("no price blocks");
    const std::size_t block_len = day_blocks.front().size();
    if (block_len < 3)
        throw DataError("price blocks need at least 3 prices (m >= 2), got " +
                        std::to_string(block_len));
    const int m = static_cast<int>(block_len) - 1;
    Eigen::ArrayXd returns(static_cast<Eigen::Index>(m) * day_blocks.size());
    Eigen::Index out = 0;
    for (std::size_t s = 0; s < day_blocks.size(); ++s) {
        const auto& block = day_blocks[s];
        if (block.size() != block_len)
            throw DataError("day " + std::to_string(s + 1) + " has " +
                            std::to_string(block.size()) + " prices, expected " +
                            std::to_string(block_len));
        for (std::size_t i = 0; i < block.size(); ++i)
            if (!(block[i] > 0.0))
                throw DataError("non-positive price " + format_double(block[i]) + " on day " +
                                std::to_string(s + 1));
        for (std::size_t i = 1; i < block.size(); ++i)
            returns(out++) = std::log(block[i]) - std::log(block[i - 1]);
    }
    return make_grid(std::move(returns), m, delta);
}

void save_returns(const std::string& path, const ReturnGrid& grid) {
    std::string body;
    body.reserve(static_cast<std::size_t>(grid.n()) * 24);
    for (Eigen::Index j = 0; j < grid.n(); ++j) {
        body += format_double(grid.returns(j));
        body += '\n';
    }
    write_text(path, body);
}

}  // namespace jumpdet
