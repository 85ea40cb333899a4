#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "curvekit/error.hpp"
#include "curvekit/market_data.hpp"

namespace curvekit {

enum class FileFormat { Json, Csv };

inline FileFormat parse_format(const std::string& name) {
    if (name == "json") return FileFormat::Json;
    if (name == "csv") return FileFormat::Csv;
    throw ValidationError("unknown format '" + name + "' (expected json or csv)");
}

/// Format implied by the file extension; JSON unless the path ends in .csv.
inline FileFormat format_from_path(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? FileFormat::Csv : FileFormat::Json;
}

/// Shortest decimal that round-trips the double exactly.
inline std::string format_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

// ---------------------------------------------------------------- JSON

inline nlohmann::ordered_json to_json(const Bond& bond) {
    nlohmann::ordered_json j;
    j["id"] = bond.id;
    j["face_value"] = bond.face_value;
    j["maturity"] = bond.maturity;
    j["market_price"] = bond.market_price;
    j["cashflows"] = nlohmann::ordered_json::array();
    for (const auto& cf : bond.cashflows) j["cashflows"].push_back({{"time", cf.time}, {"amount", cf.amount}});
    return j;
}

inline nlohmann::ordered_json to_json(const MarketSnapshot& snapshot) {
    nlohmann::ordered_json j;
    j["date"] = snapshot.date;
    j["benchmark"] = {{"tenors", snapshot.benchmark.tenors}, {"rates", snapshot.benchmark.rates}};
    j["bonds"] = nlohmann::ordered_json::array();
    for (const auto& bond : snapshot.bonds) j["bonds"].push_back(to_json(bond));
    return j;
}

inline MarketSnapshot snapshot_from_json(const nlohmann::json& j) {
    MarketSnapshot s;
    try {
        s.date = j.at("date").get<std::string>();
        s.benchmark.tenors = j.at("benchmark").at("tenors").get<std::vector<double>>();
        s.benchmark.rates = j.at("benchmark").at("rates").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("snapshot: ") + e.what());
    }
    const auto* bonds = j.contains("bonds") ? &j.at("bonds") : nullptr;
    if (bonds == nullptr || !bonds->is_array()) throw ParseError("snapshot: 'bonds' array missing");
    for (std::size_t i = 0; i < bonds->size(); ++i) {
        const auto& jb = (*bonds)[i];
        Bond b;
        b.id = jb.contains("id") && jb["id"].is_string() ? jb["id"].get<std::string>() : "#" + std::to_string(i);
        std::string field;
        try {
            field = "id";
            b.id = jb.at("id").get<std::string>();
            field = "face_value";
            b.face_value = jb.at("face_value").get<double>();
            field = "maturity";
            b.maturity = jb.at("maturity").get<double>();
            field = "market_price";
            b.market_price = jb.at("market_price").get<double>();
            field = "cashflows";
            for (const auto& jc : jb.at("cashflows")) b.cashflows.push_back({jc.at("time").get<double>(), jc.at("amount").get<double>()});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("bond '" + b.id + "': field '" + field + "': " + e.what());
        }
        s.bonds.push_back(std::move(b));
    }
    return s;
}

// ---------------------------------------------------------------- CSV

namespace detail {

inline std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view text, const std::string& context) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw ParseError(context + ": '" + std::string(text) + "' is not a number");
    return value;
}

inline std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    for (auto& line : split(text, '\n')) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.push_back(std::move(line));
    }
    return out;
}

inline constexpr std::string_view kDatePrefix = "# date=";

} // namespace detail

/// Companion benchmark path: day.csv -> day.benchmark.csv
inline std::filesystem::path benchmark_path_for(const std::filesystem::path& path) {
    auto out = path;
    out.replace_extension();
    out += ".benchmark.csv";
    return out;
}

inline std::string bonds_to_csv(const MarketSnapshot& snapshot) {
    std::string out;
    out += std::string(detail::kDatePrefix) + snapshot.date + "\n";
    out += "id,face_value,maturity,market_price,cashflows\n";
    for (const auto& bond : snapshot.bonds) {
        if (bond.id.find_first_of(",;:\n") != std::string::npos)
            throw ValidationError("bond '" + bond.id + "': id cannot contain , ; : or newline in CSV");
        out += bond.id + "," + format_double(bond.face_value) + "," + format_double(bond.maturity) + "," +
               format_double(bond.market_price) + ",";
        for (std::size_t i = 0; i < bond.cashflows.size(); ++i) {
            if (i > 0) out += ";";
            out += format_double(bond.cashflows[i].time) + ":" + format_double(bond.cashflows[i].amount);
        }
        out += "\n";
    }
    return out;
}

inline std::string benchmark_to_csv(const BenchmarkCurve& benchmark) {
    std::string out = "tenor,rate\n";
    for (std::size_t i = 0; i < benchmark.tenors.size(); ++i)
        out += format_double(benchmark.tenors[i]) + "," + format_double(benchmark.rates[i]) + "\n";
    return out;
}

inline MarketSnapshot snapshot_from_csv(const std::string& bonds_text, const std::string& benchmark_text) {
    MarketSnapshot s;
    auto lines = detail::lines_of(bonds_text);
    std::size_t row = 0;
    if (row < lines.size() && lines[row].rfind(detail::kDatePrefix, 0) == 0) {
        s.date = lines[row].substr(detail::kDatePrefix.size());
        ++row;
    }
    if (row >= lines.size() || lines[row] != "id,face_value,maturity,market_price,cashflows")
        throw ParseError("snapshot csv: expected header 'id,face_value,maturity,market_price,cashflows'");
    for (++row; row < lines.size(); ++row) {
        const auto cells = detail::split(lines[row], ',');
        if (cells.size() != 5) throw ParseError("snapshot csv line " + std::to_string(row + 1) + ": expected 5 cells");
        Bond b;
        b.id = cells[0];
        const std::string ctx = "bond '" + b.id + "'";
        b.face_value = detail::parse_double(cells[1], ctx + " face_value");
        b.maturity = detail::parse_double(cells[2], ctx + " maturity");
        b.market_price = detail::parse_double(cells[3], ctx + " market_price");
        if (!cells[4].empty()) {
            for (const auto& item : detail::split(cells[4], ';')) {
                const auto parts = detail::split(item, ':');
                if (parts.size() != 2) throw ParseError(ctx + " cashflows: expected 'time:amount', got '" + item + "'");
                b.cashflows.push_back({detail::parse_double(parts[0], ctx + " cashflows time"),
                                       detail::parse_double(parts[1], ctx + " cashflows amount")});
            }
        }
        s.bonds.push_back(std::move(b));
    }
    const auto blines = detail::lines_of(benchmark_text);
    if (blines.empty() || blines[0] != "tenor,rate") throw ParseError("benchmark csv: expected header 'tenor,rate'");
    for (std::size_t i = 1; i < blines.size(); ++i) {
        const auto cells = detail::split(blines[i], ',');
        if (cells.size() != 2) throw ParseError("benchmark csv line " + std::to_string(i + 1) + ": expected 2 cells");
        s.benchmark.tenors.push_back(detail::parse_double(cells[0], "benchmark tenor"));
        s.benchmark.rates.push_back(detail::parse_double(cells[1], "benchmark rate"));
    }
    return s;
}

// ---------------------------------------------------------------- files

inline MarketSnapshot load_snapshot(const std::filesystem::path& path, FileFormat format) {
    MarketSnapshot s;
    if (format == FileFormat::Json) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_text_file(path));
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError("'" + path.string() + "': " + e.what());
        }
        s = snapshot_from_json(j);
    } else {
        s = snapshot_from_csv(read_text_file(path), read_text_file(benchmark_path_for(path)));
    }
    validate(s);
    return s;
}

inline MarketSnapshot load_snapshot(const std::filesystem::path& path) { return load_snapshot(path, format_from_path(path)); }

inline void save_snapshot(const MarketSnapshot& snapshot, const std::filesystem::path& path, FileFormat format) {
    validate(snapshot);
    if (format == FileFormat::Json) {
        write_text_file(path, to_json(snapshot).dump(2) + "\n");
    } else {
        write_text_file(path, bonds_to_csv(snapshot));
        write_text_file(benchmark_path_for(path), benchmark_to_csv(snapshot.benchmark));
    }
}

inline void save_snapshot(const MarketSnapshot& snapshot, const std::filesystem::path& path) {
    save_snapshot(snapshot, path, format_from_path(path));
}

} // namespace curvekit
