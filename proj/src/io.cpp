#include "diffar/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "diffar/errors.hpp"

namespace diffar::io {

namespace {

using json = nlohmann::json;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool is_delimiter(char c) { return c == ',' || c == ';' || c == '\t' || c == ' '; }

std::vector<std::string_view> tokenize(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_delimiter(line[i])) ++i;
        std::size_t start = i;
        while (i < line.size() && !is_delimiter(line[i])) ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

double parse_value(std::string_view token, std::size_t lineno) {
    double value = 0.0;
    const auto* end = token.data() + token.size();
    const auto res = std::from_chars(token.data(), end, value);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ParseError("'" + std::string(token) + "' is not a number", lineno);
    if (!std::isfinite(value)) throw ParseError("'" + std::string(token) + "' is not finite", lineno);
    return value;
}

void open_for_write(std::ofstream& out, const std::filesystem::path& path) {
    out.open(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write to '" + path.string() + "'");
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

Series read_series_stream(std::istream& in, const std::optional<std::string>& column, const std::string& name) {
    Series out;
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::size_t> col_idx;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto tokens = tokenize(text);

        if (column && !col_idx) {
            // First content line must be the header naming the column.
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                if (tokens[i] == *column) col_idx = i;
            }
            if (!col_idx) {
                std::string have;
                for (std::size_t i = 0; i < tokens.size(); ++i)
                    have += (i ? ", " : "") + std::string(tokens[i]);
                throw ParseError("column '" + *column + "' not found in header (have: " + have + ")", lineno);
            }
            continue;
        }

        if (column) {
            if (tokens.size() <= *col_idx)
                throw ParseError("row has " + std::to_string(tokens.size()) + " fields, column '" + *column +
                                     "' needs " + std::to_string(*col_idx + 1),
                                 lineno);
            out.values.push_back(parse_value(tokens[*col_idx], lineno));
        } else {
            if (tokens.size() != 1)
                throw ParseError("expected one value per line, found " + std::to_string(tokens.size()) +
                                     " fields (use --column to select one)",
                                 lineno);
            out.values.push_back(parse_value(tokens[0], lineno));
        }
    }
    if (out.values.empty()) throw ParseError(name + ": no numeric data found");
    if (out.values.size() < 2) throw ParseError(name + ": a series needs at least 2 values");
    return out;
}

Series read_series(const std::filesystem::path& path, const std::optional<std::string>& column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    return read_series_stream(in, column, path.string());
}

void write_series(const std::filesystem::path& path, std::span<const double> values,
                  std::span<const std::string> comments) {
    std::ofstream out;
    open_for_write(out, path);
    for (const auto& c : comments) out << "# " << c << "\n";
    for (double v : values) out << format_double(v) << "\n";
}

std::string report_to_json(const EstimationReport& report) {
    json j;
    j["method"] = std::string(method_name(report.method));
    j["order"] = report.order;
    j["coeffs"] = report.coeffs;
    if (report.noise_var)
        j["noise_var"] = *report.noise_var;
    else
        j["noise_var"] = nullptr;
    j["noise_var_valid"] = report.noise_var_valid;
    j["causal_fit"] = report.causal_fit;
    if (report.condition_number)
        j["condition_number"] = *report.condition_number;
    else
        j["condition_number"] = nullptr;
    if (report.window_length) {
        j["window_length"] = *report.window_length;
        j["windows_total"] = report.windows_total;
        j["windows_skipped"] = report.windows_skipped;
    }
    if (!report.bootstrap_se.empty()) j["bootstrap_se"] = report.bootstrap_se;
    return j.dump(2);
}

void write_experiment_outputs(const std::filesystem::path& out_dir, const experiments::AggregateResult& result,
                              const experiments::ScenarioSpec& spec) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create directory '" + out_dir.string() + "': " + ec.message());

    {
        std::ofstream out;
        open_for_write(out, out_dir / "replications.tsv");
        out << "cell\testimator\tmetric\trep\tvalue\n";
        for (const auto& row : result.rows)
            out << row.cell << "\t" << row.estimator << "\t" << row.metric << "\t" << row.rep << "\t"
                << format_double(row.value) << "\n";
    }
    {
        std::ofstream out;
        open_for_write(out, out_dir / "summary.tsv");
        out << "cell\testimator\tmetric\treps_requested\treps_ok\treps_failed\tmean\tsd\tvar\trmse\tq05\tq25\tq50"
               "\tq75\tq95\n";
        for (const auto& row : result.summary) {
            out << row.cell << "\t" << row.estimator << "\t" << row.metric << "\t" << row.reps_requested << "\t"
                << row.reps_ok << "\t" << row.reps_failed << "\t" << format_double(row.mean) << "\t"
                << format_double(row.sd) << "\t" << format_double(row.var) << "\t" << format_double(row.rmse);
            for (double q : row.quantiles) out << "\t" << format_double(q);
            out << "\n";
        }
    }
    {
        std::ofstream out;
        open_for_write(out, out_dir / "manifest.json");
        out << experiments::scenario_to_json(spec);
    }
}

}  // namespace diffar::io
