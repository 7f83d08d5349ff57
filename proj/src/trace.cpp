#include "shisha/trace.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "shisha/util.hpp"

namespace shisha {

namespace {

constexpr const char* kHeader = "step,throughput,best_so_far,cum_eval_cost,gamma,stage_sizes,ep_assignment";

template <typename T, typename Fmt>
std::string join(const std::vector<T>& v, Fmt fmt) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ';';
        out += fmt(v[i]);
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

std::int64_t parse_int(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        const std::int64_t v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("trace CSV: bad ") + what + " '" + s + "'");
    }
}

}  // namespace

void write_trace_csv(const Trace& trace, std::ostream& out) {
    out << kHeader << '\n';
    for (const TraceRow& row : trace) {
        out << row.step << ',' << fmt_double(row.throughput) << ',' << fmt_double(row.best_so_far)
            << ',' << fmt_double(row.cum_eval_cost) << ',';
        if (row.gamma) out << *row.gamma;
        out << ',' << join(row.config.stage_sizes, [](std::uint32_t v) { return std::to_string(v); })
            << ',' << join(row.config.ep_assignment, [](int v) { return std::to_string(v); })
            << '\n';
    }
}

std::string trace_csv_string(const Trace& trace) {
    std::ostringstream os;
    write_trace_csv(trace, os);
    return os.str();
}

Trace parse_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kHeader)
        throw ParseError("trace CSV: missing or unexpected header");
    Trace trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 7) throw ParseError("trace CSV: expected 7 fields, got " +
                                            std::to_string(f.size()));
        TraceRow row;
        row.step = static_cast<std::uint64_t>(parse_int(f[0], "step"));
        row.throughput = parse_double(f[1]);
        row.best_so_far = parse_double(f[2]);
        row.cum_eval_cost = parse_double(f[3]);
        if (!f[4].empty()) row.gamma = parse_int(f[4], "gamma");
        for (const auto& p : split(f[5], ';'))
            row.config.stage_sizes.push_back(static_cast<std::uint32_t>(parse_int(p, "stage size")));
        for (const auto& p : split(f[6], ';'))
            row.config.ep_assignment.push_back(static_cast<int>(parse_int(p, "ep id")));
        trace.push_back(std::move(row));
    }
    return trace;
}

void write_trace_csv_file(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write trace file: " + path);
    write_trace_csv(trace, out);
}

Trace parse_trace_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace file: " + path);
    return parse_trace_csv(in);
}

}  // namespace shisha
