#include "bbq/network.hpp"

#include "bbq/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bbq {

namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, std::string_view delims) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const auto start = s.find_first_not_of(delims, pos);
        if (start == std::string_view::npos) break;
        auto end = s.find_first_of(delims, start);
        if (end == std::string_view::npos) end = s.size();
        out.push_back(s.substr(start, end - start));
        pos = end;
    }
    return out;
}

std::optional<double> to_double(std::string_view token) {
    token = trim(token);
    if (token.empty()) return std::nullopt;
    if (token.front() == '+') token.remove_prefix(1);
    double value = 0.0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
    return value;
}

[[noreturn]] void fail_line(std::size_t line_no, const std::string& msg) {
    throw ParseError("line " + std::to_string(line_no) + ": " + msg);
}

struct Row {
    std::size_t line_no;
    double freq;
    cplx value;
};

Row parse_row(const std::vector<std::string_view>& fields, std::size_t line_no) {
    if (fields.size() != 3) {
        fail_line(line_no, "expected 3 fields (freq re im), found " + std::to_string(fields.size()));
    }
    const auto f = to_double(fields[0]);
    const auto re = to_double(fields[1]);
    const auto im = to_double(fields[2]);
    if (!f || !re || !im) fail_line(line_no, "non-numeric or non-finite field");
    return {line_no, *f, {*re, *im}};
}

void check_grid(const std::vector<Row>& rows) {
    if (rows.empty()) throw ParseError("no data rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!(rows[i].freq > 0.0)) fail_line(rows[i].line_no, "frequency must be positive");
        if (i > 0 && !(rows[i].freq > rows[i - 1].freq)) {
            fail_line(rows[i].line_no, "frequency grid is not strictly increasing");
        }
    }
}

FrequencyResponse parse_touchstone(std::string_view source, const ParseOptions& options) {
    std::optional<double> unit_scale;
    ResponseKind kind = ResponseKind::Scattering;
    double option_ref = 0.0;
    std::vector<Row> rows;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= source.size()) {
        auto eol = source.find('\n', pos);
        if (eol == std::string_view::npos) eol = source.size();
        std::string_view line = source.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;

        if (const auto bang = line.find('!'); bang != std::string_view::npos) line = line.substr(0, bang);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '#') {
            if (unit_scale) fail_line(line_no, "more than one option line");
            const auto tokens = split(line.substr(1), " \t");
            if (tokens.size() != 5) fail_line(line_no, "unsupported option line, expected '# <unit> <S|Z> RI R <ref>'");
            const auto unit = upper(tokens[0]);
            if (unit == "HZ") unit_scale = 1.0;
            else if (unit == "KHZ") unit_scale = 1e3;
            else if (unit == "MHZ") unit_scale = 1e6;
            else if (unit == "GHZ") unit_scale = 1e9;
            else fail_line(line_no, "unsupported frequency unit '" + std::string(tokens[0]) + "'");
            const auto param = upper(tokens[1]);
            if (param == "S") kind = ResponseKind::Scattering;
            else if (param == "Z") kind = ResponseKind::Impedance;
            else fail_line(line_no, "unsupported parameter type '" + std::string(tokens[1]) + "'");
            if (upper(tokens[2]) != "RI") {
                fail_line(line_no, "unsupported data format '" + std::string(tokens[2]) + "', only RI is supported");
            }
            if (upper(tokens[3]) != "R") fail_line(line_no, "unsupported option line, expected 'R <ref>'");
            const auto ref = to_double(tokens[4]);
            if (!ref || *ref <= 0.0) fail_line(line_no, "reference impedance must be a positive number");
            option_ref = *ref;
            continue;
        }

        if (!unit_scale) fail_line(line_no, "data row before option line");
        Row row = parse_row(split(line, " \t"), line_no);
        row.freq *= *unit_scale;
        rows.push_back(row);
    }

    if (!unit_scale) throw ParseError("missing option line");
    check_grid(rows);

    FrequencyResponse resp;
    resp.kind = kind;
    resp.ref_impedance = options.ref_impedance.value_or(option_ref);
    if (!(resp.ref_impedance > 0.0)) throw ParseError("reference impedance must be positive");
    resp.freq_hz.reserve(rows.size());
    resp.values.reserve(rows.size());
    // Touchstone stores Z normalized to the reference resistance.
    const double z_scale = kind == ResponseKind::Impedance ? option_ref : 1.0;
    for (const auto& r : rows) {
        resp.freq_hz.push_back(r.freq);
        resp.values.push_back(r.value * z_scale);
    }
    return resp;
}

FrequencyResponse parse_csv(std::string_view source, const ParseOptions& options) {
    std::vector<Row> rows;
    bool header_seen = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= source.size()) {
        auto eol = source.find('\n', pos);
        if (eol == std::string_view::npos) eol = source.size();
        const std::string_view line = trim(source.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;

        if (!header_seen) {
            std::string compact;
            for (char c : line) {
                if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
            }
            if (compact != "freq_hz,re,im") fail_line(line_no, "expected header 'freq_hz,re,im'");
            header_seen = true;
            continue;
        }
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        rows.push_back(parse_row(fields, line_no));
    }
    if (!header_seen) throw ParseError("empty CSV document");
    check_grid(rows);

    FrequencyResponse resp;
    resp.kind = options.csv_kind;
    if (resp.kind == ResponseKind::Scattering) {
        if (!options.ref_impedance) throw ParseError("scattering data requires a reference impedance");
        if (!(*options.ref_impedance > 0.0)) throw ParseError("reference impedance must be positive");
    }
    resp.ref_impedance = options.ref_impedance.value_or(50.0);
    for (const auto& r : rows) {
        resp.freq_hz.push_back(r.freq);
        resp.values.push_back(r.value);
    }
    return resp;
}

} // namespace

void FrequencyResponse::validate() const {
    if (freq_hz.size() != values.size()) throw std::invalid_argument("frequency/value length mismatch");
    for (std::size_t i = 0; i < freq_hz.size(); ++i) {
        if (!std::isfinite(freq_hz[i]) || !(freq_hz[i] > 0.0)) {
            throw std::invalid_argument("frequencies must be finite and positive");
        }
        if (i > 0 && !(freq_hz[i] > freq_hz[i - 1])) {
            throw std::invalid_argument("frequencies must be strictly increasing");
        }
        if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
            throw std::invalid_argument("non-finite response value");
        }
    }
    if (kind == ResponseKind::Scattering && !(ref_impedance > 0.0)) {
        throw std::invalid_argument("scattering data requires a positive reference impedance");
    }
}

FrequencyResponse parse_response(std::string_view source, const ParseOptions& options) {
    if (trim(source).empty()) throw ParseError("empty input");
    auto resp = options.format == ResponseFormat::TouchstoneSubset ? parse_touchstone(source, options)
                                                                   : parse_csv(source, options);
    resp.validate();
    return resp;
}

FrequencyResponse read_response_file(const std::string& path, const ParseOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_response(buf.str(), options);
}

FrequencyResponse s_to_z(const FrequencyResponse& resp) {
    if (resp.kind != ResponseKind::Scattering) throw std::invalid_argument("s_to_z: input is not scattering data");
    resp.validate();
    FrequencyResponse out = resp;
    out.kind = ResponseKind::Impedance;
    for (std::size_t i = 0; i < resp.size(); ++i) {
        const cplx s = resp.values[i];
        const cplx denom = 1.0 - s;
        if (std::abs(denom) < kSingularityTolerance) {
            std::ostringstream msg;
            msg << "s_to_z: open-circuit singularity (S = 1) at " << resp.freq_hz[i] << " Hz";
            throw std::domain_error(msg.str());
        }
        out.values[i] = resp.ref_impedance * (1.0 + s) / denom;
    }
    return out;
}

FrequencyResponse z_to_s(const FrequencyResponse& resp) {
    if (resp.kind != ResponseKind::Impedance) throw std::invalid_argument("z_to_s: input is not impedance data");
    if (!(resp.ref_impedance > 0.0)) throw std::invalid_argument("z_to_s: reference impedance must be positive");
    resp.validate();
    FrequencyResponse out = resp;
    out.kind = ResponseKind::Scattering;
    for (std::size_t i = 0; i < resp.size(); ++i) {
        const cplx zn = resp.values[i] / resp.ref_impedance;
        if (std::abs(1.0 + zn) < kSingularityTolerance) {
            std::ostringstream msg;
            msg << "z_to_s: singular at " << resp.freq_hz[i] << " Hz (Z = -Z0)";
            throw std::domain_error(msg.str());
        }
        out.values[i] = (zn - 1.0) / (zn + 1.0);
    }
    return out;
}

} // namespace bbq
