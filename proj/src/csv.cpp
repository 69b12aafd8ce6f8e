#include "rulemine/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace rulemine {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("failed to format a double");
    return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw std::runtime_error("invalid numeric value: '" + std::string(text) + "'");
    return v;
}

std::uint64_t parse_u64(std::string_view text) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw std::runtime_error("invalid unsigned integer: '" + std::string(text) + "'");
    return v;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out;
    out.reserve(field.size() + 2);
    out += '"';
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    i += 2;
                } else {
                    quoted = false;
                    ++i;
                    if (i < line.size() && line[i] != ',')
                        throw std::runtime_error("malformed CSV: text after closing quote");
                }
            } else {
                cur += c;
                ++i;
            }
        } else if (c == '"') {
            if (!cur.empty())
                throw std::runtime_error("malformed CSV: quote inside unquoted field");
            quoted = true;
            ++i;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
            ++i;
        } else if (c == '\r' && i + 1 == line.size()) {
            ++i;  // tolerate a trailing CR from CRLF files
        } else {
            cur += c;
            ++i;
        }
    }
    if (quoted) throw std::runtime_error("malformed CSV: unterminated quote");
    fields.push_back(std::move(cur));
    return fields;
}

namespace {

std::ifstream open_reader(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    return in;
}

std::ofstream open_writer(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    return out;
}

void finish_writer(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("failed to write file: " + path.string());
}

void expect_header(const std::string& got, const std::string& want,
                   const std::filesystem::path& path) {
    if (got != want)
        throw std::runtime_error(path.string() + ": unexpected header '" + got + "' (expected '" +
                                 want + "')");
}

std::string format_name_list(std::span<const std::string> names) {
    std::string out = "[";
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) out += ", ";
        out += '\'';
        out += names[i];
        out += '\'';
    }
    out += ']';
    return out;
}

std::string format_bin_list(std::span<const std::uint8_t> bins) {
    std::string out = "[";
    for (std::size_t i = 0; i < bins.size(); ++i) {
        if (i > 0) out += ", ";
        out += std::to_string(static_cast<unsigned>(bins[i]));
    }
    out += ']';
    return out;
}

std::string_view strip_brackets(std::string_view cell, const char* what) {
    if (cell.size() < 2 || cell.front() != '[' || cell.back() != ']')
        throw std::runtime_error(std::string("malformed ") + what + " list: '" +
                                 std::string(cell) + "'");
    return cell.substr(1, cell.size() - 2);
}

std::vector<std::string> parse_name_list(std::string_view cell) {
    std::string_view body = strip_brackets(cell, "name");
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < body.size()) {
        if (body[i] != '\'')
            throw std::runtime_error("malformed name list: '" + std::string(cell) + "'");
        const std::size_t end = body.find('\'', i + 1);
        if (end == std::string_view::npos)
            throw std::runtime_error("malformed name list: '" + std::string(cell) + "'");
        out.emplace_back(body.substr(i + 1, end - i - 1));
        i = end + 1;
        if (i < body.size()) {
            if (body.substr(i, 2) != ", ")
                throw std::runtime_error("malformed name list: '" + std::string(cell) + "'");
            i += 2;
        }
    }
    if (out.empty()) throw std::runtime_error("empty name list: '" + std::string(cell) + "'");
    return out;
}

std::vector<std::uint8_t> parse_bin_list(std::string_view cell) {
    std::string_view body = strip_brackets(cell, "bin");
    std::vector<std::uint8_t> out;
    std::size_t i = 0;
    while (i <= body.size()) {
        std::size_t end = body.find(',', i);
        if (end == std::string_view::npos) end = body.size();
        std::string_view item = body.substr(i, end - i);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        const std::uint64_t v = parse_u64(item);
        if (v > 255) throw std::runtime_error("bin index out of range: " + std::string(item));
        out.push_back(static_cast<std::uint8_t>(v));
        if (end == body.size()) break;
        i = end + 1;
    }
    if (out.empty()) throw std::runtime_error("empty bin list: '" + std::string(cell) + "'");
    return out;
}

constexpr const char* kRulesHeader =
    "name,names,bmins,bmaxs,cov,pred,crit_mean,crit_min,crit_max,pvalue";

}  // namespace

RuleRecord to_record(const Rule& rule, std::size_t ordinal,
                     std::span<const std::string> feature_names) {
    RuleRecord rec;
    rec.name = canonical_name(rule, ordinal);
    rec.feature_names.reserve(rule.condition.length());
    for (std::uint32_t f : rule.condition.features) {
        if (f >= feature_names.size())
            throw std::runtime_error("feature index out of range: " + std::to_string(f));
        rec.feature_names.push_back(feature_names[f]);
    }
    rec.bmins = rule.condition.bmins;
    rec.bmaxs = rule.condition.bmaxs;
    rec.cov = rule.coverage;
    rec.pred = rule.prediction;
    rec.crit_mean = seq_mean(rule.criterion_seq);
    rec.crit_min = seq_min(rule.criterion_seq);
    rec.crit_max = seq_max(rule.criterion_seq);
    rec.pvalue = rule.pvalue;
    return rec;
}

Condition record_condition(const RuleRecord& rec, std::span<const std::string> feature_names) {
    const std::size_t k = rec.feature_names.size();
    if (rec.bmins.size() != k || rec.bmaxs.size() != k)
        throw std::runtime_error("rule " + rec.name + ": list lengths disagree");

    struct Part {
        std::uint32_t feature;
        std::uint8_t bmin;
        std::uint8_t bmax;
    };
    std::vector<Part> parts;
    parts.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        auto it = std::find(feature_names.begin(), feature_names.end(), rec.feature_names[j]);
        if (it == feature_names.end())
            throw std::runtime_error("rule " + rec.name + ": unknown feature name '" +
                                     rec.feature_names[j] + "'");
        parts.push_back({static_cast<std::uint32_t>(it - feature_names.begin()), rec.bmins[j],
                         rec.bmaxs[j]});
    }
    std::sort(parts.begin(), parts.end(),
              [](const Part& a, const Part& b) { return a.feature < b.feature; });
    Condition cond;
    for (const Part& p : parts) {
        if (!cond.features.empty() && p.feature == cond.features.back())
            throw std::runtime_error("rule " + rec.name + ": repeated feature");
        cond.features.push_back(p.feature);
        cond.bmins.push_back(p.bmin);
        cond.bmaxs.push_back(p.bmax);
    }
    return cond;
}

void write_rules_csv(const std::filesystem::path& path, std::span<const RuleRecord> records) {
    auto out = open_writer(path);
    out << kRulesHeader << '\n';
    for (const auto& rec : records) {
        out << csv_escape(rec.name) << ',' << csv_escape(format_name_list(rec.feature_names))
            << ',' << csv_escape(format_bin_list(rec.bmins)) << ','
            << csv_escape(format_bin_list(rec.bmaxs)) << ',' << format_double(rec.cov) << ','
            << format_double(rec.pred) << ',' << format_double(rec.crit_mean) << ','
            << format_double(rec.crit_min) << ',' << format_double(rec.crit_max) << ','
            << format_double(rec.pvalue) << '\n';
    }
    finish_writer(out, path);
}

std::vector<RuleRecord> read_rules_csv(const std::filesystem::path& path) {
    auto in = open_reader(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    expect_header(line, kRulesHeader, path);

    std::vector<RuleRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            auto fields = split_csv_line(line);
            if (fields.size() != 10)
                throw std::runtime_error("expected 10 fields, got " +
                                         std::to_string(fields.size()));
            RuleRecord rec;
            rec.name = fields[0];
            rec.feature_names = parse_name_list(fields[1]);
            rec.bmins = parse_bin_list(fields[2]);
            rec.bmaxs = parse_bin_list(fields[3]);
            if (rec.bmins.size() != rec.feature_names.size() ||
                rec.bmaxs.size() != rec.feature_names.size())
                throw std::runtime_error("list lengths disagree");
            rec.cov = parse_double(fields[4]);
            rec.pred = parse_double(fields[5]);
            rec.crit_mean = parse_double(fields[6]);
            rec.crit_min = parse_double(fields[7]);
            rec.crit_max = parse_double(fields[8]);
            rec.pvalue = parse_double(fields[9]);
            records.push_back(std::move(rec));
        } catch (const std::exception& ex) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " +
                                     ex.what());
        }
    }
    return records;
}

void write_predictions_csv(const std::filesystem::path& path, const PredictionPanel& preds) {
    if (preds.values.size() != preds.index.size() || preds.has.size() != preds.index.size())
        throw std::runtime_error("prediction panel shape mismatch");
    auto out = open_writer(path);
    out << "Date,Stock,prediction\n";
    for (std::size_t i = 0; i < preds.index.size(); ++i) {
        out << to_string(preds.index.entries[i].date) << ','
            << csv_escape(preds.index.entries[i].stock) << ',';
        if (preds.has[i]) out << format_double(preds.values[i]);
        out << '\n';
    }
    finish_writer(out, path);
}

PredictionPanel read_predictions_csv(const std::filesystem::path& path) {
    auto in = open_reader(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    expect_header(line, "Date,Stock,prediction", path);

    struct Row {
        PanelEntry entry;
        double value;
        std::uint8_t has;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            auto fields = split_csv_line(line);
            if (fields.size() != 3)
                throw std::runtime_error("expected 3 fields, got " +
                                         std::to_string(fields.size()));
            Row row;
            row.entry.date = parse_date(fields[0]);
            row.entry.stock = fields[1];
            if (row.entry.stock.empty()) throw std::runtime_error("empty stock identifier");
            row.has = fields[2].empty() ? 0 : 1;
            row.value = row.has ? parse_double(fields[2]) : 0.0;
            rows.push_back(std::move(row));
        } catch (const std::exception& ex) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " +
                                     ex.what());
        }
    }
    if (rows.empty()) throw std::runtime_error("empty prediction panel: " + path.string());
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return panel_row_less(a.entry, b.entry); });
    PredictionPanel preds;
    for (auto& row : rows) {
        if (!preds.index.entries.empty() && row.entry == preds.index.entries.back())
            throw std::runtime_error("duplicate index entry: (" + to_string(row.entry.date) +
                                     ", " + row.entry.stock + ") in " + path.string());
        preds.index.entries.push_back(std::move(row.entry));
        preds.values.push_back(row.value);
        preds.has.push_back(row.has);
    }
    return preds;
}

void write_holdings_csv(const std::filesystem::path& path,
                        std::span<const Portfolio> portfolios) {
    auto out = open_writer(path);
    out << "rebalance_date,stock\n";
    for (const auto& pf : portfolios)
        for (const auto& stock : pf.stocks)
            out << to_string(pf.rebalance) << ',' << csv_escape(stock) << '\n';
    finish_writer(out, path);
}

void write_returns_csv(const std::filesystem::path& path, const ReturnSeries& series) {
    if (series.dates.size() != series.values.size())
        throw std::runtime_error("return series shape mismatch");
    auto out = open_writer(path);
    out << "Date,cumulative_return\n";
    for (std::size_t i = 0; i < series.dates.size(); ++i)
        out << to_string(series.dates[i]) << ',' << format_double(series.values[i]) << '\n';
    finish_writer(out, path);
}

void write_bins_csv(const std::filesystem::path& path, const DiscretizedDataset& dd,
                    std::span<const std::string> feature_names) {
    if (feature_names.size() != dd.d())
        throw std::runtime_error("feature name count does not match the bin matrix");
    auto out = open_writer(path);
    out << "Date,Stock";
    for (const auto& name : feature_names) out << ',' << csv_escape(name);
    out << '\n';
    for (std::size_t i = 0; i < dd.n(); ++i) {
        out << to_string(dd.index.entries[i].date) << ','
            << csv_escape(dd.index.entries[i].stock);
        for (std::size_t j = 0; j < dd.d(); ++j)
            out << ',' << static_cast<unsigned>(dd.bins[j][i]);
        out << '\n';
    }
    finish_writer(out, path);
}

BinsFile read_bins_csv(const std::filesystem::path& path, std::size_t bin_count) {
    if (bin_count < 1 || bin_count > 256)
        throw std::runtime_error("bin count must be in [1, 256]");
    auto in = open_reader(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "Date" || header[1] != "Stock")
        throw std::runtime_error("bad header in " + path.string() +
                                 " (expected Date,Stock,<feature>...)");

    BinsFile bins;
    bins.feature_names.assign(header.begin() + 2, header.end());
    const std::size_t d = bins.feature_names.size();

    struct Row {
        PanelEntry entry;
        std::vector<std::uint8_t> bins;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            auto fields = split_csv_line(line);
            if (fields.size() != header.size())
                throw std::runtime_error("expected " + std::to_string(header.size()) +
                                         " fields, got " + std::to_string(fields.size()));
            Row row;
            row.entry.date = parse_date(fields[0]);
            row.entry.stock = fields[1];
            if (row.entry.stock.empty()) throw std::runtime_error("empty stock identifier");
            row.bins.reserve(d);
            for (std::size_t j = 0; j < d; ++j) {
                const std::uint64_t v = parse_u64(fields[2 + j]);
                if (v >= bin_count)
                    throw std::runtime_error("bin index " + std::to_string(v) +
                                             " out of range for " + std::to_string(bin_count) +
                                             " bins");
                row.bins.push_back(static_cast<std::uint8_t>(v));
            }
            rows.push_back(std::move(row));
        } catch (const std::exception& ex) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " +
                                     ex.what());
        }
    }
    if (rows.empty()) throw std::runtime_error("empty panel: " + path.string());
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return panel_row_less(a.entry, b.entry); });

    bins.dd.bin_count = bin_count;
    bins.dd.bins.assign(d, {});
    for (auto& col : bins.dd.bins) col.reserve(rows.size());
    for (auto& row : rows) {
        if (!bins.dd.index.entries.empty() && row.entry == bins.dd.index.entries.back())
            throw std::runtime_error("duplicate index entry: (" + to_string(row.entry.date) +
                                     ", " + row.entry.stock + ") in " + path.string());
        bins.dd.index.entries.push_back(std::move(row.entry));
        for (std::size_t j = 0; j < d; ++j) bins.dd.bins[j].push_back(row.bins[j]);
    }
    return bins;
}

}  // namespace rulemine
