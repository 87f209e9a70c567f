#include "shmcva/market_data.hpp"

#include "shmcva/csv.hpp"
#include "shmcva/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

namespace shmcva::market {

namespace {

constexpr int kPercent = 2;
constexpr int kBasisPoints = 4;

std::string row_ref(const csv::Table& t, std::size_t row)
{
    return t.label + " (" + t.path.string() + ") line " + std::to_string(t.line_numbers.at(row));
}

Date date_field(const csv::Table& t, std::size_t row, std::size_t col)
{
    try {
        return parse_date(t.rows.at(row).at(col));
    } catch (const Error&) {
        throw Error(ErrorCode::SchemaViolation,
                    row_ref(t, row) + ": bad date '" + t.rows[row][col] + "'");
    }
}

std::vector<TenorQuote> load_tenor_quotes(const std::filesystem::path& path, std::string_view label,
                                          const std::string& tenor_col, const std::string& rate_col,
                                          int shift, bool require_positive)
{
    const auto t = csv::read(path, {tenor_col, rate_col}, label);
    std::vector<TenorQuote> quotes;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        TenorQuote q{csv::number(t, i, 0), csv::number(t, i, 1, shift)};
        if (!(q.tenor > 0.0))
            throw Error(ErrorCode::NonMonotoneTenor, row_ref(t, i) + ": tenor must be positive");
        if (!quotes.empty() && !(q.tenor > quotes.back().tenor))
            throw Error(ErrorCode::NonMonotoneTenor,
                        row_ref(t, i) + ": tenor " + t.rows[i][0] + " does not increase");
        if (require_positive && !(q.rate > 0.0))
            throw Error(ErrorCode::NonPositiveQuote,
                        row_ref(t, i) + ": quote " + t.rows[i][1] + " must be positive");
        quotes.push_back(q);
    }
    if (quotes.empty())
        throw Error(ErrorCode::SchemaViolation, std::string(label) + " (" + path.string() + "): no rows");
    return quotes;
}

std::vector<FxObservation> load_fx(const std::filesystem::path& path)
{
    const auto t = csv::read(path, {"date", "spot"}, "fx");
    std::vector<FxObservation> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        FxObservation o{date_field(t, i, 0), csv::number(t, i, 1)};
        if (!out.empty() && !(std::chrono::sys_days(o.date) > std::chrono::sys_days(out.back().date)))
            throw Error(ErrorCode::NonMonotoneTenor, row_ref(t, i) + ": dates must strictly increase");
        if (!(o.spot > 0.0))
            throw Error(ErrorCode::NonPositiveQuote, row_ref(t, i) + ": spot must be positive");
        out.push_back(o);
    }
    return out;
}

std::vector<SpreadObservation> load_cds_history(const std::filesystem::path& path)
{
    const auto t = csv::read(path, {"date", "spread"}, "cds_history");
    std::vector<SpreadObservation> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        SpreadObservation o{date_field(t, i, 0), csv::number(t, i, 1, kBasisPoints)};
        if (!out.empty() && !(std::chrono::sys_days(o.date) > std::chrono::sys_days(out.back().date)))
            throw Error(ErrorCode::NonMonotoneTenor, row_ref(t, i) + ": dates must strictly increase");
        if (!(o.spread > 0.0))
            throw Error(ErrorCode::NonPositiveQuote, row_ref(t, i) + ": spread must be positive");
        out.push_back(o);
    }
    return out;
}

std::vector<YieldObservation> load_yields(const std::filesystem::path& path, std::string_view label)
{
    const auto t = csv::read(path, {"date", "tenor_y", "zero_rate"}, label);
    std::vector<YieldObservation> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        YieldObservation o{date_field(t, i, 0), csv::number(t, i, 1), csv::number(t, i, 2, kPercent)};
        if (!(o.tenor > 0.0))
            throw Error(ErrorCode::NonMonotoneTenor, row_ref(t, i) + ": tenor must be positive");
        if (!out.empty()) {
            const auto prev = std::chrono::sys_days(out.back().date);
            const auto cur = std::chrono::sys_days(o.date);
            if (cur < prev)
                throw Error(ErrorCode::NonMonotoneTenor, row_ref(t, i) + ": dates must not decrease");
            if (cur == prev && !(o.tenor > out.back().tenor))
                throw Error(ErrorCode::NonMonotoneTenor,
                            row_ref(t, i) + ": tenors within a date must strictly increase");
        }
        out.push_back(o);
    }
    return out;
}

SwaptionQuoteSpec load_swaption(const std::filesystem::path& path, std::string_view label)
{
    const auto t = csv::read(path, {"expiry_y", "tenor_y", "price"}, label);
    if (t.rows.size() != 1)
        throw Error(ErrorCode::SchemaViolation,
                    std::string(label) + " (" + path.string() + "): expected exactly one quote row");
    SwaptionQuoteSpec q{csv::number(t, 0, 0), csv::number(t, 0, 1), csv::number(t, 0, 2)};
    if (!(q.expiry > 0.0) || !(q.tenor > 0.0))
        throw Error(ErrorCode::NonMonotoneTenor, row_ref(t, 0) + ": expiry and tenor must be positive");
    if (!(q.price > 0.0))
        throw Error(ErrorCode::NonPositiveQuote, row_ref(t, 0) + ": price must be positive");
    return q;
}

void load_scalars(const std::filesystem::path& path, MarketSnapshot& snap)
{
    const auto t = csv::read(path, {"key", "value"}, "scalars");
    std::optional<double> fx_vol, spot;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& key = t.rows[i][0];
        if (key == "fx_vol")
            fx_vol = csv::number(t, i, 1, kPercent);
        else if (key == "spot_fx")
            spot = csv::number(t, i, 1);
        else
            throw Error(ErrorCode::SchemaViolation, row_ref(t, i) + ": unknown key '" + key + "'");
    }
    if (!fx_vol || !spot)
        throw Error(ErrorCode::SchemaViolation,
                    "scalars (" + path.string() + "): keys fx_vol and spot_fx are required");
    if (!(*spot > 0.0))
        throw Error(ErrorCode::NonPositiveQuote, "scalars (" + path.string() + "): spot_fx must be positive");
    if (!(*fx_vol >= 0.0))
        throw Error(ErrorCode::NonPositiveQuote, "scalars (" + path.string() + "): fx_vol must be non-negative");
    snap.fx_vol = *fx_vol;
    snap.spot_fx = *spot;
}

const std::filesystem::path* find(const PathMap& paths, const std::string& key)
{
    const auto it = paths.find(key);
    return it == paths.end() ? nullptr : &it->second;
}

std::vector<std::vector<std::string>> quote_rows(const std::vector<TenorQuote>& quotes, int shift)
{
    std::vector<std::vector<std::string>> rows;
    for (const auto& q : quotes)
        rows.push_back({csv::format_double(q.tenor), csv::format_scaled(q.rate, shift)});
    return rows;
}

} // namespace

Date parse_date(std::string_view text)
{
    int y = 0;
    unsigned m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw Error(ErrorCode::SchemaViolation, "bad date '" + std::string(text) + "'");
    const auto ok = [](std::from_chars_result r) { return r.ec == std::errc{}; };
    if (!ok(std::from_chars(text.data(), text.data() + 4, y)) ||
        !ok(std::from_chars(text.data() + 5, text.data() + 7, m)) ||
        !ok(std::from_chars(text.data() + 8, text.data() + 10, d)))
        throw Error(ErrorCode::SchemaViolation, "bad date '" + std::string(text) + "'");
    const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok())
        throw Error(ErrorCode::SchemaViolation, "bad date '" + std::string(text) + "'");
    return date;
}

std::string format_date(Date date)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

double year_fraction(Date from, Date to)
{
    const auto days = (std::chrono::sys_days(to) - std::chrono::sys_days(from)).count();
    return static_cast<double>(days) / 360.0;
}

std::filesystem::path default_file_name(std::string_view key)
{
    return std::string(key) + ".csv";
}

const std::vector<std::string>& required_keys()
{
    static const std::vector<std::string> keys{"deposits_dom", "deposits_for", "swaps_dom",
                                               "swaps_for", "scalars"};
    return keys;
}

const std::vector<std::string>& optional_keys()
{
    static const std::vector<std::string> keys{"cds",        "cds_history",  "fx",
                                               "yields_dom", "yields_for",   "swaption_dom",
                                               "swaption_for"};
    return keys;
}

PathMap fixture_paths(const std::filesystem::path& dir)
{
    PathMap paths;
    for (const auto& key : required_keys())
        paths[key] = dir / default_file_name(key);
    for (const auto& key : optional_keys()) {
        const auto p = dir / default_file_name(key);
        if (std::filesystem::exists(p))
            paths[key] = p;
    }
    return paths;
}

MarketSnapshot load_snapshot(const PathMap& paths, Date valuation_date)
{
    for (const auto& key : required_keys())
        if (!find(paths, key))
            throw Error(ErrorCode::MissingFile, "no path given for required input '" + key + "'");

    MarketSnapshot snap;
    snap.valuation_date = valuation_date;
    snap.deposits_dom = load_tenor_quotes(paths.at("deposits_dom"), "deposits_dom", "tenor_yf", "rate", kPercent, false);
    snap.deposits_for = load_tenor_quotes(paths.at("deposits_for"), "deposits_for", "tenor_yf", "rate", kPercent, false);
    snap.swaps_dom = load_tenor_quotes(paths.at("swaps_dom"), "swaps_dom", "tenor_y", "par_rate", kPercent, false);
    snap.swaps_for = load_tenor_quotes(paths.at("swaps_for"), "swaps_for", "tenor_y", "par_rate", kPercent, false);
    load_scalars(paths.at("scalars"), snap);

    if (const auto* p = find(paths, "cds"))
        snap.cds_spreads = load_tenor_quotes(*p, "cds", "tenor_y", "spread", kBasisPoints, true);
    if (const auto* p = find(paths, "cds_history"))
        snap.cds_history = load_cds_history(*p);
    if (const auto* p = find(paths, "fx"))
        snap.fx_history = load_fx(*p);
    if (const auto* p = find(paths, "yields_dom"))
        snap.yield_history_dom = load_yields(*p, "yields_dom");
    if (const auto* p = find(paths, "yields_for"))
        snap.yield_history_for = load_yields(*p, "yields_for");
    if (const auto* p = find(paths, "swaption_dom"))
        snap.swaption_dom = load_swaption(*p, "swaption_dom");
    if (const auto* p = find(paths, "swaption_for"))
        snap.swaption_for = load_swaption(*p, "swaption_for");
    return snap;
}

PathMap write_snapshot(const MarketSnapshot& s, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    PathMap paths;
    auto target = [&](const std::string& key) {
        auto p = dir / default_file_name(key);
        paths[key] = p;
        return p;
    };

    csv::write(target("deposits_dom"), {"tenor_yf", "rate"}, quote_rows(s.deposits_dom, kPercent));
    csv::write(target("deposits_for"), {"tenor_yf", "rate"}, quote_rows(s.deposits_for, kPercent));
    csv::write(target("swaps_dom"), {"tenor_y", "par_rate"}, quote_rows(s.swaps_dom, kPercent));
    csv::write(target("swaps_for"), {"tenor_y", "par_rate"}, quote_rows(s.swaps_for, kPercent));
    csv::write(target("scalars"), {"key", "value"},
               {{"fx_vol", csv::format_scaled(s.fx_vol, kPercent)},
                {"spot_fx", csv::format_double(s.spot_fx)}});

    if (!s.cds_spreads.empty())
        csv::write(target("cds"), {"tenor_y", "spread"}, quote_rows(s.cds_spreads, kBasisPoints));
    if (!s.cds_history.empty()) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& o : s.cds_history)
            rows.push_back({format_date(o.date), csv::format_scaled(o.spread, kBasisPoints)});
        csv::write(target("cds_history"), {"date", "spread"}, rows);
    }
    if (!s.fx_history.empty()) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& o : s.fx_history)
            rows.push_back({format_date(o.date), csv::format_double(o.spot)});
        csv::write(target("fx"), {"date", "spot"}, rows);
    }
    auto write_yields = [&](const std::string& key, const std::vector<YieldObservation>& h) {
        if (h.empty())
            return;
        std::vector<std::vector<std::string>> rows;
        for (const auto& o : h)
            rows.push_back({format_date(o.date), csv::format_double(o.tenor),
                            csv::format_scaled(o.zero_rate, kPercent)});
        csv::write(target(key), {"date", "tenor_y", "zero_rate"}, rows);
    };
    write_yields("yields_dom", s.yield_history_dom);
    write_yields("yields_for", s.yield_history_for);
    auto write_swaption = [&](const std::string& key, const std::optional<SwaptionQuoteSpec>& q) {
        if (!q)
            return;
        csv::write(target(key), {"expiry_y", "tenor_y", "price"},
                   {{csv::format_double(q->expiry), csv::format_double(q->tenor),
                     csv::format_double(q->price)}});
    };
    write_swaption("swaption_dom", s.swaption_dom);
    write_swaption("swaption_for", s.swaption_for);
    return paths;
}

std::vector<double> log_returns(std::span<const double> series)
{
    if (series.size() < 2)
        throw Error(ErrorCode::TooShort, "log_returns needs at least two levels");
    for (std::size_t i = 0; i < series.size(); ++i)
        if (!(series[i] > 0.0))
            throw Error(ErrorCode::NonPositiveLevel,
                        "log_returns: level at index " + std::to_string(i) + " is not positive");
    std::vector<double> out(series.size() - 1);
    for (std::size_t i = 0; i + 1 < series.size(); ++i)
        out[i] = std::log(series[i + 1] / series[i]);
    return out;
}

DatedSeries short_end_series(std::span<const YieldObservation> history)
{
    DatedSeries out;
    for (std::size_t i = 0; i < history.size(); ++i) {
        // rows are sorted by (date, tenor) so the first row of each date is the shortest tenor
        if (i == 0 || history[i].date != history[i - 1].date) {
            out.dates.push_back(history[i].date);
            out.values.push_back(history[i].zero_rate);
        }
    }
    return out;
}

std::vector<DatedSeries> align_on_common_dates(const std::vector<DatedSeries>& series)
{
    if (series.empty())
        return {};
    std::set<std::chrono::sys_days> common;
    for (const auto& d : series.front().dates)
        common.insert(std::chrono::sys_days(d));
    for (std::size_t k = 1; k < series.size(); ++k) {
        std::set<std::chrono::sys_days> next;
        for (const auto& d : series[k].dates)
            if (common.count(std::chrono::sys_days(d)))
                next.insert(std::chrono::sys_days(d));
        common = std::move(next);
    }
    std::vector<DatedSeries> out(series.size());
    for (std::size_t k = 0; k < series.size(); ++k)
        for (std::size_t i = 0; i < series[k].dates.size(); ++i)
            if (common.count(std::chrono::sys_days(series[k].dates[i]))) {
                out[k].dates.push_back(series[k].dates[i]);
                out[k].values.push_back(series[k].values[i]);
            }
    return out;
}

double mean_spacing(std::span<const Date> dates)
{
    if (dates.size() < 2)
        throw Error(ErrorCode::TooShort, "mean_spacing needs at least two dates");
    return year_fraction(dates.front(), dates.back()) / static_cast<double>(dates.size() - 1);
}

} // namespace shmcva::market
