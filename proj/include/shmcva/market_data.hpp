#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shmcva::market {

using Date = std::chrono::year_month_day;

/// Parses ISO "YYYY-MM-DD"; throws Error(SchemaViolation) on bad input.
Date parse_date(std::string_view text);
std::string format_date(Date date);

/// ACT/360 year fraction between two dates (negative when `to` precedes `from`).
double year_fraction(Date from, Date to);

/// One point of a quoted term structure. Rates are decimals per year.
struct TenorQuote {
    double tenor = 0.0;
    double rate = 0.0;
    bool operator==(const TenorQuote&) const = default;
};

struct FxObservation {
    Date date;
    double spot = 0.0;
    bool operator==(const FxObservation&) const = default;
};

struct SpreadObservation {
    Date date;
    double spread = 0.0;
    bool operator==(const SpreadObservation&) const = default;
};

struct YieldObservation {
    Date date;
    double tenor = 0.0;
    double zero_rate = 0.0;
    bool operator==(const YieldObservation&) const = default;
};

/// ATM swaption quote on notional 1.
struct SwaptionQuoteSpec {
    double expiry = 0.0;
    double tenor = 0.0;
    double price = 0.0;
    bool operator==(const SwaptionQuoteSpec&) const = default;
};

/// Validated market inputs anchored to a valuation date. Immutable once
/// loaded; every quote list has strictly increasing tenors and every
/// history strictly increasing dates.
struct MarketSnapshot {
    Date valuation_date;
    std::vector<TenorQuote> deposits_dom;
    std::vector<TenorQuote> deposits_for;
    std::vector<TenorQuote> swaps_dom;
    std::vector<TenorQuote> swaps_for;
    std::vector<TenorQuote> cds_spreads;
    std::vector<SpreadObservation> cds_history;
    std::vector<FxObservation> fx_history;
    std::vector<YieldObservation> yield_history_dom;
    std::vector<YieldObservation> yield_history_for;
    std::optional<SwaptionQuoteSpec> swaption_dom;
    std::optional<SwaptionQuoteSpec> swaption_for;
    double fx_vol = 0.0;
    double spot_fx = 0.0;

    bool operator==(const MarketSnapshot&) const = default;
};

/// Keys of the path map accepted by load_snapshot. Required entries must be
/// present; optional ones may be left out, in which case the corresponding
/// snapshot field stays empty.
///
///   deposits_dom, deposits_for   tenor_yf,rate        (rate in percent)
///   swaps_dom, swaps_for         tenor_y,par_rate     (percent)
///   scalars                      key,value            (fx_vol percent, spot_fx plain)
///   cds (optional)               tenor_y,spread       (basis points)
///   cds_history (optional)       date,spread          (basis points)
///   fx (optional)                date,spot
///   yields_dom, yields_for (optional) date,tenor_y,zero_rate (percent)
///   swaption_dom, swaption_for (optional) expiry_y,tenor_y,price
using PathMap = std::map<std::string, std::filesystem::path>;

/// Canonical file name for each path-map key (e.g. "deposits_dom" ->
/// "deposits_dom.csv").
std::filesystem::path default_file_name(std::string_view key);
const std::vector<std::string>& required_keys();
const std::vector<std::string>& optional_keys();

/// Path map for a fixture directory. Optional files that do not exist are
/// left out.
PathMap fixture_paths(const std::filesystem::path& dir);

MarketSnapshot load_snapshot(const PathMap& paths, Date valuation_date);

/// Writes every populated field back in the load_snapshot formats and
/// returns the path map that reloads it.
PathMap write_snapshot(const MarketSnapshot& snapshot, const std::filesystem::path& dir);

/// Element i is ln(x[i+1] / x[i]). Throws NonPositiveLevel or TooShort.
std::vector<double> log_returns(std::span<const double> series);

/// Shortest-tenor zero rate per date, in date order.
struct DatedSeries {
    std::vector<Date> dates;
    std::vector<double> values;
};
DatedSeries short_end_series(std::span<const YieldObservation> history);

/// Restricts several dated series to the dates present in all of them.
std::vector<DatedSeries> align_on_common_dates(const std::vector<DatedSeries>& series);

/// Mean spacing between consecutive dates, in ACT/360 years.
double mean_spacing(std::span<const Date> dates);

} // namespace shmcva::market
