//! Daily and monthly series, return panels, realized volatility and macro
//! expansion under fixed-span and rolling-window conventions.
//!
//! Daily CSV files carry a `date,value` header with ISO-8601 dates; monthly
//! files carry `month,value` with `YYYY-MM` stamps. Rows must already be
//! sorted; an out-of-order row is an error rather than something to fix up.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A calendar month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::Domain(format!("month {month} out of range 1..=12")));
        }
        Ok(Self { year, month })
    }

    pub fn of(date: NaiveDate) -> Self {
        Self { year: date.year(), month: date.month() }
    }

    pub fn succ(self) -> Self {
        if self.month == 12 {
            Self { year: self.year + 1, month: 1 }
        } else {
            Self { year: self.year, month: self.month + 1 }
        }
    }

    pub fn pred(self) -> Self {
        if self.month == 1 {
            Self { year: self.year - 1, month: 12 }
        } else {
            Self { year: self.year, month: self.month - 1 }
        }
    }

    /// Months elapsed since year 0, used for gap arithmetic.
    pub fn ordinal(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    pub fn first_day(self) -> NaiveDate {
        NaiveDate::from_ymd_opt(self.year, self.month, 1).expect("valid year-month")
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (y, m) = s.split_once('-').ok_or_else(|| Error::Domain(format!("expected YYYY-MM, got `{s}`")))?;
        let year = y.parse::<i32>().map_err(|_| Error::Domain(format!("bad year in `{s}`")))?;
        let month = m.parse::<u32>().map_err(|_| Error::Domain(format!("bad month in `{s}`")))?;
        if y.len() != 4 || m.len() != 2 {
            return Err(Error::Domain(format!("expected YYYY-MM, got `{s}`")));
        }
        YearMonth::new(year, month)
    }
}

impl Serialize for YearMonth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for YearMonth {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Daily observations with strictly increasing dates.
#[derive(Debug, Clone, PartialEq)]
pub struct DailySeries {
    label: String,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl DailySeries {
    pub fn new(label: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::Mismatch { left: dates.len(), right: values.len() });
        }
        for w in dates.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Alignment(format!("dates not strictly increasing at {}", w[1])));
            }
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric { day: k, what: format!("value on {}", dates[k]) });
        }
        Ok(Self { label: label.into(), dates, values })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let rows = read_two_column(path, "date")?;
        let mut dates = Vec::with_capacity(rows.len());
        let mut values = Vec::with_capacity(rows.len());
        for (line, key, value) in rows {
            let date = NaiveDate::parse_from_str(&key, "%Y-%m-%d").map_err(|e| Error::Parse {
                path: path.display().to_string(),
                line,
                msg: format!("bad date `{key}`: {e}"),
            })?;
            if let Some(&prev) = dates.last() {
                if date <= prev {
                    return Err(Error::Parse {
                        path: path.display().to_string(),
                        line,
                        msg: format!("rows not sorted: {date} follows {prev}"),
                    });
                }
            }
            dates.push(date);
            values.push(value);
        }
        let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Self::new(label, dates, values)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["date", "value"])?;
        for (d, v) in self.dates.iter().zip(&self.values) {
            w.write_record([d.to_string(), v.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Monthly observations over a gap-free run of calendar months.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlySeries {
    label: String,
    months: Vec<YearMonth>,
    values: Vec<f64>,
}

impl MonthlySeries {
    pub fn new(label: impl Into<String>, months: Vec<YearMonth>, values: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if months.len() != values.len() {
            return Err(Error::Mismatch { left: months.len(), right: values.len() });
        }
        for w in months.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Alignment(format!("`{label}`: months not increasing at {}", w[1])));
            }
            if w[1] != w[0].succ() {
                return Err(Error::Alignment(format!("`{label}`: gap between {} and {}", w[0], w[1])));
            }
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric { day: k, what: format!("`{label}` value in {}", months[k]) });
        }
        Ok(Self { label, months, values })
    }

    /// Consecutive months starting at `start`.
    pub fn from_start(label: impl Into<String>, start: YearMonth, values: Vec<f64>) -> Result<Self> {
        let mut months = Vec::with_capacity(values.len());
        let mut m = start;
        for _ in 0..values.len() {
            months.push(m);
            m = m.succ();
        }
        Self::new(label, months, values)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn months(&self) -> &[YearMonth] {
        &self.months
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn first_month(&self) -> Option<YearMonth> {
        self.months.first().copied()
    }

    pub fn last_month(&self) -> Option<YearMonth> {
        self.months.last().copied()
    }

    pub fn get(&self, month: YearMonth) -> Option<f64> {
        let first = self.first_month()?;
        let off = month.ordinal() - first.ordinal();
        if off < 0 {
            return None;
        }
        self.values.get(off as usize).copied()
    }

    /// Sub-series over `[from, to]` inclusive.
    pub fn slice(&self, from: YearMonth, to: YearMonth) -> Result<Self> {
        let first = self.first_month().ok_or_else(|| Error::Lookup(from.to_string()))?;
        let lo = from.ordinal() - first.ordinal();
        let hi = to.ordinal() - first.ordinal();
        if lo < 0 || hi < lo || hi as usize >= self.len() {
            return Err(Error::Alignment(format!("`{}` does not cover {from}..{to}", self.label)));
        }
        let (lo, hi) = (lo as usize, hi as usize + 1);
        Ok(Self {
            label: self.label.clone(),
            months: self.months[lo..hi].to_vec(),
            values: self.values[lo..hi].to_vec(),
        })
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let rows = read_two_column(path, "month")?;
        let mut months: Vec<YearMonth> = Vec::with_capacity(rows.len());
        let mut values = Vec::with_capacity(rows.len());
        for (line, key, value) in rows {
            let month: YearMonth = key.parse().map_err(|e: Error| Error::Parse {
                path: path.display().to_string(),
                line,
                msg: e.to_string(),
            })?;
            if let Some(&prev) = months.last() {
                if month <= prev {
                    return Err(Error::Parse {
                        path: path.display().to_string(),
                        line,
                        msg: format!("rows not sorted: {month} follows {prev}"),
                    });
                }
            }
            months.push(month);
            values.push(value);
        }
        let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Self::new(label, months, values)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["month", "value"])?;
        for (m, v) in self.months.iter().zip(&self.values) {
            w.write_record([m.to_string(), v.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Reads a wide monthly file `month,A,B,...` into one series per column.
/// Empty cells mark months a column does not cover; each column's covered
/// months must be contiguous.
pub fn read_wide_monthly_csv(path: impl AsRef<Path>) -> Result<Vec<MonthlySeries>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file);
    let parse_err = |line: usize, msg: String| Error::Parse { path: path.display().to_string(), line, msg };
    let headers = rdr.headers()?.clone();
    if headers.len() < 2 || !headers[0].eq_ignore_ascii_case("month") {
        return Err(parse_err(1, "expected header `month,<label>,...`".into()));
    }
    let labels: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut cols: Vec<(Vec<YearMonth>, Vec<f64>)> = vec![(Vec::new(), Vec::new()); labels.len()];
    let mut prev: Option<YearMonth> = None;
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        if rec.len() != labels.len() + 1 {
            return Err(parse_err(line, format!("expected {} fields, got {}", labels.len() + 1, rec.len())));
        }
        let month: YearMonth = rec[0].parse().map_err(|e: Error| parse_err(line, e.to_string()))?;
        if let Some(p) = prev {
            if month <= p {
                return Err(parse_err(line, format!("rows not sorted: {month} follows {p}")));
            }
        }
        prev = Some(month);
        for (j, cell) in rec.iter().skip(1).enumerate() {
            if cell.is_empty() {
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| parse_err(line, format!("bad number `{cell}`")))?;
            if !v.is_finite() {
                return Err(parse_err(line, "non-finite value".into()));
            }
            cols[j].0.push(month);
            cols[j].1.push(v);
        }
    }
    labels
        .into_iter()
        .zip(cols)
        .map(|(label, (months, values))| {
            MonthlySeries::new(label.clone(), months, values)
                .map_err(|e| parse_err(0, format!("column `{label}`: {e}")))
        })
        .collect()
}

/// Writes series side by side over the union of their months.
pub fn write_wide_monthly_csv(series: &[MonthlySeries], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut months: Vec<YearMonth> = series.iter().flat_map(|s| s.months.iter().copied()).collect();
    months.sort();
    months.dedup();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["month".to_string()];
    header.extend(series.iter().map(|s| s.label.clone()));
    w.write_record(&header)?;
    for m in months {
        let mut row = vec![m.to_string()];
        row.extend(series.iter().map(|s| s.get(m).map(|v| v.to_string()).unwrap_or_default()));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_two_column(path: &Path, key_name: &str) -> Result<Vec<(usize, String, f64)>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file);
    let parse_err = |line: usize, msg: String| Error::Parse { path: path.display().to_string(), line, msg };
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || !headers[0].eq_ignore_ascii_case(key_name) {
        return Err(parse_err(1, format!("expected header `{key_name},value`")));
    }
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        if rec.len() != 2 {
            return Err(parse_err(line, format!("expected 2 fields, got {}", rec.len())));
        }
        let value: f64 = rec[1].parse().map_err(|_| parse_err(line, format!("bad number `{}`", &rec[1])))?;
        if !value.is_finite() {
            return Err(parse_err(line, "non-finite value".into()));
        }
        out.push((line, rec[0].to_string(), value));
    }
    Ok(out)
}

/// Log returns over `step` observations, dated at the later day.
pub fn log_returns(prices: &DailySeries, step: usize) -> Result<DailySeries> {
    if step == 0 {
        return Err(Error::Domain("step must be positive".into()));
    }
    if prices.len() < step + 1 {
        return Err(Error::Length { needed: step + 1, got: prices.len() });
    }
    if let Some(k) = prices.values.iter().position(|&p| p <= 0.0) {
        return Err(Error::NonPositive { at: prices.dates[k].to_string(), value: prices.values[k] });
    }
    let logs: Vec<f64> = prices.values.iter().map(|p| p.ln()).collect();
    let values = (step..logs.len()).map(|k| logs[k] - logs[k - step]).collect();
    DailySeries::new(prices.label.clone(), prices.dates[step..].to_vec(), values)
}

pub fn scale_returns(returns: &DailySeries, factor: f64) -> Result<DailySeries> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::Domain(format!("scale factor must be positive, got {factor}")));
    }
    let values = returns.values.iter().map(|r| r * factor).collect();
    let label = if factor == 1.0 { returns.label.clone() } else { format!("{}_x{factor}", returns.label) };
    DailySeries::new(label, returns.dates.clone(), values)
}

/// Natural log of every value. Zero or negative months are rejected by name;
/// shifting or dropping them is left to the caller.
pub fn log_transform(series: &MonthlySeries) -> Result<MonthlySeries> {
    if let Some(k) = series.values.iter().position(|&v| v <= 0.0) {
        return Err(Error::NonPositive {
            at: format!("{} of `{}`", series.months[k], series.label),
            value: series.values[k],
        });
    }
    let values = series.values.iter().map(|v| v.ln()).collect();
    MonthlySeries::new(series.label.clone(), series.months.clone(), values)
}

/// One calendar month of the panel: `len` returns starting at flat index `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonthBlock {
    pub month: YearMonth,
    pub start: usize,
    pub len: usize,
}

/// Daily returns grouped by calendar month, with a flat chronological view.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPanel {
    label: String,
    dates: Vec<NaiveDate>,
    returns: Vec<f64>,
    months: Vec<MonthBlock>,
}

impl ReturnPanel {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn months(&self) -> &[MonthBlock] {
        &self.months
    }

    pub fn returns(&self) -> &[f64] {
        &self.returns
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn n_days(&self) -> usize {
        self.returns.len()
    }

    pub fn n_months(&self) -> usize {
        self.months.len()
    }

    pub fn month_returns(&self, t: usize) -> &[f64] {
        let b = self.months[t];
        &self.returns[b.start..b.start + b.len]
    }

    pub fn find_month(&self, month: YearMonth) -> Option<usize> {
        self.months.binary_search_by(|b| b.month.cmp(&month)).ok()
    }

    /// Index into `months()` for every day.
    pub fn month_index_of_days(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.returns.len());
        for (t, b) in self.months.iter().enumerate() {
            out.extend(std::iter::repeat_n(t, b.len));
        }
        out
    }

    pub fn to_daily(&self) -> DailySeries {
        DailySeries { label: self.label.clone(), dates: self.dates.clone(), values: self.returns.clone() }
    }
}

/// Groups daily returns by the calendar month of their date stamps.
pub fn align_monthly(returns: &DailySeries) -> Result<ReturnPanel> {
    if returns.is_empty() {
        return Err(Error::Length { needed: 1, got: 0 });
    }
    let mut months: Vec<MonthBlock> = Vec::new();
    for (k, d) in returns.dates.iter().enumerate() {
        let ym = YearMonth::of(*d);
        match months.last_mut() {
            Some(b) if b.month == ym => b.len += 1,
            _ => months.push(MonthBlock { month: ym, start: k, len: 1 }),
        }
    }
    Ok(ReturnPanel {
        label: returns.label.clone(),
        dates: returns.dates.clone(),
        returns: returns.values.clone(),
        months,
    })
}

/// Sum of squared daily returns of month `month`.
pub fn realized_vol_fixed(panel: &ReturnPanel, month: YearMonth) -> Result<f64> {
    let t = panel.find_month(month).ok_or_else(|| Error::Lookup(month.to_string()))?;
    Ok(panel.month_returns(t).iter().map(|r| r * r).sum())
}

/// Per-month realized volatility for every month of the panel.
pub fn monthly_realized_vol(panel: &ReturnPanel) -> Vec<f64> {
    (0..panel.n_months()).map(|t| panel.month_returns(t).iter().map(|r| r * r).sum()).collect()
}

/// Sum of the `window` squared returns strictly before day `i`.
pub fn realized_vol_rolling(returns: &[f64], i: usize, window: usize) -> Result<f64> {
    check_window(returns.len(), i, window)?;
    Ok(returns[i - window..i].iter().map(|r| r * r).sum())
}

/// Mean of the `window` daily macro values strictly before day `i`.
pub fn rolling_macro(mv_daily: &[f64], i: usize, window: usize) -> Result<f64> {
    check_window(mv_daily.len(), i, window)?;
    Ok(mv_daily[i - window..i].iter().sum::<f64>() / window as f64)
}

fn check_window(len: usize, i: usize, window: usize) -> Result<()> {
    if window == 0 {
        return Err(Error::Domain("window must be positive".into()));
    }
    if i < window {
        return Err(Error::Window { first_valid: window });
    }
    if i > len {
        return Err(Error::Length { needed: i, got: len });
    }
    Ok(())
}

/// Rolling realized volatility for every day; entries before `window` are NaN.
pub fn rolling_realized_vol_series(returns: &[f64], window: usize) -> Vec<f64> {
    (0..returns.len()).map(|i| realized_vol_rolling(returns, i, window).unwrap_or(f64::NAN)).collect()
}

/// Rolling macro mean for every day; entries before `window` are NaN.
pub fn rolling_macro_series(mv_daily: &[f64], window: usize) -> Vec<f64> {
    (0..mv_daily.len()).map(|i| rolling_macro(mv_daily, i, window).unwrap_or(f64::NAN)).collect()
}

/// Gives each trading day the value of its own calendar month.
pub fn expand_monthly_to_daily(mv: &MonthlySeries, calendar: &[NaiveDate]) -> Result<DailySeries> {
    let values = calendar
        .iter()
        .map(|d| {
            let ym = YearMonth::of(*d);
            mv.get(ym).ok_or_else(|| Error::Coverage(ym.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    DailySeries::new(mv.label.clone(), calendar.to_vec(), values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    pub n: usize,
    pub max: f64,
    pub min: f64,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator).
    pub std_dev: f64,
    /// m3 / m2^1.5 with n-denominator central moments; `None` for a constant series.
    pub skewness: Option<f64>,
    /// m4 / m2^2, not excess; `None` for a constant series.
    pub kurtosis: Option<f64>,
}

pub fn descriptive_stats(values: &[f64]) -> Result<Stats> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Length { needed: 2, got: n });
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    let (mut max, mut min) = (f64::NEG_INFINITY, f64::INFINITY);
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
        max = max.max(v);
        min = min.min(v);
    }
    let std_dev = (m2 / (nf - 1.0)).sqrt();
    let (m2, m3, m4) = (m2 / nf, m3 / nf, m4 / nf);
    let (skewness, kurtosis) = if m2 > 0.0 { (Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2))) } else { (None, None) };
    Ok(Stats { n, max, min, mean, std_dev, skewness, kurtosis })
}
