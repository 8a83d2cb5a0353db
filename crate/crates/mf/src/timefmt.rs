//! Timestamp text: ISO-8601 instants and numeric offsets in a time unit.

use chrono::{DateTime, NaiveDateTime, SecondsFormat, Utc};
use mf_core::TimeInstant;

/// Parses an ISO-8601 instant. A missing offset is read as UTC.
pub fn parse_iso(s: &str) -> Option<TimeInstant> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(TimeInstant::from_millis(dt.timestamp_millis()));
    }
    ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .map(|n| TimeInstant::from_millis(n.and_utc().timestamp_millis()))
}

/// `2011-07-14T22:00:00Z`, with `.sss` only when the milliseconds are non-zero.
pub fn format_iso(t: TimeInstant) -> String {
    match DateTime::<Utc>::from_timestamp_millis(t.millis()) {
        Some(dt) => dt.to_rfc3339_opts(SecondsFormat::AutoSi, true),
        None => t.millis().to_string(),
    }
}

/// Unit of offset times in segment encodings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeUnit {
    name: String,
    millis: i64,
}

impl TimeUnit {
    pub fn parse(name: &str) -> Option<Self> {
        let millis = match name.trim().to_ascii_lowercase().as_str() {
            "ms" | "msec" | "millisec" | "millisecond" | "milliseconds" => 1,
            "s" | "sec" | "second" | "seconds" => 1_000,
            "min" | "minute" | "minutes" => 60_000,
            "h" | "hour" | "hours" => 3_600_000,
            "d" | "day" | "days" => 86_400_000,
            _ => return None,
        };
        Some(TimeUnit {
            name: name.trim().to_string(),
            millis,
        })
    }

    pub fn seconds() -> Self {
        TimeUnit {
            name: "sec".into(),
            millis: 1_000,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn millis(&self) -> i64 {
        self.millis
    }
}

/// True for `[+-]digits[.digits]`.
pub fn is_offset_literal(s: &str) -> bool {
    let s = s.trim();
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    !(int.is_empty() && frac.is_empty())
        && int.bytes().all(|b| b.is_ascii_digit())
        && frac.bytes().all(|b| b.is_ascii_digit())
        && !body.ends_with('.')
}

/// Offset literal to milliseconds, rounded half away from zero.
pub fn parse_offset(s: &str, unit: &TimeUnit) -> Option<i64> {
    if !is_offset_literal(s) {
        return None;
    }
    let s = s.trim();
    let negative = s.starts_with('-');
    let body = s.trim_start_matches(['-', '+']);
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits = format!("{int}{frac}");
    let numerator: i128 = digits.parse().ok()?;
    let denominator = 10i128.checked_pow(frac.len() as u32)?;
    let scaled = numerator.checked_mul(unit.millis as i128)?;
    let ms = (scaled + denominator / 2) / denominator;
    let ms = i64::try_from(ms).ok()?;
    Some(if negative { -ms } else { ms })
}

/// Milliseconds as an exact decimal count of `unit`, no trailing zeros.
/// `None` when the value has no finite decimal expansion.
pub fn format_offset(ms: i64, unit: &TimeUnit) -> Option<String> {
    let den = unit.millis as i128;
    let num = (ms as i128).abs();
    let mut out = String::new();
    if ms < 0 {
        out.push('-');
    }
    out.push_str(&(num / den).to_string());
    let mut rem = num % den;
    if rem != 0 {
        out.push('.');
        for _ in 0..24 {
            rem *= 10;
            out.push(char::from(b'0' + (rem / den) as u8));
            rem %= den;
            if rem == 0 {
                break;
            }
        }
    }
    (rem == 0).then_some(out)
}

/// A numeric offset from `origin` in `unit`, or an absolute ISO instant.
pub fn parse_time(s: &str, origin: TimeInstant, unit: &TimeUnit) -> Option<TimeInstant> {
    if is_offset_literal(s) {
        parse_offset(s, unit).map(|ms| origin.add_millis(ms))
    } else {
        parse_iso(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iso_round_trip() {
        let t = parse_iso("2011-07-14T22:00:00Z").unwrap();
        assert_eq!(t.millis(), 1_310_680_800_000);
        assert_eq!(format_iso(t), "2011-07-14T22:00:00Z");
        assert_eq!(format_iso(t.add_millis(2_500)), "2011-07-14T22:00:02.500Z");
        assert_eq!(parse_iso("2011-07-14T22:00:02.5Z"), Some(t.add_millis(2_500)));
        assert_eq!(parse_iso("2011-07-15T00:00:00+02:00"), Some(t));
        assert_eq!(parse_iso("2011-07-14T22:00:00"), Some(t));
        assert_eq!(parse_iso("yesterday"), None);
    }

    #[test]
    fn offsets() {
        let sec = TimeUnit::seconds();
        assert_eq!(parse_offset("5", &sec), Some(5_000));
        assert_eq!(parse_offset("2.5", &sec), Some(2_500));
        assert_eq!(parse_offset("-0.0015", &sec), Some(-2));
        assert_eq!(parse_offset("1e3", &sec), None);
        assert_eq!(parse_offset("5.", &sec), None);
        let min = TimeUnit::parse("minute").unwrap();
        assert_eq!(parse_offset("0.5", &min), Some(30_000));
        assert_eq!(format_offset(30_000, &min).as_deref(), Some("0.5"));
        assert_eq!(format_offset(1, &min), None);
        assert_eq!(format_offset(20_000, &sec).as_deref(), Some("20"));
        assert_eq!(format_offset(2_500, &sec).as_deref(), Some("2.5"));
        assert_eq!(format_offset(-1, &sec).as_deref(), Some("-0.001"));
    }

    #[test]
    fn offsets_and_absolute_times_are_told_apart() {
        let origin = parse_iso("2011-07-14T22:00:00Z").unwrap();
        let sec = TimeUnit::seconds();
        assert_eq!(parse_time("10", origin, &sec), Some(origin.add_millis(10_000)));
        assert_eq!(
            parse_time("2011-07-14T22:00:10Z", origin, &sec),
            Some(origin.add_millis(10_000))
        );
        assert!(TimeUnit::parse("fortnight").is_none());
    }
}
