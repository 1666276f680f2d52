//! Byte-size and duration arguments.

use std::time::Duration;

fn split_number(s: &str) -> (&str, &str) {
    let end = s
        .find(|c: char| !(c.is_ascii_digit() || c == '.'))
        .unwrap_or(s.len());
    (&s[..end], s[end..].trim())
}

/// `1048576`, `64KiB`, `256MiB`, `8GiB`, `10MB` (decimal units).
pub fn parse_bytes(s: &str) -> Result<u64, String> {
    let (num, unit) = split_number(s.trim());
    let value: u64 = num
        .parse()
        .map_err(|_| format!("invalid byte count `{s}`"))?;
    let scale: u64 = match unit.to_ascii_lowercase().as_str() {
        "" | "b" => 1,
        "kib" => 1 << 10,
        "mib" => 1 << 20,
        "gib" => 1 << 30,
        "kb" => 1_000,
        "mb" => 1_000_000,
        "gb" => 1_000_000_000,
        _ => return Err(format!("unknown size unit in `{s}`")),
    };
    value
        .checked_mul(scale)
        .ok_or_else(|| format!("byte count `{s}` overflows"))
}

/// `20ms`, `1.5ms`, `250us`, `0.02s`; a bare number is milliseconds.
pub fn parse_duration(s: &str) -> Result<Duration, String> {
    let (num, unit) = split_number(s.trim());
    let value: f64 = num.parse().map_err(|_| format!("invalid duration `{s}`"))?;
    let secs = match unit {
        "" | "ms" => value / 1e3,
        "us" => value / 1e6,
        "ns" => value / 1e9,
        "s" => value,
        _ => return Err(format!("unknown duration unit in `{s}`")),
    };
    Duration::try_from_secs_f64(secs).map_err(|e| format!("duration `{s}`: {e}"))
}
