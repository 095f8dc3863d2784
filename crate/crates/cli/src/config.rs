//! Run configuration shared by all audit kinds, with a flat key=value file
//! format that round-trips losslessly.

use primecover_core::Rational;

/// Every tunable of an audit run. Fields are optional so a config file can
/// set only what it needs; command-line flags override file values.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub kind: Option<String>,
    pub q_lo: Option<u64>,
    pub q_hi: Option<u64>,
    pub k: Option<u32>,
    pub y: Option<u64>,
    pub exponent: Option<Rational>,
    pub ell_max: Option<u64>,
    pub y0: Option<u64>,
    pub eta: Option<Rational>,
    pub mode: Option<String>,
    pub out: Option<String>,
    pub format: Option<String>,
    pub jobs: Option<usize>,
    pub ceiling: Option<u64>,
    pub x: Option<u64>,
}

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: i64 = num.trim().parse().map_err(|_| format!("bad rational `{s}`"))?;
    let den: i64 = den.trim().parse().map_err(|_| format!("bad rational `{s}`"))?;
    if den <= 0 || num < 0 {
        return Err(format!("rational `{s}` must be nonnegative with positive denominator"));
    }
    Ok(Rational::new(num, den))
}

#[cfg_attr(not(test), allow(dead_code))]
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.num, r.den)
}

impl RunConfig {
    /// Parse the flat key=value file format. Blank lines and `#` comments
    /// are ignored; unknown keys are errors.
    pub fn parse_kv(text: &str) -> Result<RunConfig, String> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value, got `{line}`", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |_| format!("line {}: bad value for {key}: `{value}`", lineno + 1);
            match key {
                "kind" => cfg.kind = Some(value.to_string()),
                "q_lo" => cfg.q_lo = Some(value.parse().map_err(bad)?),
                "q_hi" => cfg.q_hi = Some(value.parse().map_err(bad)?),
                "k" => cfg.k = Some(value.parse().map_err(bad)?),
                "y" => cfg.y = Some(value.parse().map_err(bad)?),
                "exponent" => cfg.exponent = Some(parse_rational(value)?),
                "ell_max" => cfg.ell_max = Some(value.parse().map_err(bad)?),
                "y0" => cfg.y0 = Some(value.parse().map_err(bad)?),
                "eta" => cfg.eta = Some(parse_rational(value)?),
                "mode" => cfg.mode = Some(value.to_string()),
                "out" => cfg.out = Some(value.to_string()),
                "format" => cfg.format = Some(value.to_string()),
                "jobs" => cfg.jobs = Some(value.parse().map_err(bad)?),
                "ceiling" => cfg.ceiling = Some(value.parse().map_err(bad)?),
                "x" => cfg.x = Some(value.parse().map_err(bad)?),
                _ => return Err(format!("line {}: unknown key `{key}`", lineno + 1)),
            }
        }
        Ok(cfg)
    }

    /// Serialize the set fields back to the key=value format.
    #[cfg_attr(not(test), allow(dead_code))]
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let mut push = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                out.push_str(key);
                out.push('=');
                out.push_str(&v);
                out.push('\n');
            }
        };
        push("kind", self.kind.clone());
        push("q_lo", self.q_lo.map(|v| v.to_string()));
        push("q_hi", self.q_hi.map(|v| v.to_string()));
        push("k", self.k.map(|v| v.to_string()));
        push("y", self.y.map(|v| v.to_string()));
        push("exponent", self.exponent.as_ref().map(format_rational));
        push("ell_max", self.ell_max.map(|v| v.to_string()));
        push("y0", self.y0.map(|v| v.to_string()));
        push("eta", self.eta.as_ref().map(format_rational));
        push("mode", self.mode.clone());
        push("out", self.out.clone());
        push("format", self.format.clone());
        push("jobs", self.jobs.map(|v| v.to_string()));
        push("ceiling", self.ceiling.map(|v| v.to_string()));
        push("x", self.x.map(|v| v.to_string()));
        out
    }

    /// Overlay: any field set in `over` wins over `self`.
    pub fn merged_with(&self, over: &RunConfig) -> RunConfig {
        macro_rules! pick {
            ($field:ident) => {
                over.$field.clone().or_else(|| self.$field.clone())
            };
        }
        RunConfig {
            kind: pick!(kind),
            q_lo: pick!(q_lo),
            q_hi: pick!(q_hi),
            k: pick!(k),
            y: pick!(y),
            exponent: pick!(exponent),
            ell_max: pick!(ell_max),
            y0: pick!(y0),
            eta: pick!(eta),
            mode: pick!(mode),
            out: pick!(out),
            format: pick!(format),
            jobs: pick!(jobs),
            ceiling: pick!(ceiling),
            x: pick!(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_round_trip_is_lossless() {
        let cfg = RunConfig {
            kind: Some("cover".into()),
            q_lo: Some(50),
            q_hi: Some(60),
            k: Some(3),
            y: None,
            exponent: Some(Rational::new(3, 2)),
            ell_max: None,
            y0: Some(32),
            eta: Some(Rational::new(11, 32)),
            mode: Some("strict".into()),
            out: Some("/tmp/report.jsonl".into()),
            format: Some("json".into()),
            jobs: Some(8),
            ceiling: Some(4_000_000),
            x: None,
        };
        let text = cfg.to_kv();
        let back = RunConfig::parse_kv(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_kv(), text);
    }

    #[test]
    fn kv_rejects_unknown_keys_and_bad_values() {
        assert!(RunConfig::parse_kv("bogus=1").is_err());
        assert!(RunConfig::parse_kv("q_lo=abc").is_err());
        assert!(RunConfig::parse_kv("eta=11/0").is_err());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let cfg = RunConfig::parse_kv("# header\n\nq_lo = 5\nq_hi= 7\n").unwrap();
        assert_eq!(cfg.q_lo, Some(5));
        assert_eq!(cfg.q_hi, Some(7));
    }

    #[test]
    fn overlay_prefers_flag_values() {
        let file = RunConfig::parse_kv("q_lo=5\nq_hi=9\nmode=strict\n").unwrap();
        let flags = RunConfig {
            q_hi: Some(7),
            ..RunConfig::default()
        };
        let merged = file.merged_with(&flags);
        assert_eq!(merged.q_lo, Some(5));
        assert_eq!(merged.q_hi, Some(7));
        assert_eq!(merged.mode.as_deref(), Some("strict"));
    }
}
