//! Link-to-system abstraction: SINR, CQI/MCS mapping, BLER waterfall,
//! goodput and the pilot overhead model.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Number of CQI levels carrying data.
pub const CQI_LEVELS: usize = 15;

/// Spectral efficiencies (bit/s/Hz) of the 15-level LTE CQI table.
pub const LTE_SPECTRAL_EFFICIENCY: [f64; CQI_LEVELS] = [
    0.1523, 0.2344, 0.3770, 0.6016, 0.8770, 1.1758, 1.4766, 1.9141, 2.4063, 2.7305, 3.3223, 3.9023,
    4.5234, 5.1152, 5.5547,
];

/// Fraction of Shannon capacity an MCS is assumed to reach at its 10% BLER
/// operating point. Used to generate the SINR thresholds.
pub const SHANNON_FRACTION: f64 = 0.75;

const MCS_TABLE_VERSION: u32 = 1;
const DEFAULT_MCS_TABLE: &str = include_str!("../data/mcs_table.csv");

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Received powers for one user.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    pub signal_power: f64,
    pub interference_powers: Vec<f64>,
    pub noise_power: f64,
}

impl LinkBudget {
    pub fn new(signal_power: f64, interference_powers: Vec<f64>, noise_power: f64) -> Result<Self> {
        if !(noise_power > 0.0) {
            return Err(Error::Argument(format!(
                "noise power must be positive, got {noise_power}"
            )));
        }
        if signal_power < 0.0 || interference_powers.iter().any(|&p| p < 0.0) {
            return Err(Error::Argument(
                "received powers must be non-negative".into(),
            ));
        }
        Ok(LinkBudget {
            signal_power,
            interference_powers,
            noise_power,
        })
    }
}

/// `γ = P_n / (σ² + Σ_{m≠n} P_m)`.
pub fn sinr(budget: &LinkBudget) -> f64 {
    let interference: f64 = budget.interference_powers.iter().sum();
    budget.signal_power / (budget.noise_power + interference)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McsRow {
    pub cqi: u8,
    pub spectral_efficiency: f64,
    pub sinr_threshold_db: f64,
}

/// CQI → (spectral efficiency, SINR threshold) table plus the BLER waterfall
/// parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct McsTable {
    rows: Vec<McsRow>,
    pub bler_at_threshold: f64,
    /// dB of SINR margin per decade of BLER change.
    pub slope_db_per_decade: f64,
}

impl Default for McsTable {
    fn default() -> Self {
        McsTable::parse(DEFAULT_MCS_TABLE, "<builtin mcs table>")
            .expect("builtin MCS table is valid")
    }
}

impl McsTable {
    pub fn new(
        rows: Vec<McsRow>,
        bler_at_threshold: f64,
        slope_db_per_decade: f64,
    ) -> Result<Self> {
        if rows.len() != CQI_LEVELS {
            return Err(Error::Config(format!(
                "MCS table needs {CQI_LEVELS} rows, got {}",
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.cqi as usize != i + 1 {
                return Err(Error::Config(format!("row {i} has CQI {}", row.cqi)));
            }
        }
        for w in rows.windows(2) {
            if w[1].spectral_efficiency <= w[0].spectral_efficiency
                || w[1].sinr_threshold_db <= w[0].sinr_threshold_db
            {
                return Err(Error::Config(format!(
                    "MCS table not strictly increasing at CQI {}",
                    w[1].cqi
                )));
            }
        }
        if !(bler_at_threshold > 0.0 && bler_at_threshold < 1.0) || !(slope_db_per_decade > 0.0) {
            return Err(Error::Config("invalid BLER waterfall parameters".into()));
        }
        Ok(McsTable {
            rows,
            bler_at_threshold,
            slope_db_per_decade,
        })
    }

    /// Builds the table from the LTE efficiencies, placing each threshold
    /// where `shannon_fraction · log2(1 + γ)` reaches the efficiency.
    pub fn generate(
        shannon_fraction: f64,
        bler_at_threshold: f64,
        slope_db_per_decade: f64,
    ) -> Result<Self> {
        let rows = LTE_SPECTRAL_EFFICIENCY
            .iter()
            .enumerate()
            .map(|(i, &se)| McsRow {
                cqi: (i + 1) as u8,
                spectral_efficiency: se,
                sinr_threshold_db: round_to(
                    linear_to_db(2f64.powf(se / shannon_fraction) - 1.0),
                    4,
                ),
            })
            .collect();
        McsTable::new(rows, bler_at_threshold, slope_db_per_decade)
    }

    pub fn rows(&self) -> &[McsRow] {
        &self.rows
    }

    pub fn row(&self, cqi: u8) -> Option<&McsRow> {
        if cqi == 0 {
            None
        } else {
            self.rows.get(cqi as usize - 1)
        }
    }

    pub fn spectral_efficiency(&self, cqi: u8) -> f64 {
        self.row(cqi).map_or(0.0, |r| r.spectral_efficiency)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        McsTable::parse(&text, &path.display().to_string())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# mcs-table version={MCS_TABLE_VERSION} bler_at_threshold={} slope_db_per_decade={}\n",
            self.bler_at_threshold, self.slope_db_per_decade
        );
        out.push_str("cqi,spectral_efficiency,sinr_threshold_db\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{}",
                r.cqi, r.spectral_efficiency, r.sinr_threshold_db
            );
        }
        out
    }

    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(format!("{source}:1"), "empty file"))?;
        let meta = header
            .strip_prefix("# mcs-table")
            .ok_or_else(|| Error::parse(format!("{source}:1"), "missing '# mcs-table' header"))?;
        let mut version = None;
        let mut bler = None;
        let mut slope = None;
        for kv in meta.split_whitespace() {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("{source}:1"), format!("bad field '{kv}'")))?;
            let num = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| Error::parse(format!("{source}:1"), format!("bad number '{v}'")))
            };
            match k {
                "version" => version = Some(num(v)? as u32),
                "bler_at_threshold" => bler = Some(num(v)?),
                "slope_db_per_decade" => slope = Some(num(v)?),
                _ => {
                    return Err(Error::parse(
                        format!("{source}:1"),
                        format!("unknown key '{k}'"),
                    ))
                }
            }
        }
        let version =
            version.ok_or_else(|| Error::parse(format!("{source}:1"), "missing version"))?;
        if version != MCS_TABLE_VERSION {
            return Err(Error::Version {
                found: version,
                expected: MCS_TABLE_VERSION,
            });
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("cqi") {
                continue;
            }
            let loc = || format!("{source}:{}", i + 1);
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::parse(loc(), "expected 3 columns"));
            }
            let bad = |_| Error::parse(loc(), "bad number");
            rows.push(McsRow {
                cqi: fields[0]
                    .parse()
                    .map_err(|_| Error::parse(loc(), "bad CQI"))?,
                spectral_efficiency: fields[1].parse().map_err(bad)?,
                sinr_threshold_db: fields[2].parse().map_err(bad)?,
            });
        }
        McsTable::new(
            rows,
            bler.ok_or_else(|| Error::parse(format!("{source}:1"), "missing bler_at_threshold"))?,
            slope.ok_or_else(|| {
                Error::parse(format!("{source}:1"), "missing slope_db_per_decade")
            })?,
        )
    }
}

fn round_to(x: f64, digits: i32) -> f64 {
    let s = 10f64.powi(digits);
    (x * s).round() / s
}

/// Highest CQI whose threshold does not exceed `sinr_db`; 0 below all of them.
pub fn cqi_from_sinr(sinr_db: f64, table: &McsTable) -> u8 {
    table
        .rows
        .iter()
        .take_while(|r| r.sinr_threshold_db <= sinr_db)
        .last()
        .map_or(0, |r| r.cqi)
}

/// Payload in bits for one frame.
pub fn packet_size(
    cqi: u8,
    table: &McsTable,
    bandwidth_hz: f64,
    frame_s: f64,
    overhead_fraction: f64,
) -> Result<f64> {
    if !(0.0..1.0).contains(&overhead_fraction) {
        return Err(Error::Argument(format!(
            "overhead fraction {overhead_fraction} outside [0, 1)"
        )));
    }
    if cqi as usize > CQI_LEVELS {
        return Err(Error::Argument(format!("CQI {cqi} out of range")));
    }
    Ok(table.spectral_efficiency(cqi) * bandwidth_hz * frame_s * (1.0 - overhead_fraction))
}

/// Exponential waterfall anchored at `bler_at_threshold` on the CQI's
/// threshold, one decade per `slope_db_per_decade` of margin.
pub fn bler(cqi: u8, sinr_db: f64, table: &McsTable) -> f64 {
    let Some(row) = table.row(cqi) else {
        return 1.0;
    };
    let margin = sinr_db - row.sinr_threshold_db;
    (table.bler_at_threshold * 10f64.powf(-margin / table.slope_db_per_decade)).clamp(0.0, 1.0)
}

/// `(1 − BLER) · PS / TTI` in bit/s.
pub fn goodput(packet_bits: f64, bler: f64, tti_s: f64) -> Result<f64> {
    if !(tti_s > 0.0) {
        return Err(Error::Argument(format!(
            "TTI must be positive, got {tti_s}"
        )));
    }
    Ok((1.0 - bler) * packet_bits / tti_s)
}

/// Goodput of one user sent with `cqi` at the realized `sinr_db`: a frame
/// payload with zero overhead delivered once per `interval_s`.
pub fn realized_goodput(
    cqi: u8,
    sinr_db: f64,
    table: &McsTable,
    bandwidth_hz: f64,
    frame_s: f64,
    interval_s: f64,
) -> f64 {
    if cqi == 0 {
        return 0.0;
    }
    let ps = table.spectral_efficiency(cqi) * bandwidth_hz * frame_s;
    (1.0 - bler(cqi, sinr_db, table)) * ps / interval_s
}

/// Resource-grid numerology for the acquisition overhead model.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverheadConfig {
    /// OFDM symbols per TTI (5 frames of 14 symbols).
    pub sym_total: u32,
    pub sc_total: u32,
    /// Symbols per positioning beacon.
    pub sym_pos: u32,
    /// Narrow-band beacon width in sub-carriers.
    pub sc_pos: u32,
    /// Users multiplexed into one beacon symbol.
    pub beacons_per_symbol: u32,
    pub sym_csi_per_user: u32,
    pub sc_csi: u32,
    /// Consecutive CSI pilots between cyclic-prefix guard symbols.
    pub csi_group_size: u32,
}

impl Default for OverheadConfig {
    fn default() -> Self {
        OverheadConfig {
            sym_total: 70,
            sc_total: 1200,
            sym_pos: 1,
            sc_pos: 24,
            beacons_per_symbol: 12,
            sym_csi_per_user: 1,
            sc_csi: 1200,
            csi_group_size: 3,
        }
    }
}

impl OverheadConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.sym_total,
            self.sc_total,
            self.sym_pos,
            self.sc_pos,
            self.beacons_per_symbol,
            self.sym_csi_per_user,
            self.sc_csi,
            self.csi_group_size,
        ];
        if fields.iter().any(|&f| f == 0) {
            return Err(Error::Config(
                "overhead numerology entries must be positive".into(),
            ));
        }
        if self.sym_pos > self.sym_total
            || self.sc_pos > self.sc_total
            || self.sc_csi > self.sc_total
        {
            return Err(Error::Config("pilot resources exceed the TTI grid".into()));
        }
        Ok(())
    }

    fn total(&self) -> f64 {
        self.sym_total as f64 * self.sc_total as f64
    }

    /// Symbols spent on position beacons for `n_users`.
    pub fn position_symbols(&self, n_users: u32) -> u32 {
        n_users.div_ceil(self.beacons_per_symbol) * self.sym_pos
    }

    /// Symbols spent on full-band CSI pilots, guard symbols included.
    pub fn csi_symbols(&self, n_users: u32) -> u32 {
        let guards = n_users.div_ceil(self.csi_group_size).saturating_sub(1);
        n_users * self.sym_csi_per_user + guards
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut version = None;
        let mut cfg = OverheadConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line == "key,value" {
                continue;
            }
            let loc = || format!("{}:{}", path.display(), i + 1);
            let (k, v) = line
                .split_once(',')
                .ok_or_else(|| Error::parse(loc(), "expected key,value"))?;
            let v: u32 = v
                .trim()
                .parse()
                .map_err(|_| Error::parse(loc(), "bad integer"))?;
            let slot = match k.trim() {
                "version" => {
                    version = Some(v);
                    continue;
                }
                "sym_total" => &mut cfg.sym_total,
                "sc_total" => &mut cfg.sc_total,
                "sym_pos" => &mut cfg.sym_pos,
                "sc_pos" => &mut cfg.sc_pos,
                "beacons_per_symbol" => &mut cfg.beacons_per_symbol,
                "sym_csi_per_user" => &mut cfg.sym_csi_per_user,
                "sc_csi" => &mut cfg.sc_csi,
                "csi_group_size" => &mut cfg.csi_group_size,
                other => return Err(Error::parse(loc(), format!("unknown key '{other}'"))),
            };
            *slot = v;
        }
        match version {
            Some(1) => {}
            Some(found) => return Err(Error::Version { found, expected: 1 }),
            None => {
                return Err(Error::parse(
                    path.display().to_string(),
                    "missing version row",
                ))
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn check_users(n_users: u32) -> Result<()> {
    if n_users == 0 {
        return Err(Error::Argument("overhead needs at least one user".into()));
    }
    Ok(())
}

fn saturate(kind: &str, fraction: f64, n_users: u32) -> Result<f64> {
    if fraction > 1.0 {
        return Err(Error::Saturation(format!(
            "{kind} overhead {fraction:.3} exceeds the TTI for {n_users} users"
        )));
    }
    Ok(fraction)
}

/// Narrow-band beacon overhead per TTI.
pub fn overhead_position(cfg: &OverheadConfig, n_users: u32) -> Result<f64> {
    check_users(n_users)?;
    let f = cfg.position_symbols(n_users) as f64 * cfg.sc_pos as f64 / cfg.total();
    saturate("position", f, n_users)
}

/// Full-band CSI pilot overhead per TTI.
pub fn overhead_csi(cfg: &OverheadConfig, n_users: u32) -> Result<f64> {
    check_users(n_users)?;
    let f = cfg.csi_symbols(n_users) as f64 * cfg.sc_csi as f64 / cfg.total();
    saturate("CSI", f, n_users)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinr_arithmetic() {
        let b = LinkBudget::new(2.0, vec![1.0], 1.0).unwrap();
        assert_eq!(sinr(&b), 1.0);
        let b = LinkBudget::new(3.0, vec![], 0.5).unwrap();
        assert_eq!(sinr(&b), 6.0);
        assert!(LinkBudget::new(1.0, vec![], 0.0).is_err());
    }

    #[test]
    fn builtin_table_matches_generator() {
        let generated = McsTable::generate(SHANNON_FRACTION, 0.1, 1.0).unwrap();
        assert_eq!(McsTable::default(), generated);
        assert_eq!(generated.to_text(), DEFAULT_MCS_TABLE);
    }

    #[test]
    fn cqi_boundaries() {
        let t = McsTable::default();
        let first = t.rows()[0].sinr_threshold_db;
        assert_eq!(cqi_from_sinr(first - 0.01, &t), 0);
        for r in t.rows() {
            assert_eq!(cqi_from_sinr(r.sinr_threshold_db, &t), r.cqi);
        }
        assert_eq!(cqi_from_sinr(100.0, &t), 15);
    }

    #[test]
    fn packet_sizes() {
        let t = McsTable::default();
        assert_eq!(packet_size(0, &t, 200e6, 0.2e-3, 0.0).unwrap(), 0.0);
        let full = packet_size(9, &t, 200e6, 0.2e-3, 0.0).unwrap();
        let half = packet_size(9, &t, 200e6, 0.2e-3, 0.5).unwrap();
        assert!((half - full / 2.0).abs() < 1e-9);
        assert!(packet_size(3, &t, 200e6, 0.2e-3, 1.0).is_err());
        assert!(packet_size(3, &t, 200e6, 0.2e-3, -0.1).is_err());
    }

    #[test]
    fn unit_efficiency_payload() {
        let rows = (1..=15)
            .map(|c| McsRow {
                cqi: c,
                spectral_efficiency: c as f64,
                sinr_threshold_db: c as f64,
            })
            .collect();
        let t = McsTable::new(rows, 0.1, 1.0).unwrap();
        let ps = packet_size(1, &t, 200e6, 0.2e-3, 0.0).unwrap();
        assert!((ps - 40_000.0).abs() < 1e-6);
    }

    #[test]
    fn bler_waterfall() {
        let t = McsTable::default();
        let th = t.row(7).unwrap().sinr_threshold_db;
        assert!((bler(7, th, &t) - 0.1).abs() < 1e-12);
        assert!(bler(7, th + 50.0, &t) < 1e-40);
        assert_eq!(bler(7, th - 5.0, &t), 1.0);
        assert_eq!(bler(0, 30.0, &t), 1.0);
    }

    #[test]
    fn goodput_cases() {
        let g = goodput(10_000.0, 0.1, 0.2e-3).unwrap();
        assert!((g - 45e6).abs() < 1e-6);
        assert_eq!(goodput(10_000.0, 1.0, 0.2e-3).unwrap(), 0.0);
        assert!((goodput(10_000.0, 0.0, 0.2e-3).unwrap() - 5e7).abs() < 1e-6);
        assert!(goodput(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn overhead_examples() {
        let cfg = OverheadConfig::default();
        let pos = overhead_position(&cfg, 1).unwrap();
        assert!((pos - 24.0 / 84_000.0).abs() < 1e-15);
        assert_eq!(overhead_position(&cfg, 12).unwrap(), pos);
        assert!((overhead_csi(&cfg, 1).unwrap() - 1.0 / 70.0).abs() < 1e-15);
        let csi25 = overhead_csi(&cfg, 25).unwrap();
        assert!((0.40..=0.50).contains(&csi25), "{csi25}");
        assert!(overhead_position(&cfg, 0).is_err());
    }

    #[test]
    fn overhead_saturates() {
        let cfg = OverheadConfig::default();
        assert!(matches!(overhead_csi(&cfg, 60), Err(Error::Saturation(_))));
    }
}
