//! Pass/fail checks of experiment reports against the reference claims.

use crate::forest::DimensionRow;
use crate::link::{overhead_csi, OverheadConfig};

use super::report::Report;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.into(),
            passed,
            detail,
        }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

pub fn scheme_comparison(r: &Report) -> Vec<Check> {
    let l = r.ratio("learning", "exact");
    let rp = r.ratio("random_packet", "exact");
    let g = r.ratio("geometric", "exact");
    vec![
        Check::new("learning/csi >= 0.85", l >= 0.85, format!("{l:.4}")),
        Check::new("random_packet/csi <= 0.20", rp <= 0.20, format!("{rp:.4}")),
        Check::new("geometric/csi <= 0.20", g <= 0.20, format!("{g:.4}")),
    ]
}

fn effective(r: &Report, scheme: &str, n: u32) -> f64 {
    r.row(scheme, &n.to_string())
        .map_or(f64::NAN, |x| x.effective_goodput)
}

pub fn overhead_sweep(r: &Report, oh: &OverheadConfig, user_counts: &[u32]) -> Vec<Check> {
    let oh25 = overhead_csi(oh, 25).unwrap_or(f64::NAN);
    let l25 = effective(r, "learning", 25);
    let c25 = effective(r, "csi", 25);
    let max_n = user_counts.iter().copied().max().unwrap_or(0);
    let gain = effective(r, "learning", max_n) / effective(r, "csi", max_n);
    vec![
        Check::new(
            "OH_CSI(25) in [0.40, 0.50]",
            (0.40..=0.50).contains(&oh25),
            format!("{oh25:.4}"),
        ),
        Check::new(
            "effective learning >= effective CSI at n=25",
            l25 >= c25,
            format!("{l25:.4e} vs {c25:.4e}"),
        ),
        Check::new(
            "effective advantage >= 1.5x at max n",
            gain >= 1.5,
            format!("{gain:.3}x at n={max_n}"),
        ),
    ]
}

fn radii(r: &Report) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for row in r.rows.iter().filter(|x| x.scheme == "learning_noisy") {
        if let Ok(v) = row.condition.parse::<f64>() {
            out.push(v);
        }
    }
    out
}

pub fn position_noise(r: &Report) -> Vec<Check> {
    let base = r.ratio("learning_clean", "0");
    let mut checks = Vec::new();
    for radius in radii(r) {
        let c = r.ratio("learning_clean", &radius.to_string());
        let n = r.ratio("learning_noisy", &radius.to_string());
        if radius <= 1.0 {
            let drop = (base - c) * 100.0;
            checks.push(Check::new(
                &format!("clean degradation at {radius} m <= 10 points"),
                drop <= 10.0,
                format!("{drop:.2} points"),
            ));
        }
        if radius > 2.0 {
            checks.push(Check::new(
                &format!("noisy beats clean at {radius} m"),
                n > c,
                format!("{n:.4} vs {c:.4}"),
            ));
            let gap = (1.0 - n.max(c)) * 100.0;
            checks.push(Check::new(
                &format!("CSI gap at {radius} m in [5, 15] points"),
                (5.0..=15.0).contains(&gap),
                format!("{gap:.2} points"),
            ));
        }
    }
    checks
}

pub fn scatterer_sweep(r: &Report) -> Vec<Check> {
    let ratios: Vec<f64> = r
        .rows
        .iter()
        .filter(|x| x.scheme == "learning")
        .map(|x| x.ratio_to_csi)
        .collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    vec![
        Check::new(
            ">= 3 densities",
            ratios.len() >= 3,
            format!("{}", ratios.len()),
        ),
        Check::new(
            "spread <= 12 points",
            (hi - lo) * 100.0 <= 12.0,
            format!("{:.2} points", (hi - lo) * 100.0),
        ),
        Check::new("min ratio >= 0.80", lo >= 0.80, format!("{lo:.4}")),
    ]
}

pub fn orientation(r: &Report) -> Vec<Check> {
    let u = r.ratio("unmitigated", "random");
    let s1 = r.ratio("solution1", "random");
    let s2 = r.ratio("solution2", "random");
    let s3 = r.ratio("solution3", "random");
    vec![
        Check::new("unmitigated <= 0.50", u <= 0.50, format!("{u:.4}")),
        Check::new("solution 1 >= 0.80", s1 >= 0.80, format!("{s1:.4}")),
        Check::new(
            "solution 3 within 5 points of solution 1",
            (s3 - s1).abs() <= 0.05,
            format!("{s3:.4} vs {s1:.4}"),
        ),
        Check::new(
            "solution 2 in [0.70, 0.95] and below solution 1",
            (0.70..=0.95).contains(&s2) && s2 < s1,
            format!("{s2:.4}"),
        ),
    ]
}

pub fn nlos(r: &Report) -> Vec<Check> {
    let base = r.ratio("learning_clean", "0");
    let mut checks = vec![Check::new(
        "perfect-position ratio >= 0.75",
        base >= 0.75,
        format!("{base:.4}"),
    )];
    for radius in radii(r) {
        let c = r.ratio("learning_clean", &radius.to_string());
        let n = r.ratio("learning_noisy", &radius.to_string());
        checks.push(Check::new(
            &format!("noisy >= clean at {radius} m"),
            n >= c,
            format!("{n:.4} vs {c:.4}"),
        ));
    }
    checks
}

pub fn dimensioning(rows: &[DimensionRow]) -> Vec<Check> {
    let at = |t_n: usize, t_d: usize| rows.iter().find(|r| r.t_n == t_n && r.t_d == t_d);
    let mut ten: Vec<&DimensionRow> = rows.iter().filter(|r| r.t_n == 10).collect();
    ten.sort_by_key(|r| r.t_d);
    let monotone = ten.len() >= 2
        && ten
            .windows(2)
            .all(|w| w[1].train_accuracy >= w[0].train_accuracy);
    let depths: Vec<String> = ten
        .iter()
        .map(|r| format!("{:.4}", r.train_accuracy))
        .collect();
    let test = at(100, 10).map_or(f64::NAN, |r| r.test_accuracy);
    let change = match (at(100, 10), at(300, 10)) {
        (Some(a), Some(b)) => (b.test_accuracy - a.test_accuracy).abs() * 100.0,
        _ => f64::NAN,
    };
    vec![
        Check::new(
            "training accuracy non-decreasing in depth at t_n=10",
            monotone,
            depths.join(" "),
        ),
        Check::new(
            "test accuracy at (100, 10) >= 0.85",
            test >= 0.85,
            format!("{test:.4}"),
        ),
        Check::new(
            "test accuracy change 100 -> 300 trees <= 1.5 points",
            change <= 1.5,
            format!("{change:.2} points"),
        ),
    ]
}
