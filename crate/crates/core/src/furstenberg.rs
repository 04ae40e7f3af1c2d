//! Time sets (subsets of the nonnegative integers) and membership in the families
//! UD1 (upper density one), THICK, IAP* (meets every infinite arithmetic progression)
//! and INFINITE.
//!
//! Eventually periodic sets are decided exactly. Finite windows of orbit data are tested
//! with every quantifier truncated by explicit parameters.

use std::fmt;

use num::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{format_rational, rat, Rational};
use crate::system::RealParam;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    #[serde(rename = "UD1")]
    Ud1,
    #[serde(rename = "THICK")]
    Thick,
    #[serde(rename = "IAPSTAR")]
    IapStar,
    #[serde(rename = "INFINITE")]
    Infinite,
}

impl Family {
    /// Strongest first.
    pub const ALL: [Family; 4] = [Family::Ud1, Family::Thick, Family::IapStar, Family::Infinite];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Ud1 => "UD1",
            Family::Thick => "THICK",
            Family::IapStar => "IAPSTAR",
            Family::Infinite => "INFINITE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Windowed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Certificate {
    /// Upper density, or the best prefix density `count / prefix` in a window.
    Density { value: String, prefix: Option<usize> },
    /// A run of consecutive members; `len = None` means the run never ends.
    Run { start: usize, len: Option<usize> },
    /// No run is longer than this.
    LongestRun { len: usize },
    /// `<p, m>` misses the set (beyond the window's tail start, when windowed).
    FailingAp { p: usize, m: usize },
    /// Every progression checked was hit.
    AllProgressionsHit { m_max: Option<usize> },
    /// A member at or beyond the tail start.
    TailElement { index: usize },
    /// No member at or beyond the tail start.
    NoTailElement { tail_start: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowParams {
    #[serde(with = "crate::numeric::rational_str")]
    pub theta: Rational,
    pub run_req: usize,
    pub m_max: usize,
    pub tail_start: usize,
}

impl WindowParams {
    /// `theta = 1/100`, `run_req = floor(sqrt(H))`, `m_max = 20`, `tail_start = H/2`;
    /// `m_max` shrinks to `floor(sqrt(H/4))` on horizons too short for 20.
    pub fn defaults(horizon: usize) -> Self {
        WindowParams {
            theta: rat(1, 100),
            run_req: horizon.isqrt(),
            m_max: 20.min((horizon / 4).isqrt()).max(1),
            tail_start: horizon / 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyVerdict {
    pub family: Family,
    pub member: bool,
    pub mode: Mode,
    pub certificate: Certificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<WindowParams>,
}

/// `A = preperiod . pattern pattern pattern ...` as an indicator sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventuallyPeriodicSet {
    preperiod: Vec<bool>,
    pattern: Vec<bool>,
}

fn bits(s: &str) -> Result<Vec<bool>> {
    s.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::InvalidArgument(format!("bit string contains {other:?}"))),
        })
        .collect()
}

impl EventuallyPeriodicSet {
    pub fn new(preperiod: Vec<bool>, pattern: Vec<bool>) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::InvalidArgument("pattern must be nonempty".into()));
        }
        Ok(EventuallyPeriodicSet { preperiod, pattern })
    }

    /// From bit strings such as `("0000", "110")`.
    pub fn parse(preperiod: &str, pattern: &str) -> Result<Self> {
        Self::new(bits(preperiod)?, bits(pattern)?)
    }

    pub fn preperiod(&self) -> &[bool] {
        &self.preperiod
    }

    pub fn pattern(&self) -> &[bool] {
        &self.pattern
    }

    pub fn contains(&self, i: usize) -> bool {
        let l = self.preperiod.len();
        if i < l {
            self.preperiod[i]
        } else {
            self.pattern[(i - l) % self.pattern.len()]
        }
    }

    pub fn window(&self, horizon: usize) -> TimeSetWindow {
        TimeSetWindow::new((0..horizon).map(|i| self.contains(i)).collect())
    }

    /// Exact upper density: the pattern's share of members.
    pub fn upper_density(&self) -> Rational {
        let ones = self.pattern.iter().filter(|&&b| b).count();
        rat(ones as i64, self.pattern.len() as i64)
    }

    fn all_ones(&self) -> bool {
        self.pattern.iter().all(|&b| b)
    }

    pub fn family_member(&self, family: Family) -> FamilyVerdict {
        let l = self.preperiod.len();
        let p = self.pattern.len();
        let (member, certificate) = match family {
            Family::Ud1 => {
                let d = self.upper_density();
                (d == rat(1, 1), Certificate::Density { value: format_rational(&d), prefix: None })
            }
            Family::Thick => {
                if self.all_ones() {
                    let start = (0..=l).rev().take_while(|&i| i == l || self.preperiod[i]).last().unwrap_or(l);
                    (true, Certificate::Run { start, len: None })
                } else {
                    // a run crosses at most the preperiod and two pattern copies
                    let expanded: Vec<bool> = (0..l + 3 * p).map(|i| self.contains(i)).collect();
                    (false, Certificate::LongestRun { len: longest_run(&expanded).map_or(0, |r| r.1) })
                }
            }
            Family::IapStar => match self.missed_progression() {
                Some((p, m)) => (false, Certificate::FailingAp { p, m }),
                None => (true, Certificate::AllProgressionsHit { m_max: None }),
            },
            Family::Infinite => match self.pattern.iter().position(|&b| b) {
                Some(j) => (true, Certificate::TailElement { index: l + j }),
                None => (false, Certificate::NoTailElement { tail_start: l }),
            },
        };
        FamilyVerdict { family, member, mode: Mode::Exact, certificate, params: None }
    }

    /// `<p, m>` meets `A` infinitely often iff the periodic part hits the residue of `p`
    /// modulo `g = gcd(m, P)`, so it suffices to test divisors `g` of `P`. Returns an
    /// progression `<p, g>` contained in the complement, with `p >= L`.
    fn missed_progression(&self) -> Option<(usize, usize)> {
        let l = self.preperiod.len();
        let p = self.pattern.len();
        for g in (1..=p).filter(|&g| p.is_multiple_of(g)) {
            let mut hit = vec![false; g];
            for (j, &b) in self.pattern.iter().enumerate() {
                if b {
                    hit[(l + j) % g] = true;
                }
            }
            if let Some(r) = hit.iter().position(|&h| !h) {
                let start = l + (r + g - l % g) % g;
                return Some((start, g));
            }
        }
        None
    }

    /// Run-length text: `pre <runs>` and `pat <runs>` lines.
    pub fn to_rle(&self) -> String {
        format!("eventually-periodic\npre {}\npat {}\n", rle(&self.preperiod), rle(&self.pattern))
    }
}

impl fmt::Display for EventuallyPeriodicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        write!(f, "{}({})*", s(&self.preperiod), s(&self.pattern))
    }
}

/// Longest run of `true`: `(start, len)`.
fn longest_run(bits: &[bool]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut start = 0;
    for (i, &b) in bits.iter().enumerate() {
        if !b {
            start = i + 1;
            continue;
        }
        let len = i + 1 - start;
        if best.is_none_or(|(_, l)| len > l) {
            best = Some((start, len));
        }
    }
    best
}

/// `A ∩ [0, H)` as a bit vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TimeSetWindow {
    members: Vec<bool>,
}

impl TimeSetWindow {
    pub fn new(members: Vec<bool>) -> Self {
        TimeSetWindow { members }
    }

    pub fn from_fn(horizon: usize, f: impl Fn(usize) -> bool) -> Self {
        TimeSetWindow { members: (0..horizon).map(f).collect() }
    }

    pub fn horizon(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.get(i).copied().unwrap_or(false)
    }

    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_subset(&self, other: &TimeSetWindow) -> bool {
        self.members.iter().enumerate().all(|(i, &b)| !b || other.contains(i))
    }

    pub fn longest_run(&self) -> Option<(usize, usize)> {
        longest_run(&self.members)
    }

    pub fn density(&self) -> f64 {
        self.count() as f64 / self.horizon().max(1) as f64
    }

    pub fn window_family_member(&self, family: Family, params: &WindowParams) -> Result<FamilyVerdict> {
        let h = self.horizon();
        match family {
            Family::Thick if h < 4 * params.run_req => {
                return Err(Error::HorizonTooSmall(format!("THICK needs H >= 4 * run_req = {}, got {h}", 4 * params.run_req)))
            }
            Family::IapStar if h < 4 * params.m_max * params.m_max => {
                return Err(Error::HorizonTooSmall(format!(
                    "IAPSTAR needs H >= 4 * m_max^2 = {}, got {h}",
                    4 * params.m_max * params.m_max
                )))
            }
            _ => {}
        }
        let tail = params.tail_start.min(h);
        let (member, certificate) = match family {
            Family::Ud1 => {
                // best prefix density over n in [H/2, H]
                let mut count = self.members[..h / 2].iter().filter(|&&b| b).count();
                let mut best = (rat(0, 1), h / 2);
                for n in h / 2..=h {
                    if n > h / 2 {
                        count += self.members[n - 1] as usize;
                    }
                    if n > 0 {
                        let d = rat(count as i64, n as i64);
                        if d > best.0 {
                            best = (d, n);
                        }
                    }
                }
                (best.0 >= rat(1, 1) - params.theta, Certificate::Density { value: format_rational(&best.0), prefix: Some(best.1) })
            }
            Family::Thick => match self.longest_run() {
                Some((start, len)) if len >= params.run_req => (true, Certificate::Run { start, len: Some(len) }),
                other => (false, Certificate::LongestRun { len: other.map_or(0, |r| r.1) }),
            },
            Family::IapStar => {
                let missed = (1..=params.m_max).find_map(|m| {
                    let mut hit = vec![false; m];
                    for i in tail..h {
                        if self.members[i] {
                            hit[i % m] = true;
                        }
                    }
                    hit.iter().position(|&b| !b).map(|p| (p, m))
                });
                match missed {
                    Some((p, m)) => (false, Certificate::FailingAp { p, m }),
                    None => (true, Certificate::AllProgressionsHit { m_max: Some(params.m_max) }),
                }
            }
            Family::Infinite => match (tail..h).find(|&i| self.members[i]) {
                Some(index) => (true, Certificate::TailElement { index }),
                None => (false, Certificate::NoTailElement { tail_start: tail }),
            },
        };
        Ok(FamilyVerdict { family, member, mode: Mode::Windowed, certificate, params: Some(params.clone()) })
    }

    pub fn to_rle(&self) -> String {
        format!("window {}\n{}\n", self.horizon(), rle(&self.members))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InclusionAudit {
    pub verdicts: Vec<FamilyVerdict>,
    pub monotone: bool,
    /// Set when a windowed verdict breaks the inclusion chain.
    pub warning: Option<String>,
}

fn monotone(verdicts: &[FamilyVerdict]) -> Option<(Family, Family)> {
    verdicts.windows(2).find(|w| w[0].member && !w[1].member).map(|w| (w[0].family, w[1].family))
}

/// Exact verdicts for all four families; a stronger family holding without a weaker one
/// is an internal error.
pub fn inclusion_audit_exact(a: &EventuallyPeriodicSet) -> Result<InclusionAudit> {
    let verdicts: Vec<FamilyVerdict> = Family::ALL.iter().map(|&f| a.family_member(f)).collect();
    if let Some((s, w)) = monotone(&verdicts) {
        return Err(Error::MonotonicityBug(format!("{a} is in {s} but not in {w}")));
    }
    Ok(InclusionAudit { verdicts, monotone: true, warning: None })
}

/// Windowed verdicts; truncation can break the chain, which is reported, not raised.
pub fn inclusion_audit_window(w: &TimeSetWindow, params: &WindowParams) -> Result<InclusionAudit> {
    let verdicts = Family::ALL.iter().map(|&f| w.window_family_member(f, params)).collect::<Result<Vec<_>>>()?;
    let broken = monotone(&verdicts);
    Ok(InclusionAudit {
        monotone: broken.is_none(),
        warning: broken.map(|(s, w)| format!("windowed artifact: {s} holds but {w} fails at this horizon")),
        verdicts,
    })
}

/// `{i < H : frac(i alpha) in (1/4, 3/4)}`: visits of the rotation orbit of 0 to the
/// open half circle where `cos(2 pi x) < 0`.
pub fn rotation_time_set(alpha: &RealParam, horizon: usize) -> TimeSetWindow {
    let (q, h) = (rat(1, 4), rat(3, 4));
    match alpha.exact() {
        Some(a) => TimeSetWindow::from_fn(horizon, |i| {
            let x = a * rat(i as i64, 1);
            let frac = x - x.floor();
            frac > q && frac < h
        }),
        None => {
            let a = alpha.value();
            TimeSetWindow::from_fn(horizon, |i| {
                let frac = (i as f64 * a).rem_euclid(1.0);
                frac > q.to_f64().unwrap() && frac < h.to_f64().unwrap()
            })
        }
    }
}

fn rle(bits: &[bool]) -> String {
    let mut out = Vec::new();
    let mut i = 0;
    while i < bits.len() {
        let j = (i..bits.len()).find(|&j| bits[j] != bits[i]).unwrap_or(bits.len());
        out.push(format!("{}x{}", bits[i] as u8, j - i));
        i = j;
    }
    out.join(" ")
}

fn parse_runs(line: &str, lineno: usize) -> Result<Vec<bool>> {
    let mut out = Vec::new();
    for tok in line.split_whitespace() {
        let err = || Error::Parse { line: lineno, message: format!("bad run {tok:?}, expected <bit>x<count>") };
        let (b, n) = tok.split_once('x').ok_or_else(err)?;
        let bit = match b {
            "0" => false,
            "1" => true,
            _ => return Err(err()),
        };
        let n: usize = n.parse().map_err(|_| err())?;
        out.extend(std::iter::repeat_n(bit, n));
    }
    Ok(out)
}

/// A time set read from run-length text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TimeSet {
    Window(TimeSetWindow),
    EventuallyPeriodic(EventuallyPeriodicSet),
}

/// Parses
///
/// ```text
/// # comment
/// window 12
/// 1x5 0x3
/// 1x4
/// ```
///
/// or `eventually-periodic` followed by `pre <runs>` and `pat <runs>` lines.
pub fn parse_time_set(text: &str) -> Result<TimeSet> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty time-set file".into() })?;
    let mut words = header.split_whitespace();
    match words.next() {
        Some("window") => {
            let h: usize = words
                .next()
                .and_then(|w| w.parse().ok())
                .ok_or(Error::Parse { line: hl, message: "expected \"window <H>\"".into() })?;
            let mut members = Vec::with_capacity(h);
            let mut last = hl;
            for (ln, l) in lines {
                members.extend(parse_runs(l, ln)?);
                last = ln;
            }
            if members.len() != h {
                return Err(Error::Parse { line: last, message: format!("runs cover {} times, header says {h}", members.len()) });
            }
            Ok(TimeSet::Window(TimeSetWindow::new(members)))
        }
        Some("eventually-periodic") => {
            let (mut pre, mut pat) = (None, None);
            let mut last = hl;
            for (ln, l) in lines {
                let (key, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
                match key {
                    "pre" => pre = Some(parse_runs(rest, ln)?),
                    "pat" => pat = Some(parse_runs(rest, ln)?),
                    other => return Err(Error::Parse { line: ln, message: format!("unknown key {other:?}") }),
                }
                last = ln;
            }
            let pat = pat.filter(|p| !p.is_empty()).ok_or(Error::Parse { line: last, message: "missing nonempty pat line".into() })?;
            Ok(TimeSet::EventuallyPeriodic(EventuallyPeriodicSet::new(pre.unwrap_or_default(), pat)?))
        }
        _ => Err(Error::Parse { line: hl, message: "header must be \"window <H>\" or \"eventually-periodic\"".into() }),
    }
}
