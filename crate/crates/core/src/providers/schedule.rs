//! Target availability over simulated time.
//!
//! Time is integer seconds from the campaign epoch, which is midnight of
//! day 0. A schedule is a set of non-overlapping windows, either absolute or
//! recurring daily; any instant outside every window is `Available`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SECONDS_PER_DAY: u64 = 86_400;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("windows {0} and {1} overlap")]
    Overlap(usize, usize),
    #[error("window {0} is empty or malformed")]
    Empty(usize),
    #[error("degraded semantics given for a non-degraded state")]
    StraySemantics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AvailabilityState {
    Available,
    Degraded,
    Unavailable,
}

impl AvailabilityState {
    pub fn as_str(self) -> &'static str {
        match self {
            AvailabilityState::Available => "available",
            AvailabilityState::Degraded => "degraded",
            AvailabilityState::Unavailable => "unavailable",
        }
    }
}

impl std::fmt::Display for AvailabilityState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for AvailabilityState {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            AvailabilityState::Available,
            AvailabilityState::Degraded,
            AvailabilityState::Unavailable,
        ]
        .into_iter()
        .find(|st| st.as_str().eq_ignore_ascii_case(s))
        .ok_or_else(|| format!("unknown availability state {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegradedSemantics {
    /// Submissions are accepted but held until the target is available again.
    AcceptHold,
    /// Jobs run, but only on a reduced register.
    ReducedCapacity { max_width: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TargetStatus {
    pub state: AvailabilityState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degraded_semantics: Option<DegradedSemantics>,
}

impl TargetStatus {
    pub const AVAILABLE: TargetStatus = TargetStatus {
        state: AvailabilityState::Available,
        degraded_semantics: None,
    };
    pub const UNAVAILABLE: TargetStatus = TargetStatus {
        state: AvailabilityState::Unavailable,
        degraded_semantics: None,
    };

    pub fn degraded(semantics: DegradedSemantics) -> Self {
        TargetStatus {
            state: AvailabilityState::Degraded,
            degraded_semantics: Some(semantics),
        }
    }

    pub fn validate(&self) -> Result<(), ScheduleError> {
        match (self.state, self.degraded_semantics) {
            (AvailabilityState::Degraded, _) | (_, None) => Ok(()),
            _ => Err(ScheduleError::StraySemantics),
        }
    }

    pub fn accepts_jobs(&self) -> bool {
        self.state != AvailabilityState::Unavailable
    }

    /// Whether queued jobs make progress in this state.
    pub fn processes_jobs(&self) -> bool {
        match self.state {
            AvailabilityState::Available => true,
            AvailabilityState::Unavailable => false,
            AvailabilityState::Degraded => !matches!(
                self.degraded_semantics,
                None | Some(DegradedSemantics::AcceptHold)
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Span {
    /// `[start, end)`; open-ended when `end` is absent.
    Absolute { start: u64, end: Option<u64> },
    /// Every day from `start` to `end` seconds after midnight, wrapping past
    /// midnight when `end < start`.
    Daily { start: u64, end: u64 },
}

impl Span {
    fn contains(&self, t: u64) -> bool {
        match *self {
            Span::Absolute { start, end } => t >= start && end.is_none_or(|e| t < e),
            Span::Daily { start, end } => {
                let s = t % SECONDS_PER_DAY;
                if start < end {
                    s >= start && s < end
                } else {
                    s >= start || s < end
                }
            }
        }
    }

    fn is_valid(&self) -> bool {
        match *self {
            Span::Absolute { start, end } => end.is_none_or(|e| e > start),
            Span::Daily { start, end } => {
                start != end && start < SECONDS_PER_DAY && end <= SECONDS_PER_DAY
            }
        }
    }

    /// Boundaries (starts and ends) in `(after, until]`.
    fn boundaries(&self, after: u64, until: u64, out: &mut Vec<u64>) {
        match *self {
            Span::Absolute { start, end } => {
                out.extend(
                    [Some(start), end]
                        .into_iter()
                        .flatten()
                        .filter(|&b| b > after && b <= until),
                );
            }
            Span::Daily { start, end } => {
                let first_day = after / SECONDS_PER_DAY;
                let last_day = until / SECONDS_PER_DAY;
                for day in first_day..=last_day {
                    for off in [start, end % SECONDS_PER_DAY] {
                        let b = day * SECONDS_PER_DAY + off;
                        if b > after && b <= until {
                            out.push(b);
                        }
                    }
                }
            }
        }
    }

    /// Half-open intervals covered within `[from, to)`.
    fn intervals(&self, from: u64, to: u64) -> Vec<(u64, u64)> {
        let clip = |s: u64, e: u64| (s.max(from) < e.min(to)).then(|| (s.max(from), e.min(to)));
        match *self {
            Span::Absolute { start, end } => {
                clip(start, end.unwrap_or(u64::MAX)).into_iter().collect()
            }
            Span::Daily { start, end } => {
                let day = SECONDS_PER_DAY as i128;
                let (start, end) = (start as i128, end as i128);
                let mut v = Vec::new();
                // Day -1 matters for spans that wrap into day 0.
                for d in (from as i128 / day - 1)..=(to as i128 / day) {
                    let s = d * day + start;
                    let e = if start < end {
                        d * day + end
                    } else {
                        (d + 1) * day + end
                    };
                    let (s, e) = (s.max(0) as u64, e.max(0) as u64);
                    v.extend(clip(s, e));
                }
                v
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub span: Span,
    pub status: TargetStatus,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Window>", into = "Vec<Window>")]
pub struct Schedule {
    windows: Vec<Window>,
}

impl TryFrom<Vec<Window>> for Schedule {
    type Error = ScheduleError;
    fn try_from(w: Vec<Window>) -> Result<Self, Self::Error> {
        Schedule::new(w)
    }
}

impl From<Schedule> for Vec<Window> {
    fn from(s: Schedule) -> Self {
        s.windows
    }
}

impl Schedule {
    pub fn new(windows: Vec<Window>) -> Result<Self, ScheduleError> {
        for (i, w) in windows.iter().enumerate() {
            if !w.span.is_valid() {
                return Err(ScheduleError::Empty(i));
            }
            w.status.validate()?;
        }
        // Any overlap between two windows shows up within two days after the
        // later of their first boundaries.
        for i in 0..windows.len() {
            for j in i + 1..windows.len() {
                if overlaps(&windows[i].span, &windows[j].span) {
                    return Err(ScheduleError::Overlap(i, j));
                }
            }
        }
        Ok(Schedule { windows })
    }

    /// Target that is always available.
    pub fn always_available() -> Self {
        Schedule::default()
    }

    pub fn always(status: TargetStatus) -> Self {
        Schedule::new(vec![Window {
            span: Span::Absolute {
                start: 0,
                end: None,
            },
            status,
        }])
        .expect("single window")
    }

    /// Status recurring daily between two times of day (seconds after midnight).
    pub fn daily(start: u64, end: u64, status: TargetStatus) -> Result<Self, ScheduleError> {
        Schedule::new(vec![Window {
            span: Span::Daily { start, end },
            status,
        }])
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn status_at(&self, t: u64) -> TargetStatus {
        self.windows
            .iter()
            .find(|w| w.span.contains(t))
            .map(|w| w.status)
            .unwrap_or(TargetStatus::AVAILABLE)
    }

    /// Earliest instant `>= t` at which queued jobs make progress, or `None`
    /// if the target never processes again.
    pub fn next_processing_time(&self, t: u64) -> Option<u64> {
        if self.status_at(t).processes_jobs() {
            return Some(t);
        }
        let last_abs = self
            .windows
            .iter()
            .filter_map(|w| match w.span {
                Span::Absolute { start, end } => Some(end.unwrap_or(start)),
                Span::Daily { .. } => None,
            })
            .max()
            .unwrap_or(0);
        let horizon = t.max(last_abs).saturating_add(2 * SECONDS_PER_DAY);
        let mut bounds = Vec::new();
        for w in &self.windows {
            w.span.boundaries(t, horizon, &mut bounds);
        }
        bounds.sort_unstable();
        bounds.dedup();
        bounds
            .into_iter()
            .find(|&b| self.status_at(b).processes_jobs())
    }

    /// Seconds spent in each state over `[from, to)`.
    pub fn time_in_states(&self, from: u64, to: u64) -> [(AvailabilityState, u64); 3] {
        let mut degraded = 0;
        let mut unavailable = 0;
        for w in &self.windows {
            let covered: u64 = w.span.intervals(from, to).iter().map(|(s, e)| e - s).sum();
            match w.status.state {
                AvailabilityState::Degraded => degraded += covered,
                AvailabilityState::Unavailable => unavailable += covered,
                AvailabilityState::Available => {}
            }
        }
        let total = to.saturating_sub(from);
        [
            (AvailabilityState::Available, total - degraded - unavailable),
            (AvailabilityState::Degraded, degraded),
            (AvailabilityState::Unavailable, unavailable),
        ]
    }
}

fn overlaps(a: &Span, b: &Span) -> bool {
    let from = |s: &Span| match *s {
        Span::Absolute { start, .. } => start,
        Span::Daily { .. } => 0,
    };
    let lo = from(a).min(from(b));
    let hi = from(a).max(from(b)) + 2 * SECONDS_PER_DAY;
    let ia = a.intervals(lo, hi);
    let ib = b.intervals(lo, hi);
    ia.iter()
        .any(|&(s1, e1)| ib.iter().any(|&(s2, e2)| s1 < e2 && s2 < e1))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HOUR: u64 = 3600;

    /// Degraded except between 17:00 and 02:00.
    fn nightly() -> Schedule {
        Schedule::daily(
            2 * HOUR,
            17 * HOUR,
            TargetStatus::degraded(DegradedSemantics::AcceptHold),
        )
        .unwrap()
    }

    #[test]
    fn always_available_everywhere() {
        let s = Schedule::always_available();
        for t in [0, 1, 12345, 90 * SECONDS_PER_DAY] {
            assert_eq!(s.status_at(t), TargetStatus::AVAILABLE);
        }
    }

    #[test]
    fn always_unavailable_everywhere() {
        let s = Schedule::always(TargetStatus::UNAVAILABLE);
        assert_eq!(s.status_at(0), TargetStatus::UNAVAILABLE);
        assert_eq!(s.status_at(77 * SECONDS_PER_DAY), TargetStatus::UNAVAILABLE);
        assert_eq!(s.next_processing_time(10), None);
    }

    #[test]
    fn nightly_window() {
        let s = nightly();
        let at = |day: u64, h: u64| s.status_at(day * SECONDS_PER_DAY + h * HOUR).state;
        assert_eq!(at(0, 1), AvailabilityState::Available);
        assert_eq!(at(0, 2), AvailabilityState::Degraded);
        assert_eq!(at(3, 9), AvailabilityState::Degraded);
        assert_eq!(at(3, 17), AvailabilityState::Available);
        assert_eq!(at(3, 23), AvailabilityState::Available);
        assert_eq!(s.next_processing_time(9 * HOUR), Some(17 * HOUR));
        assert_eq!(s.next_processing_time(18 * HOUR), Some(18 * HOUR));
    }

    #[test]
    fn next_processing_after_absolute_outage() {
        let s = Schedule::new(vec![Window {
            span: Span::Absolute {
                start: 100,
                end: Some(500),
            },
            status: TargetStatus::UNAVAILABLE,
        }])
        .unwrap();
        assert_eq!(s.next_processing_time(50), Some(50));
        assert_eq!(s.next_processing_time(100), Some(500));
        assert_eq!(s.next_processing_time(499), Some(500));
    }

    #[test]
    fn reduced_capacity_still_processes() {
        let s = Schedule::always(TargetStatus::degraded(DegradedSemantics::ReducedCapacity {
            max_width: 4,
        }));
        assert_eq!(s.next_processing_time(42), Some(42));
    }

    #[test]
    fn overlapping_windows_rejected() {
        let w = |span| Window {
            span,
            status: TargetStatus::UNAVAILABLE,
        };
        assert_eq!(
            Schedule::new(vec![
                w(Span::Daily {
                    start: 22 * HOUR,
                    end: 2 * HOUR
                }),
                w(Span::Daily {
                    start: HOUR,
                    end: 3 * HOUR
                }),
            ]),
            Err(ScheduleError::Overlap(0, 1))
        );
        assert_eq!(
            Schedule::new(vec![
                w(Span::Absolute {
                    start: 5 * SECONDS_PER_DAY + 3 * HOUR,
                    end: Some(5 * SECONDS_PER_DAY + 4 * HOUR)
                }),
                w(Span::Daily {
                    start: 2 * HOUR,
                    end: 17 * HOUR
                }),
            ]),
            Err(ScheduleError::Overlap(0, 1))
        );
        assert!(Schedule::new(vec![
            w(Span::Absolute {
                start: 0,
                end: Some(HOUR)
            }),
            w(Span::Daily {
                start: 2 * HOUR,
                end: 17 * HOUR
            }),
        ])
        .is_ok());
        assert_eq!(
            Schedule::new(vec![w(Span::Absolute {
                start: 5,
                end: Some(5)
            })]),
            Err(ScheduleError::Empty(0))
        );
    }

    #[test]
    fn stray_semantics_rejected() {
        let bad = TargetStatus {
            state: AvailabilityState::Available,
            degraded_semantics: Some(DegradedSemantics::AcceptHold),
        };
        assert_eq!(bad.validate(), Err(ScheduleError::StraySemantics));
    }

    #[test]
    fn time_fractions() {
        let s = nightly();
        let t = s.time_in_states(0, 10 * SECONDS_PER_DAY);
        assert_eq!(t[1].1, 10 * 15 * HOUR);
        assert_eq!(t[0].1, 10 * 9 * HOUR);
        let wrap = Schedule::daily(22 * HOUR, 2 * HOUR, TargetStatus::UNAVAILABLE).unwrap();
        let t = wrap.time_in_states(0, 2 * SECONDS_PER_DAY);
        assert_eq!(t[2].1, 2 * HOUR + 4 * HOUR + 2 * HOUR);
    }
}
