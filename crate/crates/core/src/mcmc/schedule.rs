//! Kernel kinds and the iteration-dependent mixture over them.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelKind {
    Add,
    Remove,
    Split,
    Merge,
    Shrink,
    Dilate,
    Allocate,
    Delete,
}

impl KernelKind {
    pub const ALL: [KernelKind; 8] = [
        KernelKind::Add,
        KernelKind::Remove,
        KernelKind::Split,
        KernelKind::Merge,
        KernelKind::Shrink,
        KernelKind::Dilate,
        KernelKind::Allocate,
        KernelKind::Delete,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Add => "add",
            KernelKind::Remove => "remove",
            KernelKind::Split => "split",
            KernelKind::Merge => "merge",
            KernelKind::Shrink => "shrink",
            KernelKind::Dilate => "dilate",
            KernelKind::Allocate => "allocate",
            KernelKind::Delete => "delete",
        }
    }

    pub fn from_name(name: &str) -> Option<KernelKind> {
        KernelKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// The kernel that undoes this one.
    pub fn reverse(self) -> KernelKind {
        match self {
            KernelKind::Add => KernelKind::Remove,
            KernelKind::Remove => KernelKind::Add,
            KernelKind::Split => KernelKind::Merge,
            KernelKind::Merge => KernelKind::Split,
            KernelKind::Shrink => KernelKind::Dilate,
            KernelKind::Dilate => KernelKind::Shrink,
            KernelKind::Allocate => KernelKind::Delete,
            KernelKind::Delete => KernelKind::Allocate,
        }
    }
}

/// Kernel probabilities in force up to and including iteration `until`
/// (`None` for the open-ended last phase).
#[derive(Clone, Debug, PartialEq)]
pub struct Phase {
    pub until: Option<u64>,
    /// Indexed by [`KernelKind::index`].
    pub probabilities: [f64; 8],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    phases: Vec<Phase>,
}

impl Schedule {
    pub fn new(phases: Vec<Phase>) -> Result<Self, Error> {
        if phases.is_empty() {
            return Err(Error::InvalidParameter("schedule needs at least one phase"));
        }
        for (i, p) in phases.iter().enumerate() {
            if p.probabilities.iter().any(|&q| !(0.0..=1.0).contains(&q)) {
                return Err(Error::InvalidParameter("kernel probabilities must lie in [0, 1]"));
            }
            let sum: f64 = p.probabilities.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter("kernel probabilities of a phase must sum to 1"));
            }
            let last = i + 1 == phases.len();
            match (p.until, last) {
                (None, true) => {}
                (Some(_), true) | (None, false) => {
                    return Err(Error::InvalidParameter("only the last phase is open-ended"));
                }
                (Some(b), false) => {
                    if i > 0 && phases[i - 1].until.is_some_and(|prev| prev >= b) {
                        return Err(Error::InvalidParameter("phase bounds must strictly increase"));
                    }
                }
            }
        }
        Ok(Self { phases })
    }

    pub fn phases(&self) -> &[Phase] {
        &self.phases
    }

    /// The phase containing iteration `beta` (counted from 1).
    pub fn phase(&self, beta: u64) -> &Phase {
        self.phases
            .iter()
            .find(|p| p.until.is_none_or(|b| beta <= b))
            .expect("last phase is open-ended")
    }

    pub fn probability(&self, beta: u64, kind: KernelKind) -> f64 {
        self.phase(beta).probabilities[kind.index()]
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            phases: vec![
                Phase {
                    until: Some(1000),
                    probabilities: [0.8, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
                },
                Phase {
                    until: Some(4000),
                    probabilities: [0.05, 0.05, 0.2, 0.2, 0.25, 0.25, 0.0, 0.0],
                },
                Phase {
                    until: None,
                    probabilities: [0.05, 0.05, 0.2, 0.2, 0.2, 0.2, 0.05, 0.05],
                },
            ],
        }
    }
}

/// Draws the kernel for iteration `beta`.
pub fn select_kernel<R: Rng + ?Sized>(schedule: &Schedule, beta: u64, rng: &mut R) -> KernelKind {
    let probs = &schedule.phase(beta).probabilities;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = KernelKind::Add;
    for kind in KernelKind::ALL {
        let p = probs[kind.index()];
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = kind;
        if u < acc {
            return kind;
        }
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    #[test]
    fn default_schedule_phases() {
        let s = Schedule::default();
        assert_eq!(s.probability(500, KernelKind::Add), 0.8);
        assert_eq!(s.probability(1000, KernelKind::Remove), 0.2);
        assert_eq!(s.probability(1001, KernelKind::Shrink), 0.25);
        assert_eq!(s.probability(2000, KernelKind::Allocate), 0.0);
        assert_eq!(s.probability(4000, KernelKind::Dilate), 0.25);
        assert_eq!(s.probability(4001, KernelKind::Allocate), 0.05);
        assert_eq!(s.probability(u64::MAX, KernelKind::Delete), 0.05);
        assert!(Schedule::new(s.phases().to_vec()).is_ok());
    }

    #[test]
    fn zero_probability_kernels_are_never_drawn() {
        let s = Schedule::default();
        let mut rng = seeded_rng(5);
        for _ in 0..20_000 {
            let k = select_kernel(&s, 2000, &mut rng);
            assert!(k != KernelKind::Allocate && k != KernelKind::Delete);
            let k = select_kernel(&s, 10, &mut rng);
            assert!(k == KernelKind::Add || k == KernelKind::Remove);
        }
    }

    #[test]
    fn invalid_schedules() {
        let p = |until, probabilities| Phase { until, probabilities };
        let ok = [0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert!(Schedule::new(vec![]).is_err());
        assert!(Schedule::new(vec![p(Some(10), ok)]).is_err());
        assert!(Schedule::new(vec![p(None, [0.5; 8])]).is_err());
        assert!(Schedule::new(vec![p(Some(10), ok), p(Some(10), ok), p(None, ok)]).is_err());
        assert!(Schedule::new(vec![p(None, ok), p(None, ok)]).is_err());
        assert!(Schedule::new(vec![p(Some(10), ok), p(None, ok)]).is_ok());
    }

    #[test]
    fn names_round_trip_and_pairs() {
        for k in KernelKind::ALL {
            assert_eq!(KernelKind::from_name(k.name()), Some(k));
            assert_eq!(k.reverse().reverse(), k);
            assert_ne!(k.reverse(), k);
        }
    }
}
