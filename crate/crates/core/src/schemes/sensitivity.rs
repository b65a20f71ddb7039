//! Which correlations can make a scheme's PD nontrivial.
//!
//! The uncorrelated data is a tensor network: a state node `R` joined to one
//! node `W_q` per qudit by a bond of dimension `d²`, with each device's setting
//! leg ending on the row or column side of the square. The square's rank is
//! bounded by `d^c` where `c` is the minimum cut (in `log_d` units) separating
//! the two sides. A correlation adds bonds: `spam(q)` lets the state depend on
//! qudit `q`'s setting index, so that index becomes a copy node shared by `R`,
//! `W_q` and the side; `nonlocal(p,q)` fuses the two measurement nodes. The PD
//! stays trivial while the cut is at most `2k`.

use serde::{Deserialize, Serialize};

use crate::model::CorrelationKind;
use crate::schemes::{BracketScheme, Side};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensitivityProfile {
    pub sensitive_to: Vec<CorrelationKind>,
    pub insensitive_to: Vec<CorrelationKind>,
}

impl SensitivityProfile {
    pub fn is_sensitive_to(&self, kind: CorrelationKind) -> bool {
        self.sensitive_to.contains(&kind)
    }
}

const BOND: f64 = 2.0;
const FUSED: f64 = f64::INFINITY;

/// Minimum cut between the row and column sides, in `log_d` units.
pub fn min_cut(scheme: &BracketScheme, correlation: CorrelationKind) -> f64 {
    let m = scheme.m();
    let d = scheme.d() as f64;
    let leg = |settings: usize| (settings as f64).ln() / d.ln();
    // nodes: 0 = R, q+1 = W_q; terminal edges as (node, side, capacity)
    let mut terminal: Vec<(usize, Side, f64)> = vec![(0, Side::Row, leg(scheme.state().total(scheme.d())))];
    let mut internal: Vec<(usize, usize, f64)> = Vec::new();
    for q in 0..m {
        let (e, side) = scheme.qudit(q);
        terminal.push((q + 1, side, leg(e.total(scheme.d()))));
        internal.push((0, q + 1, BOND));
    }
    match correlation {
        CorrelationKind::None => {}
        CorrelationKind::Spam { qudit } => {
            let hub = m + 1;
            let c = terminal[qudit].2;
            terminal[qudit].0 = hub;
            internal.push((hub, qudit, c));
            internal.push((hub, 0, c));
        }
        CorrelationKind::Nonlocal { p, q } => {
            let exempt = |x: usize| scheme.qudit(x - 1).0.is_fixed();
            if !exempt(p) && !exempt(q) {
                internal.push((p, q, FUSED));
            }
        }
    }
    let nodes = terminal.iter().map(|t| t.0).max().unwrap_or(0) + 1;
    (0u64..1 << nodes)
        .map(|mask| {
            let on_row = |n: usize| mask >> n & 1 == 1;
            let t: f64 = terminal
                .iter()
                .filter(|&&(n, side, _)| on_row(n) != (side == Side::Row))
                .map(|&(_, _, c)| c)
                .sum();
            let i: f64 = internal
                .iter()
                .filter(|&&(a, b, _)| on_row(a) != on_row(b))
                .map(|&(_, _, c)| c)
                .sum();
            t + i
        })
        .fold(f64::INFINITY, f64::min)
}

/// Classifies every single correlation of the scheme's qudit count.
pub fn sensitivity(scheme: &BracketScheme) -> SensitivityProfile {
    let bound = 2.0 * scheme.class() as f64 + 1e-9;
    let (sensitive_to, insensitive_to) = CorrelationKind::all(scheme.m())
        .into_iter()
        .partition(|&kind| min_cut(scheme, kind) > bound);
    SensitivityProfile {
        sensitive_to,
        insensitive_to,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::enumerate;

    fn profile(text: &str, m: usize) -> SensitivityProfile {
        sensitivity(&BracketScheme::parse(text, m, 2).unwrap())
    }

    const SPAM1: CorrelationKind = CorrelationKind::Spam { qudit: 1 };
    const SPAM2: CorrelationKind = CorrelationKind::Spam { qudit: 2 };
    const SPAM3: CorrelationKind = CorrelationKind::Spam { qudit: 3 };
    const NL12: CorrelationKind = CorrelationKind::Nonlocal { p: 1, q: 2 };
    const NL13: CorrelationKind = CorrelationKind::Nonlocal { p: 1, q: 3 };
    const NL23: CorrelationKind = CorrelationKind::Nonlocal { p: 2, q: 3 };

    #[test]
    fn uncorrelated_cut_is_the_class() {
        for m in 2..=3 {
            for k in 1..=m {
                for s in enumerate(m, 2, k).unwrap().schemes {
                    let c = min_cut(&s, CorrelationKind::None);
                    assert!((c - 2.0 * k as f64).abs() < 1e-12, "{s}: {c}");
                }
            }
        }
    }

    #[test]
    fn displaced_state_sees_column_spam() {
        let p = profile("[2d^2;1:2d^2]", 2);
        assert!(!p.is_sensitive_to(SPAM1));
        assert!(p.is_sensitive_to(SPAM2));
        let p = profile("(12)[2d^2;1:2d^2]", 2);
        assert!(p.is_sensitive_to(SPAM1));
        assert!(!p.is_sensitive_to(SPAM2));
    }

    #[test]
    fn generic_is_blind_to_nonlocality() {
        let p = profile("[2d^4:2d^2,d^2]", 2);
        assert!(!p.is_sensitive_to(NL12));
        let p = profile("[2d^6:2d^2,d^2,d^2]", 3);
        for kind in [NL12, NL13, NL23] {
            assert!(!p.is_sensitive_to(kind));
        }
    }

    #[test]
    fn row_nonlocality_detected_across_the_colon() {
        assert!(profile("[d^2;2:2d^2]", 2).is_sensitive_to(NL12));
    }

    #[test]
    fn three_qudit_class_two() {
        for text in ["[2d^4;1:2d^2,d^2]", "[d^3;2d:2d^2,d^2]", "[2d^2;d^2:2d^2,d^2]"] {
            let p = profile(text, 3);
            assert!(!p.is_sensitive_to(NL23), "{text}");
            assert!(!p.is_sensitive_to(SPAM1), "{text}");
            assert!(p.is_sensitive_to(SPAM2), "{text}");
            assert!(!p.is_sensitive_to(SPAM3), "{text}");
        }
        for text in ["[2d^3;d:2d^2,d^2]", "[d^2;2d^2:2d^2,d^2]", "[d^3;2d:2d^2,d^2]"] {
            let p = profile(text, 3);
            assert!(p.is_sensitive_to(NL12), "{text}");
            // the undisplaced column qudit's leg is as cheap to cut as its bond
            assert!(!p.is_sensitive_to(NL13), "{text}");
        }
    }

    #[test]
    fn three_qudit_class_one() {
        let p = profile("[1;2d,d:2d^2]", 3);
        assert!(!p.is_sensitive_to(SPAM1));
        assert!(!p.is_sensitive_to(SPAM2));
        assert!(!p.is_sensitive_to(NL12));
        assert!(p.is_sensitive_to(SPAM3));
        assert!(p.is_sensitive_to(NL13));
        assert!(p.is_sensitive_to(NL23));
    }
}
