//! Corner and square templates of a class and their distinct qudit
//! permutations.

use std::collections::HashMap;

use crate::schemes::{BracketScheme, Entry, Permutation, SchemeError, Side};

/// `½m(7m²−12m+7)`, the number of class-1 schemes on `m` qudits.
pub fn k1_count(m: u64) -> u64 {
    m * (7 * m * m + 7 - 12 * m) / 2
}

/// One way to displace a corner, with the number of distinct permutations.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareTemplate {
    /// Index into [`EnumerationReport::corners`].
    pub corner: usize,
    pub template: BracketScheme,
    pub variants: usize,
    /// Number of qudit permutations that leave the scheme unchanged.
    pub stabilizer: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationReport {
    pub m: usize,
    pub d: usize,
    pub k: usize,
    /// Undisplaced corner templates, e.g. `[d;d,1:d^2]`.
    pub corners: Vec<String>,
    pub squares: Vec<SquareTemplate>,
    /// Every distinct scheme, grouped by square template.
    pub schemes: Vec<BracketScheme>,
    pub symmetry_notes: Vec<String>,
}

impl EnumerationReport {
    pub fn count(&self) -> usize {
        self.schemes.len()
    }
}

/// Nonincreasing sequences of `len` powers in `{0,1,2}` summing to `total`
/// with at most two nonzero.
fn left_powers(len: usize, total: u32) -> Vec<Vec<u32>> {
    fn rec(len: usize, total: u32, cap: u32, active: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == len {
            if total == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for v in (0..=cap.min(total)).rev() {
            if v > 0 && active == 2 {
                continue;
            }
            prefix.push(v);
            rec(len, total - v, v, active + usize::from(v > 0), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, total, 2, 0, &mut Vec::new(), &mut out);
    out
}

fn is_active(e: &Entry) -> bool {
    e.doubled || e.power > 0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Role {
    Fixed,
    Left(Entry),
    Right(Entry),
}

/// What distinguishes two permutations of a template: each qudit's role.
fn role_key(scheme: &BracketScheme) -> Vec<Role> {
    let left_doubled = scheme.left().iter().find(|e| e.doubled).copied();
    let right_doubled = scheme.right().iter().find(|e| e.doubled).copied();
    // an undisplaced state lets the displaced left and right devices trade
    // places, which transposes the square
    let swappable = !scheme.state().doubled && left_doubled.is_some() && left_doubled == right_doubled;
    (0..scheme.m())
        .map(|q| {
            let (e, side) = scheme.qudit(q);
            match side {
                _ if e.is_fixed() => Role::Fixed,
                Side::Row => Role::Left(e),
                Side::Col if swappable && Some(e) == right_doubled => Role::Left(e),
                Side::Col => Role::Right(e),
            }
        })
        .collect()
}

/// Distinct permutations of a template, each represented by the permutation
/// moving the fewest qudits (ties broken lexicographically).
fn orbit(template: &BracketScheme, perms: &[Permutation]) -> (Vec<BracketScheme>, usize) {
    let mut best: HashMap<Vec<Role>, Permutation> = HashMap::new();
    let identity_key = role_key(template);
    let mut stabilizer = 0;
    for p in perms {
        let scheme = template.with_permutation(p.clone()).expect("template is valid");
        let key = role_key(&scheme);
        if key == identity_key {
            stabilizer += 1;
        }
        best.entry(key)
            .and_modify(|cur| {
                if (p.moved_points(), p.image()) < (cur.moved_points(), cur.image()) {
                    *cur = p.clone();
                }
            })
            .or_insert_with(|| p.clone());
    }
    let mut reps: Vec<Permutation> = best.into_values().collect();
    reps.sort_by(|a, b| (a.moved_points(), a.image()).cmp(&(b.moved_points(), b.image())));
    let schemes = reps
        .into_iter()
        .map(|p| template.with_permutation(p).expect("template is valid"))
        .collect();
    (schemes, stabilizer)
}

/// All class-`k` schemes on `m` qudits of dimension `d`.
///
/// Corners take `d²` settings on each of the `k` column qudits and split
/// `d^{2k}` row settings between the state and at most two measurement
/// qudits (each contributing `1`, `d` or `d²`). A square displaces either the
/// state or one left device, and always the first column qudit. Permutation
/// variants are counted once per orbit of qudit roles.
pub fn enumerate(m: usize, d: usize, k: usize) -> Result<EnumerationReport, SchemeError> {
    if k == 0 || k > m {
        return Err(SchemeError::BadClass { k, m });
    }
    if d < 2 {
        return Err(SchemeError::BadDimension(d));
    }
    let perms = Permutation::all(m);
    let right: Vec<Entry> = std::iter::once(Entry::double(2))
        .chain(std::iter::repeat_n(Entry::plain(2), k - 1))
        .collect();
    let total = 2 * k as u32;
    let mut corners = Vec::new();
    let mut squares = Vec::new();
    let mut schemes = Vec::new();
    let mut symmetry_notes = Vec::new();
    for e0 in (0..=total).rev() {
        for powers in left_powers(m - k, total - e0) {
            let left: Vec<Entry> = powers.iter().map(|&p| Entry::plain(p)).collect();
            let corner_index = corners.len();
            let corner_right = vec![Entry::plain(2); k];
            corners.push(format_corner(Entry::plain(e0), &left, &corner_right));

            let mut displaced: Vec<(Entry, Vec<Entry>)> = vec![(Entry::double(e0), left.clone())];
            let mut seen = Vec::new();
            for (i, e) in left.iter().enumerate() {
                if seen.contains(e) {
                    continue;
                }
                seen.push(*e);
                let mut l = left.clone();
                l[i] = Entry::double(e.power);
                if l.iter().filter(|e| is_active(e)).count() <= 2 {
                    displaced.push((Entry::plain(e0), l));
                }
            }
            for (state, l) in displaced {
                let template =
                    BracketScheme::new(m, d, state, l, right.clone(), Permutation::identity(m))?;
                let (variants, stabilizer) = orbit(&template, &perms);
                if stabilizer > 1 && has_cross_symmetry(&template) {
                    symmetry_notes.push(format!(
                        "{template}: the displaced row and column qudits are interchangeable, variants counted once"
                    ));
                }
                squares.push(SquareTemplate {
                    corner: corner_index,
                    template,
                    variants: variants.len(),
                    stabilizer,
                });
                schemes.extend(variants);
            }
        }
    }
    Ok(EnumerationReport {
        m,
        d,
        k,
        corners,
        squares,
        schemes,
        symmetry_notes,
    })
}

fn has_cross_symmetry(template: &BracketScheme) -> bool {
    let key = role_key(template);
    let left_doubled = template.left().iter().find(|e| e.doubled);
    left_doubled.is_some_and(|e| key.iter().filter(|&&r| r == Role::Left(*e)).count() == 2)
}

fn format_corner(state: Entry, left: &[Entry], right: &[Entry]) -> String {
    let list = |v: &[Entry]| v.iter().map(Entry::to_string).collect::<Vec<_>>().join(",");
    if left.is_empty() {
        format!("[{state}:{}]", list(right))
    } else {
        format!("[{state};{}:{}]", list(left), list(right))
    }
}
