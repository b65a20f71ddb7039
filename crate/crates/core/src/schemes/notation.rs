//! Bracket notation: `(12)[d^2;2:2d^2]`.

use std::fmt;

use crate::schemes::SchemeError;

/// One bracket entry: `d^power` settings, doubled (`2d^power`) when the device
/// displaces the corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Entry {
    pub doubled: bool,
    pub power: u32,
}

impl Entry {
    pub const ONE: Entry = Entry::plain(0);

    pub const fn plain(power: u32) -> Self {
        Self {
            doubled: false,
            power,
        }
    }

    pub const fn double(power: u32) -> Self {
        Self {
            doubled: true,
            power,
        }
    }

    /// Settings per corner block.
    pub fn block_size(&self, d: usize) -> usize {
        d.pow(self.power)
    }

    /// Settings used across the whole square.
    pub fn total(&self, d: usize) -> usize {
        self.block_size(d) * if self.doubled { 2 } else { 1 }
    }

    /// An undoubled `1`: a single fixed setting.
    pub fn is_fixed(&self) -> bool {
        !self.doubled && self.power == 0
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.doubled, self.power) {
            (false, 0) => write!(f, "1"),
            (true, 0) => write!(f, "2"),
            (dbl, 1) => write!(f, "{}d", if dbl { "2" } else { "" }),
            (dbl, p) => write!(f, "{}d^{p}", if dbl { "2" } else { "" }),
        }
    }
}

/// A permutation of qudit positions, stored 0-based as `image[p] = π(p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(m: usize) -> Self {
        Self {
            image: (0..m).collect(),
        }
    }

    pub fn from_image(image: Vec<usize>) -> Result<Self, SchemeError> {
        let mut seen = vec![false; image.len()];
        for &i in &image {
            if i >= image.len() || seen[i] {
                return Err(SchemeError::BadPermutation(format!("{image:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Self { image })
    }

    /// From 1-based cycles on `m` points.
    pub fn from_cycles(m: usize, cycles: &[Vec<usize>]) -> Result<Self, SchemeError> {
        let mut image: Vec<usize> = (0..m).collect();
        let mut used = vec![false; m];
        for cycle in cycles {
            for (i, &label) in cycle.iter().enumerate() {
                if label == 0 || label > m {
                    return Err(SchemeError::BadPermutation(format!(
                        "label {label} outside 1..={m}"
                    )));
                }
                if used[label - 1] {
                    return Err(SchemeError::BadPermutation(format!("label {label} repeated")));
                }
                used[label - 1] = true;
                image[label - 1] = cycle[(i + 1) % cycle.len()] - 1;
            }
        }
        Ok(Self { image })
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, p: usize) -> usize {
        self.image[p]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(p, &q)| p == q)
    }

    pub fn moved_points(&self) -> usize {
        self.image.iter().enumerate().filter(|&(p, &q)| p != q).count()
    }

    pub fn inverse(&self) -> Self {
        let mut image = vec![0; self.image.len()];
        for (p, &q) in self.image.iter().enumerate() {
            image[q] = p;
        }
        Self { image }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            image: other.image.iter().map(|&q| self.image[q]).collect(),
        }
    }

    /// Nontrivial cycles, 1-based, each led by its smallest label.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.image.len()];
        let mut out = Vec::new();
        for start in 0..self.image.len() {
            if seen[start] || self.image[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                cycle.push(p + 1);
                p = self.image[p];
            }
            out.push(cycle);
        }
        out
    }

    /// Every permutation of `m` points, in lexicographic order of images.
    pub fn all(m: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..m).collect();
        loop {
            out.push(Self {
                image: current.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (0..m.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
                break;
            };
            let j = (i + 1..m).rev().find(|&j| current[j] > current[i]).expect("exists");
            current.swap(i, j);
            current[i + 1..].reverse();
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.image.len() > 9 { "," } else { "" };
        for cycle in self.cycles() {
            let labels: Vec<String> = cycle.iter().map(usize::to_string).collect();
            write!(f, "({})", labels.join(sep))?;
        }
        Ok(())
    }
}

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    at: usize,
    text: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            chars: text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(),
            at: 0,
            text,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).map(|&(_, c)| c)
    }

    fn position(&self) -> usize {
        self.chars.get(self.at).map_or(self.text.len(), |&(i, _)| i)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        self.at += 1;
        c
    }

    fn error(&self, message: impl Into<String>) -> SchemeError {
        SchemeError::Parse {
            position: self.position(),
            message: message.into(),
        }
    }

    fn expect(&mut self, want: char) -> Result<(), SchemeError> {
        match self.peek() {
            Some(c) if c == want => {
                self.at += 1;
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected '{want}', found '{c}'"))),
            None => Err(self.error(format!("expected '{want}', found end of input"))),
        }
    }

    fn digits(&mut self) -> Option<u32> {
        let mut value: Option<u32> = None;
        while let Some(c) = self.peek().and_then(|c| c.to_digit(10)) {
            value = Some(value.unwrap_or(0).saturating_mul(10).saturating_add(c));
            self.at += 1;
        }
        value
    }
}

fn superscript(c: char) -> Option<u32> {
    match c {
        '⁰' => Some(0),
        '¹' => Some(1),
        '²' => Some(2),
        '³' => Some(3),
        '⁴' => Some(4),
        '⁵' => Some(5),
        '⁶' => Some(6),
        '⁷' => Some(7),
        '⁸' => Some(8),
        '⁹' => Some(9),
        _ => None,
    }
}

fn parse_entry(cur: &mut Cursor<'_>) -> Result<Entry, SchemeError> {
    let doubled = match cur.peek() {
        Some('2') => {
            cur.bump();
            true
        }
        Some('1') => {
            cur.bump();
            return Ok(Entry::ONE);
        }
        _ => false,
    };
    if cur.peek() != Some('d') {
        if doubled {
            return Ok(Entry::double(0));
        }
        return Err(cur.error("expected an entry (1, 2, d, 2d, d^n, 2d^n)"));
    }
    cur.bump();
    let power = if cur.peek() == Some('^') {
        cur.bump();
        cur.digits().ok_or_else(|| cur.error("expected an exponent after '^'"))?
    } else if cur.peek().and_then(superscript).is_some() {
        let mut p = 0;
        while let Some(v) = cur.peek().and_then(superscript) {
            p = p * 10 + v;
            cur.bump();
        }
        p
    } else {
        1
    };
    Ok(Entry { doubled, power })
}

fn parse_list(cur: &mut Cursor<'_>) -> Result<Vec<Entry>, SchemeError> {
    let mut out = vec![parse_entry(cur)?];
    while cur.peek() == Some(',') {
        cur.bump();
        out.push(parse_entry(cur)?);
    }
    Ok(out)
}

fn parse_cycle(cur: &mut Cursor<'_>) -> Result<Vec<usize>, SchemeError> {
    cur.expect('(')?;
    let from = cur.position();
    let rest = &cur.text[from..];
    let close = rest.find(')').ok_or_else(|| cur.error("unterminated cycle"))?;
    let inner = rest[..close].trim();
    let mut labels = Vec::new();
    if inner.contains(|c: char| c == ',' || c.is_whitespace()) {
        for token in inner.split(|c: char| c == ',' || c.is_whitespace()) {
            if !token.is_empty() {
                let label = token
                    .parse::<usize>()
                    .map_err(|_| cur.error(format!("bad label '{token}'")))?;
                labels.push(label);
            }
        }
    } else {
        for c in inner.chars() {
            let label = c.to_digit(10).ok_or_else(|| cur.error(format!("bad label '{c}'")))?;
            labels.push(label as usize);
        }
    }
    while cur.peek().is_some_and(|c| c != ')') {
        cur.bump();
    }
    cur.expect(')')?;
    if labels.is_empty() {
        return Err(cur.error("empty cycle"));
    }
    Ok(labels)
}

/// Raw pieces of a bracket string, before validation against `m`.
#[derive(Debug)]
pub(crate) struct Parsed {
    pub cycles: Vec<Vec<usize>>,
    pub state: Entry,
    pub left: Vec<Entry>,
    pub right: Vec<Entry>,
}

pub(crate) fn parse_text(text: &str) -> Result<Parsed, SchemeError> {
    let mut cur = Cursor::new(text);
    let mut cycles = Vec::new();
    while cur.peek() == Some('(') {
        cycles.push(parse_cycle(&mut cur)?);
    }
    cur.expect('[')?;
    let state = parse_entry(&mut cur)?;
    let left = if cur.peek() == Some(';') {
        cur.bump();
        parse_list(&mut cur)?
    } else {
        Vec::new()
    };
    cur.expect(':')?;
    let right = parse_list(&mut cur)?;
    cur.expect(']')?;
    if let Some(c) = cur.peek() {
        return Err(cur.error(format!("unexpected '{c}' after scheme")));
    }
    Ok(Parsed {
        cycles,
        state,
        left,
        right,
    })
}
