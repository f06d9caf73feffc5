//! Coset enumeration and abelianization of finitely presented groups.
//!
//! Words are sequences of signed 1-based generator indices, so braid words
//! on `n` strands are directly words in the Artin presentation of `Bₙ`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::braid::BraidWord;
use crate::hurwitz::Factorization;
use crate::orbit::{enumerate, stabilizes, OrbitError, OrbitOptions};

pub const DEFAULT_MAX_COSETS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CosetError {
    #[error("generator index {index} outside 1..={generators}")]
    GeneratorOutOfRange { index: i32, generators: usize },
    #[error("cannot parse presentation: {0}")]
    Parse(String),
    #[error("coset table is incomplete")]
    Incomplete,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    generators: usize,
    relators: Vec<Vec<i32>>,
    names: Vec<String>,
}

fn check_word(word: &[i32], generators: usize) -> Result<(), CosetError> {
    match word
        .iter()
        .find(|&&l| l == 0 || l.unsigned_abs() as usize > generators)
    {
        Some(&index) => Err(CosetError::GeneratorOutOfRange { index, generators }),
        None => Ok(()),
    }
}

impl Presentation {
    pub fn new(generators: usize, relators: Vec<Vec<i32>>) -> Result<Self, CosetError> {
        for r in &relators {
            check_word(r, generators)?;
        }
        let names = (1..=generators).map(|k| format!("s{k}")).collect();
        Ok(Self {
            generators,
            relators,
            names,
        })
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relators(&self) -> &[Vec<i32>] {
        &self.relators
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Parses `"gens: a b; rel: (b a)^3 = (a b)^3; sub: a^3, b a b^-1"`.
    /// Relators may be written as equations, and parenthesized groups may
    /// be raised to integer powers. Returns the subgroup words alongside.
    pub fn parse(text: &str) -> Result<(Self, Vec<Vec<i32>>), CosetError> {
        let mut names: Option<Vec<String>> = None;
        let (mut rel_text, mut sub_text) = (None, None);
        for section in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (head, body) = section
                .split_once(':')
                .ok_or_else(|| CosetError::Parse(format!("section without ':' in {section:?}")))?;
            match head.trim() {
                "gens" => names = Some(body.split_whitespace().map(String::from).collect()),
                "rel" | "rels" => rel_text = Some(body),
                "sub" => sub_text = Some(body),
                other => return Err(CosetError::Parse(format!("unknown section {other:?}"))),
            }
        }
        let names = names.ok_or_else(|| CosetError::Parse("missing gens section".into()))?;
        for (k, n) in names.iter().enumerate() {
            if names[..k].contains(n) {
                return Err(CosetError::Parse(format!("generator {n:?} listed twice")));
            }
        }
        let words = |body: Option<&str>| -> Result<Vec<Vec<i32>>, CosetError> {
            body.map_or(Ok(Vec::new()), |b| {
                b.split(',')
                    .map(str::trim)
                    .filter(|w| !w.is_empty())
                    .map(|w| parse_relation(w, &names))
                    .collect()
            })
        };
        let relators = words(rel_text)?;
        let subgroup = words(sub_text)?;
        let generators = names.len();
        Ok((
            Self {
                generators,
                relators,
                names,
            },
            subgroup,
        ))
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gens: {}; rel: ", self.names.join(" "))?;
        for (k, r) in self.relators.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            let tokens: Vec<String> = r
                .iter()
                .map(|&l| {
                    let name = &self.names[l.unsigned_abs() as usize - 1];
                    if l < 0 {
                        format!("{name}^-1")
                    } else {
                        name.clone()
                    }
                })
                .collect();
            f.write_str(&if tokens.is_empty() {
                "1".to_string()
            } else {
                tokens.join(" ")
            })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Name(String),
    Open,
    Close,
    Power(i32),
}

fn tokenize(text: &str) -> Result<Vec<Token>, CosetError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() || c == '*' {
            chars.next();
        } else if c == '(' || c == ')' {
            chars.next();
            out.push(if c == '(' { Token::Open } else { Token::Close });
        } else if c == '^' {
            chars.next();
            let mut digits = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_digit() || (digits.is_empty() && (d == '-' || d == '+')) {
                    digits.push(d);
                    chars.next();
                } else if d.is_whitespace() && digits.is_empty() {
                    chars.next();
                } else {
                    break;
                }
            }
            let k = digits
                .parse()
                .map_err(|_| CosetError::Parse(format!("bad exponent in {text:?}")))?;
            out.push(Token::Power(k));
        } else if c.is_alphanumeric() || c == '_' {
            let mut name = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_alphanumeric() || d == '_' {
                    name.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token::Name(name));
        } else {
            return Err(CosetError::Parse(format!("unexpected {c:?} in {text:?}")));
        }
    }
    Ok(out)
}

fn invert(word: &[i32]) -> Vec<i32> {
    word.iter().rev().map(|&l| -l).collect()
}

fn power(word: &[i32], k: i32) -> Vec<i32> {
    let base = if k < 0 { invert(word) } else { word.to_vec() };
    base.repeat(k.unsigned_abs() as usize)
}

/// `lhs = rhs` becomes `lhs · rhs⁻¹`.
fn parse_relation(text: &str, names: &[String]) -> Result<Vec<i32>, CosetError> {
    let mut sides = text.split('=');
    let lhs = parse_word(sides.next().unwrap_or(""), names)?;
    match (sides.next(), sides.next()) {
        (None, _) => Ok(lhs),
        (Some(rhs), None) => {
            let mut w = lhs;
            w.extend(invert(&parse_word(rhs, names)?));
            Ok(w)
        }
        _ => Err(CosetError::Parse(format!("more than one '=' in {text:?}"))),
    }
}

fn parse_word(text: &str, names: &[String]) -> Result<Vec<i32>, CosetError> {
    let tokens = tokenize(text)?;
    let mut pos = 0;
    let word = parse_sequence(&tokens, &mut pos, names)?;
    if pos != tokens.len() {
        return Err(CosetError::Parse(format!("unbalanced ')' in {text:?}")));
    }
    Ok(word)
}

fn parse_sequence(
    tokens: &[Token],
    pos: &mut usize,
    names: &[String],
) -> Result<Vec<i32>, CosetError> {
    let mut out = Vec::new();
    while *pos < tokens.len() {
        let atom = match &tokens[*pos] {
            Token::Close => break,
            Token::Power(_) => return Err(CosetError::Parse("exponent without base".into())),
            Token::Open => {
                *pos += 1;
                let inner = parse_sequence(tokens, pos, names)?;
                if tokens.get(*pos) != Some(&Token::Close) {
                    return Err(CosetError::Parse("unclosed '('".into()));
                }
                inner
            }
            Token::Name(n) if n == "1" => Vec::new(),
            Token::Name(n) => {
                let g = names
                    .iter()
                    .position(|m| m == n)
                    .ok_or_else(|| CosetError::Parse(format!("unknown generator {n:?}")))?;
                vec![g as i32 + 1]
            }
        };
        *pos += 1;
        let atom = match tokens.get(*pos) {
            Some(Token::Power(k)) => {
                *pos += 1;
                power(&atom, *k)
            }
            _ => atom,
        };
        out.extend(atom);
    }
    Ok(out)
}

/// Artin presentation of `Bₙ` on `s₁, …, sₙ₋₁`.
pub fn braid_presentation(n: usize) -> Presentation {
    let gens = n.saturating_sub(1);
    let mut relators = Vec::new();
    for i in 1..gens as i32 {
        let j = i + 1;
        relators.push(vec![i, j, i, -j, -i, -j]);
    }
    for i in 1..=gens as i32 {
        for j in i + 2..=gens as i32 {
            relators.push(vec![i, j, -i, -j]);
        }
    }
    Presentation::new(gens, relators).expect("indices in range")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CosetStatus {
    Complete,
    BudgetExceeded,
}

/// Coset table with rows in definition order. Column `2(g−1)` holds the
/// action of generator `g`, column `2(g−1)+1` that of its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetTable {
    generators: usize,
    rows: Vec<Vec<Option<usize>>>,
    status: CosetStatus,
}

fn column(letter: i32) -> usize {
    let g = letter.unsigned_abs() as usize - 1;
    2 * g + usize::from(letter < 0)
}

impl CosetTable {
    pub fn status(&self) -> CosetStatus {
        self.status
    }

    pub fn is_complete(&self) -> bool {
        self.status == CosetStatus::Complete
    }

    /// Number of live cosets; the index when complete.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn act(&self, coset: usize, letter: i32) -> Option<usize> {
        self.rows[coset][column(letter)]
    }

    /// Image of `coset` under `word`, read left to right.
    pub fn trace(&self, coset: usize, word: &[i32]) -> Option<usize> {
        word.iter().try_fold(coset, |c, &l| self.act(c, l))
    }

    /// Every relator closes at every coset and every subgroup word fixes
    /// coset 0.
    pub fn is_consistent(&self, p: &Presentation, subgroup: &[Vec<i32>]) -> bool {
        let full = self.rows.iter().all(|r| r.iter().all(Option::is_some));
        full && (0..self.len()).all(|c| p.relators.iter().all(|r| self.trace(c, r) == Some(c)))
            && subgroup.iter().all(|w| self.trace(0, w) == Some(0))
    }
}

const NONE: usize = usize::MAX;

struct Enumerator<'a> {
    relators: &'a [Vec<usize>],
    cols: usize,
    table: Vec<Vec<usize>>,
    parent: Vec<usize>,
    live: usize,
    max: usize,
    queue: Vec<usize>,
}

struct Full;

impl Enumerator<'_> {
    fn rep(&mut self, mut c: usize) -> usize {
        let mut root = c;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[c] != root {
            let next = self.parent[c];
            self.parent[c] = root;
            c = next;
        }
        root
    }

    fn is_live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn define(&mut self, c: usize, x: usize) -> Result<(), Full> {
        if self.live >= self.max {
            return Err(Full);
        }
        let d = self.table.len();
        self.table.push(vec![NONE; self.cols]);
        self.parent.push(d);
        self.live += 1;
        self.table[c][x] = d;
        self.table[d][x ^ 1] = c;
        Ok(())
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a != b {
            let (keep, drop) = (a.min(b), a.max(b));
            self.parent[drop] = keep;
            self.live -= 1;
            self.queue.push(drop);
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.merge(a, b);
        let mut k = 0;
        while k < self.queue.len() {
            let e = self.queue[k];
            k += 1;
            for x in 0..self.cols {
                let f = self.table[e][x];
                if f == NONE {
                    continue;
                }
                if self.table[f][x ^ 1] == e {
                    self.table[f][x ^ 1] = NONE;
                }
                let (e1, f1) = (self.rep(e), self.rep(f));
                if self.table[e1][x] != NONE {
                    let t = self.table[e1][x];
                    self.merge(f1, t);
                } else if self.table[f1][x ^ 1] != NONE {
                    let t = self.table[f1][x ^ 1];
                    self.merge(e1, t);
                } else {
                    self.table[e1][x] = f1;
                    self.table[f1][x ^ 1] = e1;
                }
            }
        }
        self.queue.clear();
    }

    /// Scans `w` at `c`, defining new cosets when `fill` is set and
    /// recording deductions and coincidences either way.
    fn scan(&mut self, c: usize, w: &[usize], fill: bool) -> Result<(), Full> {
        if w.is_empty() {
            return Ok(());
        }
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, w.len() as isize - 1);
        loop {
            while (i as isize) <= j && self.table[f][w[i]] != NONE {
                f = self.table[f][w[i]];
                i += 1;
            }
            if (i as isize) > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i as isize && self.table[b][w[j as usize] ^ 1] != NONE {
                b = self.table[b][w[j as usize] ^ 1];
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i as isize {
                self.table[f][w[i]] = b;
                self.table[b][w[i] ^ 1] = f;
                return Ok(());
            }
            if !fill {
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }

    fn lookahead(&mut self) {
        let relators = self.relators;
        for c in 0..self.table.len() {
            for r in relators {
                if !self.is_live(c) {
                    break;
                }
                let _ = self.scan(c, r, false);
            }
        }
    }

    /// Drops dead rows, renumbering live ones in order. Returns the new
    /// index of the first live coset at or after `from`.
    fn compact(&mut self, from: usize) -> usize {
        let mut new_id = vec![NONE; self.table.len()];
        let mut next = 0;
        for (c, id) in new_id.iter_mut().enumerate() {
            if self.parent[c] == c {
                *id = next;
                next += 1;
            }
        }
        let resume = (from..self.table.len())
            .map(|c| new_id[c])
            .find(|&i| i != NONE)
            .unwrap_or(next);
        let old = std::mem::take(&mut self.table);
        self.table = old
            .into_iter()
            .enumerate()
            .filter(|&(c, _)| new_id[c] != NONE)
            .map(|(_, row)| {
                row.into_iter()
                    .map(|t| if t == NONE { NONE } else { new_id[t] })
                    .collect()
            })
            .collect();
        self.parent = (0..self.table.len()).collect();
        resume
    }
}

/// HLT coset enumeration with lookahead when the budget is reached.
pub fn todd_coxeter(
    p: &Presentation,
    subgroup: &[Vec<i32>],
    max_cosets: usize,
) -> Result<CosetTable, CosetError> {
    for w in subgroup {
        check_word(w, p.generators)?;
    }
    let to_cols = |w: &Vec<i32>| w.iter().map(|&l| column(l)).collect::<Vec<usize>>();
    let relators: Vec<Vec<usize>> = p.relators.iter().map(to_cols).collect();
    let subgroup_cols: Vec<Vec<usize>> = subgroup.iter().map(to_cols).collect();
    let cols = 2 * p.generators;
    let mut e = Enumerator {
        relators: &relators,
        cols,
        table: vec![vec![NONE; cols]],
        parent: vec![0],
        live: 1,
        max: max_cosets.max(1),
        queue: Vec::new(),
    };
    let mut status = CosetStatus::Complete;
    let mut started = false;
    let mut c = 0;
    let step = |e: &mut Enumerator, c: usize, started: bool| -> Result<(), Full> {
        if !started {
            for w in &subgroup_cols {
                e.scan(0, w, true)?;
            }
        }
        for r in e.relators {
            if !e.is_live(c) {
                return Ok(());
            }
            e.scan(c, r, true)?;
        }
        for x in 0..e.cols {
            if e.is_live(c) && e.table[c][x] == NONE {
                e.define(c, x)?;
            }
        }
        Ok(())
    };
    while c < e.table.len() {
        if !started || e.is_live(c) {
            if step(&mut e, c, started).is_err() {
                e.lookahead();
                c = e.compact(c);
                if e.live >= e.max {
                    status = CosetStatus::BudgetExceeded;
                    break;
                }
                continue;
            }
            started = true;
        }
        c += 1;
    }
    e.compact(0);
    let rows = e
        .table
        .into_iter()
        .map(|r| r.into_iter().map(|t| (t != NONE).then_some(t)).collect())
        .collect();
    Ok(CosetTable {
        generators: p.generators,
        rows,
        status,
    })
}

/// Reidemeister–Schreier presentation of the subgroup behind a complete
/// coset table. Generators are the Schreier generators `(c, x)` off a
/// breadth-first spanning tree; relators are every relator rewritten from
/// every coset.
pub fn reidemeister_schreier(
    p: &Presentation,
    table: &CosetTable,
) -> Result<Presentation, CosetError> {
    if !table.is_complete() || table.generators != p.generators {
        return Err(CosetError::Incomplete);
    }
    let n = table.len();
    let mut seen = vec![false; n];
    let mut tree = vec![vec![false; p.generators]; n];
    seen[0] = true;
    let mut queue = std::collections::VecDeque::from([0]);
    while let Some(c) = queue.pop_front() {
        for g in 1..=p.generators as i32 {
            for l in [g, -g] {
                let d = table.act(c, l).ok_or(CosetError::Incomplete)?;
                if !seen[d] {
                    seen[d] = true;
                    queue.push_back(d);
                    // the edge is labelled by the positive letter from its tail
                    let tail = if l > 0 { c } else { d };
                    tree[tail][g as usize - 1] = true;
                }
            }
        }
    }
    let mut id = vec![vec![0i32; p.generators]; n];
    let mut count = 0;
    for c in 0..n {
        for x in 0..p.generators {
            if !tree[c][x] {
                count += 1;
                id[c][x] = count;
            }
        }
    }
    let mut relators = Vec::with_capacity(n * p.relators.len());
    for start in 0..n {
        for r in &p.relators {
            let mut c = start;
            let mut word = Vec::new();
            for &l in r {
                let x = l.unsigned_abs() as usize - 1;
                if l > 0 {
                    if id[c][x] != 0 {
                        word.push(id[c][x]);
                    }
                    c = table.act(c, l).ok_or(CosetError::Incomplete)?;
                } else {
                    c = table.act(c, l).ok_or(CosetError::Incomplete)?;
                    if id[c][x] != 0 {
                        word.push(-id[c][x]);
                    }
                }
            }
            relators.push(crate::braid::free_reduce(&word));
        }
    }
    Presentation::new(count as usize, relators)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abelianization {
    pub free_rank: usize,
    /// Invariant factors greater than 1, each dividing the next.
    pub torsion: Vec<BigInt>,
}

/// Abelianization from the Smith normal form of the exponent-sum matrix.
pub fn abelianization(p: &Presentation) -> Abelianization {
    let mut m: Vec<Vec<BigInt>> = p
        .relators
        .iter()
        .map(|r| {
            let mut row = vec![BigInt::zero(); p.generators];
            for &l in r {
                row[l.unsigned_abs() as usize - 1] += l.signum();
            }
            row
        })
        .collect();
    let diagonal = smith_diagonal(&mut m, p.generators);
    Abelianization {
        free_rank: p.generators - diagonal.len(),
        torsion: diagonal.into_iter().filter(|d| !d.is_one()).collect(),
    }
}

/// Nonzero diagonal of the Smith normal form, pivoting on the entry of
/// least absolute value.
pub fn smith_diagonal(m: &mut [Vec<BigInt>], cols: usize) -> Vec<BigInt> {
    let rows = m.len();
    let mut diagonal = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| !m[i][j].is_zero())
                .min_by(|&(a, b), &(c, d)| m[a][b].abs().cmp(&m[c][d].abs()));
            let Some((pi, pj)) = pivot else {
                return diagonal;
            };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..rows {
                let q = m[i][t].div_floor(&m[t][t]);
                if !q.is_zero() {
                    let pivot_row = m[t].clone();
                    for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                        *x -= &q * y;
                    }
                }
                clean &= m[i][t].is_zero();
            }
            for j in t + 1..cols {
                let q = m[t][j].div_floor(&m[t][t]);
                if !q.is_zero() {
                    for row in m.iter_mut() {
                        let y = row[t].clone();
                        row[j] -= &q * y;
                    }
                }
                clean &= m[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let stray =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !m[i][j].is_multiple_of(&m[t][t])));
            match stray {
                Some(i) => {
                    let row = m[i].clone();
                    for (x, y) in m[t].iter_mut().zip(&row) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        diagonal.push(m[t][t].abs());
    }
    diagonal
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexReport {
    pub orbit_size: usize,
    pub orbit_complete: bool,
    pub coset_count: usize,
    pub coset_status: CosetStatus,
    /// Whether each subgroup word fixes the factorization.
    pub stabilizes: Vec<bool>,
    /// The words generate the stabilizer: the orbit is finite, the coset
    /// enumeration completes with the same count, and every word
    /// stabilizes.
    pub verdict: bool,
}

/// Compares the orbit of `f` with the index of `⟨subgroup⟩` in `Bₙ`.
pub fn cross_check_index(
    f: &Factorization,
    subgroup: &[BraidWord],
    orbit: OrbitOptions,
    max_cosets: usize,
) -> Result<IndexReport, OrbitError> {
    let n = f.len();
    let graph = enumerate(f, orbit)?;
    let stab = subgroup
        .iter()
        .map(|b| stabilizes(f, b))
        .collect::<Result<Vec<_>, _>>()?;
    let words: Vec<Vec<i32>> = subgroup.iter().map(|b| b.letters().to_vec()).collect();
    let table = todd_coxeter(&braid_presentation(n), &words, max_cosets)
        .expect("braid words on n strands lie in the presentation of Bₙ");
    let verdict = graph.is_complete()
        && table.is_complete()
        && graph.size() == table.len()
        && stab.iter().all(|&s| s);
    Ok(IndexReport {
        orbit_size: graph.size(),
        orbit_complete: graph.is_complete(),
        coset_count: table.len(),
        coset_status: table.status(),
        stabilizes: stab,
        verdict,
    })
}
