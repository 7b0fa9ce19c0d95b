//! Reduced words in `F_r` and folded Stallings cores of finitely generated subgroups.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A reduced word; letter `k > 0` is `a_k`, `-k` its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FreeWord(Vec<i32>);

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord(Vec::new())
    }

    /// Zero-based: `generator(0)` is `a1`.
    pub fn generator(i: usize) -> Self {
        FreeWord(vec![i as i32 + 1])
    }

    /// Freely reduces `letters`; zero letters are rejected.
    pub fn from_letters(letters: impl IntoIterator<Item = i32>) -> Result<Self> {
        let mut out: Vec<i32> = Vec::new();
        for x in letters {
            if x == 0 {
                return Err(Error::Parse("letter 0 is not a generator".into()));
            }
            if out.last() == Some(&-x) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        Ok(FreeWord(out))
    }

    /// Space-separated `a<k>` / `A<k>` tokens; `1` or the empty string is the identity.
    pub fn parse(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (sign, rest) = match tok.as_bytes()[0] {
                b'a' => (1, &tok[1..]),
                b'A' => (-1, &tok[1..]),
                _ => return Err(Error::Parse(format!("bad letter `{tok}`"))),
            };
            let k: i32 = rest.parse().map_err(|_| Error::Parse(format!("bad letter `{tok}`")))?;
            if k < 1 {
                return Err(Error::Parse(format!("bad letter `{tok}`")));
            }
            letters.push(sign * k);
        }
        FreeWord::from_letters(letters)
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest generator index used, 1-based.
    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        FreeWord::from_letters(self.0.iter().chain(&other.0).copied()).expect("letters are nonzero")
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord(self.0.iter().rev().map(|x| -x).collect())
    }

    pub fn pow(&self, k: i64) -> FreeWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(FreeWord::identity(), |acc, _| acc.mul(&base))
    }

    /// All reduced words of length `1..=max_len` over `r` generators, shortlex order.
    pub fn enumerate(r: usize, max_len: usize) -> Vec<FreeWord> {
        let alphabet: Vec<i32> = (1..=r as i32).flat_map(|k| [k, -k]).collect();
        let mut out = Vec::new();
        let mut layer = vec![FreeWord::identity()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for &a in &alphabet {
                    if w.0.last() != Some(&-a) {
                        let mut x = w.0.clone();
                        x.push(a);
                        next.push(FreeWord(x));
                    }
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let toks: Vec<String> = self.0.iter().map(|&x| if x > 0 { format!("a{x}") } else { format!("A{}", -x) }).collect();
        f.write_str(&toks.join(" "))
    }
}

impl std::str::FromStr for FreeWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FreeWord::parse(s)
    }
}

impl Serialize for FreeWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FreeWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        FreeWord::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Folded, trimmed core graph of a subgroup of `F_r`, vertex 0 is the base.
///
/// Vertices are numbered in BFS order from the base scanning `a_1, A_1, a_2, ...`,
/// so equal subgroups give equal values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct StallingsGraph {
    r: usize,
    vertices: usize,
    /// `(src, generator, trg)` with generator 0-based, sorted.
    edges: Vec<(usize, usize, usize)>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl StallingsGraph {
    /// Core of the subgroup generated by `words`; the result does not depend on their order.
    pub fn fold(r: usize, words: &[FreeWord]) -> Result<StallingsGraph> {
        let mut n = 1usize;
        let mut edges = Vec::new();
        for w in words {
            if w.max_generator() > r {
                return Err(Error::InvalidArgument(format!("word `{w}` uses a generator beyond a{r}")));
            }
            let k = w.len();
            let mut cur = 0usize;
            for (i, &x) in w.letters().iter().enumerate() {
                let next = if i + 1 == k {
                    0
                } else {
                    n += 1;
                    n - 1
                };
                let g = x.unsigned_abs() as usize - 1;
                edges.push(if x > 0 { (cur, g, next) } else { (next, g, cur) });
                cur = next;
            }
        }
        Ok(Self::from_raw(r, n, edges))
    }

    /// Folds and trims an arbitrary labelled graph based at 0.
    pub fn from_raw(r: usize, n: usize, edges: Vec<(usize, usize, usize)>) -> StallingsGraph {
        let mut parent: Vec<usize> = (0..n).collect();
        let mut edges = edges;
        loop {
            let mut canon: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
            for &(s, g, t) in &edges {
                canon.insert((find(&mut parent, s), g, find(&mut parent, t)));
            }
            edges = canon.into_iter().collect();
            let mut out = vec![vec![None; r]; n];
            let mut inc = vec![vec![None; r]; n];
            let mut merged = false;
            for &(s, g, t) in &edges {
                for (slot, other) in [(&mut out[s][g], t), (&mut inc[t][g], s)] {
                    match *slot {
                        None => *slot = Some(other),
                        Some(x) if x != other => {
                            let (a, b) = (find(&mut parent, x), find(&mut parent, other));
                            if a != b {
                                parent[a.max(b)] = a.min(b);
                                merged = true;
                            }
                        }
                        Some(_) => {}
                    }
                }
            }
            if !merged {
                break;
            }
        }
        let alive: BTreeSet<usize> = (0..n).filter(|&v| find(&mut parent, v) == v).collect();
        let mut g = StallingsGraph { r, vertices: n, edges };
        g.trim(alive);
        g
    }

    /// Drops non-base vertices of degree at most one, then renumbers canonically.
    fn trim(&mut self, mut alive: BTreeSet<usize>) {
        loop {
            let mut deg = vec![0usize; self.vertices];
            for &(s, _, t) in &self.edges {
                deg[s] += 1;
                deg[t] += 1;
            }
            let dead: Vec<usize> = alive.iter().copied().filter(|&v| v != 0 && deg[v] <= 1).collect();
            if dead.is_empty() {
                break;
            }
            for v in &dead {
                alive.remove(v);
            }
            self.edges.retain(|&(s, _, t)| alive.contains(&s) && alive.contains(&t));
        }
        // Canonical BFS numbering from the base.
        let mut number = vec![usize::MAX; self.vertices];
        number[0] = 0;
        let mut count = 1;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for g in 0..self.r {
                let out = self.edges.iter().filter(|e| e.0 == v && e.1 == g).map(|e| e.2);
                let inc = self.edges.iter().filter(|e| e.2 == v && e.1 == g).map(|e| e.0);
                for w in out.chain(inc).collect::<Vec<_>>() {
                    if number[w] == usize::MAX {
                        number[w] = count;
                        count += 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        let mut edges: Vec<_> = self.edges.iter().map(|&(s, g, t)| (number[s], g, number[t])).collect();
        edges.sort_unstable();
        self.vertices = count;
        self.edges = edges;
    }

    pub fn rank_of_free_group(&self) -> usize {
        self.r
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize, usize)] {
        &self.edges
    }

    fn step(&self, v: usize, x: i32) -> Option<usize> {
        let g = x.unsigned_abs() as usize - 1;
        if x > 0 {
            self.edges.iter().find(|e| e.0 == v && e.1 == g).map(|e| e.2)
        } else {
            self.edges.iter().find(|e| e.2 == v && e.1 == g).map(|e| e.0)
        }
    }

    /// Membership of `w` in the represented subgroup.
    pub fn accepts(&self, w: &FreeWord) -> bool {
        let mut v = 0;
        for &x in w.letters() {
            match self.step(v, x) {
                Some(t) => v = t,
                None => return false,
            }
        }
        v == 0
    }

    /// Free basis read off a BFS spanning tree, one word per non-tree edge.
    pub fn free_basis(&self) -> Vec<FreeWord> {
        let mut path: Vec<Option<FreeWord>> = vec![None; self.vertices];
        path[0] = Some(FreeWord::identity());
        let mut tree = BTreeSet::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for (i, &(s, g, t)) in self.edges.iter().enumerate() {
                let (w, letter) = if s == v { (t, g as i32 + 1) } else if t == v { (s, -(g as i32 + 1)) } else { continue };
                if path[w].is_none() {
                    let p = path[v].as_ref().expect("visited").mul(&FreeWord(vec![letter]));
                    path[w] = Some(p);
                    tree.insert(i);
                    queue.push_back(w);
                }
            }
        }
        let mut out = Vec::new();
        for (i, &(s, g, t)) in self.edges.iter().enumerate() {
            if tree.contains(&i) {
                continue;
            }
            let ps = path[s].as_ref().expect("connected core");
            let pt = path[t].as_ref().expect("connected core");
            out.push(ps.mul(&FreeWord::generator(g)).mul(&pt.inverse()));
        }
        out
    }

    /// Full degree `2r` everywhere: the core covers the rose.
    pub fn is_finite_index(&self) -> bool {
        (0..self.vertices).all(|v| (0..self.r).all(|g| self.step(v, g as i32 + 1).is_some() && self.step(v, -(g as i32 + 1)).is_some()))
    }

    /// Index in `F_r` when finite.
    pub fn index(&self) -> Option<usize> {
        self.is_finite_index().then_some(self.vertices)
    }

    pub fn export_dot(&self) -> String {
        let mut out = String::from("digraph core {\n");
        for v in 0..self.vertices {
            let shape = if v == 0 { " [shape=doublecircle]" } else { "" };
            out.push_str(&format!("  {v}{shape};\n"));
        }
        for &(s, g, t) in &self.edges {
            out.push_str(&format!("  {s} -> {t} [label=\"a{}\"];\n", g + 1));
        }
        out.push_str("}\n");
        out
    }
}
