//! Finite racks and quandles as operation tables.
//!
//! Elements are `0..n` and `table[a][b] = a^b`, the right action of `b` on `a`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RackError {
    #[error("malformed table: {0}")]
    MalformedTable(String),
    #[error("axiom (R1) fails: column {column} is not a bijection")]
    AxiomR1 { column: usize },
    #[error("axiom (R2) fails at (a, b, c) = ({a}, {b}, {c})")]
    AxiomR2 { a: usize, b: usize, c: usize },
    #[error("malformed group: {0}")]
    MalformedGroup(String),
    #[error("enumeration exceeded the cap of {cap}")]
    CapExceeded { cap: usize },
    #[error("bad word: {0}")]
    BadWord(String),
}

/// A validated finite rack.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinRack {
    n: usize,
    table: Vec<usize>,
    inv: Vec<usize>,
}

impl FinRack {
    /// Validates `table` against (R1) and (R2) and derives the left-division table.
    pub fn from_table(table: &[Vec<usize>]) -> Result<FinRack, RackError> {
        let n = table.len();
        if n == 0 {
            return Err(RackError::MalformedTable("a rack needs at least one element".into()));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(RackError::MalformedTable(format!("row {a} has {} entries, expected {n}", row.len())));
            }
            for (b, &c) in row.iter().enumerate() {
                if c >= n {
                    return Err(RackError::MalformedTable(format!("entry [{a}][{b}] = {c} is out of range")));
                }
                flat.push(c);
            }
        }
        Self::from_flat(n, flat)
    }

    /// Tabulates `f(a, b) = a^b` on `0..n` and validates.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> Result<FinRack, RackError> {
        let mut table = vec![vec![0; n]; n];
        for (a, row) in table.iter_mut().enumerate() {
            for (b, entry) in row.iter_mut().enumerate() {
                *entry = f(a, b);
            }
        }
        Self::from_table(&table)
    }

    pub(crate) fn from_flat(n: usize, table: Vec<usize>) -> Result<FinRack, RackError> {
        let mut inv = vec![usize::MAX; n * n];
        for b in 0..n {
            for a in 0..n {
                let c = table[a * n + b];
                if inv[c * n + b] != usize::MAX {
                    return Err(RackError::AxiomR1 { column: b });
                }
                inv[c * n + b] = a;
            }
        }
        let r = FinRack { n, table, inv };
        if let Some((a, b, c)) = r.r2_violation() {
            return Err(RackError::AxiomR2 { a, b, c });
        }
        Ok(r)
    }

    fn r2_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                let ab = self.op(a, b);
                for c in 0..n {
                    if self.op(ab, c) != self.op(self.op(a, c), self.op(b, c)) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    /// Trivial rack `a^b = a`.
    pub fn trivial(n: usize) -> FinRack {
        Self::from_fn(n, |a, _| a).expect("trivial rack")
    }

    /// Cyclic rack `a^b = a + 1 mod n`.
    pub fn cyclic(n: usize) -> FinRack {
        Self::from_fn(n, |a, _| (a + 1) % n).expect("cyclic rack")
    }

    /// Dihedral quandle `a^b = 2b − a mod n`.
    pub fn dihedral(n: usize) -> FinRack {
        Self::from_fn(n, |a, b| (2 * b + n - a) % n).expect("dihedral quandle")
    }

    /// Conjugation quandle `g^h = h⁻¹ g h`.
    pub fn conj(g: &FinGroup) -> FinRack {
        Self::from_fn(g.size(), |a, b| g.mul(g.inverse(b), g.mul(a, b))).expect("conjugation rack")
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `a^b`.
    #[inline]
    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }

    /// `a^{b̄}`, the unique `c` with `c^b = a`.
    #[inline]
    pub fn inv_op(&self, a: usize, b: usize) -> usize {
        self.inv[a * self.n + b]
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// First `a` with `a^a ≠ a`.
    pub fn quandle_violation(&self) -> Option<usize> {
        (0..self.n).find(|&a| self.op(a, a) != a)
    }

    pub fn is_quandle(&self) -> bool {
        self.quandle_violation().is_none()
    }

    /// First pair `(a, b)` with `f(a^b) ≠ f(a)^{f(b)}`. `f` must map into `dst`.
    pub fn homomorphism_violation(&self, f: &[usize], dst: &FinRack) -> Result<Option<(usize, usize)>, RackError> {
        if f.len() != self.n || f.iter().any(|&v| v >= dst.n) {
            return Err(RackError::MalformedTable("map is not total into the target".into()));
        }
        for a in 0..self.n {
            for b in 0..self.n {
                if f[self.op(a, b)] != dst.op(f[a], f[b]) {
                    return Ok(Some((a, b)));
                }
            }
        }
        Ok(None)
    }

    pub fn is_homomorphism(&self, f: &[usize], dst: &FinRack) -> Result<bool, RackError> {
        Ok(self.homomorphism_violation(f, dst)?.is_none())
    }

    /// Orbits under the operator group, each sorted, blocks ordered by least element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for a in 0..self.n {
            for b in 0..self.n {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, self.op(a, b)));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut index = HashMap::new();
        for a in 0..self.n {
            let root = find(&mut parent, a);
            let k = *index.entry(root).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[k].push(a);
        }
        blocks
    }

    /// Orbit index of every element, matching the order of [`FinRack::orbits`].
    pub fn orbit_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (k, block) in self.orbits().iter().enumerate() {
            for &a in block {
                out[a] = k;
            }
        }
        out
    }

    /// `π_x : a ↦ a^x` as a permutation array.
    pub fn translation(&self, x: usize) -> Vec<usize> {
        (0..self.n).map(|a| self.op(a, x)).collect()
    }

    /// Closure of the translations `π_x` under composition, breadth first from the identity.
    pub fn operator_group(&self, cap: usize) -> Result<OperatorGroup, RackError> {
        let identity: Vec<usize> = (0..self.n).collect();
        let mut seen = HashMap::from([(identity.clone(), 0usize)]);
        let mut perms = vec![identity];
        let mut words: Vec<Vec<usize>> = vec![Vec::new()];
        let mut head = 0;
        while head < perms.len() {
            for x in 0..self.n {
                let next: Vec<usize> = perms[head].iter().map(|&a| self.op(a, x)).collect();
                if seen.contains_key(&next) {
                    continue;
                }
                if perms.len() >= cap {
                    return Err(RackError::CapExceeded { cap });
                }
                let mut w = words[head].clone();
                w.push(x);
                seen.insert(next.clone(), perms.len());
                perms.push(next);
                words.push(w);
            }
            head += 1;
        }
        Ok(OperatorGroup { perms, words })
    }

    /// Generators `x_a` and one relation `x_b⁻¹ x_a x_b x_{a^b}⁻¹` per ordered pair.
    pub fn associated_group_presentation(&self) -> Presentation {
        let mut relations = Vec::with_capacity(self.n * self.n);
        for a in 0..self.n {
            for b in 0..self.n {
                relations.push(SignedWord::new(vec![
                    Letter::inv(b),
                    Letter::pos(a),
                    Letter::pos(b),
                    Letter::inv(self.op(a, b)),
                ]));
            }
        }
        Presentation { generators: self.n, relations }
    }

    /// `x^w`, letters applied left to right.
    pub fn act_word(&self, x: usize, w: &SignedWord) -> usize {
        w.letters().iter().fold(x, |s, l| if l.positive { self.op(s, l.generator) } else { self.inv_op(s, l.generator) })
    }
}

impl fmt::Debug for FinRack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinRack{:?}", self.table())
    }
}

/// Elements of `Op X` as permutations, each with one word in the generators
/// `π_x` that produces it (applied left to right).
#[derive(Clone, Debug)]
pub struct OperatorGroup {
    pub perms: Vec<Vec<usize>>,
    pub words: Vec<Vec<usize>>,
}

impl OperatorGroup {
    pub fn order(&self) -> usize {
        self.perms.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: usize,
    pub relations: Vec<SignedWord>,
}

/// Finite group as a validated Cayley table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinGroup {
    n: usize,
    mult: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FinGroup {
    pub fn from_table(mult: &[Vec<usize>]) -> Result<FinGroup, RackError> {
        let n = mult.len();
        let bad = |m: String| Err(RackError::MalformedGroup(m));
        if n == 0 {
            return bad("a group needs at least one element".into());
        }
        let mut flat = Vec::with_capacity(n * n);
        for (a, row) in mult.iter().enumerate() {
            if row.len() != n || row.iter().any(|&c| c >= n) {
                return bad(format!("row {a} is not a list of {n} elements"));
            }
            flat.extend_from_slice(row);
        }
        let at = |a: usize, b: usize| flat[a * n + b];
        let Some(identity) = (0..n).find(|&e| (0..n).all(|a| at(e, a) == a && at(a, e) == a)) else {
            return bad("no identity element".into());
        };
        let mut inverse = vec![0; n];
        for (a, slot) in inverse.iter_mut().enumerate() {
            match (0..n).find(|&b| at(a, b) == identity && at(b, a) == identity) {
                Some(b) => *slot = b,
                None => return bad(format!("element {a} has no inverse")),
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return bad(format!("associativity fails at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        Ok(FinGroup { n, mult: flat, identity, inverse })
    }

    /// `ℤ_n` under addition.
    pub fn cyclic(n: usize) -> FinGroup {
        let t: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(&t).expect("cyclic group")
    }

    /// Symmetric group on `k` points; elements in lexicographic order of their
    /// one-line notation, product `(p·q)(i) = q(p(i))` (apply `p` first).
    pub fn symmetric(k: usize) -> FinGroup {
        let mut perms = vec![(0..k).collect::<Vec<usize>>()];
        let mut i = 0;
        while i < perms.len() {
            let p = perms[i].clone();
            for s in 0..k.saturating_sub(1) {
                let mut q = p.clone();
                q.swap(s, s + 1);
                if !perms.contains(&q) {
                    perms.push(q);
                }
            }
            i += 1;
        }
        perms.sort();
        Self::from_permutations(&perms).expect("symmetric group")
    }

    /// Dihedral group of order `2m` as the maps `x ↦ ±x + a` on `ℤ_m`:
    /// rotations `0..m`, reflections `m..2m`, composed with the first map applied first.
    pub fn dihedral(m: usize) -> FinGroup {
        let n = 2 * m;
        let t: Vec<Vec<usize>> = (0..n)
            .map(|p| {
                (0..n)
                    .map(|q| {
                        let (ep, ap) = (p / m, p % m);
                        let (eq, aq) = (q / m, q % m);
                        let shifted = if eq == 1 { (m - ap) % m } else { ap };
                        (ep ^ eq) * m + (shifted + aq) % m
                    })
                    .collect()
            })
            .collect();
        Self::from_table(&t).expect("dihedral group")
    }

    /// Group of the given permutations, which must be closed under composition.
    pub fn from_permutations(perms: &[Vec<usize>]) -> Result<FinGroup, RackError> {
        let index: HashMap<&Vec<usize>, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut t = vec![vec![0; perms.len()]; perms.len()];
        for (a, p) in perms.iter().enumerate() {
            for (b, q) in perms.iter().enumerate() {
                let pq: Vec<usize> = p.iter().map(|&i| q[i]).collect();
                t[a][b] = *index
                    .get(&pq)
                    .ok_or_else(|| RackError::MalformedGroup("permutations are not closed".into()))?;
            }
        }
        Self::from_table(&t)
    }

    /// Direct product; `(a, b)` has index `a · |h| + b`.
    pub fn product(&self, h: &FinGroup) -> FinGroup {
        let n = self.n * h.n;
        let t: Vec<Vec<usize>> = (0..n)
            .map(|x| (0..n).map(|y| self.mul(x / h.n, y / h.n) * h.n + h.mul(x % h.n, y % h.n)).collect())
            .collect();
        Self::from_table(&t).expect("direct product")
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.n + b]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.mult.chunks(self.n).map(|r| r.to_vec()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: usize,
    pub positive: bool,
}

impl Letter {
    pub fn pos(generator: usize) -> Letter {
        Letter { generator, positive: true }
    }

    pub fn inv(generator: usize) -> Letter {
        Letter { generator, positive: false }
    }

    pub fn inverse(self) -> Letter {
        Letter { positive: !self.positive, ..self }
    }
}

/// Word in the generators of the associated group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SignedWord {
    letters: Vec<Letter>,
}

impl SignedWord {
    pub fn new(letters: Vec<Letter>) -> SignedWord {
        SignedWord { letters }
    }

    pub fn empty() -> SignedWord {
        SignedWord::default()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Checks every generator index against the rack size.
    pub fn check_bounds(&self, n: usize) -> Result<(), RackError> {
        match self.letters.iter().find(|l| l.generator >= n) {
            Some(l) => Err(RackError::BadWord(format!("generator {} is not below {n}", l.generator))),
            None => Ok(()),
        }
    }
}

impl FromStr for SignedWord {
    type Err = RackError;

    /// Whitespace-separated tokens `y` or `y^-1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s
            .split_whitespace()
            .map(|tok| {
                let (digits, positive) = match tok.strip_suffix("^-1") {
                    Some(d) => (d, false),
                    None => (tok, true),
                };
                digits
                    .parse::<usize>()
                    .map(|generator| Letter { generator, positive })
                    .map_err(|_| RackError::BadWord(format!("cannot parse token {tok:?}")))
            })
            .collect::<Result<_, _>>()?;
        Ok(SignedWord { letters })
    }
}

impl fmt::Display for SignedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", l.generator)?;
            if !l.positive {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}
