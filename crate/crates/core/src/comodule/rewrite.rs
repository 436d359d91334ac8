//! Noncommutative rewriting for the presentations of the comodule algebras:
//! generators X and T_h, rules
//!
//!   T_1 -> 1,
//!   T_{h1} T_{h2} -> sigma(h1,h2) T_{h1 h2},
//!   X T_h -> chi(h) T_h X + psi(h) T_{gh},
//!   X^d -> a T_{g^d},
//!
//! with the order T_h < X, monomials compared by length then lexicography.
//! All rules strictly decrease that order, so reduction terminates; the
//! normal forms are T_h X^i.  Confluence is *not* assumed: the overlap
//! ambiguities are resolved explicitly by `confluence_report`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cohomology::CocycleVector;
use crate::datum::GroupDatum;
use crate::linalg::cyclotomic::{Cyc, CycField};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Sym {
    T(u32),
    X,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RuleKind {
    DropUnit,
    Merge,
    XPast,
    XPower,
}

pub type Word = Vec<Sym>;
pub type WordLin = BTreeMap<Word, Cyc>;

pub struct Rewriter {
    pub datum: GroupDatum,
    pub sigma: CocycleVector,
    pub a: Cyc,
    /// per-element values of psi, all zero when absent
    pub psi: Option<Vec<Cyc>>,
    pub field: Arc<CycField>,
}

impl Rewriter {
    pub fn new(
        datum: &GroupDatum,
        sigma: &CocycleVector,
        a: &Cyc,
        psi: Option<&[Cyc]>,
        field: &Arc<CycField>,
    ) -> Self {
        Rewriter {
            datum: datum.clone(),
            sigma: sigma.clone(),
            a: a.promote(field).expect("field contains a"),
            psi: psi.map(|p| {
                p.iter()
                    .map(|v| v.promote(field).expect("field contains psi"))
                    .collect()
            }),
            field: field.clone(),
        }
    }

    fn psi_val(&self, h: u32) -> Cyc {
        match &self.psi {
            None => Cyc::zero(&self.field),
            Some(p) => p[h as usize].clone(),
        }
    }

    fn chi(&self, h: u32) -> Cyc {
        self.datum.chi_cyc(&self.field, h)
    }

    fn sig(&self, a: u32, b: u32) -> Cyc {
        self.sigma.value_cyc(&self.field, a, b)
    }

    /// Apply one specific rule at position `pos`; returns the replacement
    /// terms when the rule matches there.
    pub fn step_with(&self, w: &Word, pos: usize, rule: RuleKind) -> Option<Vec<(Word, Cyc)>> {
        let g = &self.datum.group;
        let d = self.datum.d as usize;
        match (w.get(pos)?, rule) {
            (Sym::T(h), RuleKind::DropUnit) if *h == g.identity => {
                let mut nw = w.clone();
                nw.remove(pos);
                Some(vec![(nw, Cyc::one(&self.field))])
            }
            (Sym::T(h1), RuleKind::Merge) => {
                if let Some(Sym::T(h2)) = w.get(pos + 1) {
                    let mut nw = w.clone();
                    nw[pos] = Sym::T(g.mul(*h1, *h2));
                    nw.remove(pos + 1);
                    Some(vec![(nw, self.sig(*h1, *h2))])
                } else {
                    None
                }
            }
            (Sym::X, RuleKind::XPast) => {
                if let Some(Sym::T(h)) = w.get(pos + 1) {
                    // X T_h -> chi(h) T_h X + psi(h) T_{gh}
                    let mut swapped = w.clone();
                    swapped[pos] = Sym::T(*h);
                    swapped[pos + 1] = Sym::X;
                    let mut merged = w.clone();
                    merged[pos] = Sym::T(g.mul(self.datum.g, *h));
                    merged.remove(pos + 1);
                    let mut out = vec![(swapped, self.chi(*h))];
                    let pv = self.psi_val(*h);
                    if !pv.is_zero() {
                        out.push((merged, pv));
                    }
                    Some(out)
                } else {
                    None
                }
            }
            (Sym::X, RuleKind::XPower) => {
                if w.len() >= pos + d && w[pos..pos + d].iter().all(|s| *s == Sym::X) {
                    // X^d -> a T_{g^d}
                    let gd = g.pow(self.datum.g, self.datum.d as i64);
                    let mut nw: Word = w[..pos].to_vec();
                    nw.push(Sym::T(gd));
                    nw.extend_from_slice(&w[pos + d..]);
                    Some(vec![(nw, self.a.clone())])
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// First applicable rule at the position, in a fixed priority order.
    pub fn step_at(&self, w: &Word, pos: usize) -> Option<Vec<(Word, Cyc)>> {
        for rule in [
            RuleKind::DropUnit,
            RuleKind::Merge,
            RuleKind::XPast,
            RuleKind::XPower,
        ] {
            if let Some(out) = self.step_with(w, pos, rule) {
                return Some(out);
            }
        }
        None
    }

    fn leftmost_redex(&self, w: &Word) -> Option<usize> {
        (0..w.len()).find(|&pos| self.step_at(w, pos).is_some())
    }

    /// Full reduction of a single word (with coefficient) to normal forms,
    /// always contracting the leftmost redex.
    pub fn reduce(&self, w: Word, coeff: Cyc) -> WordLin {
        let mut out = WordLin::new();
        let mut stack = vec![(w, coeff)];
        while let Some((w, c)) = stack.pop() {
            if c.is_zero() {
                continue;
            }
            match self.leftmost_redex(&w) {
                None => {
                    super::lin::lin_insert(&mut out, w, c);
                }
                Some(pos) => {
                    for (nw, nc) in self.step_at(&w, pos).unwrap() {
                        stack.push((nw, nc.mul(&c)));
                    }
                }
            }
        }
        out
    }

    pub fn reduce_lin(&self, terms: Vec<(Word, Cyc)>) -> WordLin {
        let mut out = WordLin::new();
        for (w, c) in terms {
            for (nw, nc) in self.reduce(w, c) {
                super::lin::lin_insert(&mut out, nw, nc);
            }
        }
        out
    }

    /// Reduce after forcing a specific first step.
    fn reduce_after_step(&self, w: &Word, pos: usize, rule: RuleKind) -> Option<WordLin> {
        let first = self.step_with(w, pos, rule)?;
        Some(self.reduce_lin(first))
    }

    /// Resolve every overlap/inclusion ambiguity of the presentation by
    /// two-sided reduction; returns descriptions of the failures.
    pub fn confluence_report(&self) -> Vec<String> {
        let g = &self.datum.group;
        let d = self.datum.d as usize;
        let n = g.order as u32;
        let mut failures = Vec::new();
        let check = |w: Word,
                     s1: (usize, RuleKind),
                     s2: (usize, RuleKind),
                     label: String,
                     failures: &mut Vec<String>| {
            let r1 = self.reduce_after_step(&w, s1.0, s1.1);
            let r2 = self.reduce_after_step(&w, s2.0, s2.1);
            match (r1, r2) {
                (Some(a), Some(b)) => {
                    if !super::lin::lin_eq(&a, &b) {
                        failures.push(label);
                    }
                }
                _ => failures.push(format!("{label} (missing step)")),
            }
        };
        use RuleKind::*;
        // T_{h1} T_{h2} T_{h3}
        for h1 in 0..n {
            for h2 in 0..n {
                for h3 in 0..n {
                    check(
                        vec![Sym::T(h1), Sym::T(h2), Sym::T(h3)],
                        (0, Merge),
                        (1, Merge),
                        format!("(T{h1} T{h2}, T{h2} T{h3})"),
                        &mut failures,
                    );
                }
            }
        }
        // X T_{h1} T_{h2}
        for h1 in 0..n {
            for h2 in 0..n {
                check(
                    vec![Sym::X, Sym::T(h1), Sym::T(h2)],
                    (0, XPast),
                    (1, Merge),
                    format!("(X T{h1}, T{h1} T{h2})"),
                    &mut failures,
                );
            }
        }
        // X^d T_h
        for h in 0..n {
            let mut w: Word = std::iter::repeat(Sym::X).take(d).collect();
            w.push(Sym::T(h));
            check(
                w,
                (0, XPower),
                (d - 1, XPast),
                format!("(X^d, X T{h})"),
                &mut failures,
            );
        }
        // X^{d+i}, two positions of the X^d contraction
        for i in 1..d {
            let w: Word = std::iter::repeat(Sym::X).take(d + i).collect();
            check(
                w,
                (0, XPower),
                (i, XPower),
                format!("(X^{i} X^{}, X^{} X^{i})", d - i, d - i),
                &mut failures,
            );
        }
        // inclusion ambiguities with T_1
        for h in 0..n {
            check(
                vec![Sym::T(h), Sym::T(g.identity)],
                (0, Merge),
                (1, DropUnit),
                format!("(T{h} T1, T1)"),
                &mut failures,
            );
            check(
                vec![Sym::T(g.identity), Sym::T(h)],
                (0, Merge),
                (0, DropUnit),
                format!("(T1, T1 T{h})"),
                &mut failures,
            );
        }
        check(
            vec![Sym::X, Sym::T(g.identity)],
            (0, XPast),
            (1, DropUnit),
            "(X T1, T1)".into(),
            &mut failures,
        );
        failures
    }
}
