//! Brute-force enumeration of small structures, used as ground truth for the
//! generating-series counts. Nothing here touches the series engine.
//!
//! Labelled structures are built explicitly on `{0, .., n-1}` as a set
//! partition into components, each carrying directed edges and vertex
//! colors. Unlabelled structures are multisets of component isomorphism
//! types, each type described by a canonical code.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classes::Side;
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};

/// Whether to count all structures or connected ones only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    #[default]
    Total,
    Connected,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::Total => "total",
            Scope::Connected => "connected",
        })
    }
}

/// Largest sizes each class is enumerated at: (name, labelled cap, unlabelled cap).
/// A cap of 0 means the side is not available.
pub const CAPS: [(&str, u64, u64); 7] = [
    ("unary-predicates", 12, 30),
    ("height1-forests", 8, 30),
    ("finitely-many-components", 10, 30),
    ("equivalence-relations", 10, 30),
    ("selection-partitions", 7, 15),
    ("broom", 9, 30),
    ("integer-partitions", 0, 30),
];

/// Component sizes used by `finitely-many-components`.
pub const FINITE_COMPONENT_SIZES: [usize; 2] = [1, 2];

fn cap(class: &str, side: Side) -> Result<u64> {
    let row = CAPS
        .iter()
        .find(|r| r.0 == class)
        .ok_or_else(|| Error::UnknownClass(class.into()))?;
    Ok(match side {
        Side::Labelled => row.1,
        Side::Unlabelled => row.2,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCount {
    pub class: String,
    pub n: u64,
    pub side: Side,
    pub scope: Scope,
    pub count: u64,
    pub method: String,
}

pub const CSV_HEADER: &str = "class,n,side,scope,count";

impl OracleCount {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.class, self.n, self.side, self.scope, self.count
        )
    }
}

/// A labelled structure: vertex colors plus directed edges.
/// Colours and edge list after relabelling.
pub type CanonicalForm = (Vec<u8>, Vec<(u8, u8)>);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Structure {
    pub colors: Vec<u8>,
    pub edges: BTreeSet<(u8, u8)>,
}

impl Structure {
    fn empty(n: usize) -> Self {
        Structure {
            colors: vec![0; n],
            edges: BTreeSet::new(),
        }
    }

    /// Connected components of the underlying undirected graph, as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<u8>> {
        let n = self.colors.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
            parent[ra.max(rb)] = ra.min(rb);
        }
        let mut out: Vec<Vec<u8>> = Vec::new();
        let mut index = vec![usize::MAX; n];
        for v in 0..n {
            let r = find(&mut parent, v);
            if index[r] == usize::MAX {
                index[r] = out.len();
                out.push(Vec::new());
            }
            out[index[r]].push(v as u8);
        }
        out
    }

    /// Lexicographically smallest relabelling over all permutations.
    pub fn canonical(&self) -> CanonicalForm {
        let n = self.colors.len();
        let mut perm: Vec<u8> = (0..n as u8).collect();
        let mut best: Option<CanonicalForm> = None;
        loop {
            let mut colors = vec![0; n];
            for (v, &c) in self.colors.iter().enumerate() {
                colors[perm[v] as usize] = c;
            }
            let mut edges: Vec<(u8, u8)> = self
                .edges
                .iter()
                .map(|&(a, b)| (perm[a as usize], perm[b as usize]))
                .collect();
            edges.sort_unstable();
            let cand = (colors, edges);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        best.expect("at least one permutation")
    }
}

fn next_permutation(p: &mut [u8]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p
        .iter()
        .rposition(|&x| x > p[i])
        .expect("pivot has a successor");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// All connected structures of `class` on the vertex set `block`.
fn components_on(class: &str, block: &[u8], n: usize) -> Vec<Structure> {
    let k = block.len();
    let complete = || {
        let mut s = Structure::empty(n);
        for &a in block {
            for &b in block {
                if a != b {
                    s.edges.insert((a, b));
                }
            }
        }
        s
    };
    match class {
        "unary-predicates" if k == 1 => vec![Structure::empty(n)],
        "unary-predicates" => vec![],
        "finitely-many-components" if FINITE_COMPONENT_SIZES.contains(&k) => vec![complete()],
        "finitely-many-components" => vec![],
        "equivalence-relations" => vec![complete()],
        "height1-forests" => block
            .iter()
            .map(|&root| {
                let mut s = Structure::empty(n);
                s.colors[root as usize] = 1;
                for &v in block {
                    if v != root {
                        s.edges.insert((v, root));
                    }
                }
                s
            })
            .collect(),
        "selection-partitions" => (1u32..1 << k)
            .map(|mask| {
                let mut s = complete();
                for (i, &v) in block.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        s.colors[v as usize] = 1;
                    }
                }
                s
            })
            .collect(),
        "broom" if k == 1 => vec![Structure::empty(n)],
        "broom" if k.is_multiple_of(3) => {
            let m = k / 3;
            let mut out = Vec::new();
            for handle in injective_sequences(block, m) {
                for word in 0u32..1 << m {
                    let mut s = Structure::empty(n);
                    for (i, &h) in handle.iter().enumerate() {
                        s.colors[h as usize] = 1 + (word >> i & 1) as u8;
                        if i > 0 {
                            s.edges.insert((h, handle[i - 1]));
                        }
                    }
                    let tip = handle[m - 1];
                    for &v in block {
                        if !handle.contains(&v) {
                            s.edges.insert((v, tip));
                        }
                    }
                    out.push(s);
                }
            }
            out
        }
        _ => vec![],
    }
}

fn injective_sequences(items: &[u8], len: usize) -> Vec<Vec<u8>> {
    if len == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let rest: Vec<u8> = items
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, &y)| y)
            .collect();
        for mut tail in injective_sequences(&rest, len - 1) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

/// Set partitions of `{0, .., n-1}` in restricted-growth order.
fn for_each_set_partition(n: usize, f: &mut impl FnMut(&[Vec<u8>])) {
    fn go(v: usize, n: usize, blocks: &mut Vec<Vec<u8>>, f: &mut impl FnMut(&[Vec<u8>])) {
        if v == n {
            f(blocks);
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(v as u8);
            go(v + 1, n, blocks, f);
            blocks[b].pop();
        }
        blocks.push(vec![v as u8]);
        go(v + 1, n, blocks, f);
        blocks.pop();
    }
    go(0, n, &mut Vec::new(), f);
}

fn merge(parts: &[&Structure], n: usize) -> Structure {
    let mut s = Structure::empty(n);
    for p in parts {
        for (v, &c) in p.colors.iter().enumerate() {
            s.colors[v] = s.colors[v].max(c);
        }
        s.edges.extend(p.edges.iter().copied());
    }
    s
}

/// Visits every labelled structure of `class` on `n` vertices.
pub fn for_each_labelled(
    class: &str,
    n: u64,
    scope: Scope,
    mut f: impl FnMut(&Structure),
) -> Result<()> {
    let limit = cap(class, Side::Labelled)?;
    if n > limit {
        return Err(Error::CapExceeded {
            class: class.into(),
            n,
            cap: limit,
        });
    }
    let n = n as usize;
    if n == 0 {
        if scope == Scope::Total {
            f(&Structure::empty(0));
        }
        return Ok(());
    }
    if scope == Scope::Connected {
        let block: Vec<u8> = (0..n as u8).collect();
        components_on(class, &block, n).iter().for_each(f);
        return Ok(());
    }
    for_each_set_partition(n, &mut |blocks| {
        let choices: Vec<Vec<Structure>> =
            blocks.iter().map(|b| components_on(class, b, n)).collect();
        if choices.iter().any(Vec::is_empty) {
            return;
        }
        let mut idx = vec![0usize; choices.len()];
        loop {
            let parts: Vec<&Structure> = idx.iter().zip(&choices).map(|(&i, c)| &c[i]).collect();
            f(&merge(&parts, n));
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return;
                }
                idx[pos] += 1;
                if idx[pos] < choices[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    });
    Ok(())
}

/// Canonical codes of the connected unlabelled types of size `k`.
fn component_types(class: &str, k: u64) -> Vec<String> {
    match class {
        "unary-predicates" if k == 1 => vec!["point".into()],
        "finitely-many-components" if FINITE_COMPONENT_SIZES.contains(&(k as usize)) => {
            vec![format!("clique{k}")]
        }
        "equivalence-relations" | "integer-partitions" if k >= 1 => vec![format!("block{k}")],
        "height1-forests" if k >= 1 => vec![format!("star{k}")],
        "selection-partitions" if k >= 1 => (1..=k).map(|s| format!("block{k}:{s}")).collect(),
        "broom" if k == 1 => vec!["point".into()],
        "broom" if k >= 3 && k.is_multiple_of(3) => {
            let m = k / 3;
            (0u64..1 << m)
                .map(|w| {
                    let word: String = (0..m)
                        .map(|i| if w >> i & 1 == 1 { '2' } else { '1' })
                        .collect();
                    format!("handle{word}")
                })
                .collect()
        }
        _ => vec![],
    }
}

/// Counts multisets of component types with total size `n`.
fn count_unlabelled(class: &str, n: u64, scope: Scope) -> u64 {
    let types: Vec<(u64, String)> = (1..=n)
        .flat_map(|k| component_types(class, k).into_iter().map(move |c| (k, c)))
        .collect();
    if scope == Scope::Connected {
        return types.iter().filter(|t| t.0 == n).count() as u64;
    }
    // Multisets listed as non-increasing index sequences, one per canonical form.
    fn go(types: &[(u64, String)], start: usize, left: u64) -> u64 {
        if left == 0 {
            return 1;
        }
        (start..types.len())
            .filter(|&i| types[i].0 <= left)
            .map(|i| go(types, i, left - types[i].0))
            .sum()
    }
    go(&types, 0, n)
}

/// Exact count of `class` structures of size `n` by exhaustive enumeration.
pub fn oracle_count(class: &str, n: u64, side: Side, scope: Scope) -> Result<OracleCount> {
    let limit = cap(class, side)?;
    if n > limit {
        return Err(Error::CapExceeded {
            class: class.into(),
            n,
            cap: limit,
        });
    }
    let (count, method) = match side {
        Side::Labelled => {
            let mut count = 0u64;
            for_each_labelled(class, n, scope, |_| count += 1)?;
            (count, "set partitions of the vertex set with every connected component enumerated explicitly")
        }
        Side::Unlabelled => (
            count_unlabelled(class, n, scope),
            "multisets of canonical component types",
        ),
    };
    Ok(OracleCount {
        class: class.into(),
        n,
        side,
        scope,
        count,
        method: method.into(),
    })
}

/// Counts for `n = 0..=max` (clamped to the class cap).
pub fn oracle_table(
    class: &str,
    max: u64,
    side: Side,
    scope: Scope,
    mode: ExecMode,
) -> Result<Vec<OracleCount>> {
    let top = max.min(cap(class, side)?);
    let ns: Vec<u64> = (0..=top).collect();
    exec::try_map(mode, &ns, |&n| oracle_count(class, n, side, scope))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labelled(class: &str, n: u64) -> u64 {
        oracle_count(class, n, Side::Labelled, Scope::Total)
            .unwrap()
            .count
    }

    fn unlabelled(class: &str, n: u64) -> u64 {
        oracle_count(class, n, Side::Unlabelled, Scope::Total)
            .unwrap()
            .count
    }

    #[test]
    fn examples() {
        assert_eq!(labelled("equivalence-relations", 4), 15);
        assert_eq!(labelled("height1-forests", 3), 10);
        assert_eq!(
            oracle_count("broom", 3, Side::Labelled, Scope::Connected)
                .unwrap()
                .count,
            6
        );
        assert_eq!(labelled("broom", 3), 7);
        assert_eq!(unlabelled("integer-partitions", 5), 7);
        assert_eq!(labelled("selection-partitions", 2), 4);
    }

    #[test]
    fn connected_counts() {
        let c = |class: &str, n| {
            oracle_count(class, n, Side::Labelled, Scope::Connected)
                .unwrap()
                .count
        };
        assert_eq!(c("broom", 6), 120);
        assert_eq!(c("selection-partitions", 4), 15);
        assert_eq!(c("height1-forests", 5), 5);
        let u = |class: &str, n| {
            oracle_count(class, n, Side::Unlabelled, Scope::Connected)
                .unwrap()
                .count
        };
        assert_eq!(u("broom", 9), 8);
        assert_eq!(u("selection-partitions", 6), 6);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            oracle_count("equivalence-relations", 11, Side::Labelled, Scope::Total),
            Err(Error::CapExceeded { cap: 10, .. })
        ));
        assert!(matches!(
            oracle_count("integer-partitions", 1, Side::Labelled, Scope::Total),
            Err(Error::CapExceeded { cap: 0, .. })
        ));
        assert!(matches!(
            oracle_count("graphs", 3, Side::Labelled, Scope::Total),
            Err(Error::UnknownClass(_))
        ));
    }

    #[test]
    fn component_decomposition_is_unique() {
        for (class, l, _) in CAPS {
            for n in 0..=l.min(6) {
                let mut seen = BTreeSet::new();
                for_each_labelled(class, n, Scope::Total, |s| {
                    let comps = s.components();
                    let covered: usize = comps.iter().map(Vec::len).sum();
                    assert_eq!(covered, n as usize);
                    assert!(seen.insert(s.clone()), "{class} {n}: duplicate structure");
                })
                .unwrap();
            }
        }
    }

    #[test]
    fn canonical_forms_match_type_multisets() {
        for (class, l, u) in CAPS {
            if l == 0 || u == 0 {
                continue;
            }
            for n in 0..=5 {
                let mut forms = BTreeSet::new();
                for_each_labelled(class, n, Scope::Total, |s| {
                    forms.insert(s.canonical());
                })
                .unwrap();
                assert_eq!(forms.len() as u64, unlabelled(class, n), "{class} at {n}");
            }
        }
    }

    #[test]
    fn tables_agree_across_modes() {
        let par =
            oracle_table("broom", 9, Side::Labelled, Scope::Total, ExecMode::Parallel).unwrap();
        let seq = oracle_table(
            "broom",
            9,
            Side::Labelled,
            Scope::Total,
            ExecMode::Sequential,
        )
        .unwrap();
        assert_eq!(par, seq);
        assert_eq!(par.len(), 10);
        assert_eq!(par[3].csv_row(), "broom,3,labelled,total,7");
    }
}
