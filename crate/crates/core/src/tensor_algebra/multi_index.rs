use crate::numerics::binom;

/// Number of canonical (non-decreasing) multi-indices of length `rank` over
/// `dim` index values.
pub fn multiset_count(dim: usize, rank: usize) -> usize {
    if dim == 0 {
        return usize::from(rank == 0);
    }
    binom(dim + rank - 1, rank)
}

/// Number of independent components of a symmetric rank-`m` tensor over
/// ℝ^{1+n}: binomial(n+m, m).
pub fn dim_sym(n: usize, m: usize) -> usize {
    multiset_count(n + 1, m)
}

/// An ordered tuple of tensor slot indices. Canonical form is non-decreasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(mut entries: Vec<usize>) -> Self {
        entries.sort_unstable();
        MultiIndex(entries)
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of distinct orderings of this index (multinomial coefficient).
    pub fn multiplicity(&self) -> usize {
        let mut out = factorial(self.0.len());
        let mut run = 1;
        for w in self.0.windows(2) {
            if w[0] == w[1] {
                run += 1;
            } else {
                out /= factorial(run);
                run = 1;
            }
        }
        if !self.0.is_empty() {
            out /= factorial(run);
        }
        out
    }

    pub fn key(&self) -> String {
        self.0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
    }
}

fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// Position of a sorted multi-index in lexicographic order among all
/// canonical multi-indices of the same length over `dim` values.
pub fn rank_sorted(dim: usize, sorted: &[usize]) -> usize {
    let m = sorted.len();
    let mut pos = 0;
    let mut lo = 0;
    for (j, &a) in sorted.iter().enumerate() {
        let remaining = m - j - 1;
        for v in lo..a {
            pos += multiset_count(dim - v, remaining);
        }
        lo = a;
    }
    pos
}

/// Iterator over canonical multi-indices in lexicographic order.
pub struct CanonicalIter {
    dim: usize,
    current: Option<Vec<usize>>,
}

impl CanonicalIter {
    pub fn new(dim: usize, rank: usize) -> Self {
        let current = if dim == 0 && rank > 0 { None } else { Some(vec![0; rank]) };
        CanonicalIter { dim, current }
    }
}

impl Iterator for CanonicalIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.take()?;
        let mut next = cur.clone();
        let mut j = next.len();
        while j > 0 {
            j -= 1;
            if next[j] + 1 < self.dim {
                let v = next[j] + 1;
                for slot in next.iter_mut().skip(j) {
                    *slot = v;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(cur)
    }
}

/// Iterator over every (not necessarily sorted) index tuple in row-major order.
pub struct FullIter {
    dim: usize,
    current: Option<Vec<usize>>,
}

impl FullIter {
    pub fn new(dim: usize, rank: usize) -> Self {
        let current = if dim == 0 && rank > 0 { None } else { Some(vec![0; rank]) };
        FullIter { dim, current }
    }
}

impl Iterator for FullIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.take()?;
        let mut next = cur.clone();
        let mut j = next.len();
        while j > 0 {
            j -= 1;
            next[j] += 1;
            if next[j] < self.dim {
                self.current = Some(next);
                break;
            }
            next[j] = 0;
        }
        Some(cur)
    }
}
