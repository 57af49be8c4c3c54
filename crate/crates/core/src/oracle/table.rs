use crate::group::GroupSpec;

use super::sumset::BitSet;

/// Automorphisms kept for state canonicalization. Any subset of the
/// automorphism group is sound; larger sets merge more states but cost more
/// per lookup.
const AUTOMORPHISM_CAP: usize = 512;
/// Generator-image tuples inspected before giving up on finding more
/// automorphisms.
const TUPLE_CAP: usize = 200_000;

/// A permutation of group elements acting on bitsets.
#[derive(Debug, Clone)]
pub(crate) struct Perm {
    pub map: Box<[u32]>,
    /// For single-word sets, `bytes[b * 256 + v]` is the image of byte value
    /// `v` at byte position `b`.
    bytes: Option<Box<[u64]>>,
}

impl Perm {
    fn new(map: Vec<u32>) -> Self {
        let bytes = (map.len() <= 64).then(|| {
            let mut table = vec![0u64; 8 * 256];
            for b in 0..8 {
                for v in 1..256usize {
                    let mut image = 0u64;
                    for bit in 0..8 {
                        let i = b * 8 + bit;
                        if v >> bit & 1 == 1 && i < map.len() {
                            image |= 1 << map[i];
                        }
                    }
                    table[b * 256 + v] = image;
                }
            }
            table.into_boxed_slice()
        });
        Perm {
            map: map.into_boxed_slice(),
            bytes,
        }
    }

    /// ORs the image of `src` into `dst`.
    #[inline]
    pub fn apply_into(&self, src: &[u64], dst: &mut [u64]) {
        match &self.bytes {
            Some(table) => {
                let x = src[0];
                let mut out = 0u64;
                for b in 0..8 {
                    let v = (x >> (8 * b)) as usize & 0xff;
                    if v != 0 {
                        out |= table[b * 256 + v];
                    }
                }
                dst[0] |= out;
            }
            None => {
                for (k, &w) in src.iter().enumerate() {
                    let mut w = w;
                    while w != 0 {
                        let i = k * 64 + w.trailing_zeros() as usize;
                        w &= w - 1;
                        let j = self.map[i] as usize;
                        dst[j / 64] |= 1 << (j % 64);
                    }
                }
            }
        }
    }

    pub fn apply(&self, set: &BitSet) -> BitSet {
        let mut out = BitSet::new(self.map.len());
        self.apply_into(set.words(), out.words_mut());
        out
    }
}

/// Dense addition table of a small group, indexed by element index.
#[derive(Debug, Clone)]
pub(crate) struct GroupTable {
    pub size: usize,
    pub exponent: u64,
    add: Vec<u32>,
    pub neg: Vec<u32>,
    pub order: Vec<u64>,
    /// `x -> x + g` for every element `g`.
    pub translations: Vec<Perm>,
    /// Nontrivial automorphisms, possibly only some of them.
    pub automorphisms: Vec<Perm>,
}

impl GroupTable {
    pub fn new(group: &GroupSpec) -> Self {
        let size = group.order() as usize;
        let elems: Vec<_> = group.elements().collect();
        let mut add = vec![0u32; size * size];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate().skip(i) {
                let s = group.index_of(&group.add(a, b)) as u32;
                add[i * size + j] = s;
                add[j * size + i] = s;
            }
        }
        let neg = elems.iter().map(|g| group.index_of(&group.neg(g)) as u32).collect();
        let order: Vec<u64> = elems.iter().map(|g| group.element_order(g)).collect();
        let translations = (0..size)
            .map(|g| Perm::new((0..size).map(|x| add[x * size + g]).collect()))
            .collect();
        let mut table = GroupTable {
            size,
            exponent: group.exponent(),
            add,
            neg,
            order,
            translations,
            automorphisms: Vec::new(),
        };
        table.automorphisms = table.find_automorphisms(group.factors());
        table
    }

    /// Automorphisms as images of the standard generators: `e_i` may go to
    /// any `h_i` with `n_i h_i = 0`, and the map must stay injective on
    /// each partial span.
    fn find_automorphisms(&self, factors: &[u64]) -> Vec<Perm> {
        let mut found = Vec::new();
        let mut tuples = 0usize;
        self.extend_images(factors, vec![0], &mut found, &mut tuples);
        found
    }

    fn extend_images(&self, factors: &[u64], span: Vec<u32>, found: &mut Vec<Perm>, tuples: &mut usize) {
        if found.len() >= AUTOMORPHISM_CAP || *tuples >= TUPLE_CAP {
            return;
        }
        let Some((&n, rest)) = factors.split_first() else {
            let identity = span.iter().enumerate().all(|(i, &x)| i == x as usize);
            if !identity {
                found.push(Perm::new(span));
            }
            return;
        };
        for h in 0..self.size {
            if n % self.order[h] != 0 {
                continue;
            }
            *tuples += 1;
            if *tuples >= TUPLE_CAP {
                return;
            }
            let mut seen = vec![false; self.size];
            let mut next = Vec::with_capacity(span.len() * n as usize);
            let mut injective = true;
            'outer: for &x in &span {
                let mut y = x as usize;
                for _ in 0..n {
                    if seen[y] {
                        injective = false;
                        break 'outer;
                    }
                    seen[y] = true;
                    next.push(y as u32);
                    y = self.add(y, h);
                }
            }
            if injective {
                self.extend_images(rest, next, found, tuples);
                if found.len() >= AUTOMORPHISM_CAP {
                    return;
                }
            }
        }
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.size + b] as usize
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg[b] as usize)
    }

    /// `exp / ord(g)`: the cross number of `g` scaled by the exponent.
    #[inline]
    pub fn weight(&self, g: usize) -> u32 {
        (self.exponent / self.order[g]) as u32
    }

    /// Indices of elements whose order divides `m`.
    pub fn torsion(&self, m: u64) -> Vec<usize> {
        (0..self.size).filter(|&g| m.is_multiple_of(self.order[g])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_group_spec;

    fn automorphism_count(spec: &str) -> usize {
        GroupTable::new(&parse_group_spec(spec).unwrap()).automorphisms.len() + 1
    }

    #[test]
    fn automorphism_group_orders() {
        assert_eq!(automorphism_count("12"), 4);
        assert_eq!(automorphism_count("2,2"), 6);
        assert_eq!(automorphism_count("2,4"), 8);
        assert_eq!(automorphism_count("3,3"), 48);
        assert_eq!(automorphism_count("4,12"), 192);
    }

    #[test]
    fn automorphisms_respect_addition() {
        for spec in ["2,4", "3,6", "2,2,2", ""] {
            let table = GroupTable::new(&parse_group_spec(spec).unwrap());
            for perm in &table.automorphisms {
                for a in 0..table.size {
                    for b in 0..table.size {
                        let lhs = perm.map[table.add(a, b)];
                        let rhs = table.add(perm.map[a] as usize, perm.map[b] as usize) as u32;
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn byte_tables_match_bitwise_images() {
        let table = GroupTable::new(&parse_group_spec("2,24").unwrap());
        let mut set = BitSet::new(table.size);
        for i in [0, 5, 17, 33, 47] {
            set.insert(i);
        }
        for perm in table.translations.iter().chain(&table.automorphisms) {
            let image = perm.apply(&set);
            let expected: Vec<usize> = {
                let mut v: Vec<usize> = set.iter().map(|i| perm.map[i] as usize).collect();
                v.sort();
                v
            };
            assert_eq!(image.iter().collect::<Vec<_>>(), expected);
        }
    }
}
