use std::collections::HashMap;

const DENSE_LIMIT: usize = 1 << 20;

/// Classes of a list of tuples under the joint value of some columns.
/// Class ids are assigned in order of first occurrence.
#[derive(Clone, Debug)]
pub(crate) struct Partition {
    pub ids: Vec<u32>,
    pub count: usize,
}

impl Partition {
    pub fn trivial(n: usize) -> Self {
        Partition { ids: vec![0; n], count: usize::from(n > 0) }
    }

    /// Splits every class by the value of `col`, whose entries are `< radix`.
    pub fn refine(&mut self, col: &[u32], radix: usize) {
        if radix <= 1 || self.ids.is_empty() {
            return;
        }
        let mut next = 0u32;
        match self.count.checked_mul(radix).filter(|&n| n <= DENSE_LIMIT) {
            Some(slots) => {
                let mut map = vec![u32::MAX; slots];
                for (id, &v) in self.ids.iter_mut().zip(col) {
                    let slot = &mut map[*id as usize * radix + v as usize];
                    if *slot == u32::MAX {
                        *slot = next;
                        next += 1;
                    }
                    *id = *slot;
                }
            }
            None => {
                let mut map: HashMap<(u32, u32), u32> = HashMap::new();
                for (id, &v) in self.ids.iter_mut().zip(col) {
                    *id = *map.entry((*id, v)).or_insert_with(|| {
                        next += 1;
                        next - 1
                    });
                }
            }
        }
        self.count = next as usize;
    }

    /// Tuples grouped by class, in class-id order.
    pub fn classes(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.count];
        for (t, &id) in self.ids.iter().enumerate() {
            out[id as usize].push(t as u32);
        }
        out
    }
}

/// True when equal `base` ids always carry equal `target` ids.
pub(crate) fn separates(base: &Partition, target: &Partition) -> bool {
    let mut seen = vec![u32::MAX; base.count];
    base.ids.iter().zip(&target.ids).all(|(&b, &t)| {
        let s = &mut seen[b as usize];
        if *s == u32::MAX {
            *s = t;
        }
        *s == t
    })
}
