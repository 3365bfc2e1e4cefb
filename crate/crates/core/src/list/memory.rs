//! Lazy-copy LLR memories for the list decoder.
//!
//! Each decoding path holds one bank pointer per stage; duplicating a path
//! only retains the pointers, and a bank is physically copied the first time
//! a sharing path writes to it. A deep-copy mode materializes every bank on
//! duplication instead and exists as the reference the lazy scheme is tested
//! against.

use crate::channel::Llr;

struct StagePool {
    width: usize,
    storage: Vec<Llr>,
    refcnt: Vec<u32>,
    free: Vec<usize>,
}

impl StagePool {
    fn new(width: usize) -> Self {
        StagePool {
            width,
            storage: Vec::new(),
            refcnt: Vec::new(),
            free: Vec::new(),
        }
    }

    fn alloc(&mut self) -> usize {
        if let Some(id) = self.free.pop() {
            self.refcnt[id] = 1;
            return id;
        }
        let id = self.refcnt.len();
        self.refcnt.push(1);
        self.storage.resize(self.storage.len() + self.width, Llr::default());
        id
    }

    fn slice(&self, id: usize) -> &[Llr] {
        &self.storage[id * self.width..(id + 1) * self.width]
    }

    fn slice_mut(&mut self, id: usize) -> &mut [Llr] {
        &mut self.storage[id * self.width..(id + 1) * self.width]
    }

    fn reset(&mut self) {
        self.refcnt.clear();
        self.free.clear();
        self.storage.clear();
    }
}

/// Per-stage bank pools plus the per-path pointer tables.
pub struct LlrBanks {
    pools: Vec<StagePool>,
    deep_copy: bool,
}

impl LlrBanks {
    pub fn new(n: usize, deep_copy: bool) -> Self {
        LlrBanks {
            pools: (0..=n).map(|s| StagePool::new(1 << s)).collect(),
            deep_copy,
        }
    }

    pub fn reset(&mut self) {
        for p in &mut self.pools {
            p.reset();
        }
    }

    /// Allocates a fresh pointer table for an initial path.
    pub fn alloc_path(&mut self) -> Vec<usize> {
        self.pools.iter_mut().map(|p| p.alloc()).collect()
    }

    /// Retains the parent's banks for a duplicated path. In deep-copy mode
    /// every bank is materialized immediately.
    pub fn clone_path(&mut self, parent: &[usize]) -> Vec<usize> {
        let mut out = Vec::new();
        self.clone_path_into(parent, &mut out);
        out
    }

    /// [`LlrBanks::clone_path`] into a reused pointer table.
    pub fn clone_path_into(&mut self, parent: &[usize], out: &mut Vec<usize>) {
        out.clear();
        if self.deep_copy {
            for (s, &id) in parent.iter().enumerate() {
                let pool = &mut self.pools[s];
                let new_id = pool.alloc();
                let w = pool.width;
                pool.storage.copy_within(id * w..(id + 1) * w, new_id * w);
                out.push(new_id);
            }
        } else {
            for (s, &id) in parent.iter().enumerate() {
                self.pools[s].refcnt[id] += 1;
                out.push(id);
            }
        }
    }

    /// Releases every bank of a path.
    pub fn release_path(&mut self, ptrs: &[usize]) {
        for (s, &id) in ptrs.iter().enumerate() {
            let pool = &mut self.pools[s];
            debug_assert!(pool.refcnt[id] > 0, "release of a dead bank");
            pool.refcnt[id] -= 1;
            if pool.refcnt[id] == 0 {
                pool.free.push(id);
            }
        }
    }

    pub fn read(&self, stage: usize, id: usize) -> &[Llr] {
        debug_assert!(self.pools[stage].refcnt[id] > 0, "read of a dead bank");
        self.pools[stage].slice(id)
    }

    /// Copy-on-write: returns a uniquely owned mutable bank for the path,
    /// cloning the shared contents first if needed, and updates the pointer.
    pub fn write(&mut self, stage: usize, id: &mut usize) -> &mut [Llr] {
        let pool = &mut self.pools[stage];
        debug_assert!(pool.refcnt[*id] > 0);
        if pool.refcnt[*id] > 1 {
            pool.refcnt[*id] -= 1;
            let new_id = pool.alloc();
            let w = pool.width;
            pool.storage.copy_within(*id * w..(*id + 1) * w, new_id * w);
            *id = new_id;
        }
        self.pools[stage].slice_mut(*id)
    }

    /// Reads stage `stage` of one path while writing stage `stage - 1`,
    /// with copy-on-write on the written bank.
    pub fn read_write_pair(
        &mut self,
        stage: usize,
        read_id: usize,
        write_id: &mut usize,
    ) -> (&[Llr], &mut [Llr]) {
        {
            let pool = &mut self.pools[stage - 1];
            debug_assert!(pool.refcnt[*write_id] > 0);
            if pool.refcnt[*write_id] > 1 {
                pool.refcnt[*write_id] -= 1;
                let new_id = pool.alloc();
                let w = pool.width;
                pool.storage.copy_within(*write_id * w..(*write_id + 1) * w, new_id * w);
                *write_id = new_id;
            }
        }
        let (lo, hi) = self.pools.split_at_mut(stage);
        (hi[0].slice(read_id), lo[stage - 1].slice_mut(*write_id))
    }

    /// True when every bank has been released; checked after a decode to
    /// pin reference-count consistency.
    pub fn all_released(&self) -> bool {
        self.pools
            .iter()
            .all(|p| p.refcnt.iter().all(|&c| c == 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cow_isolates_writers() {
        let mut banks = LlrBanks::new(3, false);
        let mut a = banks.alloc_path();
        banks.write(2, &mut a[2])[0] = Llr::from_value(5);
        let mut b = banks.clone_path(&a);
        assert_eq!(a[2], b[2], "shared until written");
        banks.write(2, &mut b[2])[0] = Llr::from_value(-7);
        assert_ne!(a[2], b[2], "copy on write splits the bank");
        assert_eq!(banks.read(2, a[2])[0].value(), 5);
        assert_eq!(banks.read(2, b[2])[0].value(), -7);
        banks.release_path(&a);
        banks.release_path(&b);
        assert!(banks.all_released());
    }

    #[test]
    fn release_reuses_banks() {
        let mut banks = LlrBanks::new(2, false);
        let a = banks.alloc_path();
        let b = banks.clone_path(&a);
        banks.release_path(&a);
        banks.release_path(&b);
        assert!(banks.all_released());
        let c = banks.alloc_path();
        banks.release_path(&c);
        assert!(banks.all_released());
    }
}
