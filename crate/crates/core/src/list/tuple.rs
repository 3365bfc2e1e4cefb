//! Tuple dividing: recursive split of aligned blocks into the admissible
//! leaf patterns the multi-bit list-management datapath supports.

use crate::polar::{BitClass, CodeSpec};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Admissible leaf patterns. A single unreliable bit counts as SP1; single
/// frozen or reliable bits count as SP2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TupleClass {
    /// One unreliable bit, all others reliable.
    Sp1,
    /// All bits frozen.
    Sp2Frozen,
    /// All bits reliable.
    Sp2Reliable,
    /// One unreliable bit, all others frozen.
    RateInvT,
}

impl TupleClass {
    pub fn is_sp2(self) -> bool {
        matches!(self, TupleClass::Sp2Frozen | TupleClass::Sp2Reliable)
    }
}

/// A leaf of the trimmed scheduling tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tuple {
    pub offset: usize,
    pub len: usize,
    pub class: TupleClass,
    /// Index of the unreliable bit within the tuple; absent for SP2.
    pub unreliable_pos: Option<usize>,
}

fn classify(classes: &[BitClass]) -> Option<(TupleClass, Option<usize>)> {
    if classes.len() == 1 {
        return Some(match classes[0] {
            BitClass::Frozen => (TupleClass::Sp2Frozen, None),
            BitClass::Reliable => (TupleClass::Sp2Reliable, None),
            BitClass::Unreliable => (TupleClass::Sp1, Some(0)),
        });
    }
    let frozen = classes.iter().filter(|c| **c == BitClass::Frozen).count();
    let unreliable = classes.iter().filter(|c| **c == BitClass::Unreliable).count();
    let reliable = classes.len() - frozen - unreliable;
    match (frozen, reliable, unreliable) {
        (f, 0, 0) if f == classes.len() => Some((TupleClass::Sp2Frozen, None)),
        (0, r, 0) if r == classes.len() => Some((TupleClass::Sp2Reliable, None)),
        (0, _, 1) => {
            let pos = classes.iter().position(|c| *c == BitClass::Unreliable);
            Some((TupleClass::Sp1, pos))
        }
        (_, 0, 1) => {
            let pos = classes.iter().position(|c| *c == BitClass::Unreliable);
            Some((TupleClass::RateInvT, pos))
        }
        _ => None,
    }
}

fn divide_rec(spec: &CodeSpec, offset: usize, len: usize, out: &mut Vec<Tuple>) {
    let classes = &spec.classes()[offset..offset + len];
    if let Some((class, unreliable_pos)) = classify(classes) {
        out.push(Tuple {
            offset,
            len,
            class,
            unreliable_pos,
        });
        return;
    }
    let half = len / 2;
    divide_rec(spec, offset, half, out);
    divide_rec(spec, offset + half, half, out);
}

/// Splits every aligned `merged_bits`-wide block of the code recursively
/// until each leaf is admissible; leaves are emitted in decoding order.
///
/// `merged_bits` must be a power of two not above the code length; the
/// hardware-relevant settings are 2, 4 and 8.
pub fn tuple_divide(spec: &CodeSpec, merged_bits: usize) -> Vec<Tuple> {
    assert!(
        merged_bits.is_power_of_two() && merged_bits <= spec.len(),
        "merged_bits must be a power of two within the code length"
    );
    let mut out = Vec::new();
    let mut offset = 0;
    while offset < spec.len() {
        divide_rec(spec, offset, merged_bits, &mut out);
        offset += merged_bits;
    }
    out
}

/// Tuple counts per (length, class), in the shape of the latency tables.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Census {
    /// length -> [SP1, SP2, rate-1/T] counts; SP2 merges frozen and reliable.
    pub by_len: BTreeMap<usize, [usize; 3]>,
}

impl Census {
    pub fn of(tuples: &[Tuple]) -> Census {
        let mut by_len: BTreeMap<usize, [usize; 3]> = BTreeMap::new();
        for t in tuples {
            let slot = by_len.entry(t.len).or_default();
            match t.class {
                TupleClass::Sp1 => slot[0] += 1,
                TupleClass::Sp2Frozen | TupleClass::Sp2Reliable => slot[1] += 1,
                TupleClass::RateInvT => slot[2] += 1,
            }
        }
        Census { by_len }
    }

    pub fn singles(&self) -> usize {
        self.by_len.get(&1).map(|c| c.iter().sum()).unwrap_or(0)
    }

    pub fn counts(&self, len: usize) -> [usize; 3] {
        self.by_len.get(&len).copied().unwrap_or([0; 3])
    }

    /// Table rendering: one row per tuple length.
    pub fn render(&self) -> String {
        let mut s = String::from("len   SP1   SP2   rate-1/T\n");
        for (len, c) in &self.by_len {
            s.push_str(&format!("{len:<4}  {:<4}  {:<4}  {:<4}\n", c[0], c[1], c[2]));
        }
        s
    }
}
