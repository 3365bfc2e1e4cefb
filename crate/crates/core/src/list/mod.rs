//! CRC-aided list successive cancellation decoding with pluggable list
//! management: exact sorting, double thresholding (plain and advance), the
//! tuple-based simplified multi-bit double thresholding, and an exhaustive
//! multi-bit expansion engine kept as a test oracle.

pub mod memory;
pub mod prune;
pub mod subt;
pub mod tuple;

pub use prune::{
    advance_rt_index, dts_prune, dts_thresholds, pmu_bit, prune_exact, Candidate, PruneEvent,
    Thresholds, ThresholdVariant,
};
pub use subt::{sp1_decode, sp2_decode, subt_pmu, TupleExpansion};
pub use tuple::{tuple_divide, Census, Tuple, TupleClass};

use crate::channel::{pm_sat_add, Llr, Metric};
use crate::polar::{kron_encode_in_place, BitClass, CodeSpec};
use crate::scd::{f_minsum, g_node};
use crate::{Error, Result};
use memory::LlrBanks;

/// List-management engine selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Full sort of the expanded metrics.
    ExactSort,
    /// Bit-serial double thresholding.
    Dts,
    /// Bit-serial double thresholding with the lowered rejection rank.
    DtsAdvance,
    /// Tuple-level double thresholding over merged multi-bit blocks.
    SmbDts { merged_bits: usize },
    /// Exhaustive multi-bit expansion with exact sorting; test oracle only.
    FullMbd { merged_bits: usize },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::ExactSort => "exact-sort",
            Scheme::Dts => "dts",
            Scheme::DtsAdvance => "dts-advance",
            Scheme::SmbDts { .. } => "smb-dts",
            Scheme::FullMbd { .. } => "full-mbd",
        }
    }

    pub fn merged_bits(&self) -> Option<usize> {
        match self {
            Scheme::SmbDts { merged_bits } | Scheme::FullMbd { merged_bits } => Some(*merged_bits),
            _ => None,
        }
    }
}

/// Decoder configuration.
#[derive(Debug, Clone)]
pub struct ListConfig {
    pub list_size: usize,
    pub scheme: Scheme,
    /// Threshold extraction for the tuple scheme. Defaults to the lowered
    /// rejection rank where one is defined for the list size (the reported
    /// simulation setup); `Some(Standard)` forces the plain rule.
    pub smb_thresholds: Option<ThresholdVariant>,
    /// Record one [`PruneEvent`] per pruning for the property suites.
    pub log_events: bool,
    /// Deep-copy path memories instead of lazy copy; reference mode.
    pub deep_copy_memories: bool,
}

impl ListConfig {
    pub fn new(list_size: usize, scheme: Scheme) -> Self {
        ListConfig {
            list_size,
            scheme,
            smb_thresholds: None,
            log_events: false,
            deep_copy_memories: false,
        }
    }

    pub fn with_smb_thresholds(mut self, v: ThresholdVariant) -> Self {
        self.smb_thresholds = Some(v);
        self
    }
}

/// Decoding result: the selected source word and whether it passed the CRC.
#[derive(Debug, Clone)]
pub struct DecodeOutput {
    pub u_hat: Vec<u8>,
    pub crc_pass: bool,
    pub metric: Metric,
    pub events: Vec<PruneEvent>,
}

#[derive(Clone)]
struct PathState {
    metric: Metric,
    decoded: Vec<u8>,
    ptrs: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
enum LeafKind {
    Sp2Frozen,
    Sp2Reliable,
    Sp1,
    RateInvT { upos: usize },
    MbdBlock,
}

#[derive(Debug, Clone, Copy)]
struct Leaf {
    offset: usize,
    len: usize,
    kind: LeafKind,
}

/// Reusable list decoder for one code spec and configuration.
pub struct ListDecoder<'a> {
    spec: &'a CodeSpec,
    cfg: ListConfig,
    threshold_variant: Option<ThresholdVariant>,
    schedule: Vec<Leaf>,
    banks: LlrBanks,
    cur: Vec<PathState>,
    next: Vec<PathState>,
    active: usize,
    pos: usize,
    cursor: usize,
    events: Vec<PruneEvent>,
    ps_scratch: Vec<u8>,
    cand_buf: Vec<Candidate>,
    span_buf: Vec<u8>,
    span_len: usize,
    theta_buf: Vec<Metric>,
}

impl<'a> ListDecoder<'a> {
    pub fn new(spec: &'a CodeSpec, cfg: ListConfig) -> Result<Self> {
        let l = cfg.list_size;
        if !l.is_power_of_two() || !(2..=1 << 16).contains(&l) {
            return Err(Error::InvalidArgument(format!(
                "list size {l} must be a power of two >= 2"
            )));
        }
        let threshold_variant = match cfg.scheme {
            Scheme::ExactSort | Scheme::FullMbd { .. } => None,
            Scheme::Dts => Some(ThresholdVariant::Standard),
            Scheme::SmbDts { .. } => Some(match cfg.smb_thresholds {
                Some(v) => v,
                None => advance_rt_index(l)
                    .map(|rt_index| ThresholdVariant::Advance { rt_index })
                    .unwrap_or(ThresholdVariant::Standard),
            }),
            Scheme::DtsAdvance => {
                let rt_index = advance_rt_index(l).ok_or_else(|| {
                    Error::Unsupported(format!("dts-advance has no rejection rank for L = {l}"))
                })?;
                Some(ThresholdVariant::Advance { rt_index })
            }
        };
        if let Some(m) = cfg.scheme.merged_bits() {
            if !m.is_power_of_two() || m > spec.len() {
                return Err(Error::InvalidArgument(format!("bad merged_bits {m}")));
            }
            if matches!(cfg.scheme, Scheme::FullMbd { .. }) && m > 4 {
                return Err(Error::Unsupported(
                    "full-mbd enumerates every block pattern; merged_bits <= 4 only".into(),
                ));
            }
        }
        let schedule = build_schedule(spec, cfg.scheme);
        let n = spec.n_log2();
        let template = PathState {
            metric: 0,
            decoded: vec![0; spec.len()],
            ptrs: Vec::new(),
        };
        Ok(ListDecoder {
            spec,
            banks: LlrBanks::new(n, cfg.deep_copy_memories),
            threshold_variant,
            schedule,
            cur: vec![template.clone(); l],
            next: vec![template; l],
            active: 0,
            pos: 0,
            cursor: 0,
            events: Vec::new(),
            ps_scratch: vec![0; spec.len()],
            cand_buf: Vec::new(),
            span_buf: Vec::new(),
            span_len: 1,
            theta_buf: Vec::new(),
            cfg,
        })
    }

    pub fn config(&self) -> &ListConfig {
        &self.cfg
    }

    /// Decodes one frame of quantized channel LLRs.
    pub fn decode(&mut self, llrs: &[Llr]) -> Result<DecodeOutput> {
        if llrs.len() != self.spec.len() {
            return Err(Error::InvalidArgument(format!(
                "frame length {} != N = {}",
                llrs.len(),
                self.spec.len()
            )));
        }
        let n = self.spec.n_log2();
        self.banks.reset();
        self.events.clear();
        self.pos = 0;
        self.cursor = 0;
        self.active = 1;
        self.cur[0].metric = 0;
        self.cur[0].ptrs = self.banks.alloc_path();
        self.banks
            .write(n, &mut self.cur[0].ptrs[n])
            .copy_from_slice(llrs);
        self.node(n, 0)?;
        debug_assert_eq!(self.pos, self.spec.len());
        debug_assert_eq!(self.cursor, self.schedule.len());

        // CRC selection: lowest metric among passing paths, else lowest
        // metric overall with the failure flagged.
        let mut best_pass: Option<usize> = None;
        let mut best_any = 0usize;
        for p in 0..self.active {
            if self.cur[p].metric < self.cur[best_any].metric {
                best_any = p;
            }
            if self.spec.crc_pass(&self.cur[p].decoded) {
                let better = match best_pass {
                    None => true,
                    Some(q) => self.cur[p].metric < self.cur[q].metric,
                };
                if better {
                    best_pass = Some(p);
                }
            }
        }
        let (slot, crc_pass) = match best_pass {
            Some(p) => (p, true),
            None => (best_any, false),
        };
        let out = DecodeOutput {
            u_hat: self.cur[slot].decoded.clone(),
            crc_pass,
            metric: self.cur[slot].metric,
            events: std::mem::take(&mut self.events),
        };
        for p in 0..self.active {
            let ptrs = std::mem::take(&mut self.cur[p].ptrs);
            self.banks.release_path(&ptrs);
        }
        debug_assert!(self.banks.all_released(), "bank refcount leak");
        Ok(out)
    }

    fn node(&mut self, s: usize, offset: usize) -> Result<()> {
        let leaf = self.schedule[self.cursor];
        if leaf.offset == offset && leaf.len == 1 << s {
            self.cursor += 1;
            return self.leaf_event(leaf, s);
        }
        debug_assert!(s > 0, "schedule misaligned with the tree");
        let half = 1usize << (s - 1);
        // F phase over all active paths.
        for p in 0..self.active {
            let read_id = self.cur[p].ptrs[s];
            let (src, dst) = self
                .banks
                .read_write_pair(s, read_id, &mut self.cur[p].ptrs[s - 1]);
            for j in 0..half {
                dst[j] = f_minsum(src[j], src[j + half]);
            }
        }
        self.node(s - 1, offset)?;
        // G phase: partial sums re-encode each path's decoded left span.
        for p in 0..self.active {
            let ps = &mut self.ps_scratch[..half];
            ps.copy_from_slice(&self.cur[p].decoded[offset..offset + half]);
            kron_encode_in_place(ps);
            let read_id = self.cur[p].ptrs[s];
            let (src, dst) = self
                .banks
                .read_write_pair(s, read_id, &mut self.cur[p].ptrs[s - 1]);
            for j in 0..half {
                dst[j] = g_node(src[j], src[j + half], self.ps_scratch[j]);
            }
        }
        self.node(s - 1, offset + half)
    }

    fn leaf_event(&mut self, leaf: Leaf, stage: usize) -> Result<()> {
        debug_assert_eq!(leaf.len, 1 << stage);
        debug_assert_eq!(leaf.offset, self.pos);
        match leaf.kind {
            LeafKind::Sp2Frozen | LeafKind::Sp2Reliable => {
                let frozen = matches!(leaf.kind, LeafKind::Sp2Frozen);
                for p in 0..self.active {
                    let llrs = self.banks.read(stage, self.cur[p].ptrs[stage]);
                    let (metric, bits) = sp2_decode(self.cur[p].metric, llrs, frozen);
                    self.cur[p].metric = metric;
                    self.cur[p].decoded[leaf.offset..leaf.offset + leaf.len]
                        .copy_from_slice(&bits);
                }
                self.pos += leaf.len;
                Ok(())
            }
            LeafKind::Sp1 | LeafKind::RateInvT { .. } => {
                self.cand_buf.clear();
                self.span_buf.clear();
                self.span_len = leaf.len;
                for p in 0..self.active {
                    let llrs = self.banks.read(stage, self.cur[p].ptrs[stage]);
                    let exp = match leaf.kind {
                        LeafKind::RateInvT { upos } => {
                            subt_pmu(self.cur[p].metric, llrs, upos)
                        }
                        _ => sp1_decode(self.cur[p].metric, llrs),
                    };
                    self.cand_buf.push(Candidate { metric: exp.metric0, parent: p, key: 0 });
                    self.span_buf.extend_from_slice(&exp.bits0);
                    self.cand_buf.push(Candidate { metric: exp.metric1, parent: p, key: 1 });
                    self.span_buf.extend_from_slice(&exp.bits1);
                }
                self.select_and_apply(leaf)
            }
            LeafKind::MbdBlock => {
                self.cand_buf.clear();
                self.span_buf.clear();
                self.span_len = leaf.len;
                let info_pos: Vec<usize> = (leaf.offset..leaf.offset + leaf.len)
                    .filter(|&i| self.spec.class(i).is_info())
                    .map(|i| i - leaf.offset)
                    .collect();
                let m_inf = info_pos.len();
                let mut u = vec![0u8; leaf.len];
                let mut v = vec![0u8; leaf.len];
                for p in 0..self.active {
                    for pattern in 0..(1u32 << m_inf) {
                        u.iter_mut().for_each(|b| *b = 0);
                        for (bit_i, &rel) in info_pos.iter().enumerate() {
                            u[rel] = ((pattern >> (m_inf - 1 - bit_i)) & 1) as u8;
                        }
                        v.copy_from_slice(&u);
                        kron_encode_in_place(&mut v);
                        let llrs = self.banks.read(stage, self.cur[p].ptrs[stage]);
                        let delta: Metric = v
                            .iter()
                            .zip(llrs)
                            .map(|(&vj, l)| ((vj ^ l.theta()) as Metric) * l.magnitude() as Metric)
                            .sum();
                        self.cand_buf.push(Candidate {
                            metric: pm_sat_add(self.cur[p].metric, delta.min(crate::channel::PM_MAX)),
                            parent: p,
                            key: pattern,
                        });
                        self.span_buf.extend_from_slice(&u);
                    }
                }
                self.select_and_apply(leaf)
            }
        }
    }

    fn select_and_apply(&mut self, leaf: Leaf) -> Result<()> {
        let l = self.cfg.list_size;
        let mut survivors: Vec<usize> = if self.cand_buf.len() <= l {
            (0..self.cand_buf.len()).collect()
        } else {
            let (survivors, thresholds) = match self.threshold_variant {
                None => (prune_exact(&self.cand_buf, l), None),
                Some(variant) => {
                    // Per-parent minimum of the expanded pair feeds the
                    // threshold extraction for this event.
                    self.theta_buf.clear();
                    for pair in self.cand_buf.chunks(2) {
                        self.theta_buf.push(pair[0].metric.min(pair[1].metric));
                    }
                    self.theta_buf.sort_unstable();
                    let th = dts_thresholds(&self.theta_buf, variant);
                    (dts_prune(&self.cand_buf, l, th), Some(th))
                }
            };
            if self.cfg.log_events {
                self.events.push(PruneEvent {
                    bit_index: leaf.offset,
                    tuple_len: leaf.len,
                    expanded: self.cand_buf.clone(),
                    thresholds,
                    survivors: survivors.clone(),
                });
            }
            survivors
        };
        // The thresholding formulation keeps the survivor metrics sorted, so
        // the next event's expanded-index scan walks parents from the best
        // down. Exact sorting keeps genealogy order instead.
        if self.threshold_variant.is_some() {
            survivors.sort_by_key(|&ci| (self.cand_buf[ci].metric, ci));
        }
        debug_assert!(!survivors.is_empty());
        for (slot, &ci) in survivors.iter().enumerate() {
            let c = self.cand_buf[ci];
            let parent_state = &self.cur[c.parent];
            debug_assert!(c.metric >= parent_state.metric, "metric monotonicity");
            let next_state = &mut self.next[slot];
            next_state.metric = c.metric;
            next_state.decoded[..self.pos].copy_from_slice(&parent_state.decoded[..self.pos]);
            next_state.decoded[self.pos..self.pos + leaf.len]
                .copy_from_slice(&self.span_buf[ci * self.span_len..(ci + 1) * self.span_len]);
            self.banks
                .clone_path_into(&parent_state.ptrs, &mut next_state.ptrs);
        }
        for p in 0..self.active {
            let ptrs = std::mem::take(&mut self.cur[p].ptrs);
            self.banks.release_path(&ptrs);
        }
        std::mem::swap(&mut self.cur, &mut self.next);
        self.active = survivors.len();
        self.pos += leaf.len;
        Ok(())
    }

    /// Active path count; exposed for the expansion-growth invariants.
    pub fn active_paths(&self) -> usize {
        self.active
    }
}

fn build_schedule(spec: &CodeSpec, scheme: Scheme) -> Vec<Leaf> {
    match scheme {
        Scheme::ExactSort | Scheme::Dts | Scheme::DtsAdvance => spec
            .classes()
            .iter()
            .enumerate()
            .map(|(i, c)| Leaf {
                offset: i,
                len: 1,
                kind: match c {
                    BitClass::Frozen => LeafKind::Sp2Frozen,
                    BitClass::Reliable => LeafKind::Sp2Reliable,
                    BitClass::Unreliable => LeafKind::Sp1,
                },
            })
            .collect(),
        Scheme::SmbDts { merged_bits } => tuple_divide(spec, merged_bits)
            .into_iter()
            .map(|t| Leaf {
                offset: t.offset,
                len: t.len,
                kind: match t.class {
                    TupleClass::Sp2Frozen => LeafKind::Sp2Frozen,
                    TupleClass::Sp2Reliable => LeafKind::Sp2Reliable,
                    TupleClass::Sp1 => LeafKind::Sp1,
                    TupleClass::RateInvT => LeafKind::RateInvT {
                        upos: t.unreliable_pos.unwrap_or(0),
                    },
                },
            })
            .collect(),
        Scheme::FullMbd { merged_bits } => (0..spec.len() / merged_bits)
            .map(|b| Leaf {
                offset: b * merged_bits,
                len: merged_bits,
                kind: LeafKind::MbdBlock,
            })
            .collect(),
    }
}

/// One-shot decode with a fresh engine.
pub fn lscd_decode(
    llrs: &[Llr],
    spec: &CodeSpec,
    list_size: usize,
    scheme: Scheme,
) -> Result<DecodeOutput> {
    ListDecoder::new(spec, ListConfig::new(list_size, scheme))?.decode(llrs)
}

/// Serializes pruning events as JSON lines.
pub fn write_events_jsonl<W: std::io::Write>(events: &[PruneEvent], mut w: W) -> Result<()> {
    for e in events {
        serde_json::to_writer(&mut w, e).map_err(|e| Error::Parse(e.to_string()))?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
