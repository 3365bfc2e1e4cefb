//! Single-unreliable-bit tuple decoding: the rate-1/T closed form, the SP1
//! parity shortcut and the SP2 fast paths.
//!
//! All routines take the `T = 2^t` LLRs at the tuple root and return decoded
//! source-domain bits; the stage-`t` codeword hypothesis is mapped back
//! through the (involutive) polar transform.

use crate::channel::{pm_sat_add, Llr, Metric};
use crate::polar::kron_encode_in_place;

/// Both expansions of a tuple event: hypothesis 0 and 1 for the unreliable
/// bit, with their updated metrics and decoded source bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleExpansion {
    pub metric0: Metric,
    pub metric1: Metric,
    pub bits0: Vec<u8>,
    pub bits1: Vec<u8>,
}

fn mismatch_penalty(v: &[u8], llrs: &[Llr]) -> Metric {
    v.iter()
        .zip(llrs)
        .map(|(&vj, l)| ((vj ^ l.theta()) as Metric) * l.magnitude() as Metric)
        .sum::<Metric>()
        .min(crate::channel::PM_MAX)
}

/// Rate-1/T tuple: all bits frozen except one unreliable bit, so each
/// hypothesis has a unique stage-t encoding and no search is needed. The
/// penalties are the sign-mismatch magnitude sums of the two encodings.
pub fn subt_pmu(gamma: Metric, llrs: &[Llr], unreliable_pos: usize) -> TupleExpansion {
    let t_len = llrs.len();
    debug_assert!(t_len.is_power_of_two() && unreliable_pos < t_len);
    // Hypothesis 0: the all-zero source block; hypothesis 1: the unit vector
    // at the unreliable position.
    let va = vec![0u8; t_len];
    let mut vb = vec![0u8; t_len];
    vb[unreliable_pos] = 1;
    kron_encode_in_place(&mut vb);
    let delta_a = mismatch_penalty(&va, llrs);
    let delta_b = mismatch_penalty(&vb, llrs);
    let mut bits1 = vec![0u8; t_len];
    bits1[unreliable_pos] = 1;
    TupleExpansion {
        metric0: pm_sat_add(gamma, delta_a),
        metric1: pm_sat_add(gamma, delta_b),
        bits0: vec![0u8; t_len],
        bits1,
    }
}

/// SP1 tuple (one unreliable bit, rest reliable): treated as a single
/// parity-check code over the hard decisions. The best even-parity and
/// odd-parity stage-t words differ from the hard decisions in at most the
/// least-confident position, so the two penalties are 0 and that magnitude.
pub fn sp1_decode(gamma: Metric, llrs: &[Llr]) -> TupleExpansion {
    let t_len = llrs.len();
    debug_assert!(t_len.is_power_of_two());
    let mut k = 0;
    for (j, l) in llrs.iter().enumerate() {
        if l.magnitude() < llrs[k].magnitude() {
            k = j; // lowest index wins ties
        }
    }
    let hd: Vec<u8> = llrs.iter().map(|l| l.theta()).collect();
    let eta_a = hd.iter().fold(0u8, |acc, &b| acc ^ b);
    let eta_b = 1 ^ eta_a;
    let min_mag = llrs[k].magnitude() as Metric;
    let mut va = hd.clone();
    va[k] ^= eta_a;
    let mut vb = hd;
    vb[k] ^= eta_b;
    debug_assert_eq!(va.iter().fold(0u8, |a, &b| a ^ b), 0, "even parity");
    debug_assert_eq!(vb.iter().fold(0u8, |a, &b| a ^ b), 1, "odd parity");
    let pen_a = if eta_a == 1 { min_mag } else { 0 };
    let pen_b = if eta_b == 1 { min_mag } else { 0 };
    kron_encode_in_place(&mut va);
    kron_encode_in_place(&mut vb);
    TupleExpansion {
        metric0: pm_sat_add(gamma, pen_a),
        metric1: pm_sat_add(gamma, pen_b),
        bits0: va,
        bits1: vb,
    }
}

/// SP2 tuples expand no paths. Frozen: all-zero bits, metric charged with
/// every sign mismatch. Reliable: hard decisions mapped back to source bits,
/// metric unchanged.
pub fn sp2_decode(gamma: Metric, llrs: &[Llr], frozen: bool) -> (Metric, Vec<u8>) {
    if frozen {
        let delta = llrs
            .iter()
            .map(|l| (l.theta() as Metric) * l.magnitude() as Metric)
            .sum::<Metric>()
            .min(crate::channel::PM_MAX);
        (pm_sat_add(gamma, delta), vec![0u8; llrs.len()])
    } else {
        let mut v: Vec<u8> = llrs.iter().map(|l| l.theta()).collect();
        kron_encode_in_place(&mut v);
        (gamma, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::list::prune::pmu_bit;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn llrs(vals: &[i32]) -> Vec<Llr> {
        vals.iter().map(|&v| Llr::from_value(v)).collect()
    }

    // Brute-force maximum-likelihood detection over the stage-t words with
    // the unreliable bit pinned to each hypothesis.
    fn mld_oracle(gamma: Metric, ls: &[Llr], classes: &[(bool, bool)]) -> TupleExpansion {
        // classes: per position (is_frozen, is_unreliable); exactly one unreliable
        let t_len = ls.len();
        let upos = classes.iter().position(|c| c.1).unwrap();
        let mut best: [Option<(Metric, Vec<u8>)>; 2] = [None, None];
        for pattern in 0..(1usize << t_len) {
            let u: Vec<u8> = (0..t_len).map(|j| ((pattern >> j) & 1) as u8).collect();
            let valid = classes
                .iter()
                .zip(&u)
                .all(|((frozen, _), &b)| !(*frozen && b == 1));
            if !valid {
                continue;
            }
            let mut v = u.clone();
            kron_encode_in_place(&mut v);
            let delta: Metric = v
                .iter()
                .zip(ls)
                .map(|(&vj, l)| ((vj ^ l.theta()) as Metric) * l.magnitude() as Metric)
                .sum();
            let hyp = u[upos] as usize;
            let m = pm_sat_add(gamma, delta.min(crate::channel::PM_MAX));
            let better = match &best[hyp] {
                None => true,
                Some((bm, _)) => m < *bm,
            };
            if better {
                best[hyp] = Some((m, u));
            }
        }
        let (m0, b0) = best[0].clone().unwrap();
        let (m1, b1) = best[1].clone().unwrap();
        TupleExpansion { metric0: m0, metric1: m1, bits0: b0, bits1: b1 }
    }

    #[test]
    fn subt_pmu_no_mismatch_means_zero_penalty() {
        let ls = llrs(&[3, 5, 2, 7]);
        let e = subt_pmu(9, &ls, 3);
        assert_eq!(e.metric0, 9, "all signs already match the zero word");
    }

    #[test]
    fn subt_pmu_two_bit_example() {
        // [F, U] with LLRs (+3, +5): hypothesis 1 encodes to the all-ones
        // word and pays both magnitudes.
        let ls = llrs(&[3, 5]);
        let e = subt_pmu(0, &ls, 1);
        assert_eq!(e.metric0, 0);
        assert_eq!(e.metric1, 8);
        assert_eq!(e.bits0, vec![0, 0]);
        assert_eq!(e.bits1, vec![0, 1]);
    }

    #[test]
    fn subt_pmu_matches_exhaustive_mld() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for _ in 0..3000 {
            let t_log = rng.gen_range(1..=3);
            let t_len = 1usize << t_log;
            let upos = rng.gen_range(0..t_len);
            let ls: Vec<Llr> = (0..t_len).map(|_| Llr::from_value(rng.gen_range(-31..=31))).collect();
            let gamma = rng.gen_range(0..128);
            let got = subt_pmu(gamma, &ls, upos);
            let classes: Vec<(bool, bool)> = (0..t_len).map(|j| (j != upos, j == upos)).collect();
            let want = mld_oracle(gamma, &ls, &classes);
            assert_eq!(got, want);
        }
    }

    #[test]
    fn sp1_example_from_parity_rule() {
        let ls = llrs(&[9, 2, 7, 4]);
        let e = sp1_decode(0, &ls);
        assert_eq!((e.metric0, e.metric1), (0, 2));
        // eta_a = 0: stage-t word is the hard decisions [0,0,0,0]
        assert_eq!(e.bits0, vec![0, 0, 0, 0]);
        // eta_b = 1 flips position 1: [0,1,0,0] encodes back to itself here
        let mut vb = vec![0u8, 1, 0, 0];
        kron_encode_in_place(&mut vb);
        assert_eq!(e.bits1, vb);
    }

    #[test]
    fn sp1_single_bit_reduces_to_pmu_bit() {
        let mut rng = ChaCha12Rng::seed_from_u64(37);
        for _ in 0..500 {
            let v = rng.gen_range(-31..=31);
            let gamma = rng.gen_range(0..200);
            let l = Llr::from_value(v);
            let e = sp1_decode(gamma, &[l]);
            let (same, flip) = pmu_bit(gamma, l);
            let theta = l.theta();
            // hypothesis matching the hard decision keeps the metric
            let (m_theta, m_other) = if theta == 0 {
                (e.metric0, e.metric1)
            } else {
                (e.metric1, e.metric0)
            };
            assert_eq!(m_theta, same);
            assert_eq!(m_other, flip);
            assert_eq!(e.bits0, vec![0]);
            assert_eq!(e.bits1, vec![1]);
        }
    }

    #[test]
    fn sp1_matches_parity_constrained_mld() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        for _ in 0..3000 {
            let t_log = rng.gen_range(1..=3);
            let t_len = 1usize << t_log;
            let ls: Vec<Llr> = (0..t_len).map(|_| Llr::from_value(rng.gen_range(-31..=31))).collect();
            let gamma = rng.gen_range(0..128);
            let got = sp1_decode(gamma, &ls);
            // Oracle: minimize the mismatch penalty over the even-parity and
            // odd-parity stage-t words.
            let mut best = [(Metric::MAX, 0usize); 2];
            for w in 0..(1usize << t_len) {
                let v: Vec<u8> = (0..t_len).map(|j| ((w >> j) & 1) as u8).collect();
                let parity = v.iter().fold(0u8, |a, &b| a ^ b) as usize;
                let delta: Metric = v
                    .iter()
                    .zip(&ls)
                    .map(|(&vj, l)| ((vj ^ l.theta()) as Metric) * l.magnitude() as Metric)
                    .sum();
                if delta < best[parity].0 {
                    best[parity] = (delta, w);
                }
            }
            assert_eq!(got.metric0, pm_sat_add(gamma, best[0].0), "even-parity penalty");
            assert_eq!(got.metric1, pm_sat_add(gamma, best[1].0), "odd-parity penalty");
        }
    }

    #[test]
    fn sp2_examples() {
        let (m, bits) = sp2_decode(5, &llrs(&[3, 4, 1, 9]), true);
        assert_eq!(m, 5, "all positive signs match zero");
        assert_eq!(bits, vec![0; 4]);
        let (m, _) = sp2_decode(5, &llrs(&[-3, 4]), true);
        assert_eq!(m, 8, "one sign mismatch adds its magnitude");
        // Reliable: hard decisions [1,0] map back through the transform.
        let (m, bits) = sp2_decode(7, &llrs(&[-1, 2]), false);
        assert_eq!(m, 7);
        let mut v = vec![1u8, 0];
        kron_encode_in_place(&mut v);
        assert_eq!(bits, v);
    }
}
