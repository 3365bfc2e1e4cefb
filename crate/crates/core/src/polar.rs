//! Polar code construction, encoding, bit classification and CRC handling.
//!
//! A code is described by a [`CodeSpec`]: the code length `N = 2^n`, the
//! information-bit count `K` (CRC bits included), the CRC length `r`, and a
//! per-bit class in `{Frozen, Reliable, Unreliable}`. Reliable information
//! bits are hard-decided by the list decoder without path expansion;
//! unreliable ones are expanded.

use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

/// Per-bit classification of a code position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BitClass {
    /// Fixed to zero by construction.
    Frozen,
    /// Information bit decoded by hard decision, never expanded.
    Reliable,
    /// Information bit expanded into both hypotheses by the list decoder.
    Unreliable,
}

impl BitClass {
    pub fn is_info(self) -> bool {
        self != BitClass::Frozen
    }

    pub fn letter(self) -> char {
        match self {
            BitClass::Frozen => 'F',
            BitClass::Reliable => 'R',
            BitClass::Unreliable => 'U',
        }
    }
}

/// Encodes `u` with the `n`-fold Kronecker power of the polar kernel over
/// GF(2), using `n` in-place butterfly passes of pairwise XOR.
///
/// The transform is an involution, so the same routine also re-encodes
/// decoded prefixes into partial sums and maps stage-`t` sub-vectors back to
/// source bits.
pub fn kron_encode(u: &[u8], n: usize) -> Result<Vec<u8>> {
    if u.len() != 1usize << n {
        return Err(Error::InvalidArgument(format!(
            "kron_encode: length {} is not 2^{}",
            u.len(),
            n
        )));
    }
    let mut x = u.to_vec();
    kron_encode_in_place(&mut x);
    Ok(x)
}

/// In-place butterfly encoder; `bits.len()` must be a power of two.
pub fn kron_encode_in_place(bits: &mut [u8]) {
    let len = bits.len();
    debug_assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        let mut base = 0;
        while base < len {
            for j in base..base + h {
                bits[j] ^= bits[j + h];
            }
            base += 2 * h;
        }
        h *= 2;
    }
}

/// Parses a degree-`r` CRC generator given in hex (e.g. `1864cfb` for the
/// 24-bit generator) into its full `r + 1` bit coefficient vector, most
/// significant first.
///
/// Accepts both the full form with the `x^r` bit set and the truncated form
/// without it; the leading one is implied in the latter case.
pub fn crc_poly_from_hex(hex: &str, r: usize) -> Result<Vec<u8>> {
    let val = u64::from_str_radix(hex.trim_start_matches("0x"), 16)
        .map_err(|e| Error::Parse(format!("bad CRC polynomial {hex:?}: {e}")))?;
    if r == 0 {
        if val != 0 {
            return Err(Error::Parse("r = 0 requires an empty polynomial".into()));
        }
        return Ok(Vec::new());
    }
    if r > 63 {
        return Err(Error::Parse(format!("CRC length {r} not supported")));
    }
    if val >> r > 1 {
        return Err(Error::Parse(format!(
            "polynomial 0x{val:x} has degree above {r}"
        )));
    }
    let mut poly = Vec::with_capacity(r + 1);
    poly.push(1);
    for i in (0..r).rev() {
        poly.push(((val >> i) & 1) as u8);
    }
    Ok(poly)
}

/// Remainder of `message * x^r mod poly` over GF(2), MSB-first long division.
///
/// `poly` is the full coefficient vector of degree exactly `r` (leading one
/// included), as produced by [`crc_poly_from_hex`].
pub fn crc_remainder(message: &[u8], poly: &[u8]) -> Result<Vec<u8>> {
    if message.is_empty() {
        return Err(Error::InvalidArgument("crc_remainder: empty message".into()));
    }
    if poly.len() < 2 || poly[0] != 1 {
        return Err(Error::InvalidArgument(
            "crc_remainder: polynomial must have degree >= 1 and a leading one".into(),
        ));
    }
    let r = poly.len() - 1;
    let mut buf = Vec::with_capacity(message.len() + r);
    buf.extend_from_slice(message);
    buf.resize(message.len() + r, 0);
    for i in 0..message.len() {
        if buf[i] == 1 {
            for (j, &p) in poly.iter().enumerate() {
                buf[i + j] ^= p;
            }
        }
    }
    Ok(buf[message.len()..].to_vec())
}

/// Appends the CRC checksum to `message`.
pub fn crc_attach(message: &[u8], poly: &[u8]) -> Result<Vec<u8>> {
    let rem = crc_remainder(message, poly)?;
    let mut out = message.to_vec();
    out.extend_from_slice(&rem);
    Ok(out)
}

/// Checks that `bits = message || checksum` divides the generator, i.e. the
/// raw polynomial remainder of `bits` is zero.
pub fn crc_check(bits: &[u8], poly: &[u8]) -> bool {
    if poly.is_empty() {
        return true; // r = 0: no CRC in the code
    }
    let r = poly.len() - 1;
    if bits.len() < r {
        return false;
    }
    let mut buf = bits.to_vec();
    for i in 0..bits.len() - r {
        if buf[i] == 1 {
            for (j, &p) in poly.iter().enumerate() {
                buf[i + j] ^= p;
            }
        }
    }
    buf[bits.len() - r..].iter().all(|&b| b == 0)
}

/// Code parameters plus the per-bit classification.
///
/// Immutable after construction; decoder instances share it read-only.
#[derive(Debug, Clone)]
pub struct CodeSpec {
    n: usize,
    k: usize,
    r: usize,
    crc_poly: Vec<u8>,
    bit_class: Vec<BitClass>,
    reliabilities: Vec<f64>,
}

impl CodeSpec {
    /// Builds a spec from an explicit classification. Validates the class
    /// cardinalities against `k` and the polynomial degree against `r`.
    pub fn from_classes(
        n: usize,
        r: usize,
        crc_poly: Vec<u8>,
        bit_class: Vec<BitClass>,
        reliabilities: Vec<f64>,
    ) -> Result<Self> {
        let big_n = 1usize << n;
        if bit_class.len() != big_n {
            return Err(Error::InvalidArgument(format!(
                "bit_class length {} != N = {big_n}",
                bit_class.len()
            )));
        }
        if reliabilities.len() != big_n {
            return Err(Error::InvalidArgument(
                "reliabilities length must equal N".into(),
            ));
        }
        let k = bit_class.iter().filter(|c| c.is_info()).count();
        if r > 0 && (crc_poly.len() != r + 1 || crc_poly[0] != 1) {
            return Err(Error::InvalidArgument(format!(
                "CRC polynomial must have degree exactly r = {r}"
            )));
        }
        if r == 0 && !crc_poly.is_empty() {
            return Err(Error::InvalidArgument("r = 0 with non-empty polynomial".into()));
        }
        if r >= k && r > 0 {
            return Err(Error::InvalidArgument(format!("r = {r} must be < K = {k}")));
        }
        Ok(CodeSpec {
            n,
            k,
            r,
            crc_poly,
            bit_class,
            reliabilities,
        })
    }

    pub fn n_log2(&self) -> usize {
        self.n
    }

    /// Code length in bits.
    pub fn len(&self) -> usize {
        1usize << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Information-bit count, CRC bits included.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn crc_len(&self) -> usize {
        self.r
    }

    pub fn crc_poly(&self) -> &[u8] {
        &self.crc_poly
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.len() as f64
    }

    pub fn class(&self, i: usize) -> BitClass {
        self.bit_class[i]
    }

    pub fn classes(&self) -> &[BitClass] {
        &self.bit_class
    }

    pub fn reliabilities(&self) -> &[f64] {
        &self.reliabilities
    }

    /// Index of the first non-frozen bit, if any.
    pub fn first_info_bit(&self) -> Option<usize> {
        self.bit_class.iter().position(|c| c.is_info())
    }

    /// Ascending indices of the information set.
    pub fn info_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.bit_class[i].is_info()).collect()
    }

    /// Places `message` (length `K - r`) into a source word: CRC attached as
    /// the last `r` information bits, frozen positions zero.
    pub fn source_word(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.k - self.r {
            return Err(Error::InvalidArgument(format!(
                "message length {} != K - r = {}",
                message.len(),
                self.k - self.r
            )));
        }
        let info = if self.r > 0 {
            crc_attach(message, &self.crc_poly)?
        } else {
            message.to_vec()
        };
        let mut u = vec![0u8; self.len()];
        let mut next = 0;
        for (i, c) in self.bit_class.iter().enumerate() {
            if c.is_info() {
                u[i] = info[next];
                next += 1;
            }
        }
        Ok(u)
    }

    /// Extracts the `K` information bits of a decoded source word.
    pub fn extract_info(&self, u: &[u8]) -> Vec<u8> {
        self.bit_class
            .iter()
            .zip(u)
            .filter(|(c, _)| c.is_info())
            .map(|(_, &b)| b)
            .collect()
    }

    /// True if the information bits of `u` pass the CRC (always true for
    /// codes without a CRC).
    pub fn crc_pass(&self, u: &[u8]) -> bool {
        if self.r == 0 {
            return true;
        }
        crc_check(&self.extract_info(u), &self.crc_poly)
    }

    /// Encodes a source word to a codeword.
    pub fn encode(&self, u: &[u8]) -> Result<Vec<u8>> {
        kron_encode(u, self.n)
    }

    /// Serializes to the text format: header `n K r poly_hex`, then `N`
    /// class letters from `{F,R,U}` wrapped at 64 per line.
    pub fn to_text(&self) -> String {
        let poly_hex = if self.r == 0 {
            "0".to_string()
        } else {
            // Full form, x^r coefficient included (e.g. 1864cfb).
            let mut v: u64 = 0;
            for &b in &self.crc_poly {
                v = (v << 1) | b as u64;
            }
            format!("{v:x}")
        };
        let mut s = format!("{} {} {} {}\n", self.n, self.k, self.r, poly_hex);
        for (i, c) in self.bit_class.iter().enumerate() {
            s.push(c.letter());
            if i % 64 == 63 {
                s.push('\n');
            }
        }
        if !s.ends_with('\n') {
            s.push('\n');
        }
        s
    }

    /// Parses the text format produced by [`CodeSpec::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty spec file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!(
                "spec header must be `n K r poly_hex`, got {header:?}"
            )));
        }
        let n: usize = fields[0]
            .parse()
            .map_err(|e| Error::Parse(format!("bad n: {e}")))?;
        let k: usize = fields[1]
            .parse()
            .map_err(|e| Error::Parse(format!("bad K: {e}")))?;
        let r: usize = fields[2]
            .parse()
            .map_err(|e| Error::Parse(format!("bad r: {e}")))?;
        let crc_poly = if r == 0 {
            Vec::new()
        } else {
            crc_poly_from_hex(fields[3], r)?
        };
        let mut classes = Vec::with_capacity(1 << n);
        for line in lines {
            for ch in line.chars() {
                match ch {
                    'F' => classes.push(BitClass::Frozen),
                    'R' => classes.push(BitClass::Reliable),
                    'U' => classes.push(BitClass::Unreliable),
                    c if c.is_whitespace() => {}
                    c => return Err(Error::Parse(format!("bad class letter {c:?}"))),
                }
            }
        }
        if classes.len() != 1 << n {
            return Err(Error::Parse(format!(
                "expected {} class letters, found {}",
                1 << n,
                classes.len()
            )));
        }
        let spec = CodeSpec::from_classes(n, r, crc_poly, classes, vec![0.0; 1 << n])?;
        if spec.k != k {
            return Err(Error::Parse(format!(
                "header K = {k} but classification has {} information bits",
                spec.k
            )));
        }
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        CodeSpec::from_text(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Builds a spec by reliability ordering: the `N - K` lowest-reliability
/// positions are frozen, and among the `K` information bits the
/// `unreliable_budget` lowest-reliability ones are classified unreliable.
pub fn build_codespec(
    n: usize,
    k: usize,
    r: usize,
    crc_poly: Vec<u8>,
    reliabilities: &[f64],
    unreliable_budget: usize,
) -> Result<CodeSpec> {
    let big_n = 1usize << n;
    if k > big_n {
        return Err(Error::InvalidArgument(format!("K = {k} > N = {big_n}")));
    }
    if unreliable_budget > k {
        return Err(Error::InvalidArgument(format!(
            "unreliable budget {unreliable_budget} exceeds K = {k}"
        )));
    }
    if reliabilities.len() != big_n {
        return Err(Error::InvalidArgument(
            "reliabilities length must equal N".into(),
        ));
    }
    let mut order: Vec<usize> = (0..big_n).collect();
    order.sort_by(|&a, &b| {
        reliabilities[a]
            .partial_cmp(&reliabilities[b])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut classes = vec![BitClass::Reliable; big_n];
    for &i in order.iter().take(big_n - k) {
        classes[i] = BitClass::Frozen;
    }
    let info_by_reliability: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| classes[i] != BitClass::Frozen)
        .take(unreliable_budget)
        .collect();
    for i in info_by_reliability {
        classes[i] = BitClass::Unreliable;
    }
    CodeSpec::from_classes(n, r, crc_poly, classes, reliabilities.to_vec())
}

/// Gaussian-approximation density evolution for a BPSK/AWGN channel at the
/// given design point. Returns the mean leaf LLR per bit index; larger means
/// more reliable.
pub fn ga_reliabilities(n: usize, design_ebn0_db: f64, rate: f64) -> Vec<f64> {
    let sigma2 = 1.0 / (2.0 * rate * 10f64.powf(design_ebn0_db / 10.0));
    let mut means = vec![2.0 / sigma2];
    for _ in 0..n {
        let mut next = Vec::with_capacity(means.len() * 2);
        for &m in &means {
            next.push(ga_check(m));
            next.push(2.0 * m);
        }
        means = next;
    }
    // The recursion above orders leaves by their branch path, most
    // significant split first, which matches the bit index directly.
    means
}

// Mean-LLR transfer of the check-side (F) branch under the Gaussian
// approximation, phi^-1(1 - (1 - phi(m))^2). Evaluated in the log domain so
// that deep recursions with huge means stay ordered instead of underflowing.
fn ga_check(m: f64) -> f64 {
    let lp = ln_phi(m);
    let p = lp.exp();
    let ln_target = if p > 1e-9 {
        (1.0 - (1.0 - p) * (1.0 - p)).ln()
    } else {
        // 1 - (1-p)^2 = 2p - p^2 ~= 2p
        std::f64::consts::LN_2 + lp + (-p / 2.0).ln_1p()
    };
    ln_phi_inv(ln_target)
}

// Chung et al. approximation of ln phi(x), phi(x) = 1 - E[tanh(u/2)] with
// u ~ N(x, 2x); strictly decreasing in x.
fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < 10.0 {
        -0.4527 * x.powf(0.86) + 0.0218
    } else {
        0.5 * ((std::f64::consts::PI).ln() - x.ln()) - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
    }
}

fn ln_phi_inv(ln_y: f64) -> f64 {
    if ln_y >= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (1e-12f64, 1e9f64);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if ln_phi(mid) > ln_y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

/// Loads one reliability value per line from a plain text file.
pub fn load_reliabilities(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut vals = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        vals.push(
            t.parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))?,
        );
    }
    Ok(vals)
}

/// Writes reliabilities one per line.
pub fn save_reliabilities(path: &Path, vals: &[f64]) -> Result<()> {
    let mut s = String::new();
    for v in vals {
        let _ = writeln!(s, "{v:.6e}");
    }
    std::fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    // Dense GF(2) matrix of the n-fold Kronecker power, for the oracle.
    fn kron_matrix(n: usize) -> Vec<Vec<u8>> {
        let mut m = vec![vec![1u8]];
        for _ in 0..n {
            let sz = m.len();
            let mut next = vec![vec![0u8; 2 * sz]; 2 * sz];
            for i in 0..2 * sz {
                for j in 0..2 * sz {
                    let f = match (i >= sz, j >= sz) {
                        (false, true) => 0,
                        _ => 1,
                    };
                    next[i][j] = f * m[i % sz][j % sz];
                }
            }
            m = next;
        }
        m
    }

    fn matmul_gf2(u: &[u8], m: &[Vec<u8>]) -> Vec<u8> {
        let cols = m[0].len();
        let mut out = vec![0u8; cols];
        for (i, &ui) in u.iter().enumerate() {
            if ui == 1 {
                for j in 0..cols {
                    out[j] ^= m[i][j];
                }
            }
        }
        out
    }

    #[test]
    fn kron_encode_examples() {
        assert_eq!(kron_encode(&[1, 1, 0, 0], 2).unwrap(), vec![0, 1, 0, 0]);
        assert_eq!(kron_encode(&[0, 0, 0, 0], 2).unwrap(), vec![0, 0, 0, 0]);
        // Explicit GF(2) matrix multiply oracle.
        let m = kron_matrix(2);
        let expect = matmul_gf2(&[1, 0, 1, 1], &m);
        assert_eq!(kron_encode(&[1, 0, 1, 1], 2).unwrap(), expect);
        assert_eq!(expect, vec![1, 1, 0, 1]);
    }

    #[test]
    fn kron_encode_matches_matrix_oracle() {
        for n in 0..=5 {
            let m = kron_matrix(n);
            let len = 1usize << n;
            for trial in 0..50u64 {
                let u: Vec<u8> = (0..len)
                    .map(|i| ((trial.wrapping_mul(0x9e37_79b9) >> (i % 32)) & 1) as u8)
                    .collect();
                assert_eq!(kron_encode(&u, n).unwrap(), matmul_gf2(&u, &m));
            }
        }
    }

    #[test]
    fn kron_encode_rejects_bad_length() {
        assert!(kron_encode(&[1, 0, 1], 2).is_err());
    }

    proptest::proptest! {
        #[test]
        fn kron_encode_involution_and_linearity(
            u in proptest::collection::vec(0u8..=1, 32),
            v in proptest::collection::vec(0u8..=1, 32),
        ) {
            let n = 5;
            let eu = kron_encode(&u, n).unwrap();
            proptest::prop_assert_eq!(kron_encode(&eu, n).unwrap(), u.clone());
            let uv: Vec<u8> = u.iter().zip(&v).map(|(a, b)| a ^ b).collect();
            let ev = kron_encode(&v, n).unwrap();
            let sum: Vec<u8> = eu.iter().zip(&ev).map(|(a, b)| a ^ b).collect();
            proptest::prop_assert_eq!(kron_encode(&uv, n).unwrap(), sum);
        }

        #[test]
        fn crc_attach_always_checks(msg in proptest::collection::vec(0u8..=1, 1..96)) {
            let poly = crc_poly_from_hex("1864cfb", 24).unwrap();
            let coded = crc_attach(&msg, &poly).unwrap();
            proptest::prop_assert!(crc_check(&coded, &poly));
        }
    }

    // Independent shift-register CRC oracle, MSB-first.
    fn crc_shift_register(message: &[u8], poly_val: u64, r: usize) -> Vec<u8> {
        let mask = if r == 64 { u64::MAX } else { (1u64 << r) - 1 };
        let mut reg: u64 = 0;
        for &bit in message {
            let top = (reg >> (r - 1)) & 1;
            reg = (reg << 1) & mask;
            if top ^ bit as u64 == 1 {
                reg ^= poly_val;
            }
        }
        (0..r).rev().map(|i| ((reg >> i) & 1) as u8).collect()
    }

    #[test]
    fn crc_zero_message_zero_remainder() {
        let poly = crc_poly_from_hex("1864cfb", 24).unwrap();
        let rem = crc_remainder(&[0u8; 40], &poly).unwrap();
        assert!(rem.iter().all(|&b| b == 0));
    }

    #[test]
    fn crc_division_identity() {
        let poly = crc_poly_from_hex("1864cfb", 24).unwrap();
        let mut rng = 99u64;
        for len in [1usize, 7, 24, 100] {
            for _ in 0..20 {
                let m: Vec<u8> = (0..len)
                    .map(|_| {
                        rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1);
                        ((rng >> 40) & 1) as u8
                    })
                    .collect();
                let coded = crc_attach(&m, &poly).unwrap();
                assert!(crc_check(&coded, &poly));
            }
        }
    }

    #[test]
    fn crc_matches_shift_register_oracle() {
        let poly = crc_poly_from_hex("1864cfb", 24).unwrap();
        let msg = [1, 0, 1, 1, 0, 0, 1, 0];
        let rem = crc_remainder(&msg, &poly).unwrap();
        let oracle = crc_shift_register(&msg, 0x1864cfb, 24);
        assert_eq!(rem, oracle);
        assert_eq!(rem.len(), 24);
        // Frozen value from the shift-register oracle.
        let as_u32 = rem.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
        assert_eq!(as_u32, 0x700dc9);
    }

    #[test]
    fn crc_detects_single_bit_flips() {
        let poly = crc_poly_from_hex("1864cfb", 24).unwrap();
        let m: Vec<u8> = (0..64).map(|i| ((i * 7 + 3) % 5 == 0) as u8).collect();
        let coded = crc_attach(&m, &poly).unwrap();
        for i in 0..coded.len() {
            let mut flipped = coded.clone();
            flipped[i] ^= 1;
            assert!(!crc_check(&flipped, &poly), "flip at {i} undetected");
        }
    }

    #[test]
    fn crc_empty_message_rejected() {
        let poly = crc_poly_from_hex("1864cfb", 24).unwrap();
        assert!(crc_remainder(&[], &poly).is_err());
    }

    #[test]
    fn build_codespec_budget_edges() {
        let rel = ga_reliabilities(4, 2.5, 0.5);
        let spec = build_codespec(4, 8, 0, Vec::new(), &rel, 8).unwrap();
        assert_eq!(
            spec.classes().iter().filter(|c| **c == BitClass::Reliable).count(),
            0,
            "budget = K leaves no reliable bits"
        );
        let spec0 = build_codespec(4, 8, 0, Vec::new(), &rel, 0).unwrap();
        assert_eq!(
            spec0.classes().iter().filter(|c| **c == BitClass::Unreliable).count(),
            0,
            "budget = 0 leaves no unreliable bits"
        );
        assert!(build_codespec(4, 8, 0, Vec::new(), &rel, 9).is_err());
    }

    #[test]
    fn codespec_cardinalities_and_roundtrip() {
        let rel = ga_reliabilities(6, 2.5, 0.5);
        let poly = crc_poly_from_hex("7", 3).unwrap();
        let spec = build_codespec(6, 32, 3, poly, &rel, 10).unwrap();
        assert_eq!(spec.k(), 32);
        let frozen = spec.classes().iter().filter(|c| **c == BitClass::Frozen).count();
        assert_eq!(frozen, 32);
        let text = spec.to_text();
        let back = CodeSpec::from_text(&text).unwrap();
        assert_eq!(back.classes(), spec.classes());
        assert_eq!(back.crc_poly(), spec.crc_poly());
        assert_eq!(back.k(), spec.k());
    }

    #[test]
    fn source_word_roundtrip_with_crc() {
        let rel = ga_reliabilities(5, 2.5, 0.5);
        let poly = crc_poly_from_hex("7", 3).unwrap();
        let spec = build_codespec(5, 16, 3, poly, &rel, 4).unwrap();
        let msg: Vec<u8> = (0..13).map(|i| (i % 2) as u8).collect();
        let u = spec.source_word(&msg).unwrap();
        assert!(spec.crc_pass(&u));
        let info = spec.extract_info(&u);
        assert_eq!(&info[..13], &msg[..]);
        let x = spec.encode(&u).unwrap();
        let back = spec.encode(&x).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn ga_means_monotone_extremes() {
        let rel = ga_reliabilities(8, 2.5, 0.5);
        let (worst, _) = rel
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        let (best, _) = rel
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        assert_eq!(worst, 0, "all-check path is the least reliable");
        assert_eq!(best, 255, "all-variable path is the most reliable");
    }
}
