//! Bit-to-symbol mapping: square QAM, PSK and differential PSK
//! constellations with Gray or natural bit labels.
//!
//! All constellations are normalized to unit average symbol energy so that
//! noise calibration can assume E[|s|^2] = 1 regardless of scheme or order.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Largest supported constellation order.
pub const MAX_ORDER: usize = 256;

/// Magnitude tolerance for symbols entering the differential encoder.
const UNIT_TOL: f64 = 1e-6;

/// Modulation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Square quadrature amplitude modulation (order 2 degenerates to BPSK).
    Qam,
    /// Phase-shift keying, detected coherently.
    Psk,
    /// Phase-shift keying, differentially encoded and detected.
    Dpsk,
}

impl Scheme {
    /// True for schemes that carry information in phase transitions rather
    /// than absolute symbols.
    pub fn is_differential(self) -> bool {
        matches!(self, Scheme::Dpsk)
    }

    /// Lower-case name used in curve labels and file names.
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Qam => "qam",
            Scheme::Psk => "psk",
            Scheme::Dpsk => "dpsk",
        }
    }
}

/// How bit patterns are assigned to constellation points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitMapping {
    /// Adjacent points differ in exactly one bit.
    Gray,
    /// Points are labelled in plain binary counting order.
    Natural,
}

impl BitMapping {
    pub fn name(self) -> &'static str {
        match self {
            BitMapping::Gray => "gray",
            BitMapping::Natural => "natural",
        }
    }
}

/// Reflected-binary Gray code of `index`.
pub fn gray_encode(index: usize, order: usize) -> Result<usize> {
    if index >= order {
        return Err(Error::Domain(format!(
            "index {index} out of range for order {order}"
        )));
    }
    Ok(index ^ (index >> 1))
}

/// Inverse of [`gray_encode`]: recover the counting index from a Gray code.
pub fn gray_decode(code: usize, order: usize) -> Result<usize> {
    if code >= order {
        return Err(Error::Domain(format!(
            "code {code} out of range for order {order}"
        )));
    }
    let mut index = code;
    let mut shift = code >> 1;
    while shift > 0 {
        index ^= shift;
        shift >>= 1;
    }
    Ok(index)
}

fn axis_label(i: usize, mapping: BitMapping) -> usize {
    match mapping {
        BitMapping::Gray => i ^ (i >> 1),
        BitMapping::Natural => i,
    }
}

/// A labelled, unit-energy constellation.
#[derive(Debug, Clone)]
pub struct Constellation {
    scheme: Scheme,
    order: usize,
    bits_per_symbol: usize,
    mapping: BitMapping,
    /// Point coordinates, in construction order.
    points: Vec<Complex64>,
    /// `labels[i]` is the bit label carried by `points[i]`.
    labels: Vec<usize>,
    /// Inverse permutation: `points[point_of_label[v]]` carries label `v`.
    point_of_label: Vec<usize>,
}

impl Constellation {
    /// Build a constellation.
    ///
    /// `order` must be a power of two in `2..=256`; QAM additionally requires
    /// a square grid (2, 4, 16, 64 or 256, where 2 degenerates to BPSK).
    pub fn new(scheme: Scheme, order: usize, mapping: BitMapping) -> Result<Self> {
        if !(2..=MAX_ORDER).contains(&order) || !order.is_power_of_two() {
            return Err(Error::Config(format!(
                "constellation order must be a power of two in 2..={MAX_ORDER}, got {order}"
            )));
        }
        if scheme == Scheme::Qam && !matches!(order, 2 | 4 | 16 | 64 | 256) {
            return Err(Error::Config(format!(
                "QAM order must be 2, 4, 16, 64 or 256, got {order}"
            )));
        }
        let bits_per_symbol = order.trailing_zeros() as usize;
        let (points, labels) = if scheme == Scheme::Qam && order > 2 {
            square_qam(order, mapping)
        } else {
            // PSK, DPSK, and the BPSK degenerate of QAM.
            psk_ring(order, mapping)
        };
        let mut point_of_label = vec![usize::MAX; order];
        for (idx, &label) in labels.iter().enumerate() {
            debug_assert_eq!(point_of_label[label], usize::MAX, "duplicate label");
            point_of_label[label] = idx;
        }
        Ok(Self {
            scheme,
            order,
            bits_per_symbol,
            mapping,
            points,
            labels,
            point_of_label,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn mapping(&self) -> BitMapping {
        self.mapping
    }

    /// Constellation points in construction order.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Bit labels, parallel to [`points`](Self::points).
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// The point carrying bit label `label`.
    pub fn point_for_label(&self, label: usize) -> Result<Complex64> {
        if label >= self.order {
            return Err(Error::Domain(format!(
                "label {label} out of range for order {}",
                self.order
            )));
        }
        Ok(self.points[self.point_of_label[label]])
    }

    /// Map a bit sequence (MSB first within each symbol) onto points.
    ///
    /// The bit count must divide evenly into symbols and every element must
    /// be 0 or 1.
    pub fn map_bits(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let b = self.bits_per_symbol;
        if !bits.len().is_multiple_of(b) {
            return Err(Error::Domain(format!(
                "bit count {} is not a multiple of {b} bits per symbol",
                bits.len()
            )));
        }
        let mut symbols = Vec::with_capacity(bits.len() / b);
        for chunk in bits.chunks_exact(b) {
            let mut label = 0usize;
            for &bit in chunk {
                if bit > 1 {
                    return Err(Error::Domain(format!("bit value {bit} is not 0 or 1")));
                }
                label = (label << 1) | bit as usize;
            }
            symbols.push(self.points[self.point_of_label[label]]);
        }
        Ok(symbols)
    }

    /// Hard-decision demapping: nearest constellation point in Euclidean
    /// distance, ties broken toward the lowest point index.
    pub fn demap_hard(&self, symbols: &[Complex64]) -> Vec<u8> {
        let b = self.bits_per_symbol;
        let mut bits = Vec::with_capacity(symbols.len() * b);
        for &s in symbols {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (idx, &p) in self.points.iter().enumerate() {
                let d = (s - p).norm_sqr();
                if d < best_d {
                    best_d = d;
                    best = idx;
                }
            }
            let label = self.labels[best];
            for shift in (0..b).rev() {
                bits.push(((label >> shift) & 1) as u8);
            }
        }
        bits
    }
}

/// M points on the unit circle at angles 2*pi*k/M, the zero-label point at
/// angle 0.
fn psk_ring(order: usize, mapping: BitMapping) -> (Vec<Complex64>, Vec<usize>) {
    let points = (0..order)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / order as f64))
        .collect();
    let labels = (0..order).map(|k| axis_label(k, mapping)).collect();
    (points, labels)
}

/// Square M-QAM on the odd-integer grid, normalized to unit average energy.
/// Labels are formed per axis (I bits high, Q bits low) so that Gray labels
/// inherit the one-bit-per-step property of each axis.
fn square_qam(order: usize, mapping: BitMapping) -> (Vec<Complex64>, Vec<usize>) {
    let side = (order as f64).sqrt().round() as usize;
    debug_assert_eq!(side * side, order);
    let half_bits = side.trailing_zeros() as usize;
    let mut points = Vec::with_capacity(order);
    let mut labels = Vec::with_capacity(order);
    for i in 0..side {
        let x = (2 * i) as f64 - (side - 1) as f64;
        for j in 0..side {
            let y = (2 * j) as f64 - (side - 1) as f64;
            points.push(Complex64::new(x, y));
            labels.push((axis_label(i, mapping) << half_bits) | axis_label(j, mapping));
        }
    }
    // The grid coordinates are exact integers, so this normalization leaves
    // the average energy at 1 up to a couple of rounding steps.
    let energy: f64 = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / order as f64;
    let scale = energy.sqrt().recip();
    for p in &mut points {
        *p *= scale;
    }
    (points, labels)
}

/// Differentially encode unit-magnitude symbols: each output is the previous
/// output rotated by the input, starting from `reference`.
///
/// Outputs are renormalized to the unit circle after every step so rounding
/// cannot accumulate over long chains.
pub fn diff_encode(symbols: &[Complex64], reference: Complex64) -> Result<Vec<Complex64>> {
    for &s in std::iter::once(&reference).chain(symbols) {
        if (s.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!(
                "differential encoding requires unit-magnitude symbols, got |{s}| = {}",
                s.norm()
            )));
        }
    }
    let mut out = Vec::with_capacity(symbols.len());
    let mut prev = reference;
    for &s in symbols {
        let mut v = prev * s;
        v /= v.norm();
        out.push(v);
        prev = v;
    }
    Ok(out)
}

/// Differentially decode received symbols: `out[k] = r[k] * conj(r[k-1]) /
/// |r[k-1]|`, with `r[-1] = reference`.
///
/// Received symbols may have arbitrary magnitude and phase.  A predecessor
/// of exactly zero magnitude carries no phase, so the reference is
/// substituted for it.
pub fn diff_decode(received: &[Complex64], reference: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(received.len());
    let mut prev = reference;
    for &r in received {
        let basis = if prev.norm() == 0.0 { reference } else { prev };
        out.push(r * basis.conj() / basis.norm());
        prev = r;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHEMES: [(Scheme, &[usize]); 3] = [
        (Scheme::Qam, &[2, 4, 16, 64, 256]),
        (Scheme::Psk, &[2, 4, 8, 16, 32, 64, 128, 256]),
        (Scheme::Dpsk, &[2, 4, 8, 16, 32, 64, 128, 256]),
    ];

    fn all_constellations(mapping: BitMapping) -> Vec<Constellation> {
        let mut v = Vec::new();
        for (scheme, orders) in SCHEMES {
            for &m in orders {
                v.push(Constellation::new(scheme, m, mapping).unwrap());
            }
        }
        v
    }

    #[test]
    fn gray_code_round_trip_and_adjacency() {
        for order in [2usize, 4, 8, 16, 32, 64, 128, 256] {
            let mut seen = vec![false; order];
            for i in 0..order {
                let g = gray_encode(i, order).unwrap();
                assert!(g < order);
                assert!(!seen[g], "gray code must be a permutation");
                seen[g] = true;
                assert_eq!(gray_decode(g, order).unwrap(), i);
            }
            // Consecutive indices (cyclically) differ in exactly one bit.
            for i in 0..order {
                let a = gray_encode(i, order).unwrap();
                let b = gray_encode((i + 1) % order, order).unwrap();
                assert_eq!((a ^ b).count_ones(), 1, "order {order}, index {i}");
            }
        }
        assert!(gray_encode(4, 4).is_err());
        assert!(gray_decode(9, 8).is_err());
    }

    #[test]
    fn rejects_invalid_orders() {
        assert!(Constellation::new(Scheme::Psk, 0, BitMapping::Gray).is_err());
        assert!(Constellation::new(Scheme::Psk, 1, BitMapping::Gray).is_err());
        assert!(Constellation::new(Scheme::Psk, 3, BitMapping::Gray).is_err());
        assert!(Constellation::new(Scheme::Psk, 512, BitMapping::Gray).is_err());
        // Non-square QAM orders are rejected even though they are powers of two.
        assert!(Constellation::new(Scheme::Qam, 8, BitMapping::Gray).is_err());
        assert!(Constellation::new(Scheme::Qam, 32, BitMapping::Gray).is_err());
        assert!(Constellation::new(Scheme::Qam, 128, BitMapping::Gray).is_err());
    }

    #[test]
    fn unit_average_energy() {
        for mapping in [BitMapping::Gray, BitMapping::Natural] {
            for c in all_constellations(mapping) {
                let mean: f64 =
                    c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / c.order() as f64;
                assert!(
                    (mean - 1.0).abs() <= 1e-12,
                    "{:?}-{} mean energy {mean}",
                    c.scheme(),
                    c.order()
                );
            }
        }
    }

    #[test]
    fn labels_are_a_permutation_and_invertible() {
        for c in all_constellations(BitMapping::Gray) {
            let mut seen = vec![false; c.order()];
            for &label in c.labels() {
                assert!(!seen[label]);
                seen[label] = true;
            }
            for label in 0..c.order() {
                let p = c.point_for_label(label).unwrap();
                let idx = c.labels().iter().position(|&l| l == label).unwrap();
                assert_eq!(p, c.points()[idx]);
            }
        }
    }

    #[test]
    fn qam16_matches_hand_constructed_table() {
        // Independent oracle: build Gray 16-QAM from first principles with
        // per-axis amplitudes {-3,-1,1,3}/sqrt(10) and 2-bit reflected Gray
        // labels per axis (I bits high, Q bits low).
        let c = Constellation::new(Scheme::Qam, 16, BitMapping::Gray).unwrap();
        let s = 10.0_f64.sqrt().recip();
        let axis_gray = [0b00, 0b01, 0b11, 0b10]; // gray(0..4)
        for i in 0..4 {
            for j in 0..4 {
                let expect = Complex64::new((2.0 * i as f64 - 3.0) * s, (2.0 * j as f64 - 3.0) * s);
                let label = (axis_gray[i] << 2) | axis_gray[j];
                let got = c.point_for_label(label).unwrap();
                assert!(
                    (got - expect).norm() < 1e-12,
                    "label {label:04b}: got {got}, expected {expect}"
                );
            }
        }
        // Spot checks: the four corner points all carry axis-extreme labels.
        let corner = c.point_for_label(0b00_00).unwrap();
        assert!((corner - Complex64::new(-3.0 * s, -3.0 * s)).norm() < 1e-12);
        let corner = c.point_for_label(0b10_10).unwrap();
        assert!((corner - Complex64::new(3.0 * s, 3.0 * s)).norm() < 1e-12);
    }

    #[test]
    fn psk_ring_geometry() {
        for order in [2usize, 4, 8, 16] {
            let c = Constellation::new(Scheme::Psk, order, BitMapping::Gray).unwrap();
            for (k, &p) in c.points().iter().enumerate() {
                let expect = Complex64::from_polar(1.0, TAU * k as f64 / order as f64);
                assert!((p - expect).norm() < 1e-12);
            }
            // Zero label sits at angle 0.
            let z = c.point_for_label(0).unwrap();
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        // DPSK shares the PSK geometry.
        let p = Constellation::new(Scheme::Psk, 8, BitMapping::Gray).unwrap();
        let d = Constellation::new(Scheme::Dpsk, 8, BitMapping::Gray).unwrap();
        assert_eq!(p.points(), d.points());
        assert_eq!(p.labels(), d.labels());
    }

    #[test]
    fn gray_labels_of_minimum_distance_neighbours_differ_in_one_bit() {
        // Geometric formulation of the Gray property: any two points at the
        // constellation's minimum distance differ in exactly one label bit.
        for c in all_constellations(BitMapping::Gray) {
            let pts = c.points();
            let mut dmin = f64::INFINITY;
            for a in 0..pts.len() {
                for b in (a + 1)..pts.len() {
                    dmin = dmin.min((pts[a] - pts[b]).norm());
                }
            }
            for a in 0..pts.len() {
                for b in (a + 1)..pts.len() {
                    if ((pts[a] - pts[b]).norm() - dmin).abs() < 1e-9 * dmin {
                        let diff = c.labels()[a] ^ c.labels()[b];
                        assert_eq!(
                            diff.count_ones(),
                            1,
                            "{:?}-{}: neighbours {} and {} differ in {} bits",
                            c.scheme(),
                            c.order(),
                            pts[a],
                            pts[b],
                            diff.count_ones()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn natural_mapping_breaks_adjacency_somewhere() {
        // Sanity check that Gray vs natural is a real difference: for 16-QAM
        // natural labels, at least one minimum-distance pair differs in more
        // than one bit.
        let c = Constellation::new(Scheme::Qam, 16, BitMapping::Natural).unwrap();
        let pts = c.points();
        let mut dmin = f64::INFINITY;
        for a in 0..pts.len() {
            for b in (a + 1)..pts.len() {
                dmin = dmin.min((pts[a] - pts[b]).norm());
            }
        }
        let mut multi_bit_pairs = 0;
        for a in 0..pts.len() {
            for b in (a + 1)..pts.len() {
                if ((pts[a] - pts[b]).norm() - dmin).abs() < 1e-9 * dmin
                    && (c.labels()[a] ^ c.labels()[b]).count_ones() > 1
                {
                    multi_bit_pairs += 1;
                }
            }
        }
        assert!(multi_bit_pairs > 0);
    }

    #[test]
    fn map_demap_round_trip_is_exact_without_noise() {
        for mapping in [BitMapping::Gray, BitMapping::Natural] {
            for c in all_constellations(mapping) {
                // Exhaustive: every label once, MSB-first bit expansion.
                let b = c.bits_per_symbol();
                let mut bits = Vec::new();
                for label in 0..c.order() {
                    for shift in (0..b).rev() {
                        bits.push(((label >> shift) & 1) as u8);
                    }
                }
                let symbols = c.map_bits(&bits).unwrap();
                assert_eq!(symbols.len(), c.order());
                assert_eq!(c.demap_hard(&symbols), bits);
            }
        }
    }

    #[test]
    fn map_bits_rejects_bad_input() {
        let c = Constellation::new(Scheme::Qam, 16, BitMapping::Gray).unwrap();
        assert!(c.map_bits(&[0, 1, 1]).is_err()); // not a multiple of 4
        assert!(c.map_bits(&[0, 1, 2, 0]).is_err()); // non-bit value
        assert!(c.map_bits(&[]).unwrap().is_empty());
    }

    #[test]
    fn demap_is_nearest_point_under_small_perturbation() {
        let c = Constellation::new(Scheme::Qam, 64, BitMapping::Gray).unwrap();
        let eps = Complex64::new(1e-3, -2e-3);
        for label in 0..c.order() {
            let p = c.point_for_label(label).unwrap();
            let bits = c.demap_hard(&[p + eps]);
            let mut expect = Vec::new();
            for shift in (0..c.bits_per_symbol()).rev() {
                expect.push(((label >> shift) & 1) as u8);
            }
            assert_eq!(bits, expect);
        }
    }

    #[test]
    fn diff_encode_cumulative_products() {
        // D-QPSK example: inputs rotate by +90 degrees each step, so the
        // transmitted chain walks around the circle.
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let out = diff_encode(&[i, i, i, i], one).unwrap();
        let expect = [i, -one, -i, one];
        for (o, e) in out.iter().zip(expect) {
            assert!((o - e).norm() < 1e-12);
        }
    }

    #[test]
    fn diff_encode_rejects_non_unit_symbols() {
        let ok = [Complex64::new(0.0, 1.0)];
        assert!(diff_encode(&ok, Complex64::new(1.0, 0.0)).is_ok());
        let bad = [Complex64::new(0.5, 0.0)];
        assert!(diff_encode(&bad, Complex64::new(1.0, 0.0)).is_err());
        assert!(diff_encode(&ok, Complex64::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn diff_decode_inverts_encode() {
        // Long random-ish chain of 8-PSK points; decode must recover the
        // original inputs to rounding error even after 10_000 steps.
        let c = Constellation::new(Scheme::Dpsk, 8, BitMapping::Gray).unwrap();
        let reference = Complex64::new(1.0, 0.0);
        let inputs: Vec<Complex64> = (0..10_000).map(|k| c.points()[(k * 5 + 3) % 8]).collect();
        let encoded = diff_encode(&inputs, reference).unwrap();
        // Outputs stay pinned to the unit circle despite the chain length.
        for e in &encoded {
            assert!((e.norm() - 1.0).abs() < 1e-12);
        }
        let decoded = diff_decode(&encoded, reference);
        for (d, s) in decoded.iter().zip(&inputs) {
            assert!((d - s).norm() < 1e-9);
        }
    }

    #[test]
    fn diff_decode_is_phase_rotation_invariant() {
        // A common phase rotation of the whole received chain cancels in the
        // conjugate product -- the property that makes DPSK work unequalized.
        let inputs: Vec<Complex64> = (0..64)
            .map(|k| Complex64::from_polar(1.0, TAU * ((k * 3) % 4) as f64 / 4.0))
            .collect();
        let reference = Complex64::new(1.0, 0.0);
        let encoded = diff_encode(&inputs, reference).unwrap();
        let rot = Complex64::from_polar(1.7, 0.9); // gain and phase offset
        let mut chain = vec![reference * rot];
        chain.extend(encoded.iter().map(|&e| e * rot));
        let decoded = diff_decode(&chain[1..], chain[0]);
        for (d, s) in decoded.iter().zip(&inputs) {
            // Magnitudes scale by |rot| but phases must match exactly.
            let phase_err = (d / d.norm() - s).norm();
            assert!(phase_err < 1e-9);
        }
    }

    #[test]
    fn diff_decode_zero_predecessor_falls_back_to_reference() {
        let reference = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let r = Complex64::from_polar(1.0, 0.25);
        let out = diff_decode(&[zero, r], reference);
        assert_eq!(out[0], zero);
        // Predecessor was exactly zero, so r is referenced against the
        // initial reference instead.
        assert!((out[1] - r).norm() < 1e-12);
    }
}
